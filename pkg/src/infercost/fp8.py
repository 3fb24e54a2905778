"""Software model of 8-bit floating-point formats.

Covers grid enumeration for the two E4M3 variants and E5M2, round-to-
nearest-even and stochastic rounding onto a grid, scale computation under
three scale-domain policies, tensor quantization, error statistics, and a
compact binary dump of quantized tensors.

Values out of range saturate to the largest finite magnitude in both
rounding modes; quantization therefore never produces NaN or infinity
codes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InfercostError, UnknownFormatError
from .formats import normalize_format

RTN = "rtn"
SR = "sr"

PER_TENSOR = "per-tensor"
PER_ROW = "per-row"

UNRESTRICTED = "unrestricted"
POW2 = "pow2"
FIXED_SET = "fixed-set"

SINGLE_NAN = "single-nan"
IEEE_RESERVED = "ieee-reserved"


@dataclass(frozen=True)
class Fp8Format:
    """Bit layout and special-value policy of one 8-bit float format.

    single-nan reserves only the all-ones code per sign for NaN (no
    infinities), so the rest of the top exponent row is usable as finite
    values.  ieee-reserved gives the whole top exponent row to inf/NaN.
    """

    name: str
    exponent_bits: int
    mantissa_bits: int
    bias: int
    special_policy: str

    def __post_init__(self):
        if self.exponent_bits + self.mantissa_bits + 1 != 8:
            raise InfercostError("sign + exponent + mantissa bits must total 8")
        if self.special_policy not in (SINGLE_NAN, IEEE_RESERVED):
            raise InfercostError(f"unknown special-value policy {self.special_policy!r}")

    @property
    def max_finite(self) -> float:
        return float(grid(self)[-1])


E4M3_OCP = Fp8Format("e4m3-ocp", exponent_bits=4, mantissa_bits=3, bias=7,
                     special_policy=SINGLE_NAN)
E4M3_G2 = Fp8Format("e4m3-g2", exponent_bits=4, mantissa_bits=3, bias=7,
                    special_policy=IEEE_RESERVED)
E5M2 = Fp8Format("e5m2", exponent_bits=5, mantissa_bits=2, bias=15,
                 special_policy=IEEE_RESERVED)

FORMATS = {fmt.name: fmt for fmt in (E4M3_OCP, E4M3_G2, E5M2)}
_FORMAT_IDS = {"e4m3-ocp": 0, "e4m3-g2": 1, "e5m2": 2}
_FORMAT_BY_ID = {v: k for k, v in _FORMAT_IDS.items()}


def get_format(name) -> Fp8Format:
    """Look up a format by name; accepts the plain or fp8- prefixed form."""
    if isinstance(name, Fp8Format):
        return name
    key = normalize_format(str(name))
    if key.startswith("fp8-"):
        key = key[len("fp8-"):]
    try:
        return FORMATS[key]
    except KeyError:
        known = ", ".join(sorted(FORMATS))
        raise UnknownFormatError(f"unknown fp8 format {name!r} (known: {known})") from None


@lru_cache(maxsize=None)
def _grid_tuple(fmt: Fp8Format) -> tuple[float, ...]:
    mb = fmt.mantissa_bits
    max_exp_field = (1 << fmt.exponent_bits) - 1
    values = []
    for code in range(128):
        e = code >> mb
        m = code & ((1 << mb) - 1)
        if fmt.special_policy == IEEE_RESERVED and e == max_exp_field:
            continue
        if fmt.special_policy == SINGLE_NAN and e == max_exp_field and m == (1 << mb) - 1:
            continue
        if e == 0:
            value = m * 2.0 ** (1 - fmt.bias - mb)
        else:
            value = (1.0 + m / (1 << mb)) * 2.0 ** (e - fmt.bias)
        values.append(value)
    return tuple(values)


def grid(fmt: Fp8Format) -> np.ndarray:
    """All nonnegative finite magnitudes, ascending, zero included.

    Reserved codes sit above every finite code, so the index of a value in
    this array equals its nonnegative code.
    """
    return np.array(_grid_tuple(get_format(fmt)), dtype=np.float64)


def enumerate_grid(fmt: Fp8Format) -> list[float]:
    """grid() as a plain list of floats."""
    return [float(v) for v in _grid_tuple(get_format(fmt))]


@dataclass(frozen=True)
class GridNeighbors:
    """Bracketing grid values of a real x and the SR up-probability."""

    x_down: float
    x_up: float
    p_up: float


def neighbors(x: float, fmt: Fp8Format) -> GridNeighbors:
    """Bracketing signed-grid values of x; saturates beyond the grid edge."""
    fmt = get_format(fmt)
    if not math.isfinite(x):
        raise InfercostError(f"cannot bracket non-finite value {x!r}")
    g = grid(fmt)
    mag = abs(x)
    if mag >= g[-1]:
        edge = math.copysign(g[-1], x)
        return GridNeighbors(x_down=edge, x_up=edge, p_up=0.0)
    hi = int(np.searchsorted(g, mag, side="left"))
    lo = hi if g[hi] == mag else hi - 1
    down, up = float(g[lo]), float(g[hi])
    if x < 0:
        down, up = -up, -down
    p_up = 0.0 if up == down else (x - down) / (up - down)
    return GridNeighbors(x_down=down, x_up=up, p_up=p_up)


def _round_magnitudes(mag: np.ndarray, g: np.ndarray, mode: str, u: np.ndarray | None) -> np.ndarray:
    """Round nonnegative magnitudes onto grid g, returning grid indices."""
    hi = np.searchsorted(g, mag, side="left")
    saturated = hi >= len(g)
    hi = np.where(saturated, len(g) - 1, hi)
    exact = g[hi] == mag
    lo = np.where(exact, hi, np.maximum(hi - 1, 0))
    down = g[lo]
    up = g[hi]
    span = up - down
    if mode == RTN:
        dist_down = mag - down
        dist_up = up - mag
        pick_up = dist_up < dist_down
        # exact halfway: keep the candidate with the even code (= even index)
        tie = dist_up == dist_down
        pick_up = np.where(tie, hi % 2 == 0, pick_up)
    elif mode == SR:
        with np.errstate(invalid="ignore", divide="ignore"):
            p_up = np.where(span > 0, (mag - down) / np.where(span > 0, span, 1.0), 0.0)
        pick_up = u < p_up
    else:
        raise InfercostError(f"unknown rounding mode {mode!r}; use {RTN!r} or {SR!r}")
    idx = np.where(pick_up, hi, lo)
    idx = np.where(exact | saturated, hi, idx)
    return idx


def _prepare_rounding(x, fmt: Fp8Format, mode: str, rng):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InfercostError("cannot round non-finite values onto an fp8 grid")
    if mode == SR and rng is None:
        raise InfercostError("stochastic rounding needs an rng (e.g. numpy.random.default_rng)")
    # one uniform per element, drawn unconditionally, keeps the stream
    # layout independent of the data
    u = rng.random(arr.shape) if mode == SR else None
    idx = _round_magnitudes(np.abs(arr), grid(fmt), mode, u)
    return arr, idx


def round_to_grid(x, fmt: Fp8Format, mode: str = RTN, rng=None):
    """Round x (scalar or array) onto the format's grid.

    RTN picks the nearest grid value, ties to the even mantissa code.  SR
    picks the upper neighbor with probability proportional to proximity.
    Magnitudes beyond max_finite saturate deterministically in both modes.
    """
    fmt = get_format(fmt)
    arr, idx = _prepare_rounding(x, fmt, mode, rng)
    out = grid(fmt)[idx] * np.where(np.signbit(arr), -1.0, 1.0)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class QuantizedTensor:
    """Codes plus scales produced by quantize_tensor.

    codes holds sign-magnitude bytes: bit 7 is the sign, bits 0-6 index
    into grid(format).  scales has one entry for per-tensor quantization
    or one per row.  Dequantization divides decoded grid values by the
    matching scale.
    """

    codes: np.ndarray
    scales: np.ndarray
    format: Fp8Format
    original_shape: tuple[int, int]

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        scales = np.ascontiguousarray(self.scales, dtype=np.float64)
        if codes.ndim != 2:
            raise InfercostError("codes must be a 2-d array")
        if scales.ndim != 1 or len(scales) not in (1, codes.shape[0]):
            raise InfercostError("need one scale, or one per code row")
        if not np.all(np.isfinite(scales)) or not np.all(scales > 0):
            raise InfercostError("scales must be finite and > 0")
        if tuple(self.original_shape) != codes.shape:
            raise InfercostError("original_shape must match the code matrix")
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "original_shape", tuple(self.original_shape))


@dataclass(frozen=True)
class ScalingPolicy:
    """How scales are chosen before rounding.

    granularity: one scale for the whole tensor or one per row.
    scale_domain: unrestricted picks max_finite/amax exactly; pow2 rounds
    that ideal down to a power of two; fixed-set picks the largest set
    member not above the ideal (or the smallest member if none fits).
    """

    granularity: str = PER_TENSOR
    scale_domain: str = UNRESTRICTED
    fixed_set: tuple[float, ...] = ()

    def __post_init__(self):
        if self.granularity not in (PER_TENSOR, PER_ROW):
            raise InfercostError(f"unknown granularity {self.granularity!r}")
        if self.scale_domain not in (UNRESTRICTED, POW2, FIXED_SET):
            raise InfercostError(f"unknown scale domain {self.scale_domain!r}")
        fixed = tuple(float(v) for v in self.fixed_set)
        if self.scale_domain == FIXED_SET:
            if not fixed:
                raise InfercostError("fixed-set scaling needs a nonempty fixed_set")
            if list(fixed) != sorted(fixed):
                raise InfercostError("fixed_set must be ascending")
            for v in fixed:
                frac, _ = math.frexp(v)
                if v <= 0 or frac != 0.5:
                    raise InfercostError(f"fixed_set entries must be powers of 2, got {v!r}")
            if self.granularity == PER_ROW:
                # the fixed hardware scale set applies per tensor only
                raise InfercostError("fixed-set scaling is limited to per-tensor granularity")
        object.__setattr__(self, "fixed_set", fixed)


# the four hardware-accelerated per-tensor scale factors
GAUDI2_FIXED_SET = (2.0 ** -8, 2.0 ** -4, 1.0, 2.0 ** 4)


def compute_scale(amax: float, fmt: Fp8Format, policy: ScalingPolicy) -> float:
    """Scale such that amax * scale lands inside the representable range."""
    fmt = get_format(fmt)
    if not math.isfinite(amax) or amax < 0:
        raise InfercostError(f"amax must be finite and >= 0, got {amax!r}")
    if amax == 0:
        return 1.0
    ideal = fmt.max_finite / amax
    if policy.scale_domain == UNRESTRICTED:
        return ideal
    if policy.scale_domain == POW2:
        frac, exp = math.frexp(ideal)  # ideal = frac * 2**exp, frac in [0.5, 1)
        return 2.0 ** (exp - 1)
    below = [v for v in policy.fixed_set if v <= ideal]
    return below[-1] if below else policy.fixed_set[0]


def _as_matrix(t) -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64)
    if arr.ndim > 2:
        raise InfercostError(f"expected a vector or matrix, got ndim={arr.ndim}")
    arr = np.atleast_2d(arr)
    if arr.size == 0:
        raise InfercostError("cannot quantize an empty tensor")
    return arr


def quantize_tensor(t, fmt: Fp8Format, policy: ScalingPolicy | None = None,
                    mode: str = RTN, rng=None) -> QuantizedTensor:
    """Scale a real matrix and round it onto the format's grid.

    Vectors are treated as one-row matrices.  Per-row granularity computes
    an independent amax and scale per row; rounding then proceeds exactly
    as per-tensor rounding of each scaled row.
    """
    fmt = get_format(fmt)
    policy = policy or ScalingPolicy()
    arr = _as_matrix(t)
    if not np.all(np.isfinite(arr)):
        raise InfercostError("cannot quantize non-finite values")
    if policy.granularity == PER_ROW:
        amaxes = np.max(np.abs(arr), axis=1)
    else:
        amaxes = np.array([np.max(np.abs(arr))])
    scales = np.array([compute_scale(float(a), fmt, policy) for a in amaxes])
    scaled = arr * scales[:, None] if policy.granularity == PER_ROW else arr * scales[0]
    scaled, idx = _prepare_rounding(scaled, fmt, mode, rng)
    codes = idx.astype(np.uint8)
    codes |= np.where(scaled < 0, np.uint8(0x80), np.uint8(0))
    return QuantizedTensor(codes=codes, scales=scales, format=fmt,
                           original_shape=arr.shape)


def dequantize(qt: QuantizedTensor) -> np.ndarray:
    """Decode codes back to real values (grid value over scale)."""
    g = grid(qt.format)
    mags = g[qt.codes & 0x7F]
    signs = np.where(qt.codes & 0x80, -1.0, 1.0)
    values = mags * signs
    if len(qt.scales) == 1:
        return values / qt.scales[0]
    return values / qt.scales[:, None]


@dataclass(frozen=True)
class ErrorStats:
    """Elementwise error summary between a tensor and its round trip."""

    max_abs_err: float
    mse: float
    max_rel_err: float


def quant_error(t, qt: QuantizedTensor) -> ErrorStats:
    """Error statistics of dequantize(qt) against the original tensor.

    Relative error is measured where the reference is nonzero; a tensor of
    all zeros reports zero relative error.
    """
    ref = _as_matrix(t)
    got = dequantize(qt)
    if ref.shape != got.shape:
        raise InfercostError(f"shape mismatch: tensor {ref.shape} vs codes {got.shape}")
    err = np.abs(got - ref)
    nonzero = ref != 0
    max_rel = float(np.max(err[nonzero] / np.abs(ref[nonzero]))) if np.any(nonzero) else 0.0
    return ErrorStats(
        max_abs_err=float(np.max(err)),
        mse=float(np.mean((got - ref) ** 2)),
        max_rel_err=max_rel,
    )


_MAGIC = b"FP8Q"
_VERSION = 1


def dump_quantized(qt: QuantizedTensor) -> bytes:
    """Serialize to the FP8Q binary layout.

    magic 'FP8Q', version byte, format id byte, then rows/cols/nscales as
    little-endian u32, the row-major code bytes, and the scales as
    little-endian float64.
    """
    rows, cols = qt.codes.shape
    header = _MAGIC + struct.pack(
        "<BBIII", _VERSION, _FORMAT_IDS[qt.format.name], rows, cols, len(qt.scales)
    )
    return header + qt.codes.tobytes(order="C") + qt.scales.astype("<f8").tobytes()


def load_quantized(data: bytes) -> QuantizedTensor:
    """Parse bytes produced by dump_quantized."""
    head = len(_MAGIC) + struct.calcsize("<BBIII")
    if len(data) < head or data[:4] != _MAGIC:
        raise InfercostError("not an FP8Q dump (bad magic or truncated header)")
    version, fmt_id, rows, cols, nscales = struct.unpack("<BBIII", data[4:head])
    if version != _VERSION:
        raise InfercostError(f"unsupported FP8Q version {version}")
    if fmt_id not in _FORMAT_BY_ID:
        raise InfercostError(f"unknown FP8Q format id {fmt_id}")
    expected = head + rows * cols + 8 * nscales
    if len(data) != expected:
        raise InfercostError(f"FP8Q dump length {len(data)} != expected {expected}")
    codes = np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=head)
    scales = np.frombuffer(data, dtype="<f8", count=nscales, offset=head + rows * cols)
    fmt = FORMATS[_FORMAT_BY_ID[fmt_id]]
    top = int(np.max(codes & 0x7F)) if codes.size else 0
    if top >= len(grid(fmt)):
        raise InfercostError(f"FP8Q dump contains out-of-grid code index {top}")
    return QuantizedTensor(
        codes=codes.reshape(rows, cols).copy(),
        scales=scales.astype(np.float64),
        format=fmt,
        original_shape=(rows, cols),
    )
