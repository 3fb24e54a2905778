"""Computational intensity, roofline bounds, and phase-level estimates.

Throughput of an operation is modeled as min(peak, bandwidth * CI) where
CI is FLOPs per byte of traffic.  Multi-component estimates time each
component at max(compute time, memory time) and sum the times; a device
with no published compute peak for a component's format is bounded by
memory traffic alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfercostError, MissingDataError
from .flops import GemmShape, SequenceBatch, decode_step_flops, forward_flops, gemm_flops
from .formats import BF16, FP8, element_bytes, normalize_format
from .registry import HardwareSpec, ModelConfig

WEIGHTS_ONLY = "weights-only"
FULL_IO = "full-io"

COMPUTE = "compute"
MEMORY = "memory"


@dataclass(frozen=True)
class TrafficModel:
    """Which GEMM operand bytes count toward memory traffic.

    weights-only counts just the K*N weight matrix (the decode regime:
    activations stay resident, weights stream from HBM).  full-io adds the
    M*K activation read and the M*N output write.  activations defaults to
    the weight format; output defaults to BF16.
    """

    kind: str = WEIGHTS_ONLY
    weights: str = FP8
    activations: str | None = None
    output: str = BF16

    def __post_init__(self):
        if self.kind not in (WEIGHTS_ONLY, FULL_IO):
            raise InfercostError(f"unknown traffic kind {self.kind!r}")
        object.__setattr__(self, "weights", normalize_format(self.weights))
        if self.activations is not None:
            object.__setattr__(self, "activations", normalize_format(self.activations))
        object.__setattr__(self, "output", normalize_format(self.output))

    def bytes_moved(self, shape: GemmShape) -> int:
        weight_bytes = shape.k * shape.n * element_bytes(self.weights)
        if self.kind == WEIGHTS_ONLY:
            return weight_bytes
        act_fmt = self.weights if self.activations is None else self.activations
        return (
            shape.m * shape.k * element_bytes(act_fmt)
            + weight_bytes
            + shape.m * shape.n * element_bytes(self.output)
        )


def computational_intensity(shape: GemmShape, traffic: TrafficModel) -> float:
    """FLOPs per byte: 2MKN over the traffic model's byte count."""
    return gemm_flops(shape) / traffic.bytes_moved(shape)


def _bandwidth_tb(spec: HardwareSpec) -> float:
    if spec.hbm_bandwidth is None:
        raise MissingDataError(
            f"device {spec.name!r} has no published memory bandwidth; "
            "bandwidth-bound estimates need hbm_bandwidth in the registry"
        )
    return spec.hbm_bandwidth


def saturation_ci(spec: HardwareSpec, fmt: str) -> float:
    """CI above which the device is compute-bound: peak / bandwidth."""
    return spec.peak(fmt) / _bandwidth_tb(spec)


def roofline_throughput(spec: HardwareSpec, fmt: str, ci: float) -> float:
    """Attainable TFLOPS at a given CI: min(peak, bandwidth * ci).

    A device with no published peak for the format is bounded by the
    memory roof alone (missing bandwidth is still an error).
    """
    if ci < 0:
        raise InfercostError(f"computational intensity must be >= 0, got {ci!r}")
    memory_roof = _bandwidth_tb(spec) * ci
    if not spec.has_peak(fmt):
        return memory_roof
    return min(spec.peak(fmt), memory_roof)


def kv_attention_bound(spec: HardwareSpec, g: int, kv_fmt: str = BF16) -> float:
    """Bandwidth-imposed TFLOPS ceiling on decode attention.

    Each cached KV element is read once and feeds one query-head
    multiply-add per group member, so CI = 2g / bytes-per-element (g for
    BF16).  Returns bandwidth * CI.
    """
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        raise InfercostError(f"GQA group size must be a positive integer, got {g!r}")
    ci = 2 * g / element_bytes(kv_fmt)
    return _bandwidth_tb(spec) * ci


@dataclass(frozen=True)
class ComponentEstimate:
    """One roofline component: work, traffic, and the resulting time."""

    name: str
    flops: int
    bytes: int
    time: float
    bound: str

    @property
    def tflops(self) -> float:
        return self.flops / self.time / 1e12 if self.time > 0 else 0.0


@dataclass(frozen=True)
class RooflineEstimate:
    """Summed component times and the resulting aggregate throughput."""

    per_component: tuple[ComponentEstimate, ...]

    @property
    def time(self) -> float:
        return sum(c.time for c in self.per_component)

    @property
    def total_flops(self) -> int:
        return sum(c.flops for c in self.per_component)

    @property
    def tflops(self) -> float:
        return self.total_flops / self.time / 1e12

    @property
    def bound(self) -> str:
        slowest = max(self.per_component, key=lambda c: c.time)
        return slowest.bound


def _component(name: str, flops: int, nbytes: int, peak_tflops: float | None,
               bandwidth: float) -> ComponentEstimate:
    compute_time = flops / (peak_tflops * 1e12) if peak_tflops is not None else 0.0
    memory_time = nbytes / bandwidth
    if compute_time >= memory_time and peak_tflops is not None:
        return ComponentEstimate(name, flops, nbytes, compute_time, COMPUTE)
    return ComponentEstimate(name, flops, nbytes, memory_time, MEMORY)


@dataclass(frozen=True)
class DecodeFormats:
    """Per-component data formats for decode estimation.

    Linear-layer weights default to FP8; the LM head and the KV cache
    default to BF16 (the LM head matmul and attention run in 16-bit even
    when the linear layers are quantized).
    """

    linear: str = FP8
    lm_head: str = BF16
    kv_cache: str = BF16

    def __post_init__(self):
        object.__setattr__(self, "linear", normalize_format(self.linear))
        object.__setattr__(self, "lm_head", normalize_format(self.lm_head))
        object.__setattr__(self, "kv_cache", normalize_format(self.kv_cache))


def _peak_or_none(spec: HardwareSpec, fmt: str) -> float | None:
    return spec.peak(fmt) if spec.has_peak(fmt) else None


def decode_step_estimate(spec: HardwareSpec, model: ModelConfig, batch: SequenceBatch,
                         fmts: DecodeFormats | None = None) -> RooflineEstimate:
    """Roofline estimate of one batched decode step.

    Components: linear projections (weights streamed once per step), LM
    head (same), and attention (per-sequence KV reads).  FLOPs come from
    decode_step_flops; bytes from the weight/cache element counts times
    the per-component format widths.
    """
    fmts = fmts or DecodeFormats()
    bw = _bandwidth_tb(spec) * 1e12
    parts = decode_step_flops(model, batch)

    h, l = model.hidden, model.layers
    linear_elems = parts.linear // (2 * batch.batch)  # = A h^2 l, exact
    lm_head_elems = model.vocab * h
    kv_elems = 2 * (h // model.gqa_group) * l * batch.total_context

    return RooflineEstimate(per_component=(
        _component("linear", parts.linear, linear_elems * element_bytes(fmts.linear),
                   _peak_or_none(spec, fmts.linear), bw),
        _component("lm_head", parts.lm_head, lm_head_elems * element_bytes(fmts.lm_head),
                   _peak_or_none(spec, fmts.lm_head), bw),
        _component("attention", parts.attention, kv_elems * element_bytes(fmts.kv_cache),
                   _peak_or_none(spec, fmts.kv_cache), bw),
    ))


def gemm_estimate(spec: HardwareSpec, shape: GemmShape, traffic: TrafficModel) -> RooflineEstimate:
    """Roofline estimate for one bare GEMM under a traffic model."""
    return RooflineEstimate(per_component=(
        _component("gemm", gemm_flops(shape), traffic.bytes_moved(shape),
                   _peak_or_none(spec, traffic.weights), _bandwidth_tb(spec) * 1e12),
    ))


def prefill_estimate(spec: HardwareSpec, model: ModelConfig, s: int, fmt: str) -> RooflineEstimate:
    """Compute-bound prefill: forward-pass FLOPs at the format's peak."""
    if not isinstance(s, int) or isinstance(s, bool) or s < 1:
        raise InfercostError(f"prefill length must be a positive integer, got {s!r}")
    flops = forward_flops(model, s)
    peak = spec.peak(fmt)
    time = flops / (peak * 1e12)
    return RooflineEstimate(per_component=(
        ComponentEstimate("prefill", flops, 0, time, COMPUTE),
    ))


@dataclass(frozen=True)
class MfuReport:
    """Measured throughput as a fraction of the device peak."""

    measured_tflops: float
    peak_tflops: float

    @property
    def mfu(self) -> float:
        return self.measured_tflops / self.peak_tflops

    @property
    def exceeds_peak(self) -> bool:
        # a ratio above 1 means the peak (or the measurement) is wrong
        return self.mfu > 1.0


def mfu(measured_tflops: float, spec: HardwareSpec, fmt: str) -> MfuReport:
    """Model-FLOPs utilization: measured TFLOPS over the format's peak."""
    if not measured_tflops >= 0:
        raise InfercostError(f"measured TFLOPS must be >= 0, got {measured_tflops!r}")
    return MfuReport(measured_tflops=float(measured_tflops), peak_tflops=spec.peak(fmt))
