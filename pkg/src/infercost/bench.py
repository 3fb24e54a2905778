"""Benchmark-record ingestion and derived analytics.

Records live in CSV files with the header

    device,fmt,kind,M,K,N,model,batch,seqlen,latency_s,tflops,power_w,power_cap_w

plus an optional trailing ``scaling`` column naming the scaling-factor
granularity of an FP8 run (needed when the same shape was measured under
several granularities).  GEMM records fill M/K/N; prefill and decode
records fill model/batch/seqlen.  Exactly one of latency_s and tflops is
present per record.  Lines starting with '#' are comments.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import BenchParseError, InfercostError, MissingDataError
from .flops import GemmShape, gemm_flops
from .formats import normalize_format
from .registry import DeviceRegistry, HardwareSpec
from .roofline import MfuReport, mfu

GEMM = "gemm"
PREFILL = "prefill"
DECODE = "decode"
KINDS = (GEMM, PREFILL, DECODE)

BENCH_COLUMNS = (
    "device", "fmt", "kind", "M", "K", "N", "model", "batch", "seqlen",
    "latency_s", "tflops", "power_w", "power_cap_w",
)
SCALING_COLUMN = "scaling"


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark measurement."""

    device: str
    fmt: str
    kind: str
    shape: GemmShape | None = None
    model: str | None = None
    batch: int | None = None
    seqlen: int | None = None
    latency_s: float | None = None
    tflops: float | None = None
    power_w: float | None = None
    power_cap_w: float | None = None
    scaling: str | None = None

    def __post_init__(self):
        if not self.device:
            raise BenchParseError("device must be nonempty")
        object.__setattr__(self, "fmt", normalize_format(self.fmt))
        if self.kind not in KINDS:
            raise BenchParseError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == GEMM:
            if self.shape is None:
                raise BenchParseError("gemm records need M, K, N")
            if self.model is not None or self.batch is not None or self.seqlen is not None:
                raise BenchParseError("gemm records must leave model/batch/seqlen empty")
        else:
            if self.shape is not None:
                raise BenchParseError(f"{self.kind} records must leave M/K/N empty")
            if self.model is None or self.batch is None or self.seqlen is None:
                raise BenchParseError(f"{self.kind} records need model, batch and seqlen")
        if (self.latency_s is None) == (self.tflops is None):
            raise BenchParseError("exactly one of latency_s and tflops must be present")
        for field in ("batch", "seqlen"):
            value = getattr(self, field)
            if value is not None and value < 1:
                raise BenchParseError(f"{field} must be positive, got {value}")
        for field in ("latency_s", "tflops", "power_w", "power_cap_w"):
            value = getattr(self, field)
            if value is not None and not value > 0:
                raise BenchParseError(f"{field} must be positive, got {value}")

    @property
    def key(self) -> tuple:
        """Identity of the measured configuration (metric values excluded)."""
        work = self.shape.as_tuple() if self.shape is not None else (
            self.model, self.batch, self.seqlen)
        return (self.device, self.fmt, self.kind, work, self.scaling, self.power_cap_w)


@dataclass(frozen=True)
class BenchDataset:
    """Validated, immutable collection of benchmark records."""

    records: tuple[BenchRecord, ...]

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def filter(self, **criteria) -> "BenchDataset":
        """Records whose attributes equal all given criteria.

        ``shape`` may be a GemmShape or a plain (M, K, N) tuple.
        """
        if "shape" in criteria and isinstance(criteria["shape"], tuple):
            criteria["shape"] = GemmShape(*criteria["shape"])
        matched = tuple(
            r for r in self.records
            if all(getattr(r, name) == want for name, want in criteria.items())
        )
        return BenchDataset(records=matched)

    def one(self, **criteria) -> BenchRecord:
        found = self.filter(**criteria)
        if len(found) != 1:
            raise MissingDataError(
                f"expected exactly one record matching {criteria}, found {len(found)}"
            )
        return found.records[0]


def _parse_int(value: str, column: str, lineno: int, source: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise BenchParseError(f"{source}:{lineno}: {column} must be an integer, got {value!r}") from None


def _parse_float(value: str, column: str, lineno: int, source: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise BenchParseError(f"{source}:{lineno}: {column} must be a number, got {value!r}") from None


def parse_records(text: str, source: str = "<bench>") -> BenchDataset:
    """Parse bench CSV text; see the module docstring for the schema."""
    numbered = [
        (lineno, line) for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        return BenchDataset(records=())
    linenos = [n for n, _ in numbered]
    rows = list(csv.reader(line for _, line in numbered))

    header = [cell.strip() for cell in rows[0]]
    with_scaling = header == list(BENCH_COLUMNS) + [SCALING_COLUMN]
    if not with_scaling and header != list(BENCH_COLUMNS):
        raise BenchParseError(
            f"{source}:{linenos[0]}: bad header; expected "
            f"{','.join(BENCH_COLUMNS)} (optionally + ,{SCALING_COLUMN})"
        )
    ncols = len(header)

    records: list[BenchRecord] = []
    seen: dict[tuple, int] = {}
    for lineno, row in zip(linenos[1:], rows[1:]):
        if len(row) != ncols:
            raise BenchParseError(
                f"{source}:{lineno}: expected {ncols} fields, got {len(row)}"
            )
        cell = dict(zip(header, (c.strip() for c in row)))

        def opt(column, parse):
            return parse(cell[column], column, lineno, source) if cell.get(column) else None

        m, k, n = (opt(c, _parse_int) for c in ("M", "K", "N"))
        if (m is None) != (k is None) or (k is None) != (n is None):
            raise BenchParseError(f"{source}:{lineno}: M, K, N must be given together")
        try:
            shape = GemmShape(m, k, n) if m is not None else None
            record = BenchRecord(
                device=cell["device"],
                fmt=cell["fmt"],
                kind=cell["kind"],
                shape=shape,
                model=cell["model"] or None,
                batch=opt("batch", _parse_int),
                seqlen=opt("seqlen", _parse_int),
                latency_s=opt("latency_s", _parse_float),
                tflops=opt("tflops", _parse_float),
                power_w=opt("power_w", _parse_float),
                power_cap_w=opt("power_cap_w", _parse_float),
                scaling=(cell.get(SCALING_COLUMN) or None) if with_scaling else None,
            )
        except InfercostError as exc:
            raise BenchParseError(f"{source}:{lineno}: {exc}") from None
        if record.key in seen:
            raise BenchParseError(
                f"{source}:{lineno}: duplicate record key {record.key} "
                f"(first seen on line {seen[record.key]})"
            )
        seen[record.key] = lineno
        records.append(record)
    return BenchDataset(records=tuple(records))


def ingest_records(path: str | os.PathLike) -> BenchDataset:
    """Load and validate a bench CSV file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BenchParseError(f"bench file not found: {p}") from None
    except OSError as exc:
        raise BenchParseError(f"cannot read bench file {p}: {exc}") from None
    return parse_records(text, source=str(p))


def derive_tflops(record: BenchRecord, flops: int) -> float:
    """Throughput from a latency record and an externally computed FLOPs count."""
    if record.latency_s is None:
        raise MissingDataError("record carries no latency; tflops is already given")
    return flops / record.latency_s / 1e12


@dataclass(frozen=True)
class PowerCapComparison:
    """Throughput with and without an administrative power cap."""

    uncapped_tflops: float
    capped_tflops: float

    @property
    def slowdown_fraction(self) -> float:
        return (self.uncapped_tflops - self.capped_tflops) / self.uncapped_tflops


def powercap_slowdown(uncapped: BenchRecord, capped: BenchRecord) -> PowerCapComparison:
    """Pair two records differing only in power cap into a comparison."""
    key_u = uncapped.key[:-1]
    key_c = capped.key[:-1]
    if key_u != key_c:
        raise InfercostError(
            f"records measure different configurations: {key_u} vs {key_c}"
        )
    if uncapped.tflops is None or capped.tflops is None:
        raise MissingDataError("power-cap comparison needs tflops on both records")
    return PowerCapComparison(uncapped_tflops=uncapped.tflops, capped_tflops=capped.tflops)


def throughput_ratio(dataset: BenchDataset, device_a: str, device_b: str, **selector) -> float:
    """R_Th input for the TCO model: tflops of A over tflops of B.

    The selector (fmt, kind, shape, model, batch, seqlen, ...) must match
    exactly one tflops-carrying record per device.
    """
    ratio = []
    for device in (device_a, device_b):
        record = dataset.one(device=device, **selector)
        if record.tflops is None:
            raise MissingDataError(f"record for {device!r} carries latency, not tflops")
        ratio.append(record.tflops)
    return ratio[0] / ratio[1]


@dataclass(frozen=True)
class MfuTable:
    """Per-record utilization, plus the records that could not be scored."""

    entries: tuple[tuple[BenchRecord, MfuReport], ...]
    skipped: tuple[tuple[BenchRecord, str], ...]


def mfu_table(dataset: BenchDataset, registry: DeviceRegistry) -> MfuTable:
    """Score every record against its device's peak for the record format.

    GEMM latency records are converted to tflops first.  Records whose
    device or format peak is missing are skipped and reported rather than
    failing the whole table.
    """
    entries = []
    skipped = []
    for record in dataset:
        if record.device not in registry.devices:
            skipped.append((record, f"device {record.device!r} not in registry"))
            continue
        spec = registry.devices[record.device]
        if not spec.has_peak(record.fmt):
            skipped.append((record, f"no {record.fmt!r} peak for {record.device!r}"))
            continue
        if record.tflops is not None:
            measured = record.tflops
        elif record.kind == GEMM:
            measured = derive_tflops(record, gemm_flops(record.shape))
        else:
            skipped.append((record, "latency-only phase record; cannot derive tflops"))
            continue
        entries.append((record, mfu(measured, spec, record.fmt)))
    return MfuTable(entries=tuple(entries), skipped=tuple(skipped))


GPU_GENERATION_COLUMNS = ("device", "fmt", "peak_tflops", "tdp_w")


@dataclass(frozen=True)
class GpuGeneration:
    """One accelerator generation reduced to a single peak and its TDP."""

    spec: HardwareSpec
    fmt: str


def parse_gpu_generations(text: str, source: str = "<generations>") -> list[GpuGeneration]:
    """Parse the device,fmt,peak_tflops,tdp_w table, preserving row order."""
    numbered = [
        (lineno, line) for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        return []
    rows = list(csv.reader(line for _, line in numbered))
    linenos = [n for n, _ in numbered]
    header = [cell.strip() for cell in rows[0]]
    if header != list(GPU_GENERATION_COLUMNS):
        raise BenchParseError(
            f"{source}:{linenos[0]}: bad header; expected {','.join(GPU_GENERATION_COLUMNS)}"
        )
    generations = []
    for lineno, row in zip(linenos[1:], rows[1:]):
        if len(row) != len(header):
            raise BenchParseError(f"{source}:{lineno}: expected {len(header)} fields")
        device, fmt, peak, tdp = (c.strip() for c in row)
        fmt = normalize_format(fmt)
        try:
            spec = HardwareSpec(
                name=device,
                peak_tflops={fmt: _parse_float(peak, "peak_tflops", lineno, source)},
                tdp=_parse_float(tdp, "tdp_w", lineno, source),
            )
        except InfercostError as exc:
            raise BenchParseError(f"{source}:{lineno}: {exc}") from None
        generations.append(GpuGeneration(spec=spec, fmt=fmt))
    return generations


def load_gpu_generations(path: str | os.PathLike) -> list[GpuGeneration]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BenchParseError(f"file not found: {p}") from None
    return parse_gpu_generations(text, source=str(p))
