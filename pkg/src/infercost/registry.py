"""Hardware and model registry: domain types, file I/O, efficiency metrics.

Registry files are TOML documents with top-level ``devices`` and ``models``
arrays.  Every field maps one-to-one onto :class:`HardwareSpec` and
:class:`ModelConfig`; unknown keys are rejected so typos fail loudly.  Two
fixture registries ship inside the package (see :mod:`infercost.fixtures`).
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import InfercostError, MissingDataError, RegistryError, UnknownFormatError
from .formats import normalize_format

ENV_REGISTRY = "INFERCOST_REGISTRY"


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_count(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class HardwareSpec:
    """Published capability figures for one accelerator.

    ``peak_tflops`` maps data-format names to peak GEMM throughput in
    TFLOPS.  ``hbm_bandwidth`` is in TB/s.  Bandwidth and the vector-engine
    peak are optional: when a figure is not known it stays ``None`` and any
    operation needing it raises :class:`MissingDataError` instead of
    guessing.
    """

    name: str
    peak_tflops: Mapping[str, float]
    tdp: float
    hbm_bandwidth: float | None = None
    vector_peak_tflops: float | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise RegistryError(f"device name must be a nonempty string, got {self.name!r}")
        peaks = {}
        for fmt, value in dict(self.peak_tflops).items():
            key = normalize_format(fmt)
            if key in peaks:
                raise RegistryError(f"device {self.name!r}: duplicate peak for format {key!r}")
            if not _is_number(value) or not math.isfinite(value) or value <= 0:
                raise RegistryError(
                    f"device {self.name!r}: peak_tflops[{fmt!r}] must be a finite number > 0"
                )
            peaks[key] = float(value)
        object.__setattr__(self, "peak_tflops", peaks)
        if not _is_number(self.tdp) or not math.isfinite(self.tdp) or self.tdp <= 0:
            raise RegistryError(f"device {self.name!r}: tdp must be a finite number > 0")
        object.__setattr__(self, "tdp", float(self.tdp))
        for field in ("hbm_bandwidth", "vector_peak_tflops"):
            value = getattr(self, field)
            if value is None:
                continue
            if not _is_number(value) or not math.isfinite(value) or value <= 0:
                raise RegistryError(f"device {self.name!r}: {field} must be a finite number > 0")
            object.__setattr__(self, field, float(value))

    def peak(self, fmt: str) -> float:
        """Peak TFLOPS for a format; UnknownFormatError if not listed."""
        key = normalize_format(fmt)
        try:
            return self.peak_tflops[key]
        except KeyError:
            known = ", ".join(sorted(self.peak_tflops)) or "none"
            raise UnknownFormatError(
                f"device {self.name!r} lists no peak throughput for format {key!r} "
                f"(known: {known})"
            ) from None

    def has_peak(self, fmt: str) -> bool:
        return normalize_format(fmt) in self.peak_tflops

    @property
    def bandwidth_bytes_per_s(self) -> float:
        if self.hbm_bandwidth is None:
            raise MissingDataError(
                f"device {self.name!r} has no published memory bandwidth; "
                "supply hbm_bandwidth in the registry to use bandwidth-bound estimates"
            )
        return self.hbm_bandwidth * 1e12


@dataclass(frozen=True)
class ModelConfig:
    """Dense decoder-only transformer dimensions.

    layers, hidden, head_size, gqa_group and vocab are positive integers;
    intermediate_ratio is the ffn-width multiplier (intermediate size =
    ratio * hidden and must come out integral).
    """

    name: str
    layers: int
    hidden: int
    intermediate_ratio: float
    head_size: int
    gqa_group: int
    vocab: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise RegistryError(f"model name must be a nonempty string, got {self.name!r}")
        for field in ("layers", "hidden", "head_size", "gqa_group", "vocab"):
            value = getattr(self, field)
            if not _is_count(value) or value < 1:
                raise RegistryError(f"model {self.name!r}: {field} must be a positive integer")
        ratio = self.intermediate_ratio
        if isinstance(ratio, bool) or not isinstance(ratio, (int, float, Fraction)):
            raise RegistryError(f"model {self.name!r}: intermediate_ratio must be a number")
        if not math.isfinite(float(ratio)) or ratio <= 0:
            raise RegistryError(f"model {self.name!r}: intermediate_ratio must be finite and > 0")
        if self.hidden % self.head_size != 0:
            raise RegistryError(
                f"model {self.name!r}: hidden ({self.hidden}) not divisible by "
                f"head_size ({self.head_size})"
            )
        if (self.hidden // self.head_size) % self.gqa_group != 0:
            raise RegistryError(
                f"model {self.name!r}: head count ({self.hidden // self.head_size}) "
                f"not divisible by gqa_group ({self.gqa_group})"
            )
        if (Fraction(ratio) * self.hidden).denominator != 1:
            raise RegistryError(
                f"model {self.name!r}: intermediate_ratio * hidden must be an integer"
            )

    @property
    def heads(self) -> int:
        return self.hidden // self.head_size

    @property
    def kv_heads(self) -> int:
        return self.heads // self.gqa_group

    @property
    def intermediate(self) -> int:
        return int(Fraction(self.intermediate_ratio) * self.hidden)

    @property
    def linear_constant(self) -> Fraction:
        """Per-layer linear-FLOPs multiplier 3a + 2 + 2/g, kept exact."""
        return 3 * Fraction(self.intermediate_ratio) + 2 + Fraction(2, self.gqa_group)


@dataclass(frozen=True)
class DeviceRegistry:
    """Immutable name-indexed collections of devices and models."""

    devices: Mapping[str, HardwareSpec]
    models: Mapping[str, ModelConfig]

    def device(self, name: str) -> HardwareSpec:
        try:
            return self.devices[name]
        except KeyError:
            known = ", ".join(sorted(self.devices)) or "none"
            raise RegistryError(f"unknown device {name!r} (known: {known})") from None

    def model(self, name: str) -> ModelConfig:
        try:
            return self.models[name]
        except KeyError:
            known = ", ".join(sorted(self.models)) or "none"
            raise RegistryError(f"unknown model {name!r} (known: {known})") from None


_DEVICE_KEYS = {"name", "peak_tflops", "tdp", "hbm_bandwidth", "vector_peak_tflops"}
_MODEL_KEYS = {"name", "layers", "hidden", "intermediate_ratio", "head_size", "gqa_group", "vocab"}


def _entry_dict(entry, what: str, index: int, source: str) -> dict:
    if not isinstance(entry, dict):
        raise RegistryError(f"{source}: {what}[{index}] must be a table")
    return entry


def _check_keys(entry: dict, allowed: set, what: str, index: int, source: str) -> None:
    unknown = sorted(set(entry) - allowed)
    if unknown:
        raise RegistryError(f"{source}: {what}[{index}]: unknown keys {unknown}")
    if "name" not in entry:
        raise RegistryError(f"{source}: {what}[{index}]: missing required key 'name'")


def loads_registry(text: str, source: str = "<registry>") -> DeviceRegistry:
    """Parse registry TOML text into a DeviceRegistry."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise RegistryError(f"{source}: {exc}") from None
    unknown = sorted(set(doc) - {"devices", "models"})
    if unknown:
        raise RegistryError(f"{source}: unknown top-level keys {unknown}")
    for key in ("devices", "models"):
        if key in doc and not isinstance(doc[key], list):
            raise RegistryError(f"{source}: {key!r} must be an array of tables")

    devices: dict[str, HardwareSpec] = {}
    for i, entry in enumerate(doc.get("devices", [])):
        entry = _entry_dict(entry, "devices", i, source)
        _check_keys(entry, _DEVICE_KEYS, "devices", i, source)
        if "tdp" not in entry:
            raise RegistryError(f"{source}: devices[{i}]: missing required key 'tdp'")
        peaks = entry.get("peak_tflops", {})
        if not isinstance(peaks, dict):
            raise RegistryError(f"{source}: devices[{i}]: peak_tflops must be a table")
        try:
            spec = HardwareSpec(
                name=entry["name"],
                peak_tflops=peaks,
                tdp=entry["tdp"],
                hbm_bandwidth=entry.get("hbm_bandwidth"),
                vector_peak_tflops=entry.get("vector_peak_tflops"),
            )
        except InfercostError as exc:
            raise RegistryError(f"{source}: devices[{i}]: {exc}") from None
        if spec.name in devices:
            raise RegistryError(f"{source}: devices[{i}]: duplicate device name {spec.name!r}")
        devices[spec.name] = spec

    models: dict[str, ModelConfig] = {}
    for i, entry in enumerate(doc.get("models", [])):
        entry = _entry_dict(entry, "models", i, source)
        _check_keys(entry, _MODEL_KEYS, "models", i, source)
        missing = sorted(_MODEL_KEYS - set(entry))
        if missing:
            raise RegistryError(f"{source}: models[{i}]: missing required keys {missing}")
        try:
            model = ModelConfig(
                name=entry["name"],
                layers=entry["layers"],
                hidden=entry["hidden"],
                intermediate_ratio=entry["intermediate_ratio"],
                head_size=entry["head_size"],
                gqa_group=entry["gqa_group"],
                vocab=entry["vocab"],
            )
        except InfercostError as exc:
            raise RegistryError(f"{source}: models[{i}]: {exc}") from None
        if model.name in models:
            raise RegistryError(f"{source}: models[{i}]: duplicate model name {model.name!r}")
        models[model.name] = model

    return DeviceRegistry(devices=devices, models=models)


def load_registry(path: str | os.PathLike) -> DeviceRegistry:
    """Load a registry file; see loads_registry for the document schema."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise RegistryError(f"registry file not found: {p}") from None
    except OSError as exc:
        raise RegistryError(f"cannot read registry file {p}: {exc}") from None
    return loads_registry(text, source=str(p))


def merge_registries(*registries: DeviceRegistry) -> DeviceRegistry:
    """Union registries; later arguments override earlier same-name entries."""
    devices: dict[str, HardwareSpec] = {}
    models: dict[str, ModelConfig] = {}
    for reg in registries:
        devices.update(reg.devices)
        models.update(reg.models)
    return DeviceRegistry(devices=devices, models=models)


def default_registry(override_path: str | os.PathLike | None = None) -> DeviceRegistry:
    """Packaged fixture registry, overlaid with the user's own entries.

    When ``override_path`` is given it is loaded on top of the packaged
    entries; otherwise the INFERCOST_REGISTRY environment variable, when
    set, plays that role.
    """
    from .fixtures import fixture_text

    base = merge_registries(
        loads_registry(fixture_text("devices_paper.cfg"), "devices_paper.cfg"),
        loads_registry(fixture_text("models_llama.cfg"), "models_llama.cfg"),
    )
    if override_path is None:
        env = os.environ.get(ENV_REGISTRY, "").strip()
        override_path = env or None
    if override_path is not None:
        base = merge_registries(base, load_registry(override_path))
    return base


_BARE_KEY = re.compile(r"^[A-Za-z0-9_-]+$")


def _toml_key(key: str) -> str:
    if _BARE_KEY.match(key):
        return key
    return _toml_str(key)


def _toml_str(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _toml_num(value) -> str:
    # repr of a finite float round-trips exactly and always carries '.' or 'e'
    return repr(float(value))


def dumps_registry(registry: DeviceRegistry) -> str:
    """Render a registry back to TOML; loads_registry(dumps) == registry."""
    lines: list[str] = []
    for spec in registry.devices.values():
        lines.append("[[devices]]")
        lines.append(f"name = {_toml_str(spec.name)}")
        peaks = ", ".join(
            f"{_toml_key(fmt)} = {_toml_num(v)}" for fmt, v in sorted(spec.peak_tflops.items())
        )
        lines.append("peak_tflops = { %s }" % peaks if peaks else "peak_tflops = {}")
        lines.append(f"tdp = {_toml_num(spec.tdp)}")
        if spec.hbm_bandwidth is not None:
            lines.append(f"hbm_bandwidth = {_toml_num(spec.hbm_bandwidth)}")
        if spec.vector_peak_tflops is not None:
            lines.append(f"vector_peak_tflops = {_toml_num(spec.vector_peak_tflops)}")
        lines.append("")
    for model in registry.models.values():
        lines.append("[[models]]")
        lines.append(f"name = {_toml_str(model.name)}")
        lines.append(f"layers = {model.layers}")
        lines.append(f"hidden = {model.hidden}")
        lines.append(f"intermediate_ratio = {_toml_num(model.intermediate_ratio)}")
        lines.append(f"head_size = {model.head_size}")
        lines.append(f"gqa_group = {model.gqa_group}")
        lines.append(f"vocab = {model.vocab}")
        lines.append("")
    return "\n".join(lines)


def tflops_per_watt(spec: HardwareSpec, fmt: str) -> float:
    """Energy efficiency: peak TFLOPS for the format divided by TDP."""
    return spec.peak(fmt) / spec.tdp


def _round_half_away(x: float) -> int:
    if x >= 0:
        return math.floor(x + 0.5)
    return math.ceil(x - 0.5)


def efficiency_increase(
    prev: HardwareSpec, cur: HardwareSpec, fmt: str, prev_fmt: str | None = None
) -> int:
    """Percent efficiency gain of cur over prev, as a rounded integer.

    Computed from the unrounded TFLOPS/W values, then rounded half away
    from zero.  ``prev_fmt`` lets generations be compared across format
    changes (an FP16-era part against a BF16 one).
    """
    e_prev = tflops_per_watt(prev, fmt if prev_fmt is None else prev_fmt)
    e_cur = tflops_per_watt(cur, fmt)
    if e_prev == 0:
        raise InfercostError("previous efficiency is zero; increase is undefined")
    return _round_half_away(100.0 * (e_cur / e_prev - 1.0))
