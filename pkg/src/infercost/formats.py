"""Data-format names and per-element byte widths.

The core vocabulary is a fixed set of GEMM data formats.  Registry files may
declare peak throughput under additional names (e.g. a vendor-specific
variant); such names are carried through untouched, but operations that need
a byte width reject them explicitly instead of guessing.
"""

from __future__ import annotations

from .errors import UnknownFormatError

BF16 = "bf16"
FP16 = "fp16"
FP8 = "fp8"
FP8_E4M3_OCP = "fp8-e4m3-ocp"
FP8_E4M3_G2 = "fp8-e4m3-g2"
FP8_E5M2 = "fp8-e5m2"

KNOWN_FORMATS = (BF16, FP16, FP8, FP8_E4M3_OCP, FP8_E4M3_G2, FP8_E5M2)

_ELEMENT_BYTES = {
    BF16: 2,
    FP16: 2,
    FP8: 1,
    FP8_E4M3_OCP: 1,
    FP8_E4M3_G2: 1,
    FP8_E5M2: 1,
}


def normalize_format(name: str) -> str:
    """Canonicalize a format name: lowercase, underscores to hyphens."""
    if not isinstance(name, str) or not name.strip():
        raise UnknownFormatError(f"empty or non-string format name: {name!r}")
    return name.strip().lower().replace("_", "-")


def element_bytes(name: str) -> int:
    """Bytes per element for a format, e.g. 1 for FP8 and 2 for BF16."""
    norm = normalize_format(name)
    try:
        return _ELEMENT_BYTES[norm]
    except KeyError:
        raise UnknownFormatError(
            f"no byte width known for format {name!r}; "
            f"known formats: {', '.join(KNOWN_FORMATS)}"
        ) from None
