"""Access to the data files shipped inside the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .errors import InfercostError

FIXTURE_NAMES = (
    "devices_paper.cfg",
    "models_llama.cfg",
    "table1_gpu_generations.csv",
    "table3_thin_gemm.csv",
    "table4_square_gemm_power.csv",
    "table5_scaled_gemm.csv",
    "table6_powercap.csv",
)


def _resource(name: str):
    if name not in FIXTURE_NAMES:
        raise InfercostError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        )
    return files("infercost").joinpath("data").joinpath(name)


def fixture_text(name: str) -> str:
    """UTF-8 contents of a packaged fixture file."""
    return _resource(name).read_text(encoding="utf-8")


def fixture_path(name: str) -> Path:
    """Filesystem path of a packaged fixture file."""
    return Path(str(_resource(name)))
