"""Fleet cost-ratio model for comparing two accelerators at fixed traffic.

Candidate A is compared against baseline B through three ratios: R_Th
(per-server throughput A/B), R_SC (server cost A/B), and R_IC (per-server
infrastructure cost A/B).  Serving the same traffic needs 1/R_Th as many
A-servers, so the fleet-cost ratio is

    TCO_A / TCO_B = (C_sv * R_SC + C_if * R_IC) / (R_Th * (C_sv + C_if))

with C_sv and C_if the baseline per-server purchase and infrastructure
costs.  Fleet size cancels; it returns only in servers_needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InfercostError


def _check_positive(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InfercostError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise InfercostError(f"{name} must be finite and > 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class CostInputs:
    """Baseline costs and A/B ratios feeding the TCO ratio."""

    cost_server_b: float
    cost_infra_b: float
    r_sc: float
    r_ic: float
    r_th: float

    def __post_init__(self):
        for field in ("cost_server_b", "cost_infra_b", "r_sc", "r_ic", "r_th"):
            object.__setattr__(self, field, _check_positive(getattr(self, field), field))


def tco_ratio(c: CostInputs) -> float:
    """TCO_A / TCO_B; below 1.0 candidate A is the cheaper fleet."""
    return (c.cost_server_b * c.r_sc + c.cost_infra_b * c.r_ic) / (
        c.r_th * (c.cost_server_b + c.cost_infra_b)
    )


def break_even_rth(cost_server_b: float, cost_infra_b: float, r_sc: float, r_ic: float) -> float:
    """Throughput ratio at which the two fleets cost the same.

    Setting tco_ratio = 1 and solving for R_Th gives the cost-weighted
    mean of R_SC and R_IC.
    """
    cost_server_b = _check_positive(cost_server_b, "cost_server_b")
    cost_infra_b = _check_positive(cost_infra_b, "cost_infra_b")
    r_sc = _check_positive(r_sc, "r_sc")
    r_ic = _check_positive(r_ic, "r_ic")
    return (cost_server_b * r_sc + cost_infra_b * r_ic) / (cost_server_b + cost_infra_b)


@dataclass(frozen=True)
class TcoRatioGrid:
    """tco_ratio evaluated over an R_SC x R_Th mesh.

    cells[i][j] is the ratio at r_th_axis[i], r_sc_axis[j]; the three
    assumption fields record the inputs shared by every cell.
    """

    r_sc_axis: tuple[float, ...]
    r_th_axis: tuple[float, ...]
    cells: tuple[tuple[float, ...], ...]
    cost_server_b: float
    cost_infra_b: float
    r_ic: float

    @property
    def assumptions(self) -> dict:
        return {
            "cost_server_b": self.cost_server_b,
            "cost_infra_b": self.cost_infra_b,
            "r_ic": self.r_ic,
        }


def _check_axis(values: Sequence[float], name: str) -> tuple[float, ...]:
    axis = tuple(_check_positive(v, f"{name} value") for v in values)
    if not axis:
        raise InfercostError(f"{name} must be nonempty")
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise InfercostError(f"{name} must be strictly ascending")
    return axis


def tco_grid(cost_server_b: float, cost_infra_b: float, r_ic: float,
             r_sc_axis: Sequence[float], r_th_axis: Sequence[float]) -> TcoRatioGrid:
    """Sweep tco_ratio over ascending R_SC and R_Th axes."""
    cost_server_b = _check_positive(cost_server_b, "cost_server_b")
    cost_infra_b = _check_positive(cost_infra_b, "cost_infra_b")
    r_ic = _check_positive(r_ic, "r_ic")
    r_sc_axis = _check_axis(r_sc_axis, "r_sc_axis")
    r_th_axis = _check_axis(r_th_axis, "r_th_axis")
    cells = tuple(
        tuple(
            tco_ratio(CostInputs(cost_server_b, cost_infra_b, r_sc, r_ic, r_th))
            for r_sc in r_sc_axis
        )
        for r_th in r_th_axis
    )
    return TcoRatioGrid(r_sc_axis=r_sc_axis, r_th_axis=r_th_axis, cells=cells,
                        cost_server_b=cost_server_b, cost_infra_b=cost_infra_b, r_ic=r_ic)


def servers_needed(traffic: float, per_server_throughput: float,
                   allow_fractional: bool = False) -> int | float:
    """Fleet size to serve a traffic level; whole servers by default."""
    traffic = _check_positive(traffic, "traffic")
    per_server_throughput = _check_positive(per_server_throughput, "per_server_throughput")
    exact = traffic / per_server_throughput
    if allow_fractional:
        return exact
    return math.ceil(exact)


@dataclass(frozen=True)
class RackModel:
    """Rack-level inputs for deriving per-server infrastructure cost.

    rack_fixed_cost is the rack's amortized capital cost over the planning
    horizon; energy is charged on avg_server_power for horizon_hours (a
    zero horizon keeps only the fixed share).
    """

    rack_power_budget: float
    server_power: float
    rack_fixed_cost: float
    energy_price: float
    avg_server_power: float
    horizon_hours: float

    def __post_init__(self):
        for field in ("rack_power_budget", "server_power", "rack_fixed_cost",
                      "energy_price", "avg_server_power"):
            object.__setattr__(self, field, _check_positive(getattr(self, field), field))
        if isinstance(self.horizon_hours, bool) or not isinstance(self.horizon_hours, (int, float)):
            raise InfercostError("horizon_hours must be a number")
        if not math.isfinite(self.horizon_hours) or self.horizon_hours < 0:
            raise InfercostError(f"horizon_hours must be >= 0, got {self.horizon_hours!r}")
        object.__setattr__(self, "horizon_hours", float(self.horizon_hours))
        if self.server_power > self.rack_power_budget:
            raise InfercostError(
                f"server_power ({self.server_power}) exceeds the rack power "
                f"budget ({self.rack_power_budget}); no server fits"
            )

    @property
    def servers_per_rack(self) -> int:
        return math.floor(self.rack_power_budget / self.server_power)


def infra_cost_per_server(r: RackModel) -> float:
    """Fixed rack cost split across the servers that fit, plus energy."""
    fixed_share = r.rack_fixed_cost / r.servers_per_rack
    energy = r.energy_price * (r.avg_server_power / 1000.0) * r.horizon_hours
    return fixed_share + energy


def infra_cost_ratio(rack_a: RackModel, rack_b: RackModel) -> float:
    """R_IC derived from two rack models (A over B)."""
    return infra_cost_per_server(rack_a) / infra_cost_per_server(rack_b)
