"""Compare the total cost of owning two accelerator fleets at fixed traffic.

Fleet A is the candidate, fleet B the baseline.  Everything is expressed as
A/B ratios: R_SC for server purchase cost, R_IC for infrastructure cost, and
R_Th for per-server throughput.  Because both fleets must serve the same
traffic, a faster server shrinks the fleet and every cost scales by 1/R_Th.
"""

import infercost as ic

print("*** single operating points ***")
for r_sc, r_th in [(0.5, 0.75), (1.0, 1.0), (1.4, 2.0), (0.8, 0.9)]:
    point = ic.CostInputs(
        cost_server_b=1.0, cost_infra_b=1.0, r_sc=r_sc, r_ic=1.0, r_th=r_th
    )
    print(f"R_SC={r_sc:<4} R_Th={r_th:<4} -> cost ratio {ic.tco_ratio(point):.4f}")

print()
print("*** break-even throughput ***")
# how much faster must the candidate be before it is worth buying?
for r_sc in (0.6, 1.0, 1.5, 2.0):
    r_th = ic.break_even_rth(1.0, 1.0, r_sc, 1.0)
    print(f"R_SC={r_sc:<4} breaks even at R_Th={r_th:.4f}")

print()
print("*** sensitivity to the infra share ***")
# with cheap servers and expensive infrastructure, R_IC dominates
for infra_cost in (0.25, 1.0, 4.0):
    point = ic.CostInputs(1.0, infra_cost, 1.5, 1.0, 1.0)
    print(f"infra/server cost {infra_cost:<5} -> ratio {ic.tco_ratio(point):.4f}")

print()
print("*** rack-level infrastructure cost per server ***")
rack = ic.RackModel(
    rack_power_budget=80_000,  # watts per rack
    server_power=8_000,
    rack_fixed_cost=100_000,  # amortized build-out per rack
    energy_price=0.10,  # $/kWh
    avg_server_power=5_000,
    horizon_hours=3 * 8_760,
)
print(f"servers per rack: {rack.servers_per_rack}")
print(f"infra cost per server over 3 years: ${ic.infra_cost_per_server(rack):,.0f}")

denser = ic.RackModel(80_000, 4_000, 100_000, 0.10, 3_000, 3 * 8_760)
print(f"halving server power: ${ic.infra_cost_per_server(denser):,.0f}")
print(f"implied R_IC: {ic.infra_cost_ratio(denser, rack):.3f}")

print()
print("*** full sweep rendered three ways ***")
axis = [0.25 * k for k in range(1, 9)]
grid = ic.tco_grid(1.0, 1.0, 1.0, axis, axis)
print(ic.grid_to_text(grid))

with open("cost_ratio_grid.svg", "w") as handle:
    handle.write(ic.grid_to_svg(grid))
print("wrote cost_ratio_grid.svg (green favors the candidate, red the baseline)")
