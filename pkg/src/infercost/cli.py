"""Command-line interface.

Subcommands map one-to-one onto the library modules: tco / tco-grid /
break-even (fleet cost ratios), flops (exact operation counts), roofline
(bandwidth/compute bounds and phase estimates), mfu (utilization reports),
quantize (fp8 rounding experiments), ingest and report (benchmark files).

Results go to stdout, diagnostics to stderr.  Exit codes: 0 success, 1
domain or I/O error, 2 usage error.  Output is deterministic for a fixed
command line, input files, and --seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as benchmod
from . import fp8, heatmap, roofline, tco
from .errors import InfercostError
from .flops import (
    GemmShape,
    SequenceBatch,
    decode_delta_flops,
    decode_step_flops,
    forward_flops,
    gemm_flops,
    layer_walk_flops,
    softmax_exp_ops,
)
from .registry import default_registry

PROG = "infercost"


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_registry_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--registry", metavar="PATH", default=None,
        help="extra registry file layered over the packaged one "
             "(defaults to $INFERCOST_REGISTRY when set)",
    )


def _add_cost_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ric", type=float, default=1.0,
                        help="infrastructure-cost ratio A/B (default 1)")
    parser.add_argument("--cost-server-b", type=float, default=1.0,
                        help="baseline per-server purchase cost (default 1)")
    parser.add_argument("--cost-infra-b", type=float, default=1.0,
                        help="baseline per-server infrastructure cost (default 1)")
    parser.add_argument("--equal-costs", action="store_true",
                        help="assume equal baseline server and infra costs and R_IC = 1")


def _costs(args) -> tuple[float, float, float]:
    if args.equal_costs:
        return 1.0, 1.0, 1.0
    return args.cost_server_b, args.cost_infra_b, args.ric


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _cmd_tco(args) -> int:
    cost_server_b, cost_infra_b, r_ic = _costs(args)
    ratio = tco.tco_ratio(tco.CostInputs(
        cost_server_b=cost_server_b, cost_infra_b=cost_infra_b,
        r_sc=args.rsc, r_ic=r_ic, r_th=args.rth,
    ))
    print(f"{ratio:.4f}")
    return 0


def _cmd_tco_grid(args) -> int:
    cost_server_b, cost_infra_b, r_ic = _costs(args)
    grid = tco.tco_grid(cost_server_b, cost_infra_b, r_ic, args.rsc, args.rth)
    _emit(heatmap.render_grid(grid, args.format), args.out)
    return 0


def _cmd_break_even(args) -> int:
    cost_server_b, cost_infra_b, r_ic = _costs(args)
    value = tco.break_even_rth(cost_server_b, cost_infra_b, args.rsc, r_ic)
    print(f"{value:.4f}")
    return 0


def _cmd_flops_gemm(args) -> int:
    print(gemm_flops(GemmShape(args.m, args.k, args.n)))
    return 0


def _cmd_flops_forward(args) -> int:
    model = default_registry(args.registry).model(args.model)
    compute = layer_walk_flops if args.layer_walk else forward_flops
    print(compute(model, args.seqlen))
    return 0


def _cmd_flops_decode(args) -> int:
    model = default_registry(args.registry).model(args.model)
    parts = decode_step_flops(model, SequenceBatch.uniform(args.batch, args.seqlen))
    print(f"linear {parts.linear}")
    print(f"lm_head {parts.lm_head}")
    print(f"attention {parts.attention}")
    print(f"total {parts.total}")
    return 0


def _cmd_flops_delta(args) -> int:
    model = default_registry(args.registry).model(args.model)
    print(decode_delta_flops(model, args.context, args.new_tokens))
    return 0


def _cmd_flops_softmax(args) -> int:
    model = default_registry(args.registry).model(args.model)
    print(softmax_exp_ops(model, args.batch, args.seqlen))
    return 0


def _cmd_roofline_ci(args) -> int:
    traffic = roofline.TrafficModel(kind=args.traffic, weights=args.weights,
                                    activations=args.activations, output=args.output)
    ci = roofline.computational_intensity(GemmShape(args.m, args.k, args.n), traffic)
    print(f"{ci:g}")
    return 0


def _cmd_roofline_saturation(args) -> int:
    spec = default_registry(args.registry).device(args.device)
    print(f"{roofline.saturation_ci(spec, args.fmt):.1f}")
    return 0


def _cmd_roofline_bound(args) -> int:
    spec = default_registry(args.registry).device(args.device)
    print(f"{roofline.roofline_throughput(spec, args.fmt, args.ci):.1f}")
    return 0


def _cmd_roofline_kv(args) -> int:
    spec = default_registry(args.registry).device(args.device)
    print(f"{roofline.kv_attention_bound(spec, args.group, args.kv_fmt):.1f}")
    return 0


def _print_estimate(est: roofline.RooflineEstimate) -> None:
    for c in est.per_component:
        print(f"{c.name}: flops {c.flops}  bytes {c.bytes}  "
              f"time {c.time:.6e}s  {c.bound}-bound  {c.tflops:.1f} TFLOPS")
    print(f"total: flops {est.total_flops}  time {est.time:.6e}s  "
          f"{est.tflops:.1f} TFLOPS  {est.bound}-bound")


def _cmd_roofline_decode(args) -> int:
    registry = default_registry(args.registry)
    spec = registry.device(args.device)
    model = registry.model(args.model)
    fmts = roofline.DecodeFormats(linear=args.linear_fmt, lm_head=args.lm_head_fmt,
                                  kv_cache=args.kv_fmt)
    est = roofline.decode_step_estimate(
        spec, model, SequenceBatch.uniform(args.batch, args.seqlen), fmts)
    _print_estimate(est)
    return 0


def _cmd_roofline_prefill(args) -> int:
    registry = default_registry(args.registry)
    est = roofline.prefill_estimate(
        registry.device(args.device), registry.model(args.model), args.seqlen, args.fmt)
    _print_estimate(est)
    return 0


def _record_label(record: benchmod.BenchRecord) -> str:
    if record.shape is not None:
        work = "x".join(str(v) for v in record.shape.as_tuple())
    else:
        work = f"{record.model} b={record.batch} s={record.seqlen}"
    label = f"{record.device} {record.fmt} {record.kind} {work}"
    if record.scaling:
        label += f" {record.scaling}"
    if record.power_cap_w is not None:
        label += f" cap={record.power_cap_w:g}W"
    return label


def _cmd_mfu(args) -> int:
    registry = default_registry(args.registry)
    if args.measured is not None:
        if args.device is None or args.fmt is None:
            raise InfercostError("--measured needs --device and --fmt")
        report = roofline.mfu(args.measured, registry.device(args.device), args.fmt)
        note = "  (exceeds peak)" if report.exceeds_peak else ""
        print(f"{report.mfu:.4f}{note}")
        return 0
    if args.bench is None:
        raise InfercostError("give either --measured or --bench")
    table = benchmod.mfu_table(benchmod.ingest_records(args.bench), registry)
    for record, report in table.entries:
        flag = " !" if report.exceeds_peak else ""
        print(f"{_record_label(record)}: {report.measured_tflops:g} of "
              f"{report.peak_tflops:g} peak = {100 * report.mfu:.1f}%{flag}")
    for record, reason in table.skipped:
        print(f"skipped {_record_label(record)}: {reason}", file=sys.stderr)
    return 0


def _load_matrix(path: str) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise InfercostError(f"cannot read matrix file {path}: {exc}") from None
    except ValueError as exc:
        raise InfercostError(f"bad matrix file {path}: {exc}") from None


def _matrix_text(arr: np.ndarray) -> str:
    return "\n".join(" ".join(repr(float(v)) for v in row) for row in arr) + "\n"


def _cmd_quantize(args) -> int:
    fmt = fp8.get_format(args.format)
    fixed_set = tuple(args.fixed_set) if args.fixed_set else ()
    if args.scale_domain == fp8.FIXED_SET and not fixed_set:
        fixed_set = fp8.GAUDI2_FIXED_SET
    policy = fp8.ScalingPolicy(granularity=args.granularity,
                               scale_domain=args.scale_domain, fixed_set=fixed_set)
    rng = np.random.default_rng(args.seed) if args.mode == fp8.SR else None
    qt = fp8.quantize_tensor(_load_matrix(args.infile), fmt, policy, args.mode, rng)
    if args.dump is not None:
        Path(args.dump).write_bytes(fp8.dump_quantized(qt))
    _emit(_matrix_text(fp8.dequantize(qt)), args.out)
    if args.stats:
        stats = fp8.quant_error(_load_matrix(args.infile), qt)
        print(f"max_abs_err {stats.max_abs_err:.6g}  mse {stats.mse:.6g}  "
              f"max_rel_err {stats.max_rel_err:.6g}", file=sys.stderr)
    return 0


def _cmd_ingest(args) -> int:
    dataset = benchmod.ingest_records(args.bench)
    print(f"ok: {len(dataset)} records")
    by_device: dict[str, int] = {}
    by_kind: dict[str, int] = {}
    for record in dataset:
        by_device[record.device] = by_device.get(record.device, 0) + 1
        by_kind[record.kind] = by_kind.get(record.kind, 0) + 1
    for device in sorted(by_device):
        print(f"device {device}: {by_device[device]}")
    for kind in sorted(by_kind):
        print(f"kind {kind}: {by_kind[kind]}")
    return 0


def _powercap_pairs(dataset: benchmod.BenchDataset):
    groups: dict[tuple, list[benchmod.BenchRecord]] = {}
    for record in dataset:
        groups.setdefault(record.key[:-1], []).append(record)
    for base_key in sorted(groups, key=repr):
        records = groups[base_key]
        uncapped = [r for r in records if r.power_cap_w is None and r.tflops is not None]
        capped = [r for r in records if r.power_cap_w is not None and r.tflops is not None]
        if len(uncapped) == 1 and len(capped) == 1:
            yield uncapped[0], capped[0]


def _cmd_report(args) -> int:
    registry = default_registry(args.registry)
    dataset = benchmod.ingest_records(args.bench)
    print(f"records: {len(dataset)}")

    table = benchmod.mfu_table(dataset, registry)
    if table.entries:
        print("mfu:")
        for record, report in table.entries:
            print(f"  {_record_label(record)}: {100 * report.mfu:.1f}%")
    for record, reason in table.skipped:
        print(f"mfu skipped {_record_label(record)}: {reason}", file=sys.stderr)

    pairs = list(_powercap_pairs(dataset))
    if pairs:
        print("power-cap slowdowns:")
        for uncapped, capped in pairs:
            cmp = benchmod.powercap_slowdown(uncapped, capped)
            print(f"  {_record_label(capped)}: {cmp.uncapped_tflops:g} -> "
                  f"{cmp.capped_tflops:g} TFLOPS "
                  f"({100 * cmp.slowdown_fraction:.1f}% slower)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="fleet cost ratios, inference FLOPs and roofline bounds, "
                    "fp8 quantization experiments, benchmark reports",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("tco", help="fleet cost ratio A/B at one operating point")
    p.add_argument("--rsc", type=float, required=True, help="server-cost ratio A/B")
    p.add_argument("--rth", type=float, required=True, help="throughput ratio A/B")
    _add_cost_args(p)
    p.set_defaults(func=_cmd_tco)

    p = sub.add_parser("tco-grid", help="sweep the cost ratio over R_SC x R_Th")
    p.add_argument("--rsc", type=_float_list, required=True, metavar="V1,V2,...")
    p.add_argument("--rth", type=_float_list, required=True, metavar="V1,V2,...")
    _add_cost_args(p)
    p.add_argument("--format", choices=("text", "csv", "svg"), default="text")
    p.add_argument("--out", metavar="PATH", default=None, help="write here instead of stdout")
    p.set_defaults(func=_cmd_tco_grid)

    p = sub.add_parser("break-even", help="throughput ratio at which fleets cost the same")
    p.add_argument("--rsc", type=float, required=True)
    _add_cost_args(p)
    p.set_defaults(func=_cmd_break_even)

    p = sub.add_parser("flops", help="exact operation counts")
    fsub = p.add_subparsers(dest="flops_command", required=True, metavar="WHAT")

    q = fsub.add_parser("gemm", help="2*M*K*N for one GEMM")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=_cmd_flops_gemm)

    q = fsub.add_parser("forward", help="full forward pass over a prompt")
    q.add_argument("--model", required=True)
    q.add_argument("--seqlen", type=int, required=True)
    q.add_argument("--layer-walk", action="store_true",
                   help="count by walking every GEMM instead of the closed form")
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_flops_forward)

    q = fsub.add_parser("decode", help="one batched decode step, with breakdown")
    q.add_argument("--model", required=True)
    q.add_argument("--batch", type=int, required=True)
    q.add_argument("--seqlen", type=int, required=True, help="context tokens per sequence")
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_flops_decode)

    q = fsub.add_parser("delta", help="cost of extending a context by new tokens")
    q.add_argument("--model", required=True)
    q.add_argument("--context", type=int, required=True)
    q.add_argument("--new-tokens", type=int, required=True)
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_flops_delta)

    q = fsub.add_parser("softmax", help="exponential evaluations in one decode step")
    q.add_argument("--model", required=True)
    q.add_argument("--batch", type=int, required=True)
    q.add_argument("--seqlen", type=int, required=True)
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_flops_softmax)

    p = sub.add_parser("roofline", help="bandwidth/compute bounds and phase estimates")
    rsub = p.add_subparsers(dest="roofline_command", required=True, metavar="WHAT")

    q = rsub.add_parser("ci", help="computational intensity of a GEMM")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--weights", default="fp8", help="weight format (default fp8)")
    q.add_argument("--traffic", choices=(roofline.WEIGHTS_ONLY, roofline.FULL_IO),
                   default=roofline.WEIGHTS_ONLY)
    q.add_argument("--activations", default=None, help="activation format (full-io)")
    q.add_argument("--output", default="bf16", help="output format (full-io)")
    q.set_defaults(func=_cmd_roofline_ci)

    q = rsub.add_parser("saturation", help="CI where the device stops being memory-bound")
    q.add_argument("--device", required=True)
    q.add_argument("--fmt", required=True)
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_roofline_saturation)

    q = rsub.add_parser("bound", help="attainable TFLOPS at a given CI")
    q.add_argument("--device", required=True)
    q.add_argument("--fmt", required=True)
    q.add_argument("--ci", type=float, required=True)
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_roofline_bound)

    q = rsub.add_parser("kv", help="bandwidth ceiling on decode attention")
    q.add_argument("--device", required=True)
    q.add_argument("--group", "-g", type=int, required=True, help="GQA group size")
    q.add_argument("--kv-fmt", default="bf16")
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_roofline_kv)

    q = rsub.add_parser("decode", help="roofline estimate of one decode step")
    q.add_argument("--device", required=True)
    q.add_argument("--model", required=True)
    q.add_argument("--batch", type=int, required=True)
    q.add_argument("--seqlen", type=int, required=True)
    q.add_argument("--linear-fmt", default="fp8")
    q.add_argument("--lm-head-fmt", default="bf16")
    q.add_argument("--kv-fmt", default="bf16")
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_roofline_decode)

    q = rsub.add_parser("prefill", help="compute-bound prefill estimate")
    q.add_argument("--device", required=True)
    q.add_argument("--model", required=True)
    q.add_argument("--seqlen", type=int, required=True)
    q.add_argument("--fmt", required=True)
    _add_registry_arg(q)
    q.set_defaults(func=_cmd_roofline_prefill)

    p = sub.add_parser("mfu", help="measured throughput as a fraction of peak")
    p.add_argument("--measured", type=float, default=None, help="measured TFLOPS")
    p.add_argument("--device", default=None)
    p.add_argument("--fmt", default=None)
    p.add_argument("--bench", metavar="PATH", default=None,
                   help="score every record of a bench CSV instead")
    _add_registry_arg(p)
    p.set_defaults(func=_cmd_mfu)

    p = sub.add_parser("quantize", help="round a matrix onto an fp8 grid")
    p.add_argument("--format", required=True,
                   help="e4m3-ocp, e4m3-g2 or e5m2 (fp8- prefix accepted)")
    p.add_argument("--mode", choices=(fp8.RTN, fp8.SR), default=fp8.RTN)
    p.add_argument("--seed", type=int, default=0,
                   help="rng seed for stochastic rounding (default 0)")
    p.add_argument("--granularity", choices=(fp8.PER_TENSOR, fp8.PER_ROW),
                   default=fp8.PER_TENSOR)
    p.add_argument("--scale-domain",
                   choices=(fp8.UNRESTRICTED, fp8.POW2, fp8.FIXED_SET),
                   default=fp8.UNRESTRICTED)
    p.add_argument("--fixed-set", type=_float_list, default=None, metavar="S1,S2,...",
                   help="allowed scales for --scale-domain fixed-set "
                        "(default: the four hardware-accelerated factors)")
    p.add_argument("--in", dest="infile", required=True, metavar="PATH",
                   help="whitespace-separated matrix file")
    p.add_argument("--out", metavar="PATH", default=None,
                   help="write the dequantized matrix here instead of stdout")
    p.add_argument("--dump", metavar="PATH", default=None,
                   help="also write the FP8Q binary dump here")
    p.add_argument("--stats", action="store_true",
                   help="print error statistics to stderr")
    p.set_defaults(func=_cmd_quantize)

    p = sub.add_parser("ingest", help="validate a bench CSV and summarize it")
    p.add_argument("--bench", required=True, metavar="PATH")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("report", help="MFU and power-cap report over a bench CSV")
    p.add_argument("--bench", required=True, metavar="PATH")
    _add_registry_arg(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InfercostError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
