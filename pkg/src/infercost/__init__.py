"""Datacenter fleet-cost, inference-FLOPs/roofline, and fp8 toolkit.

Three pillars, importable from this top level:

- fleet economics: CostInputs / tco_ratio / tco_grid / break_even_rth,
  RackModel and infra_cost_per_server;
- performance math: exact FLOPs counts (gemm_flops, forward_flops,
  decode_step_flops, layer_walk_flops), computational intensity, roofline
  bounds and phase estimates, MFU;
- fp8 simulation: format grids, RTN/stochastic rounding, scaling
  policies, tensor quantization and the FP8Q binary dump.

Hardware and model figures come from registry files (see
infercost.registry); benchmark tables load through infercost.bench.
"""

from .bench import (
    BenchDataset,
    BenchRecord,
    GpuGeneration,
    MfuTable,
    PowerCapComparison,
    derive_tflops,
    ingest_records,
    load_gpu_generations,
    mfu_table,
    parse_gpu_generations,
    parse_records,
    powercap_slowdown,
    throughput_ratio,
)
from .errors import (
    BenchParseError,
    InfercostError,
    MissingDataError,
    RegistryError,
    UnknownFormatError,
)
from .flops import (
    FlopsBreakdown,
    GemmShape,
    SequenceBatch,
    decode_delta_flops,
    decode_step_flops,
    forward_flops,
    gemm_flops,
    layer_walk_flops,
    softmax_exp_ops,
)
from .formats import BF16, FP8, FP8_E4M3_G2, FP8_E4M3_OCP, FP8_E5M2, FP16, element_bytes
from .fp8 import (
    E4M3_G2,
    E4M3_OCP,
    E5M2,
    FIXED_SET,
    GAUDI2_FIXED_SET,
    PER_ROW,
    PER_TENSOR,
    POW2,
    RTN,
    SR,
    UNRESTRICTED,
    ErrorStats,
    Fp8Format,
    GridNeighbors,
    QuantizedTensor,
    ScalingPolicy,
    compute_scale,
    dequantize,
    dump_quantized,
    enumerate_grid,
    get_format,
    grid,
    load_quantized,
    neighbors,
    quant_error,
    quantize_tensor,
    round_to_grid,
)
from .heatmap import grid_to_csv, grid_to_svg, grid_to_text, parse_grid_csv, render_grid
from .registry import (
    DeviceRegistry,
    HardwareSpec,
    ModelConfig,
    default_registry,
    dumps_registry,
    efficiency_increase,
    load_registry,
    loads_registry,
    merge_registries,
    tflops_per_watt,
)
from .roofline import (
    ComponentEstimate,
    DecodeFormats,
    MfuReport,
    RooflineEstimate,
    TrafficModel,
    computational_intensity,
    decode_step_estimate,
    gemm_estimate,
    kv_attention_bound,
    mfu,
    prefill_estimate,
    roofline_throughput,
    saturation_ci,
)
from .tco import (
    CostInputs,
    RackModel,
    TcoRatioGrid,
    break_even_rth,
    infra_cost_per_server,
    infra_cost_ratio,
    servers_needed,
    tco_grid,
    tco_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "BF16", "BenchDataset", "BenchParseError", "BenchRecord", "ComponentEstimate",
    "CostInputs", "DecodeFormats", "DeviceRegistry", "E4M3_G2", "E4M3_OCP", "E5M2",
    "ErrorStats", "FIXED_SET", "FP16", "FP8", "FP8_E4M3_G2", "FP8_E4M3_OCP",
    "FP8_E5M2", "FlopsBreakdown", "Fp8Format", "GAUDI2_FIXED_SET", "GemmShape",
    "GpuGeneration", "GridNeighbors", "HardwareSpec", "InfercostError", "MfuReport",
    "MfuTable", "MissingDataError", "ModelConfig", "PER_ROW", "PER_TENSOR", "POW2",
    "PowerCapComparison", "QuantizedTensor", "RTN", "RackModel", "RegistryError",
    "RooflineEstimate", "SR", "ScalingPolicy", "SequenceBatch", "TcoRatioGrid",
    "TrafficModel", "UNRESTRICTED", "UnknownFormatError", "__version__",
    "break_even_rth", "computational_intensity", "compute_scale", "decode_delta_flops",
    "decode_step_estimate", "decode_step_flops", "default_registry", "dequantize",
    "derive_tflops", "dump_quantized", "dumps_registry", "efficiency_increase",
    "element_bytes", "enumerate_grid", "forward_flops", "gemm_estimate", "gemm_flops",
    "get_format", "grid", "grid_to_csv", "grid_to_svg", "grid_to_text",
    "infra_cost_per_server", "infra_cost_ratio", "ingest_records",
    "kv_attention_bound", "layer_walk_flops", "load_gpu_generations", "load_quantized",
    "load_registry", "loads_registry", "merge_registries", "mfu", "mfu_table",
    "neighbors", "parse_gpu_generations", "parse_grid_csv", "parse_records",
    "powercap_slowdown", "prefill_estimate", "quant_error", "quantize_tensor",
    "render_grid", "roofline_throughput", "round_to_grid", "saturation_ci",
    "servers_needed", "softmax_exp_ops", "tco_grid", "tco_ratio", "tflops_per_watt",
    "throughput_ratio",
]
