"""Registry parsing, validation, merging, and derived device metrics."""

from fractions import Fraction

import pytest

import infercost as ic
from infercost import fixtures
from infercost.registry import ENV_REGISTRY


def test_packaged_names(registry):
    assert set(registry.devices) == {"gaudi2", "gaudi3", "h100", "h200"}
    assert set(registry.models) == {"llama31-8b", "llama33-70b"}


def test_gaudi2_fields(gaudi2):
    assert gaudi2.tdp == 600.0
    assert gaudi2.hbm_bandwidth == 2.4
    assert gaudi2.vector_peak_tflops == 11.0
    assert gaudi2.peak("fp8") == 865.0
    assert gaudi2.peak("fp8-e4m3-g2") == 865.0
    assert gaudi2.peak("fp8-e5m2") == 865.0


def test_peak_normalizes_format_spelling(gaudi2):
    assert gaudi2.peak("FP8") == 865.0
    assert gaudi2.peak("fp8_e5m2") == 865.0


def test_unknown_peak_raises(gaudi2):
    with pytest.raises(ic.UnknownFormatError):
        gaudi2.peak("bf16")
    assert not gaudi2.has_peak("bf16")
    assert gaudi2.has_peak("fp8")


def test_missing_bandwidth_raises(registry):
    with pytest.raises(ic.MissingDataError):
        registry.device("h100").bandwidth_bytes_per_s


def test_bandwidth_units(gaudi2):
    assert gaudi2.bandwidth_bytes_per_s == 2.4e12


def test_unknown_names_list_known(registry):
    with pytest.raises(ic.RegistryError, match="gaudi2"):
        registry.device("tpu")
    with pytest.raises(ic.RegistryError, match="llama31-8b"):
        registry.model("gpt")


def test_model_derived_quantities(llama8b, llama70b):
    assert llama8b.heads == 32
    assert llama8b.kv_heads == 8
    assert llama8b.intermediate == 14336
    assert llama8b.linear_constant == Fraction(13)
    assert llama70b.heads == 64
    assert llama70b.kv_heads == 8
    assert llama70b.linear_constant == Fraction(51, 4)


def test_linear_constant_monotonicity():
    def make(a, g):
        return ic.ModelConfig("m", 1, 64, a, 8, g, 8)

    assert make(2.0, 1).linear_constant < make(3.5, 1).linear_constant
    assert make(3.5, 1).linear_constant > make(3.5, 2).linear_constant
    assert make(3.5, 4).linear_constant == Fraction(3) * Fraction(7, 2) + 2 + Fraction(2, 4)


def test_model_validation():
    with pytest.raises(ic.RegistryError):
        ic.ModelConfig("m", 1, 65, 3.5, 8, 1, 8)  # hidden not divisible by head size
    with pytest.raises(ic.RegistryError):
        ic.ModelConfig("m", 1, 64, 3.5, 8, 3, 8)  # heads not divisible by group
    with pytest.raises(ic.RegistryError):
        ic.ModelConfig("m", 1, 9, 3.5, 1, 1, 8)  # fractional intermediate width
    with pytest.raises(ic.RegistryError):
        ic.ModelConfig("m", 0, 64, 3.5, 8, 1, 8)


def test_hardware_validation():
    with pytest.raises(ic.RegistryError):
        ic.HardwareSpec("d", {"fp8": 865.0}, tdp=0.0)
    with pytest.raises(ic.RegistryError):
        ic.HardwareSpec("d", {"fp8": -1.0}, tdp=600.0)
    with pytest.raises(ic.RegistryError):
        ic.HardwareSpec("d", {"fp8": 865.0}, tdp=600.0, hbm_bandwidth=0.0)
    # peak table keys stay open so user registries can carry new formats
    open_fmt = ic.HardwareSpec("d", {"int8": 100.0}, tdp=600.0)
    assert open_fmt.peak("int8") == 100.0


def test_loads_empty_text():
    reg = ic.loads_registry("")
    assert reg.devices == {} and reg.models == {}


def test_loads_rejects_unknown_keys():
    text = '[[devices]]\nname = "d"\ntdp = 1.0\ncolor = "red"\n'
    with pytest.raises(ic.RegistryError, match="color"):
        ic.loads_registry(text)
    with pytest.raises(ic.RegistryError, match="gadgets"):
        ic.loads_registry("[[gadgets]]\nname = 'd'\n")


def test_loads_rejects_duplicates():
    text = (
        '[[devices]]\nname = "d"\ntdp = 1.0\n'
        '[[devices]]\nname = "d"\ntdp = 2.0\n'
    )
    with pytest.raises(ic.RegistryError, match="duplicate"):
        ic.loads_registry(text)


def test_loads_bad_toml_mentions_source():
    with pytest.raises(ic.RegistryError, match="my.cfg"):
        ic.loads_registry("[[devices\n", source="my.cfg")


def test_load_registry_missing_file(tmp_path):
    with pytest.raises(ic.RegistryError):
        ic.load_registry(tmp_path / "absent.cfg")


def test_dumps_roundtrip(registry):
    assert ic.loads_registry(ic.dumps_registry(registry)) == registry


def test_merge_later_wins(registry):
    override = ic.loads_registry(
        '[[devices]]\nname = "gaudi2"\ntdp = 450.0\npeak_tflops = {fp8 = 900.0}\n'
    )
    merged = ic.merge_registries(registry, override)
    assert merged.device("gaudi2").tdp == 450.0
    assert merged.device("gaudi2").peak("fp8") == 900.0
    # untouched entries survive
    assert merged.device("h100") == registry.device("h100")
    assert merged.model("llama31-8b") == registry.model("llama31-8b")


def test_default_registry_env_overlay(tmp_path, monkeypatch):
    extra = tmp_path / "extra.cfg"
    extra.write_text('[[devices]]\nname = "toy"\ntdp = 5.0\nhbm_bandwidth = 0.001\n')
    monkeypatch.setenv(ENV_REGISTRY, str(extra))
    reg = ic.default_registry()
    assert reg.device("toy").tdp == 5.0
    assert "gaudi2" in reg.devices


def test_default_registry_override_path(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_REGISTRY, raising=False)
    extra = tmp_path / "extra.cfg"
    extra.write_text('[[devices]]\nname = "h100"\ntdp = 650.0\npeak_tflops = {fp8 = 1989.9}\n')
    reg = ic.default_registry(override_path=extra)
    assert reg.device("h100").tdp == 650.0


def test_tflops_per_watt(gaudi2):
    assert ic.tflops_per_watt(gaudi2, "fp8") == pytest.approx(865 / 600)
    unit = ic.HardwareSpec("u", {"fp8": 700.0}, tdp=700.0)
    assert ic.tflops_per_watt(unit, "fp8") == 1.0


def test_efficiency_increase_identity(gaudi2):
    assert ic.efficiency_increase(gaudi2, gaudi2, "fp8") == 0


def test_efficiency_increase_rounds_half_away():
    prev = ic.HardwareSpec("a", {"bf16": 1.0}, tdp=1.0)
    cur = ic.HardwareSpec("b", {"bf16": 1.125}, tdp=1.0)
    assert ic.efficiency_increase(prev, cur, "bf16") == 13


def test_gpu_generation_fixture_pairs():
    gens = ic.load_gpu_generations(fixtures.fixture_path("table1_gpu_generations.csv"))
    assert [g.spec.name for g in gens] == ["V100", "A100", "H200", "B300"]
    effs = [ic.tflops_per_watt(g.spec, g.fmt) for g in gens]
    assert effs == pytest.approx([125 / 300, 312 / 400, 989 / 700, 2250 / 1200])
    increases = [
        ic.efficiency_increase(a.spec, b.spec, b.fmt, prev_fmt=a.fmt)
        for a, b in zip(gens, gens[1:])
    ]
    assert increases == [87, 81, 33]


def test_fixture_listing():
    assert len(fixtures.FIXTURE_NAMES) == 7
    for name in fixtures.FIXTURE_NAMES:
        assert fixtures.fixture_text(name)
    with pytest.raises(ic.InfercostError):
        fixtures.fixture_text("nope.csv")
