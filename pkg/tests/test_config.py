import pytest

from oscbound.config import parse_config
from oscbound.errors import ConfigError

MINIMAL = """
[domain]
kind = disk
center = 0 0
radius = 1

[run]
mode = verify
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.domain.kind == "disk"
    assert cfg.field.kind == "identity"
    assert cfg.alpha == 1.0
    assert cfg.p_list == (2.0,)
    assert cfg.h_list == (0.02,)
    assert cfg.boundary.kind == "fourier"
    assert cfg.gated


def test_alpha_out_of_range_diagnostic():
    text = MINIMAL + "alpha = 1.5\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    msgs = exc.value.diagnostics
    assert any("alpha must lie in (0,1]" in m for m in msgs)
    assert any("line 9" in m for m in msgs)  # the appended line


def test_sweep_planned_runs():
    text = MINIMAL.replace("mode = verify", "mode = sweep") + "p = 1 2 4\nh = 0.08 0.04 0.02\n"
    cfg = parse_config(text)
    assert cfg.planned_runs() == 9


def test_unknown_key_and_section():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL + "mystery = 3\n\n[weird]\nx = 1\n")
    msgs = "\n".join(exc.value.diagnostics)
    assert "unknown key 'mystery'" in msgs
    assert "unknown section [weird]" in msgs


def test_missing_domain_section():
    with pytest.raises(ConfigError) as exc:
        parse_config("[run]\nmode = verify\n")
    assert any("missing required section [domain]" in m for m in exc.value.diagnostics)


def test_h_must_decrease():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL + "h = 0.02 0.04\n")
    assert any("strictly decreasing" in m for m in exc.value.diagnostics)


def test_malformed_number_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL + "p = two\n")
    assert any("malformed number" in m for m in exc.value.diagnostics)


def test_reference_boundary_needs_id():
    text = MINIMAL + "\n[boundary]\nkind = reference\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert any("needs `id`" in m for m in exc.value.diagnostics)


def test_field_and_boundary_parsing():
    text = """
[domain]
kind = polygon
vertices = 0 0 1 0 1 1 0 1

[field]
kind = checkerboard
cell = 0.25
matrix_even = 1 0 0 1
matrix_odd = 5 0 0 5

[boundary]
kind = fourier
coefficients = 0 1 0 0.5 0.2

[run]
mode = verify
p = 1 2
h = 0.1 0.05
gated = false
"""
    cfg = parse_config(text)
    assert cfg.domain.kind == "polygon"
    assert cfg.field.kind == "checkerboard"
    assert cfg.field.lambda_max == 5.0
    assert cfg.boundary.coefficients == (0.0, 1.0, 0.0, 0.5, 0.2)
    assert not cfg.gated
    assert cfg.planned_runs() == 4


def test_domain_roundtrip_through_config_block():
    cfg = parse_config(MINIMAL)
    block = cfg.domain.config_block()
    assert "kind = disk" in block
    text = "[domain]\n" + block + "\n[run]\nmode = verify\n"
    cfg2 = parse_config(text)
    assert cfg2.domain.radius == cfg.domain.radius
