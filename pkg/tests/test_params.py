"""Coefficient models: weight function, validation, site evaluation, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from splitstep import (
    ConfigError,
    DomainError,
    GapBoundViolation,
    NormalizationError,
    PeriodicModel,
    PhaseLimits,
    SiteCoeffs,
    TabulatedModel,
    TwoPhaseModel,
    asymptotic_limits,
    coeffs,
    dump_model_toml,
    load_model_toml,
    log_mobius_weight,
    mobius_weight,
    model_from_dict,
    model_to_dict,
    site_coeffs,
    site_coeffs_arrays,
    support_radius,
    validate_model,
)

ATOL = 1e-12

open_unit = st.floats(min_value=-0.999, max_value=0.999, allow_nan=False)
strict_unit = st.floats(min_value=-0.95, max_value=0.95)


@given(open_unit)
def test_weight_positive_and_reciprocal_under_negation(k):
    w = mobius_weight(k)
    assert w > 0.0
    assert math.isclose(mobius_weight(-k) * w, 1.0, rel_tol=1e-9)


@given(strict_unit, strict_unit)
def test_weight_product_law(s, t):
    u = (s + t) / (1.0 + s * t)
    assert math.isclose(mobius_weight(s) * mobius_weight(t), mobius_weight(u), rel_tol=1e-9)


@given(strict_unit, strict_unit)
def test_weight_product_threshold_at_sign_of_sum(s, t):
    prod = mobius_weight(s) * mobius_weight(t)
    if s + t > ATOL:
        assert prod > 1.0
    elif s + t < -ATOL:
        assert prod < 1.0


@given(open_unit)
def test_log_weight_matches_log_of_weight(k):
    assert math.isclose(log_mobius_weight(k), math.log(mobius_weight(k)), rel_tol=1e-9, abs_tol=1e-12)


def test_weight_monotone_and_fixed_point():
    assert mobius_weight(0.0) == 1.0
    ks = np.linspace(-0.99, 0.99, 199)
    ws = np.array([mobius_weight(k) for k in ks])
    assert (np.diff(ws) > 0).all()


@pytest.mark.parametrize("bad", [-1.0, 1.0, 1.5, -2.0, float("nan")])
def test_weight_rejects_outside_open_interval(bad):
    with pytest.raises(DomainError):
        mobius_weight(bad)


def test_coeffs_default_gauge_normalizes():
    c = coeffs(p=0.6, a=-0.8)
    assert c.q == pytest.approx(0.8)
    assert c.b == pytest.approx(0.6)
    assert abs(c.p) ** 2 + abs(c.q) ** 2 == pytest.approx(1.0, abs=ATOL)
    assert abs(c.a) ** 2 + abs(c.b) ** 2 == pytest.approx(1.0, abs=ATOL)


def test_coeffs_explicit_phases_survive():
    q = 0.8 * np.exp(0.3j)
    b = 0.6 * np.exp(-1.1j)
    c = coeffs(p=0.6, a=0.8, q=q, b=b)
    assert c.q == q and c.b == b


def halfgap(p0=0.6):
    return TwoPhaseModel(PhaseLimits(p_minus=-p0, a_minus=p0, p_plus=p0, a_plus=-p0), bumps={})


def test_two_phase_step_sits_between_minus_one_and_zero():
    m = halfgap()
    left = site_coeffs(m, -1)
    right = site_coeffs(m, 0)
    assert left.p == -0.6 and left.a == 0.6
    assert right.p == 0.6 and right.a == -0.6
    assert site_coeffs(m, -250) == left and site_coeffs(m, 250) == right


def test_two_phase_bumps_override_limits():
    bump = coeffs(p=0.1, a=0.2)
    m = TwoPhaseModel(halfgap().limits, bumps={3: bump, -2: bump})
    assert site_coeffs(m, 3) == bump and site_coeffs(m, -2) == bump
    assert site_coeffs(m, 4) == site_coeffs(m, 0)
    assert support_radius(m) == 4


def test_periodic_wraps_negative_sites():
    c0, c1 = coeffs(p=0.1, a=0.2), coeffs(p=0.3, a=0.4)
    m = PeriodicModel(cells=(c0, c1))
    assert site_coeffs(m, -3) == c1  # -3 mod 2 == 1
    assert site_coeffs(m, 4) == c0
    assert asymptotic_limits(m) is None
    with pytest.raises(ConfigError):
        PeriodicModel(cells=())


def test_tabulated_tails_take_over_outside_table():
    inner = (coeffs(p=0.1, a=0.1), coeffs(p=0.2, a=0.2), coeffs(p=0.3, a=0.3))
    m = TabulatedModel(lo=-1, cells=inner, tail_left=coeffs(p=-0.5, a=0.5), tail_right=coeffs(p=0.5, a=-0.5))
    assert m.hi == 1
    assert site_coeffs(m, -1) == inner[0] and site_coeffs(m, 1) == inner[2]
    assert site_coeffs(m, -2) == m.tail_left and site_coeffs(m, 2) == m.tail_right
    lims = asymptotic_limits(m)
    assert lims.p_minus == -0.5 and lims.a_plus == -0.5


def test_site_coeffs_arrays_matches_scalar_eval():
    m = TwoPhaseModel(halfgap().limits, bumps={0: coeffs(p=0.05, a=0.0)})
    xs = np.arange(-4, 5)
    p, q, a, b = site_coeffs_arrays(m, xs)
    for i, x in enumerate(xs):
        c = site_coeffs(m, int(x))
        assert (p[i], q[i], a[i], b[i]) == (c.p, c.q, c.a, c.b)


def test_validate_rejects_gap_bound_and_normalization():
    with pytest.raises(GapBoundViolation):
        validate_model(TwoPhaseModel(PhaseLimits(-1.0, 0.6, 0.6, -0.6), bumps={}))
    broken = SiteCoeffs(p=0.6, q=0.9, a=0.0, b=1.0)
    with pytest.raises(NormalizationError):
        validate_model(PeriodicModel(cells=(broken,)))


def test_dict_round_trip_all_kinds():
    models = [
        TwoPhaseModel(halfgap().limits, bumps={2: coeffs(p=0.1, a=0.2, q=0.2 + 0.1j)}),
        PeriodicModel(cells=(coeffs(p=0.1, a=0.2), coeffs(p=0.3, a=0.4))),
        TabulatedModel(
            lo=0,
            cells=(coeffs(p=0.1, a=0.1),),
            tail_left=coeffs(p=-0.5, a=0.5),
            tail_right=coeffs(p=0.5, a=-0.5),
        ),
    ]
    for m in models:
        assert model_from_dict(model_to_dict(m)) == m


def test_toml_round_trip_and_unknown_keys():
    m = TwoPhaseModel(halfgap().limits, bumps={1: coeffs(p=0.3, a=0.1)})
    text = dump_model_toml(m)
    assert load_model_toml(text) == m
    with pytest.raises(ConfigError):
        model_from_dict({"kind": "two_phase", "limits": model_to_dict(m)["limits"], "typo": 1})
    with pytest.raises(ConfigError):
        model_from_dict({"kind": "unheard_of"})


def test_toml_run_section_is_tolerated():
    text = dump_model_toml(halfgap()) + '\n[run]\ncommand = "index"\n'
    assert load_model_toml(text) == halfgap()
