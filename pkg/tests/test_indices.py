"""Index engine: weight identities, series verdicts, closed forms, case table."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splitstep import (
    CaseBoundary,
    ChiralPair,
    GapClosed,
    InconclusiveClassification,
    PeriodicModel,
    PhaseLimits,
    SiteCoeffs,
    TabulatedModel,
    TwoPhaseModel,
    coeffs,
    index_via_trace,
    mobius_weight,
)
from splitstep.indices import (
    CASE_TABLE,
    classify_index,
    constant_model,
    delta_at,
    delta_log_abs2,
    delta_series,
    index_report,
    representative_limits,
    sixteen_case_row,
    two_phase_index,
    witten_formulas,
)
from splitstep.walk import Window, build_walk

SERIES_ATOL = 1e-15

unit = st.floats(min_value=-0.9, max_value=0.9)


def halfgap(p0=0.6):
    return TwoPhaseModel(PhaseLimits(-p0, p0, p0, -p0), bumps={})


def doublegap(a0=0.5):
    return TwoPhaseModel(PhaseLimits(0.0, -a0, 0.0, a0), bumps={})


def test_delta_hand_values():
    m = constant_model(0.0, 0.5)
    assert delta_at(m, 1, +1, 0) == pytest.approx(math.sqrt(3.0))
    assert delta_at(m, 2, +1, 0) == pytest.approx(math.sqrt(1.0 / 3.0))


@given(unit, unit, st.sampled_from([1, 2]), st.sampled_from([1, -1]))
def test_delta_modulus_identity_and_branch_product(p, a, j, sign):
    m = constant_model(p, a)
    d = delta_at(m, j, sign, 0)
    expected = mobius_weight((-1) ** j * p) * mobius_weight(-sign * (-1) ** j * a)
    assert abs(d) ** 2 == pytest.approx(expected, rel=1e-12)
    other = delta_at(m, 3 - j, sign, 0)
    assert abs(d) * abs(other) == pytest.approx(1.0, rel=1e-12)


def test_delta_phase_carries_coefficient_phases():
    q = 0.8 * np.exp(0.7j)
    b = 0.6 * np.exp(-0.4j)
    m = PeriodicModel(cells=(coeffs(p=0.6, a=0.8, q=q, b=b),))
    d = delta_at(m, 1, +1, 0)
    assert np.angle(d) == pytest.approx(-(0.7 - 0.4))


def test_gauge_phases_do_not_change_verdicts():
    rng = np.random.default_rng(8)
    base = halfgap()
    phases = rng.uniform(-np.pi, np.pi, size=2)
    twisted = TwoPhaseModel(
        base.limits,
        bumps={
            0: coeffs(p=0.6, a=-0.6, q=0.8 * np.exp(1j * phases[0]), b=0.8 * np.exp(1j * phases[1])),
        },
    )
    for j in (1, 2):
        for s in (+1, -1):
            v0 = delta_series(base, j, s)
            v1 = delta_series(twisted, j, s)
            assert v0.status == v1.status
            if v0.value is not None:
                assert v1.value == pytest.approx(v0.value, rel=1e-12)


def test_halfgap_series_finite_with_exact_value():
    v = delta_series(halfgap(0.6), 1, +1)
    assert v.status == "finite"
    assert v.left_tail_ratio == pytest.approx(0.0625, abs=1e-15)
    assert v.right_tail_ratio == pytest.approx(0.0625, abs=1e-15)
    assert v.value == pytest.approx(2.0 / 15.0, abs=SERIES_ATOL)
    assert delta_series(halfgap(0.6), 2, +1).status == "divergent"


def test_halfgap_minus_point_sits_on_flat_tails():
    m = halfgap(0.6)
    for j in (1, 2):
        v = delta_series(m, j, -1)
        assert v.status == "divergent"
        assert v.left_tail_ratio == 1.0 and v.right_tail_ratio == 1.0
    assert classify_index(m, -1).value == 0


def test_doublegap_indices_and_value():
    m = doublegap(0.5)
    assert classify_index(m, +1).value == -1
    assert classify_index(m, -1).value == +1
    assert delta_series(m, 2, +1).value == pytest.approx(1.0, rel=1e-12)


def test_constant_model_never_hosts_kernel():
    m = constant_model(0.0, 0.5)
    assert classify_index(m, +1).value == 0
    assert classify_index(m, -1).value == 0
    assert delta_series(m, 2, +1).left_tail_ratio == pytest.approx(3.0)


@given(unit, unit, unit, unit, st.sampled_from([1, -1]))
@settings(max_examples=150, deadline=None)
def test_series_never_finite_for_both_branches(pm, am, pp, ap, sign):
    m = TwoPhaseModel(PhaseLimits(pm, am, pp, ap), bumps={})
    one = delta_series(m, 1, sign)
    two = delta_series(m, 2, sign)
    assert not (one.status == "finite" and two.status == "finite")


@given(unit, unit, unit, unit, st.sampled_from([1, -1]))
@settings(max_examples=100, deadline=None)
def test_series_classification_matches_closed_form(pm, am, pp, ap, sign):
    lims = PhaseLimits(pm, am, pp, ap)
    try:
        closed = two_phase_index(lims, sign)
    except GapClosed:
        return
    assert classify_index(TwoPhaseModel(lims, bumps={}), sign).value == closed


def test_perturbations_do_not_move_the_index():
    rng = np.random.default_rng(4)
    base = halfgap(0.6)
    bumps = {int(x): coeffs(p=rng.uniform(-0.9, 0.9), a=rng.uniform(-0.9, 0.9)) for x in range(-6, 7)}
    m = TwoPhaseModel(base.limits, bumps=bumps)
    assert classify_index(m, +1).value == classify_index(base, +1).value == +1
    finite = delta_series(m, 1, +1)
    assert finite.status == "finite" and finite.value > 0.0


def test_tabulated_tails_drive_classification():
    m = TabulatedModel(
        lo=-2,
        cells=tuple(coeffs(p=0.05 * k, a=0.0) for k in range(5)),
        tail_left=coeffs(p=-0.6, a=0.6),
        tail_right=coeffs(p=0.6, a=-0.6),
    )
    assert classify_index(m, +1).value == +1


def test_periodic_series_always_divergent():
    rng = np.random.default_rng(12)
    for _ in range(20):
        cells = tuple(coeffs(p=rng.uniform(-0.9, 0.9), a=rng.uniform(-0.9, 0.9)) for _ in range(int(rng.integers(1, 5))))
        m = PeriodicModel(cells=cells)
        for j in (1, 2):
            for s in (+1, -1):
                assert delta_series(m, j, s).status == "divergent"


def test_two_phase_index_examples_and_gap_errors():
    assert two_phase_index(halfgap(0.6).limits, +1) == +1
    assert two_phase_index(doublegap(0.5).limits, +1) == -1
    flat = PhaseLimits(0.3, 0.1, 0.3, 0.1)
    assert two_phase_index(flat, +1) == 0 and two_phase_index(flat, -1) == 0
    with pytest.raises(GapClosed):
        two_phase_index(halfgap(0.6).limits, -1)
    with pytest.raises(GapClosed):
        two_phase_index(PhaseLimits(0.5, 0.5, 0.1, 0.6), +1)


def test_partial_sum_policy_agrees_when_gapped():
    for m in (halfgap(0.4), doublegap(0.3)):
        for s in (+1, -1):
            try:
                closed = two_phase_index(m.limits, s)
            except GapClosed:
                with pytest.raises(InconclusiveClassification):
                    classify_index(m, s, policy="partial_sum")
                continue
            assert classify_index(m, s, policy="partial_sum").value == closed
    v = delta_series(halfgap(0.6), 1, +1, policy="partial_sum")
    assert v.status == "finite" and v.value == pytest.approx(2.0 / 15.0, rel=1e-14)


def test_sixteen_case_rows_and_spec_examples():
    seen = set()
    for cid in range(1, 17):
        row = sixteen_case_row(representative_limits(cid))
        assert row.case_id == cid
        seen.add(cid)
        assert row.i_plus == row.ind_plus + row.ind_minus
        assert row.i_minus == row.ind_plus - row.ind_minus
        assert two_phase_index(representative_limits(cid), +1) == row.ind_plus
        assert two_phase_index(representative_limits(cid), -1) == row.ind_minus
    assert seen == set(range(1, 17))
    assert CASE_TABLE[0] == (0, 0, 0, 0)
    assert CASE_TABLE[1] == (+1, -1, 0, +2)
    assert CASE_TABLE[11] == (-1, -1, -2, 0)


def test_case_boundary_raises():
    with pytest.raises(CaseBoundary):
        sixteen_case_row(PhaseLimits(0.5, 0.5, 0.1, 0.6))
    with pytest.raises(CaseBoundary):
        witten_formulas(PhaseLimits(0.1, 0.6, -0.3, 0.3))


def test_witten_formulas_match_table_everywhere():
    for cid in range(1, 17):
        lims = representative_limits(cid)
        row = sixteen_case_row(lims)
        assert witten_formulas(lims) == (row.i_plus, row.i_minus)
    # fourth branch with equal end signs of p cancels
    assert witten_formulas(PhaseLimits(0.6, 0.1, 0.6, 0.1)) == (0, 0)
    # case 2 columns directly
    assert witten_formulas(PhaseLimits(0.1, 0.5, 0.1, -0.5)) == (0, 2)


def test_classification_matches_truncation_oracle():
    win = Window.centered(160, "open")
    for model, expected_plus, expected_minus in (
        (halfgap(0.6), +1, 0),
        (doublegap(0.5), -1, +1),
    ):
        ops = build_walk(model, win)
        pair = ChiralPair(ops.shift_factor, ops.u)
        for sign, expected in ((+1, expected_plus), (-1, expected_minus)):
            assert classify_index(model, sign).value == expected
            assert index_via_trace(pair, sign).value == expected


def test_index_report_shape_and_invariants():
    rep = index_report(halfgap(0.6))
    assert rep["ind_plus"] == 1 and rep["ind_minus"] == 0
    assert rep["witten"] == rep["ind_plus"] + rep["ind_minus"]
    assert rep["witten_prime"] == rep["ind_plus"] - rep["ind_minus"]
    assert rep["gap_plus"] is True and rep["gap_minus"] is False
    assert rep["evidence"]["plus"]["closed_form"] == 1
    assert rep["evidence"]["minus"]["closed_form"] is None
    json.dumps(rep)  # must be serializable as-is
    rep = index_report(constant_model(0.2, 0.4))
    assert rep["gap_plus"] is None and rep["ind_plus"] == 0
