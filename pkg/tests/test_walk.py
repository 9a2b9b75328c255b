"""Walk assembly: factor identities, shift conventions, rotation-walk equivalence."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splitstep import (
    ConfigError,
    DimensionMismatch,
    DomainError,
    GapBoundViolation,
    PeriodicModel,
    PhaseLimits,
    TwoPhaseModel,
    coeffs,
)
from splitstep.walk import (
    State,
    Window,
    apply,
    apply_power,
    build_alternating_walk,
    build_coin,
    build_shift_factor,
    build_walk,
    chiral_residual,
    component_swap,
    delta_state,
    equivalence_residual,
    load_state_csv,
    rotation_to_split_step,
    save_state_csv,
    state_to_vector,
    translation_matrix,
    unitarity_residual,
    vector_to_state,
)

IDENTITY_ATOL = 1e-12


def halfgap(p0=0.6):
    return TwoPhaseModel(PhaseLimits(-p0, p0, p0, -p0), bumps={})


def random_model(rng, kind):
    if kind == "two_phase":
        pm, am, pp, ap = rng.uniform(-0.9, 0.9, size=4)
        bumps = {int(x): coeffs(p=rng.uniform(-0.9, 0.9), a=rng.uniform(-0.9, 0.9)) for x in rng.integers(-5, 6, size=3)}
        return TwoPhaseModel(PhaseLimits(pm, am, pp, ap), bumps=bumps)
    cells = tuple(coeffs(p=rng.uniform(-0.9, 0.9), a=rng.uniform(-0.9, 0.9)) for _ in range(int(rng.integers(1, 4))))
    return PeriodicModel(cells=cells)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["two_phase", "periodic"]))
@settings(max_examples=30, deadline=None)
def test_periodic_factors_are_exact_symmetries(seed, kind):
    rng = np.random.default_rng(seed)
    model = random_model(rng, kind)
    ops = build_walk(model, Window.centered(48, "periodic"))
    n = ops.u.shape[0]
    assert np.abs(ops.shift_factor - ops.shift_factor.conj().T).max() < IDENTITY_ATOL
    assert np.abs(ops.shift_factor @ ops.shift_factor - np.eye(n)).max() < IDENTITY_ATOL
    assert np.abs(ops.coin @ ops.coin - np.eye(n)).max() < IDENTITY_ATOL
    assert unitarity_residual(ops.u) < IDENTITY_ATOL
    assert chiral_residual(ops.u, ops.shift_factor) < IDENTITY_ATOL
    # the coin is the companion involution shift_factor @ u ... i.e. u = shift_factor @ coin
    assert np.abs(ops.shift_factor @ ops.u - ops.coin).max() < IDENTITY_ATOL


def test_free_walk_shifts_components_oppositely():
    free = PeriodicModel(cells=(coeffs(p=0.0, a=0.0),))
    win = Window(-2, 2, "periodic")
    ops = build_walk(free, win)
    moved = apply(ops, delta_state(win, 0, "upper"))
    assert abs(moved.upper[win.index(-1)] - 1.0) < IDENTITY_ATOL and moved.norm() == pytest.approx(1.0)
    moved = apply(ops, delta_state(win, 0, "lower"))
    assert abs(moved.lower[win.index(1)] - 1.0) < IDENTITY_ATOL


def test_open_truncation_differs_only_at_boundary():
    wo, wp = Window(-30, 29, "open"), Window(-30, 29, "periodic")
    uo = build_walk(halfgap(), wo).u
    up = build_walk(halfgap(), wp).u
    diff = np.abs(uo - up)
    assert diff[4:-4, 4:-4].max() == 0.0
    assert diff.max() > 0.1


def test_open_left_edge_reads_model_below_window():
    m = TwoPhaseModel(halfgap().limits, bumps={-31: coeffs(p=0.123, a=0.0)})
    g = build_shift_factor(m, Window(-30, 29, "open"))
    assert g[1, 1] == pytest.approx(-0.123)


def test_translation_covariance_for_constant_models():
    const = PeriodicModel(cells=(coeffs(p=0.3, a=-0.4),))
    win = Window.centered(40, "periodic")
    u = build_walk(const, win).u
    t = translation_matrix(win)
    assert np.abs(t @ u - u @ t).max() < IDENTITY_ATOL


def test_zero_angle_walks_are_pure_shifts():
    win = Window(-2, 2, "periodic")
    u_rot = build_alternating_walk(0.0, 0.0, win)
    swap = component_swap(win)
    free = build_walk(PeriodicModel(cells=(coeffs(p=0.0, a=0.0),)), win).u
    assert np.abs(swap @ u_rot @ swap - free).max() == 0.0


def test_alternating_walk_unitary_on_periodic_windows():
    rng = np.random.default_rng(1)
    win = Window.centered(30, "periodic")
    for _ in range(5):
        u = build_alternating_walk(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), win)
        assert unitarity_residual(u) < IDENTITY_ATOL


def test_rotation_model_coefficients_use_shifted_angle():
    t1 = np.array([0.1, 0.2, 0.3])
    t2 = np.array([0.4, 0.5, 0.6])
    m = rotation_to_split_step(t1, t2)
    assert m.cells[0].p == pytest.approx(np.sin(0.5))  # theta2 at the next site
    assert m.cells[2].p == pytest.approx(np.sin(0.4))  # wraps around
    assert m.cells[1].a == pytest.approx(-np.sin(0.2))
    with pytest.raises(GapBoundViolation):
        rotation_to_split_step(np.pi / 2, 0.3)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_equivalence_constant_angles(seed):
    rng = np.random.default_rng(seed)
    t1, t2 = rng.uniform(-1.4, 1.4, size=2)
    assert equivalence_residual(t1, t2, Window.centered(40, "periodic")) < 1e-12


def test_equivalence_site_dependent_profiles():
    rng = np.random.default_rng(17)
    win = Window.centered(80, "periodic")
    for _ in range(5):
        t1 = rng.uniform(-1.3, 1.3, size=80)
        t2 = rng.uniform(-1.3, 1.3, size=80)
        assert equivalence_residual(t1, t2, win) < 1e-12
    with pytest.raises(ConfigError):
        equivalence_residual(t1[:33], t2[:33], win)
    with pytest.raises(ConfigError):
        equivalence_residual(0.1, 0.2, Window.centered(40, "open"))


def test_window_validation_and_centering():
    assert Window.centered(160).lo == -80 and Window.centered(160).hi == 79
    assert Window.centered(161).lo == -80 and Window.centered(161).hi == 80
    with pytest.raises(ConfigError):
        Window(1, 10)
    with pytest.raises(ConfigError):
        Window(-1, 1)
    with pytest.raises(ConfigError):
        Window(0, 3, "reflecting")


def test_apply_power_and_norm_preservation():
    rng = np.random.default_rng(3)
    win = Window.centered(50, "periodic")
    ops = build_walk(halfgap(), win)
    st_ = State(win, rng.standard_normal(50) + 1j * rng.standard_normal(50), rng.standard_normal(50) + 1j * rng.standard_normal(50))
    assert abs(apply_power(ops, st_, 0).norm() - st_.norm()) == 0.0
    assert abs(apply_power(ops, st_, 25).norm() - st_.norm()) < 1e-10
    with pytest.raises(DomainError):
        apply_power(ops, st_, -1)
    with pytest.raises(DimensionMismatch):
        apply(ops, State(Window.centered(40, "periodic"), np.zeros(40), np.zeros(40)))


def test_vector_interleaving_round_trip():
    win = Window(0, 3, "open")
    st_ = State(win, [1, 2, 3, 4], [5, 6, 7, 8])
    vec = state_to_vector(st_)
    assert vec[0] == 1 and vec[1] == 5 and vec[6] == 4
    back = vector_to_state(win, vec)
    assert np.array_equal(back.upper, st_.upper) and np.array_equal(back.lower, st_.lower)


def test_state_csv_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    win = Window(-4, 3, "open")
    st_ = State(win, rng.standard_normal(8) + 1j * rng.standard_normal(8), rng.standard_normal(8) + 1j * rng.standard_normal(8))
    path = tmp_path / "state.csv"
    save_state_csv(st_, path)
    back = load_state_csv(path)
    assert back.window == win
    assert np.abs(back.upper - st_.upper).max() == 0.0
    assert np.abs(back.lower - st_.lower).max() == 0.0


def test_coin_matches_sitewise_blocks():
    m = halfgap()
    win = Window(-2, 2, "open")
    c = build_coin(m, win)
    assert c[0, 0] == pytest.approx(0.6)  # a at site -2 equals a_minus
    assert c[0, 1] == pytest.approx(0.8)
    assert c[1, 1] == pytest.approx(-0.6)
