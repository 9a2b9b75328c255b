"""Seeded verification suites: every headline claim as a pass/fail check.

Each criterion function returns a JSON-ready dict with a ``passed`` flag and
numeric evidence.  The checks are deterministic given the seed, and the
tolerances are module constants so reports and tests quote the same numbers.
"""

import numpy as np

from . import params
from .chiral import (
    ChiralPair,
    conjugated_pair,
    index_via_blocks,
    index_via_trace,
    kernel_dim,
    negation_identities,
    prime_pair,
    random_chiral_pair,
    random_unitary,
    square_indices,
    witten_index,
    witten_index_prime,
)
from .eigenstates import build_eigenstate, decay_rates, envelope_check
from .indices import classify_index, delta_series, representative_limits, sixteen_case_row, two_phase_index, witten_formulas
from .spectrum import ISOLATED, SEAM_ARTIFACT, classified_spectrum, model_bands, truncated_spectrum
from .walk import OPEN, PERIODIC, Window, build_walk, chiral_residual, equivalence_residual, unitarity_residual

DEFAULT_SEED = 7

CHIRAL_TOL = 1e-12
RESIDUAL_TOL = 1e-10
SLOPE_TOL = 1e-8
ENVELOPE_EPSILON = 0.01
BAND_TOL = 1e-10
POINT_TOL = 1e-6
MIDGAP_EXCLUSION = 0.1
EQUIVALENCE_TOL = 1e-12

HALF_GAPPED_FAMILY = (0.2, 0.4, 0.6, 0.8)
DOUBLE_GAPPED_FAMILY = (0.3, 0.5, 0.7)


def half_gapped(p0: float) -> params.TwoPhaseModel:
    """p flips sign upward across the origin while a flips downward."""
    return params.TwoPhaseModel(params.PhaseLimits(-p0, p0, p0, -p0), bumps={})


def double_gapped(a0: float) -> params.TwoPhaseModel:
    """p vanishes at both ends while a flips sign upward."""
    return params.TwoPhaseModel(params.PhaseLimits(0.0, -a0, 0.0, a0), bumps={})


def _random_row(rng: np.random.Generator) -> params.SiteCoeffs:
    p, a = rng.uniform(-0.9, 0.9, size=2)
    phi, psi = rng.uniform(-np.pi, np.pi, size=2)
    return params.coeffs(
        p,
        a,
        q=np.sqrt(1.0 - p * p) * np.exp(1j * phi),
        b=np.sqrt(1.0 - a * a) * np.exp(1j * psi),
    )


def random_model(rng: np.random.Generator) -> params.Model:
    """One validated model of a random kind with random phases everywhere."""
    kind = int(rng.integers(0, 4))
    if kind == 0:
        model = params.PeriodicModel(cells=(_random_row(rng),))
    elif kind == 1:
        pm, am, pp, ap = rng.uniform(-0.9, 0.9, size=4)
        sites = rng.choice(np.arange(-8, 9), size=int(rng.integers(0, 4)), replace=False)
        model = params.TwoPhaseModel(
            params.PhaseLimits(pm, am, pp, ap),
            bumps={int(x): _random_row(rng) for x in sites},
        )
    elif kind == 2:
        period = int(rng.integers(2, 6))
        model = params.PeriodicModel(cells=tuple(_random_row(rng) for _ in range(period)))
    else:
        width = int(rng.integers(1, 7))
        model = params.TabulatedModel(
            lo=int(rng.integers(-6, 1)),
            cells=tuple(_random_row(rng) for _ in range(width)),
            tail_left=_random_row(rng),
            tail_right=_random_row(rng),
        )
    return params.validate_model(model)


def _truncation_indices(model: params.Model, window: Window) -> tuple[int, int]:
    ops = build_walk(model, window)
    pair = ChiralPair(chiral_op=ops.shift_factor, u=ops.u)
    return (index_via_trace(pair, +1).value, index_via_trace(pair, -1).value)


def criterion_01_chiral_symmetry(seed: int = DEFAULT_SEED) -> dict:
    """50 random models on a 100-site ring satisfy the chiral identity."""
    rng = np.random.default_rng(seed)
    window = Window.centered(100, PERIODIC)
    worst_chiral = 0.0
    worst_unitary = 0.0
    for _ in range(50):
        ops = build_walk(random_model(rng), window)
        worst_chiral = max(worst_chiral, chiral_residual(ops.u, ops.shift_factor))
        worst_unitary = max(worst_unitary, unitarity_residual(ops.u))
    return {
        "criterion": 1,
        "name": "chiral symmetry and unitarity of random walks",
        "passed": worst_chiral < CHIRAL_TOL and worst_unitary < CHIRAL_TOL,
        "detail": {
            "models": 50,
            "window": [window.lo, window.hi],
            "max_chiral_residual": worst_chiral,
            "max_unitarity_residual": worst_unitary,
            "tolerance": CHIRAL_TOL,
        },
    }


def criterion_02_truncation_oracle(seed: int = DEFAULT_SEED) -> dict:
    """Series classification equals the finite-matrix trace index exactly."""
    window = Window.centered(160, OPEN)
    rows = []
    ok = True
    for label, model in [(f"half_gapped p0={p0}", half_gapped(p0)) for p0 in HALF_GAPPED_FAMILY] + [
        (f"double_gapped a0={a0}", double_gapped(a0)) for a0 in DOUBLE_GAPPED_FAMILY
    ]:
        numeric = _truncation_indices(model, window)
        series = (classify_index(model, +1).value, classify_index(model, -1).value)
        rows.append({"model": label, "series": list(series), "truncation": list(numeric)})
        ok = ok and series == numeric
    return {
        "criterion": 2,
        "name": "series index equals truncation trace on both families",
        "passed": ok,
        "detail": {"window": [window.lo, window.hi], "cases": rows},
    }


def criterion_03_sixteen_cases(seed: int = DEFAULT_SEED) -> dict:
    """The closed-form index reproduces all 16 classification rows."""
    rows = []
    ok = True
    for case_id in range(1, 17):
        limits = representative_limits(case_id)
        row = sixteen_case_row(limits)
        got = (two_phase_index(limits, +1), two_phase_index(limits, -1))
        expected = (row.ind_plus, row.ind_minus)
        match = (
            row.case_id == case_id
            and got == expected
            and got[0] + got[1] == row.i_plus
            and got[0] - got[1] == row.i_minus
        )
        rows.append({"case": case_id, "expected": list(expected), "got": list(got)})
        ok = ok and match
    return {
        "criterion": 3,
        "name": "two-phase index reproduces the 16-case table",
        "passed": ok,
        "detail": {"rows": rows},
    }


def criterion_04_witten_formulas(seed: int = DEFAULT_SEED) -> dict:
    """Sign-based closed forms for i_plus, i_minus agree with the table."""
    rows = []
    ok = True
    for case_id in range(1, 17):
        limits = representative_limits(case_id)
        row = sixteen_case_row(limits)
        got = witten_formulas(limits)
        rows.append({"case": case_id, "expected": [row.i_plus, row.i_minus], "got": list(got)})
        ok = ok and got == (row.i_plus, row.i_minus)
    return {
        "criterion": 4,
        "name": "endpoint-sign formulas match the table",
        "passed": ok,
        "detail": {"rows": rows},
    }


def criterion_05_eigenstate_residual(seed: int = DEFAULT_SEED) -> dict:
    """The closed-form +1 state of the half-gapped walk is an exact eigenvector."""
    model = half_gapped(0.6)
    window = Window.centered(160, OPEN)
    bundle = build_eigenstate(model, 1, +1, window)
    dim_plus = kernel_dim(build_walk(model, window).u, shift=1.0)
    return {
        "criterion": 5,
        "name": "half-gapped +1 eigenstate residual and kernel dimension",
        "passed": bundle.residual < RESIDUAL_TOL and dim_plus == 1,
        "detail": {
            "window": [window.lo, window.hi],
            "residual": bundle.residual,
            "tolerance": RESIDUAL_TOL,
            "kernel_dim_plus": dim_plus,
        },
    }


def criterion_06_decay_envelope(seed: int = DEFAULT_SEED) -> dict:
    """Measured decay slopes hit log(1/16) and stay inside the envelope."""
    model = half_gapped(0.6)
    window = Window.centered(160, OPEN)
    bundle = build_eigenstate(model, 1, +1, window)
    rates = decay_rates(model, 1, +1, epsilon=ENVELOPE_EPSILON)
    report = envelope_check(bundle, rates)
    target = float(np.log(0.0625))
    err_left = abs(report.slope_left - target)
    err_right = abs(report.slope_right - target)
    return {
        "criterion": 6,
        "name": "exponential decay slopes and two-sided envelope",
        "passed": err_left < SLOPE_TOL and err_right < SLOPE_TOL,
        "detail": {
            "target_slope": target,
            "slope_left": report.slope_left,
            "slope_right": report.slope_right,
            "tolerance": SLOPE_TOL,
            "epsilon": ENVELOPE_EPSILON,
            "x_star": report.x_star,
        },
    }


def criterion_07_spectra(seed: int = DEFAULT_SEED) -> dict:
    """Band confinement for a constant ring; lone mid-gap state for the half-gapped ring."""
    constant = params.PeriodicModel(cells=(params.coeffs(0.0, 0.5),))
    ring = Window.centered(400, PERIODIC)
    bands = model_bands(constant)
    values = truncated_spectrum(constant, ring)
    worst = max(bands.band_distance(float(v.real)) for v in values)

    points = classified_spectrum(half_gapped(0.6), Window(-200, 200, PERIODIC))
    non_seam = [p for p in points if p.classification != SEAM_ARTIFACT]
    at_one = [p for p in non_seam if abs(p.eigenvalue - 1.0) < POINT_TOL]
    intruders = [
        p for p in non_seam if POINT_TOL <= abs(p.eigenvalue - 1.0) < MIDGAP_EXCLUSION
    ]
    isolated = [p for p in points if p.classification == ISOLATED]
    passed = worst < BAND_TOL and len(at_one) == 1 and not intruders and len(isolated) == 1
    return {
        "criterion": 7,
        "name": "truncated spectra match the band picture",
        "passed": passed,
        "detail": {
            "constant_max_band_distance": worst,
            "band_tolerance": BAND_TOL,
            "half_gapped_states_at_plus1": len(at_one),
            "half_gapped_intruders": len(intruders),
            "isolated_count": len(isolated),
        },
    }


def criterion_08_square_indices(seed: int = DEFAULT_SEED) -> dict:
    """Squared-walk indices: the minus index dies and the plus index is the Witten index."""
    model = double_gapped(0.5)
    window = Window.centered(160, OPEN)
    ops = build_walk(model, window)
    pair = ChiralPair(chiral_op=ops.shift_factor, u=ops.u)
    sq = square_indices(pair)
    walk_ok = (
        sq.ind_plus == witten_index(pair) == 0
        and sq.ind_minus == 0
        and sq.dim_ker_minus_one == 2
        and sq.dim_ker_plus_one == 0
    )
    rng = np.random.default_rng(seed)
    random_ok = True
    for _ in range(20):
        p = random_chiral_pair(rng, 10)
        s = square_indices(p)
        random_ok = random_ok and s.ind_plus == witten_index(p) and s.ind_minus == 0
    return {
        "criterion": 8,
        "name": "squared-walk index identities",
        "passed": walk_ok and random_ok,
        "detail": {
            "double_gapped": {
                "ind_plus_square": sq.ind_plus,
                "ind_minus_square": sq.ind_minus,
                "dim_ker_square_minus_one": sq.dim_ker_minus_one,
            },
            "random_pairs": 20,
            "random_ok": random_ok,
        },
    }


def criterion_09_equivalence(seed: int = DEFAULT_SEED) -> dict:
    """The rotation walk is the split-step walk after a component swap."""
    rng = np.random.default_rng(seed)
    window = Window.centered(80, PERIODIC)
    residuals = []
    for _ in range(20):
        t1, t2 = rng.uniform(-1.35, 1.35, size=2)
        residuals.append(equivalence_residual(float(t1), float(t2), window))
    for period in (2, 4, 5, 8, 10):
        t1 = rng.uniform(-1.3, 1.3, size=period)
        t2 = rng.uniform(-1.3, 1.3, size=period)
        residuals.append(equivalence_residual(t1, t2, window))
    worst = max(residuals)
    return {
        "criterion": 9,
        "name": "rotation-walk equivalence residuals",
        "passed": worst < EQUIVALENCE_TOL,
        "detail": {
            "constant_draws": 20,
            "profile_draws": 5,
            "window": [window.lo, window.hi],
            "max_residual": worst,
            "tolerance": EQUIVALENCE_TOL,
        },
    }


def criterion_10_pair_invariants(seed: int = DEFAULT_SEED) -> dict:
    """Index identities on random finite chiral pairs."""
    rng = np.random.default_rng(seed)
    checked = 0
    conjugations = 0
    ok = True
    for k in range(100):
        dim = int(rng.integers(4, 13))
        pair = random_chiral_pair(rng, dim)
        plus = index_via_trace(pair, +1).value
        minus = index_via_trace(pair, -1).value
        ok = ok and index_via_blocks(pair, +1) == plus
        ok = ok and index_via_blocks(pair, -1) == minus
        ok = ok and witten_index(pair) == plus + minus
        ok = ok and witten_index(prime_pair(pair)) == witten_index_prime(pair)
        ok = ok and negation_identities(pair).all_hold
        if k < 10:
            moved = conjugated_pair(pair, random_unitary(rng, dim))
            ok = ok and index_via_trace(moved, +1).value == plus
            ok = ok and index_via_trace(moved, -1).value == minus
            conjugations += 1
        checked += 1
    return {
        "criterion": 10,
        "name": "random-pair index identities",
        "passed": ok,
        "detail": {"pairs": checked, "conjugation_checks": conjugations},
    }


def criterion_11_mutual_exclusivity(seed: int = DEFAULT_SEED) -> dict:
    """No model has both branch series finite at the same symmetry point."""
    rng = np.random.default_rng(seed)
    models = [half_gapped(p0) for p0 in HALF_GAPPED_FAMILY]
    models += [double_gapped(a0) for a0 in DOUBLE_GAPPED_FAMILY]
    models += [
        params.TwoPhaseModel(params.PhaseLimits(*rng.uniform(-0.95, 0.95, size=4)), bumps={})
        for _ in range(200)
    ]
    models += [
        params.TwoPhaseModel(representative_limits(case_id), bumps={})
        for case_id in range(1, 17)
    ]
    violations = 0
    for model in models:
        for sign in (+1, -1):
            one = delta_series(model, 1, sign)
            two = delta_series(model, 2, sign)
            if one.status == "finite" and two.status == "finite":
                violations += 1
    return {
        "criterion": 11,
        "name": "branch series are never both summable",
        "passed": violations == 0,
        "detail": {"models": len(models), "violations": violations},
    }


ALL_CRITERIA = (
    criterion_01_chiral_symmetry,
    criterion_02_truncation_oracle,
    criterion_03_sixteen_cases,
    criterion_04_witten_formulas,
    criterion_05_eigenstate_residual,
    criterion_06_decay_envelope,
    criterion_07_spectra,
    criterion_08_square_indices,
    criterion_09_equivalence,
    criterion_10_pair_invariants,
    criterion_11_mutual_exclusivity,
)


def run_all(seed: int = DEFAULT_SEED) -> dict:
    """Run every criterion; the summary is JSON-ready and deterministic."""
    results = [fn(seed) for fn in ALL_CRITERIA]
    return {
        "seed": seed,
        "criteria": results,
        "all_passed": all(r["passed"] for r in results),
    }
