"""Acceptance gate: the eleven headline checks, one pass/fail line each.

Every test runs one seeded criterion from splitstep.verify at the pinned
tolerance and prints a single summary line (visible with pytest -s or on
failure).  The tolerance pins below freeze the numbers the criteria must
use; loosening them in the library would fail here first.
"""

import json

from splitstep import verify

SEED = verify.DEFAULT_SEED


def _run(fn):
    result = fn(SEED)
    line = f"criterion {result['criterion']:02d}: {'PASS' if result['passed'] else 'FAIL'} - {result['name']}"
    print(line)
    assert result["passed"], json.dumps(result, indent=2, sort_keys=True, default=str)
    return result


def test_tolerances_are_pinned():
    assert verify.CHIRAL_TOL == 1e-12
    assert verify.RESIDUAL_TOL == 1e-10
    assert verify.SLOPE_TOL == 1e-8
    assert verify.ENVELOPE_EPSILON == 0.01
    assert verify.BAND_TOL == 1e-10
    assert verify.POINT_TOL == 1e-6
    assert verify.MIDGAP_EXCLUSION == 0.1
    assert verify.EQUIVALENCE_TOL == 1e-12
    assert verify.HALF_GAPPED_FAMILY == (0.2, 0.4, 0.6, 0.8)
    assert verify.DOUBLE_GAPPED_FAMILY == (0.3, 0.5, 0.7)


def test_criterion_01_chiral_symmetry():
    result = _run(verify.criterion_01_chiral_symmetry)
    assert result["detail"]["models"] == 50
    assert result["detail"]["max_chiral_residual"] < 1e-12
    assert result["detail"]["max_unitarity_residual"] < 1e-12


def test_criterion_02_series_equals_truncation():
    result = _run(verify.criterion_02_truncation_oracle)
    assert len(result["detail"]["cases"]) == 7
    for case in result["detail"]["cases"]:
        assert case["series"] == case["truncation"]


def test_criterion_03_sixteen_case_table():
    result = _run(verify.criterion_03_sixteen_cases)
    assert len(result["detail"]["rows"]) == 16


def test_criterion_04_witten_formulas():
    result = _run(verify.criterion_04_witten_formulas)
    assert len(result["detail"]["rows"]) == 16


def test_criterion_05_eigenstate_residual():
    result = _run(verify.criterion_05_eigenstate_residual)
    assert result["detail"]["residual"] < 1e-10
    assert result["detail"]["kernel_dim_plus"] == 1


def test_criterion_06_decay_envelope():
    result = _run(verify.criterion_06_decay_envelope)
    detail = result["detail"]
    assert abs(detail["slope_left"] - detail["target_slope"]) < 1e-8
    assert abs(detail["slope_right"] - detail["target_slope"]) < 1e-8


def test_criterion_07_spectra():
    result = _run(verify.criterion_07_spectra)
    detail = result["detail"]
    assert detail["constant_max_band_distance"] < 1e-10
    assert detail["half_gapped_states_at_plus1"] == 1
    assert detail["half_gapped_intruders"] == 0


def test_criterion_08_square_indices():
    result = _run(verify.criterion_08_square_indices)
    squared = result["detail"]["double_gapped"]
    assert squared["ind_plus_square"] == 0
    assert squared["ind_minus_square"] == 0
    assert squared["dim_ker_square_minus_one"] == 2


def test_criterion_09_equivalence():
    result = _run(verify.criterion_09_equivalence)
    assert result["detail"]["max_residual"] < 1e-12


def test_criterion_10_pair_invariants():
    result = _run(verify.criterion_10_pair_invariants)
    assert result["detail"]["pairs"] == 100
    assert result["detail"]["conjugation_checks"] == 10


def test_criterion_11_mutual_exclusivity():
    result = _run(verify.criterion_11_mutual_exclusivity)
    assert result["detail"]["violations"] == 0
