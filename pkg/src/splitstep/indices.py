"""Index engine: weight sequences, series classification, closed-form indices.

For a validated model the two branch weights

    delta_{j,s}(y) = s exp(-i(Arg q(y) + Arg b(y)))
                     sqrt(L((-1)^j p(y)) L(-s (-1)^j a(y)))

(with L the mobius weight (1+k)/(1-k) and j in {1, 2}, s = +-1) control
square-summability of the two candidate kernel branches of u - s. The
classifying series

    D_{j,s} = sum_{x>=1} prod_{y=1}^{x} |delta(-y)|^{-2}
            + sum_{x>=1} prod_{y=0}^{x-1} |delta(y)|^{2}

is finite for at most one j; finiteness of j=1 gives index +1 at s,
finiteness of j=2 gives -1, divergence of both gives 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CaseBoundary,
    DomainError,
    GapClosed,
    InconclusiveClassification,
    StructureError,
)
from .params import (
    Model,
    PeriodicModel,
    PhaseLimits,
    asymptotic_limits,
    coeffs,
    site_coeffs,
    site_coeffs_arrays,
    support_radius,
)

#: |p(star) -+ a(star)| below this counts as a closed gap / case boundary
GAP_TOL = 1e-12

RATIO_METHOD = "ratio"
PARTIAL_SUM_METHOD = "partial_sum"

#: partial-sum policy: declare finite / divergent / give up
TERM_NEGLIGIBLE = 1e-15
TERM_BLOWUP = 1e12
MAX_TERMS = 10**6
_BLOCK = 8192


def _check_branch(j: int) -> int:
    if j not in (1, 2):
        raise DomainError(f"branch index must be 1 or 2, got {j}")
    return -1 if j == 1 else 1


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    return sign


def _log_weight(k: np.ndarray) -> np.ndarray:
    # log of (1+k)/(1-k), stable near the ends of (-1, 1)
    return np.log1p(k) - np.log1p(-k)


def delta_log_abs2(model: Model, j: int, sign: int, ys) -> np.ndarray:
    """log |delta_{j,sign}|^2 at each requested site."""
    pj = _check_branch(j)
    s = _check_sign(sign)
    p, _, a, _ = site_coeffs_arrays(model, np.asarray(ys))
    return _log_weight(pj * p) + _log_weight(-s * pj * a)


def delta_at(model: Model, j: int, sign: int, y: int) -> complex:
    """The branch weight delta_{j,sign}(y), phase convention included."""
    pj = _check_branch(j)
    s = _check_sign(sign)
    c = site_coeffs(model, y)
    log_mod2 = float(_log_weight(np.array(pj * c.p)) + _log_weight(np.array(-s * pj * c.a)))
    phase = np.exp(-1j * (np.angle(c.q) + np.angle(c.b)))
    return s * phase * np.exp(log_mod2 / 2.0)


@dataclass(frozen=True)
class DeltaSequence:
    """One branch weight sequence y -> delta_{j,sign}(y) of a model."""

    model: Model
    j: int
    sign: int

    def __post_init__(self):
        _check_branch(self.j)
        _check_sign(self.sign)

    def at(self, y: int) -> complex:
        return delta_at(self.model, self.j, self.sign, y)

    def log_abs2(self, ys) -> np.ndarray:
        return delta_log_abs2(self.model, self.j, self.sign, ys)

    def series(self, policy: str = RATIO_METHOD) -> "SeriesVerdict":
        return delta_series(self.model, self.j, self.sign, policy)


@dataclass(frozen=True)
class SeriesVerdict:
    """Outcome of classifying one weight series.

    status is 'finite', 'divergent' or 'inconclusive'; value is the sum
    when finite. Tail ratios are the limiting term ratios of the left
    and right sums (per-period term ratios for periodic models).
    """

    status: str
    method: str
    left_tail_ratio: float
    right_tail_ratio: float
    value: Optional[float] = None
    partial_sum: Optional[float] = None
    terms_used: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "method": self.method,
            "left_tail_ratio": self.left_tail_ratio,
            "right_tail_ratio": self.right_tail_ratio,
            "value": self.value,
            "partial_sum": self.partial_sum,
            "terms_used": self.terms_used,
        }


def _log_tail_ratios(model: Model, j: int, sign: int) -> tuple[float, float]:
    """Logs of the limiting term ratios of the left and right sums."""
    limits = asymptotic_limits(model)
    if limits is None:
        period = model.period
        log_rho = float(delta_log_abs2(model, j, sign, np.arange(period)).sum())
        return -log_rho, log_rho
    pj = _check_branch(j)
    s = _check_sign(sign)
    log_left_factor = float(_log_weight(np.array(pj * limits.p_minus)) + _log_weight(np.array(-s * pj * limits.a_minus)))
    log_right = float(_log_weight(np.array(pj * limits.p_plus)) + _log_weight(np.array(-s * pj * limits.a_plus)))
    return -log_left_factor, log_right


def _geometric_value(model: Model, j: int, sign: int, log_left: float, log_right: float) -> float:
    """Exact sum of both series: partial terms plus geometric tails.

    Sites beyond the support radius carry the limit coefficients, so the
    term ratios are exactly constant there and the tails close in closed
    form.
    """
    r = support_radius(model)
    # near-critical tails (ratio a hair below 1) may saturate to inf; the
    # finite verdict stands, only the float value tops out
    with np.errstate(over="ignore"):
        # left sum: terms t(x) = prod_{y=1}^{x} |delta(-y)|^{-2}
        log_steps = -delta_log_abs2(model, j, sign, -np.arange(1, r + 1))
        log_terms = np.cumsum(log_steps)
        # 1 - ratio via expm1: stays positive for ratios a rounding error below 1
        left = float(np.exp(log_terms[:-1]).sum() + np.exp(log_terms[-1]) / -np.expm1(log_left))
        # right sum: terms s(x) = prod_{y=0}^{x-1} |delta(y)|^2, x = 1 .. r+1 partial
        log_steps = delta_log_abs2(model, j, sign, np.arange(0, r + 1))
        log_terms = np.cumsum(log_steps)
        right = float(np.exp(log_terms[:-1]).sum() + np.exp(log_terms[-1]) / -np.expm1(log_right))
    return left + right


def _partial_sum_side(model: Model, j: int, sign: int, side: int) -> tuple[str, float, int]:
    """Numerically sum one side (side=-1 left, +1 right) under the term policy."""
    log_term = 0.0
    partial = 0.0
    terms = 0
    while terms < MAX_TERMS:
        n = min(_BLOCK, MAX_TERMS - terms)
        if side < 0:
            ys = -np.arange(terms + 1, terms + n + 1)
            logs = -delta_log_abs2(model, j, sign, ys)
        else:
            ys = np.arange(terms, terms + n)
            logs = delta_log_abs2(model, j, sign, ys)
        with np.errstate(over="ignore"):
            block_terms = np.exp(log_term + np.cumsum(logs))
            running = partial + np.cumsum(block_terms)
        blown = block_terms > TERM_BLOWUP
        settled = block_terms < TERM_NEGLIGIBLE * running
        stop_blow = int(np.argmax(blown)) if blown.any() else n
        stop_settle = int(np.argmax(settled)) if settled.any() else n
        if stop_blow < stop_settle:
            return "divergent", float(running[stop_blow]), terms + stop_blow + 1
        if stop_settle < n:
            return "finite", float(running[stop_settle]), terms + stop_settle + 1
        log_term += float(logs.sum())
        partial = float(running[-1])
        terms += n
    return "inconclusive", partial, terms


def delta_series(model: Model, j: int, sign: int, policy: str = RATIO_METHOD) -> SeriesVerdict:
    """Classify the series D_{j,sign} as finite, divergent or inconclusive.

    The default ratio policy reads the exactly-constant tail (or
    per-period product) and is conclusive for every supported model
    kind: both term ratios below one give a finite sum completed in
    closed form; a ratio above one, or a constant modulus-one tail whose
    terms cannot vanish, give divergence. The partial-sum policy sums
    terms under the module's term policy and may return inconclusive.
    """
    log_left, log_right = _log_tail_ratios(model, j, sign)
    ratios = (float(np.exp(log_left)), float(np.exp(log_right)))
    if policy == RATIO_METHOD:
        if log_left < 0.0 and log_right < 0.0:
            value = None if isinstance(model, PeriodicModel) else _geometric_value(model, j, sign, log_left, log_right)
            if value is None:
                # per-period ratios both below one cannot happen (they are reciprocal)
                raise StructureError("periodic weight series classified finite on both tails")
            return SeriesVerdict("finite", policy, *ratios, value=value)
        # a flat tail with ratio exactly one keeps terms bounded away from zero
        return SeriesVerdict("divergent", policy, *ratios)
    if policy != PARTIAL_SUM_METHOD:
        raise DomainError(f"unknown series policy {policy!r}")
    status_l, sum_l, terms_l = _partial_sum_side(model, j, sign, side=-1)
    status_r, sum_r, terms_r = _partial_sum_side(model, j, sign, side=+1)
    partial = sum_l + sum_r
    terms = terms_l + terms_r
    if status_l == "divergent" or status_r == "divergent":
        return SeriesVerdict("divergent", policy, *ratios, partial_sum=partial, terms_used=terms)
    if status_l == "finite" and status_r == "finite":
        return SeriesVerdict("finite", policy, *ratios, value=partial, partial_sum=partial, terms_used=terms)
    return SeriesVerdict("inconclusive", policy, *ratios, partial_sum=partial, terms_used=terms)


@dataclass(frozen=True)
class ClassifiedIndex:
    """Series-based index at one symmetry point with its evidence pair."""

    value: int
    series_one: SeriesVerdict
    series_two: SeriesVerdict


def classify_index(model: Model, sign: int, policy: str = RATIO_METHOD) -> ClassifiedIndex:
    """Index at the symmetry point ``sign`` from the two series verdicts.

    Finite j=1 series gives +1, finite j=2 gives -1, double divergence
    gives 0; an inconclusive verdict raises InconclusiveClassification.
    """
    one = delta_series(model, 1, sign, policy)
    two = delta_series(model, 2, sign, policy)
    if one.status == "finite" and two.status == "finite":
        raise StructureError("both weight series classified finite; mutual exclusivity violated")
    if one.status == "inconclusive" or two.status == "inconclusive":
        raise InconclusiveClassification(
            f"series classification at sign {sign:+d} is inconclusive under policy {policy!r}"
        )
    if one.status == "finite":
        return ClassifiedIndex(+1, one, two)
    if two.status == "finite":
        return ClassifiedIndex(-1, one, two)
    return ClassifiedIndex(0, one, two)


def two_phase_index(limits: PhaseLimits, sign: int) -> int:
    """Closed-form index at ``sign`` from the asymptotic limits alone.

    +1 when p - sign*a changes sign upward across the lattice, -1
    downward, 0 without a strict sign change. Raises GapClosed when
    p(star) = sign*a(star) at either end (the symmetry point then lies
    in the essential spectrum).
    """
    s = _check_sign(sign)
    d_minus = limits.p_minus - s * limits.a_minus
    d_plus = limits.p_plus - s * limits.a_plus
    if abs(d_minus) < GAP_TOL:
        raise GapClosed(star=-1, sign=s)
    if abs(d_plus) < GAP_TOL:
        raise GapClosed(star=+1, sign=s)
    if d_minus < 0.0 < d_plus:
        return +1
    if d_plus < 0.0 < d_minus:
        return -1
    return 0


# end patterns in table order: which of the four strict cones the limit point
# (p, a) lies in
_PATTERNS = ("+a", "-a", "+p", "-p")

#: the sixteen classification rows (ind_plus, ind_minus, i_plus, i_minus),
#: indexed by 4 * left_pattern + right_pattern
CASE_TABLE = (
    (0, 0, 0, 0),
    (+1, -1, 0, +2),
    (+1, 0, +1, +1),
    (0, -1, -1, +1),
    (-1, +1, 0, -2),
    (0, 0, 0, 0),
    (0, +1, +1, -1),
    (-1, 0, -1, -1),
    (-1, 0, -1, -1),
    (0, -1, -1, +1),
    (0, 0, 0, 0),
    (-1, -1, -2, 0),
    (0, +1, +1, -1),
    (+1, 0, +1, +1),
    (+1, +1, +2, 0),
    (0, 0, 0, 0),
)


def _end_pattern(p: float, a: float, star: int) -> int:
    """Which strict cone the end point (p, a) lies in; boundary raises."""
    if abs(abs(p) - abs(a)) < GAP_TOL:
        raise CaseBoundary(star=star)
    if abs(p) < abs(a):
        return 0 if a > 0 else 1
    return 2 if p > 0 else 3


@dataclass(frozen=True)
class CaseRow:
    """One row of the sixteen-case classification."""

    case_id: int
    left_pattern: str
    right_pattern: str
    ind_plus: int
    ind_minus: int
    i_plus: int
    i_minus: int


def sixteen_case_row(limits: PhaseLimits) -> CaseRow:
    """Identify which of the 16 strict-inequality rows the limits satisfy."""
    left = _end_pattern(limits.p_minus, limits.a_minus, star=-1)
    right = _end_pattern(limits.p_plus, limits.a_plus, star=+1)
    ind_plus, ind_minus, i_plus, i_minus = CASE_TABLE[4 * left + right]
    if i_plus != ind_plus + ind_minus or i_minus != ind_plus - ind_minus:
        raise StructureError("classification table row violates the sum/difference identities")
    return CaseRow(
        case_id=4 * left + right + 1,
        left_pattern=_PATTERNS[left],
        right_pattern=_PATTERNS[right],
        ind_plus=ind_plus,
        ind_minus=ind_minus,
        i_plus=i_plus,
        i_minus=i_minus,
    )


#: representative (p, a) end values, one per pattern
_REPRESENTATIVE = {"+a": (0.1, 0.5), "-a": (0.1, -0.5), "+p": (0.5, 0.1), "-p": (-0.5, 0.1)}


def representative_limits(case_id: int) -> PhaseLimits:
    """Concrete limits realizing a given case row."""
    if not 1 <= case_id <= 16:
        raise DomainError(f"case_id must be 1..16, got {case_id}")
    left, right = divmod(case_id - 1, 4)
    pm, am = _REPRESENTATIVE[_PATTERNS[left]]
    pp, ap = _REPRESENTATIVE[_PATTERNS[right]]
    return PhaseLimits(p_minus=pm, a_minus=am, p_plus=pp, a_plus=ap)


def _sgn(x: float) -> int:
    # sign function with sign(0) := 1; the strict-inequality guard keeps
    # the zero branch from ever deciding a case
    return 1 if x >= 0.0 else -1


def witten_formulas(limits: PhaseLimits) -> tuple[int, int]:
    """Closed-form (i_plus, i_minus) from end signs of p resp. a.

    Four branches each, selected by which of |p|, |a| dominates at the
    two ends; must coincide with the sixteen-case table row.
    """
    for star, p, a in ((-1, limits.p_minus, limits.a_minus), (+1, limits.p_plus, limits.a_plus)):
        if abs(abs(p) - abs(a)) < GAP_TOL:
            raise CaseBoundary(star=star)
    p_small_l = abs(limits.p_minus) < abs(limits.a_minus)
    p_small_r = abs(limits.p_plus) < abs(limits.a_plus)
    if p_small_l and p_small_r:
        i_plus = 0
        i_minus = -_sgn(limits.a_plus) + _sgn(limits.a_minus)
    elif p_small_l:
        i_plus = _sgn(limits.p_plus)
        i_minus = _sgn(limits.a_minus)
    elif p_small_r:
        i_plus = -_sgn(limits.p_minus)
        i_minus = -_sgn(limits.a_plus)
    else:
        i_plus = _sgn(limits.p_plus) - _sgn(limits.p_minus)
        i_minus = 0
    return i_plus, i_minus


def index_report(model: Model, policy: str = RATIO_METHOD) -> dict:
    """JSON-ready report: both indices, derived invariants, and evidence.

    Gap flags and closed-form values appear when the model has
    asymptotic limits; a closed gap leaves the closed-form entry null
    for that sign. Periodic models carry no limits, so those fields stay
    null (their essential spectrum comes from the band module).
    """
    limits = asymptotic_limits(model)
    evidence = {}
    values = {}
    for sign, key in ((+1, "plus"), (-1, "minus")):
        classified = classify_index(model, sign, policy)
        closed_form = None
        gap_open = None
        if limits is not None:
            try:
                closed_form = two_phase_index(limits, sign)
                gap_open = True
            except GapClosed:
                gap_open = False
        values[key] = classified.value
        evidence[key] = {
            "series_one": classified.series_one.to_dict(),
            "series_two": classified.series_two.to_dict(),
            "closed_form": closed_form,
            "gap_open": gap_open,
        }
    report = {
        "ind_plus": values["plus"],
        "ind_minus": values["minus"],
        "witten": values["plus"] + values["minus"],
        "witten_prime": values["plus"] - values["minus"],
        "gap_plus": evidence["plus"]["gap_open"],
        "gap_minus": evidence["minus"]["gap_open"],
        "evidence": evidence,
    }
    return report


def constant_model(p: float, a: float) -> Model:
    """Single-cell periodic model with the given constant coefficients."""
    return PeriodicModel(cells=(coeffs(p=p, a=a),))
