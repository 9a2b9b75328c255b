"""Closed-form eigenstates at the symmetry points and their decay envelopes.

When the weight series of branch j at sign s is finite, the first-order
recursion psi(x+1) = delta(x) psi(x) has a square-summable solution;
lifting it by the sitewise component ratio tau produces the unique
(up to scale) eigenstate of the walk at eigenvalue s. Products are kept
in log-modulus plus unit-phase form so deep windows cannot underflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    EnvelopeViolation,
    EpsilonOutOfRange,
    NotSquareSummable,
    StructureError,
    WindowTooSmallForDecay,
)
from .indices import DeltaSequence, delta_series
from .params import (
    Model,
    TabulatedModel,
    TwoPhaseModel,
    asymptotic_limits,
    site_coeffs_arrays,
    _named_rows,
)
from .walk import OPEN, State, Window, build_walk, state_to_vector

#: normalized edge amplitude above which the window is too small
BOUNDARY_AMP_TOL = 1e-13

#: the two tau expressions must agree sitewise to this
TAU_AGREE_TOL = 1e-12

#: slack for the log-space envelope inequalities
ENVELOPE_SLACK = 1e-10


def _logsumexp(values: np.ndarray) -> float:
    m = float(np.max(values))
    return m + float(np.log(np.sum(np.exp(values - m))))


@dataclass(frozen=True)
class ShiftKernelSolution:
    """Solution of psi(x+1) = delta(x) psi(x) on a window, psi(0) = 1.

    Stored as log |psi| plus unit phases; ``normalized`` rescales to
    unit l2 norm over the window (tiny amplitudes may flush to zero in
    the value representation, the log data stays exact).
    """

    window: Window
    j: int
    sign: int
    log_abs: np.ndarray
    phase: np.ndarray
    log_norm: float

    @property
    def raw(self) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(self.log_abs) * self.phase

    @property
    def normalized(self) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(self.log_abs - self.log_norm) * self.phase


def solve_shift_kernel(delta: DeltaSequence, window: Window) -> ShiftKernelSolution:
    """Build the two-sided product solution of (L - delta) psi = 0.

    Requires a finite series verdict; a divergent branch has no
    square-summable solution and raises NotSquareSummable.
    """
    verdict = delta.series()
    if verdict.status != "finite":
        raise NotSquareSummable(
            f"branch j={delta.j} at sign {delta.sign:+d} has a {verdict.status} weight series"
        )
    sites = window.sites
    logs = delta.log_abs2(sites)
    i0 = window.index(0)
    csum = np.concatenate([[0.0], np.cumsum(logs)])
    log_abs = 0.5 * (csum - csum[i0])
    _, q, _, b = site_coeffs_arrays(delta.model, sites)
    units = delta.sign * np.exp(-1j * (np.angle(q) + np.angle(b)))
    cprod = np.concatenate([[1.0 + 0.0j], np.cumprod(units)])
    phase = cprod * np.conj(cprod[i0])
    phase /= np.abs(phase)
    log_abs = log_abs[: len(sites)]
    phase = phase[: len(sites)]
    log_norm = 0.5 * _logsumexp(2.0 * log_abs)
    return ShiftKernelSolution(window, delta.j, delta.sign, log_abs, phase, log_norm)


def tau_values(model: Model, j: int, sign: int, sites) -> np.ndarray:
    """Sitewise upper/lower component ratio of the lifted eigenstate.

    Computed two ways, (a - t)/b with t = sign (-1)^j and the
    weight-root form sqrt(L(-t a)) / (-t e^{i Arg b}); they must agree
    to TAU_AGREE_TOL or the model data is inconsistent.
    """
    t = sign * (-1) ** j
    _, _, a, b = site_coeffs_arrays(model, np.asarray(sites))
    direct = (a - t) / b
    root = np.exp(0.5 * (np.log1p(-t * a) - np.log1p(t * a))) / (-t * np.exp(1j * np.angle(b)))
    gap = np.abs(direct - root)
    bound = TAU_AGREE_TOL * np.maximum(1.0, np.abs(direct))
    if (gap > bound).any():
        worst = int(np.argmax(gap - bound))
        raise StructureError(f"tau expressions disagree by {gap[worst]:.3e} at site {int(np.asarray(sites)[worst])}")
    return direct


def lift_to_eigenstate(model: Model, kernel: ShiftKernelSolution) -> State:
    """Lift a shift-kernel solution to the two-component eigenstate.

    Upper component is tau * psi, lower is psi, both rescaled to unit
    overall norm.
    """
    window = kernel.window
    tau = tau_values(model, kernel.j, kernel.sign, window.sites)
    psi = kernel.normalized
    upper = tau * psi
    lower = psi
    total = np.sqrt(np.sum(np.abs(upper) ** 2 + np.abs(lower) ** 2))
    return State(window, upper / total, lower / total)


@dataclass(frozen=True)
class EigenstateBundle:
    """Constructed eigenstate with its kernel data and walk residual."""

    j: int
    sign: int
    window: Window
    kernel: ShiftKernelSolution
    state: State
    log_site_norms_sq: np.ndarray  # log ||Psi(x)||^2 in the psi(0)=1 gauge
    residual: float
    boundary_amplitude: float


def build_eigenstate(model: Model, j: int, sign: int, window: Window) -> EigenstateBundle:
    """Solve, lift, and verify one symmetry-protected eigenstate.

    The window should be an open truncation large enough that the state
    has died off at the edges; otherwise WindowTooSmallForDecay. The
    residual is ||(u - sign) Psi|| for the unit-norm lifted state.
    """
    kernel = solve_shift_kernel(DeltaSequence(model, j, sign), window)
    state = lift_to_eigenstate(model, kernel)
    t = sign * (-1) ** j
    _, _, a, _ = site_coeffs_arrays(model, window.sites)
    log_weight_plus_one = np.log1p(np.exp(np.log1p(-t * a) - np.log1p(t * a)))
    log_site = log_weight_plus_one + 2.0 * kernel.log_abs
    log_total = _logsumexp(log_site)
    edge = 0.5 * (max(log_site[0], log_site[-1]) - log_total)
    boundary_amp = float(np.exp(edge))
    if boundary_amp > BOUNDARY_AMP_TOL:
        raise WindowTooSmallForDecay(boundary_amp, BOUNDARY_AMP_TOL)
    ops = build_walk(model, window)
    vec = state_to_vector(state)
    residual = float(np.linalg.norm(ops.u @ vec - sign * vec))
    return EigenstateBundle(
        j=j,
        sign=sign,
        window=window,
        kernel=kernel,
        state=state,
        log_site_norms_sq=log_site,
        residual=residual,
        boundary_amplitude=boundary_amp,
    )


def eigen_residual(model: Model, j: int, sign: int, window: Window) -> float:
    """Walk residual of the constructed eigenstate on the window."""
    return build_eigenstate(model, j, sign, window).residual


def onset_site(model: Model) -> int:
    """Smallest |x| with only tail coefficients beyond it, plus one."""
    if isinstance(model, TwoPhaseModel):
        if not model.bumps:
            return 1
        return max(abs(int(x)) for x in model.bumps) + 2
    if isinstance(model, TabulatedModel):
        return max(abs(model.lo), abs(model.hi)) + 2
    return 1


@dataclass(frozen=True)
class DecayRates:
    """Two-sided geometric decay data for one (j, sign) branch.

    delta_down/up bound the per-site ratio of |psi(x)|^2 in the tails;
    lambda_down/up bound the sitewise factor ||Psi||^2 / |psi|^2.
    epsilon widens the ratio interval to absorb finitely many
    perturbed sites beyond x_star.
    """

    j: int
    sign: int
    delta_down: float
    delta_up: float
    lambda_down: float
    lambda_up: float
    epsilon: float
    x_star: int

    @property
    def rate_down(self) -> float:
        # decay exponent of the lower envelope: -log(delta_down - eps)
        return -float(np.log(self.delta_down - self.epsilon))

    @property
    def rate_up(self) -> float:
        return -float(np.log(self.delta_up + self.epsilon))

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "sign": self.sign,
            "delta_down": self.delta_down,
            "delta_up": self.delta_up,
            "lambda_down": self.lambda_down,
            "lambda_up": self.lambda_up,
            "epsilon": self.epsilon,
            "x_star": self.x_star,
            "rate_down": self.rate_down,
            "rate_up": self.rate_up,
        }


def decay_rates(model: Model, j: int, sign: int, epsilon: Optional[float] = None) -> DecayRates:
    """Tail decay ratios and sitewise weight bounds for a finite branch.

    The two candidate ratios are the per-site term ratios of the left
    and right tails; both lie in (0, 1) exactly when the series is
    finite. Default epsilon keeps the widened interval inside (0, 1).
    """
    verdict = delta_series(model, j, sign)
    if verdict.status != "finite":
        raise NotSquareSummable(f"branch j={j} at sign {sign:+d} has a {verdict.status} weight series")
    ratios = (verdict.left_tail_ratio, verdict.right_tail_ratio)
    delta_down, delta_up = min(ratios), max(ratios)
    t = sign * (-1) ** j
    weights = [np.exp(np.log1p(-t * row.a) - np.log1p(t * row.a)) + 1.0 for _, row in _named_rows(model)]
    lambda_down, lambda_up = float(min(weights)), float(max(weights))
    if epsilon is None:
        epsilon = min(0.01, (1.0 - delta_up) / 2.0, delta_down / 2.0)
    if not (0.0 < delta_down - epsilon and delta_up + epsilon < 1.0 and epsilon >= 0.0):
        raise EpsilonOutOfRange(
            f"epsilon {epsilon!r} leaves [{delta_down - epsilon}, {delta_up + epsilon}] outside (0, 1)"
        )
    return DecayRates(
        j=j,
        sign=sign,
        delta_down=delta_down,
        delta_up=delta_up,
        lambda_down=lambda_down,
        lambda_up=lambda_up,
        epsilon=float(epsilon),
        x_star=onset_site(model),
    )


@dataclass(frozen=True)
class EnvelopeReport:
    """Outcome of checking the two-sided decay envelope on a window."""

    x_star: int
    epsilon: float
    sites_checked: int
    slope_left: float
    slope_right: float
    slope_lower_bound: float
    slope_upper_bound: float

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star,
            "epsilon": self.epsilon,
            "sites_checked": self.sites_checked,
            "slope_left": self.slope_left,
            "slope_right": self.slope_right,
            "slope_lower_bound": self.slope_lower_bound,
            "slope_upper_bound": self.slope_upper_bound,
        }


def envelope_check(bundle: EigenstateBundle, rates: DecayRates, x_star: Optional[int] = None) -> EnvelopeReport:
    """Verify lambda_down (d-eps)^|x| <= ||Psi(x)||^2 <= lambda_up (d+eps)^|x|.

    All comparisons run in log space in the psi(0) = 1 gauge, for every
    window site with |x| >= x_star (default: the rates' onset); the
    first offending site raises EnvelopeViolation. Also fits the
    per-side log slope and reports it against the envelope rates.
    """
    onset = rates.x_star if x_star is None else int(x_star)
    sites = bundle.window.sites
    log_site = bundle.log_site_norms_sq
    lo_rate = float(np.log(rates.delta_down - rates.epsilon))
    up_rate = float(np.log(rates.delta_up + rates.epsilon))
    mask = np.abs(sites) >= onset
    lower = np.log(rates.lambda_down) + lo_rate * np.abs(sites)
    upper = np.log(rates.lambda_up) + up_rate * np.abs(sites)
    bad_low = mask & (log_site < lower - ENVELOPE_SLACK)
    bad_up = mask & (log_site > upper + ENVELOPE_SLACK)
    if bad_low.any() or bad_up.any():
        offenders = sites[bad_low | bad_up]
        x = int(offenders[np.argmin(np.abs(offenders))])
        side = "below lower" if bad_low[bundle.window.index(x)] else "above upper"
        raise EnvelopeViolation(x, f"log ||Psi||^2 {side} envelope bound")
    left = sites <= -onset
    right = sites >= onset
    if left.sum() < 2 or right.sum() < 2:
        raise EnvelopeViolation(onset, "window holds fewer than two sites beyond the onset")
    slope_left = float(np.polyfit(np.abs(sites[left]), log_site[left], 1)[0])
    slope_right = float(np.polyfit(np.abs(sites[right]), log_site[right], 1)[0])
    for slope in (slope_left, slope_right):
        if not (lo_rate - ENVELOPE_SLACK <= slope <= up_rate + ENVELOPE_SLACK):
            raise EnvelopeViolation(onset, f"fitted slope {slope:.6f} outside [{lo_rate:.6f}, {up_rate:.6f}]")
    return EnvelopeReport(
        x_star=onset,
        epsilon=rates.epsilon,
        sites_checked=int(mask.sum()),
        slope_left=slope_left,
        slope_right=slope_right,
        slope_lower_bound=lo_rate,
        slope_upper_bound=up_rate,
    )


def empirical_onset(bundle: EigenstateBundle, rates: DecayRates) -> int:
    """Smallest onset for which the envelope holds on this window.

    Perturbations can push amplitudes past the formula onset's bounds
    for a few more sites; this scans outward and returns the first
    onset that passes, raising EnvelopeViolation when even the window
    edge fails.
    """
    edge = int(min(abs(bundle.window.lo), abs(bundle.window.hi)))
    for onset in range(rates.x_star, edge):
        try:
            envelope_check(bundle, rates, x_star=onset)
            return onset
        except EnvelopeViolation:
            continue
    envelope_check(bundle, rates, x_star=edge)
    return edge


def eigenstate_report(bundle: EigenstateBundle, rates: Optional[DecayRates] = None) -> dict:
    """JSON sidecar for an exported eigenstate."""
    report = {
        "j": bundle.j,
        "sign": bundle.sign,
        "window": {"lo": bundle.window.lo, "hi": bundle.window.hi, "boundary": bundle.window.boundary},
        "residual": bundle.residual,
        "boundary_amplitude": bundle.boundary_amplitude,
        "norm_log_raw": bundle.kernel.log_norm,
    }
    if rates is not None:
        report["decay"] = rates.to_dict()
    return report
