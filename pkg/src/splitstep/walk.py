"""Walk operators on finite windows of the integer lattice.

Each lattice site carries a two-component amplitude (upper, lower);
vectors interleave components site by site. The single shift convention
used everywhere is (L psi)(x) = psi(x + 1), the left shift.

The split-step evolution factors as u = shift_factor @ coin, where the
shift factor has blocks (p, q L; L* q*, -p(.-1)) and the coin is the
sitewise involution (a, b*; b, -a). On periodic windows both factors
are exactly unitary; open truncation compresses the shift factor, so
its identities hold on interior rows only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DimensionMismatch, DomainError
from .params import Model, PeriodicModel, SiteCoeffs, site_coeffs_arrays, validate_model

PERIODIC = "periodic"
OPEN = "open"


@dataclass(frozen=True)
class Window:
    """Finite window [lo, hi] of the lattice with a boundary rule."""

    lo: int
    hi: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.boundary not in (PERIODIC, OPEN):
            raise ConfigError(f"boundary must be '{PERIODIC}' or '{OPEN}', got {self.boundary!r}")
        if not (self.lo <= 0 <= self.hi):
            raise ConfigError(f"window [{self.lo}, {self.hi}] must contain 0")
        if self.size < 4:
            raise ConfigError(f"window needs at least 4 sites, got {self.size}")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @classmethod
    def centered(cls, n_sites: int, boundary: str = PERIODIC) -> "Window":
        half = n_sites // 2
        return cls(lo=-half, hi=n_sites - 1 - half, boundary=boundary)

    def index(self, x: int) -> int:
        if not self.lo <= x <= self.hi:
            raise DomainError(f"site {x} outside window [{self.lo}, {self.hi}]")
        return x - self.lo


def _upper_rows(n: int) -> np.ndarray:
    return 2 * np.arange(n)


def build_coin(model: Model, window: Window) -> np.ndarray:
    """Block-diagonal coin (a, b*; b, -a) over the window sites."""
    _, _, a, b = site_coeffs_arrays(model, window.sites)
    n = window.size
    up = _upper_rows(n)
    c = np.zeros((2 * n, 2 * n), dtype=complex)
    c[up, up] = a
    c[up, up + 1] = np.conj(b)
    c[up + 1, up] = b
    c[up + 1, up + 1] = -a
    return c


def build_shift_factor(model: Model, window: Window) -> np.ndarray:
    """Shift factor with blocks (p, q L; L* q*, -p(.-1)) on the window.

    Periodic windows wrap both the shift and the coefficient lookup, so
    the result is an exact unitary involution. Open windows drop the
    wrapped couplings; the lower diagonal at the left edge still reads
    the model at lo - 1.
    """
    n = window.size
    p, q, _, _ = site_coeffs_arrays(model, window.sites)
    up = _upper_rows(n)
    g = np.zeros((2 * n, 2 * n), dtype=complex)
    g[up, up] = p
    if window.boundary == PERIODIC:
        nxt = (np.arange(n) + 1) % n
        g[up, 2 * nxt + 1] = q
        prv = (np.arange(n) - 1) % n
        g[up + 1, 2 * prv] = np.conj(q[prv])
        g[up + 1, up + 1] = -p[prv]
    else:
        i = np.arange(n - 1)
        g[2 * i, 2 * (i + 1) + 1] = q[i]
        g[2 * (i + 1) + 1, 2 * i] = np.conj(q[i])
        p_prev, _, _, _ = site_coeffs_arrays(model, window.sites - 1)
        g[up + 1, up + 1] = -p_prev
    return g


@dataclass(frozen=True)
class WalkOperators:
    """Assembled evolution u = shift_factor @ coin with its factors."""

    window: Window
    shift_factor: np.ndarray
    coin: np.ndarray
    u: np.ndarray
    model: Optional[Model] = field(default=None, compare=False)


def build_walk(model: Model, window: Window) -> WalkOperators:
    """Assemble the split-step walk of a validated model on a window."""
    validate_model(model)
    gamma = build_shift_factor(model, window)
    coin = build_coin(model, window)
    return WalkOperators(window=window, shift_factor=gamma, coin=coin, u=gamma @ coin, model=model)


def _block_rotation(theta: np.ndarray) -> np.ndarray:
    n = theta.size
    up = _upper_rows(n)
    r = np.zeros((2 * n, 2 * n), dtype=complex)
    r[up, up] = np.cos(theta)
    r[up, up + 1] = -np.sin(theta)
    r[up + 1, up] = np.sin(theta)
    r[up + 1, up + 1] = np.cos(theta)
    return r


def _component_shift(window: Window, component: int) -> np.ndarray:
    """Left shift L acting on one component only (identity on the other)."""
    n = window.size
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    other = 1 - component
    idx = 2 * np.arange(n) + other
    m[idx, idx] = 1.0
    rows = 2 * np.arange(n) + component
    if window.boundary == PERIODIC:
        cols = 2 * ((np.arange(n) + 1) % n) + component
        m[rows, cols] = 1.0
    else:
        m[rows[:-1], rows[1:]] = 1.0
    return m


def _theta_on_window(theta, window: Window) -> np.ndarray:
    """Evaluate a rotation-angle profile at the window sites.

    A scalar is constant; a sequence of length m is read as one period,
    indexed by x mod m.
    """
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if arr.ndim != 1:
        raise ConfigError("rotation angles must be scalars or 1-d sequences")
    return arr[window.sites % arr.size]


def build_alternating_walk(theta1, theta2, window: Window) -> np.ndarray:
    """Coin-rotation walk (1 + L) R(theta2) (L* + 1) R(theta1) on the window.

    The two shifts act on the lower resp. upper component; rotations act
    sitewise. Angle profiles follow the `_theta_on_window` convention.
    """
    t1 = _theta_on_window(theta1, window)
    t2 = _theta_on_window(theta2, window)
    lower_shift = _component_shift(window, component=1)
    upper_coshift = _component_shift(window, component=0).conj().T
    return lower_shift @ _block_rotation(t2) @ upper_coshift @ _block_rotation(t1)


def rotation_to_split_step(theta1, theta2) -> "Model":
    """Split-step model equivalent (after a component swap) to the rotation walk.

    Angles are scalars or equal-length periodic profiles; the returned
    periodic model has p = sin theta2(. + 1), q = cos theta2(. + 1),
    a = -sin theta1, b = cos theta1, with cells indexed by lattice
    residue. Raises GapBoundViolation when some cos theta vanishes.
    """
    t1, t2 = np.broadcast_arrays(np.atleast_1d(np.asarray(theta1, float)), np.atleast_1d(np.asarray(theta2, float)))
    t2_next = np.roll(t2, -1)
    cells = tuple(
        SiteCoeffs(p=float(np.sin(t2_next[j])), q=complex(np.cos(t2_next[j])), a=float(-np.sin(t1[j])), b=complex(np.cos(t1[j])))
        for j in range(t1.size)
    )
    return validate_model(PeriodicModel(cells=cells))


def component_swap(window: Window) -> np.ndarray:
    """Sitewise swap of upper and lower components."""
    n = window.size
    up = _upper_rows(n)
    s = np.zeros((2 * n, 2 * n), dtype=complex)
    s[up, up + 1] = 1.0
    s[up + 1, up] = 1.0
    return s


def equivalence_residual(theta1, theta2, window: Window) -> float:
    """Max-entry distance between the swapped rotation walk and its split-step form.

    Needs a periodic window whose size is a multiple of the angle period,
    so the cyclic wrap is consistent on both sides.
    """
    if window.boundary != PERIODIC:
        raise ConfigError("equivalence holds exactly on periodic windows only")
    t1 = np.atleast_1d(np.asarray(theta1, float))
    t2 = np.atleast_1d(np.asarray(theta2, float))
    period = np.broadcast_shapes(t1.shape, t2.shape)[0]
    if window.size % period:
        raise ConfigError(f"window size {window.size} is not a multiple of the angle period {period}")
    u_rot = build_alternating_walk(theta1, theta2, window)
    u_ss = build_walk(rotation_to_split_step(theta1, theta2), window).u
    swap = component_swap(window)
    return float(np.abs(swap @ u_rot @ swap - u_ss).max())


@dataclass(eq=False)
class State:
    """Two-component amplitudes over a window."""

    window: Window
    upper: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        self.upper = np.asarray(self.upper, dtype=complex)
        self.lower = np.asarray(self.lower, dtype=complex)
        if self.upper.shape != (self.window.size,) or self.lower.shape != (self.window.size,):
            raise DimensionMismatch("component lengths must match the window size")

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2)))

    def site_norms_squared(self) -> np.ndarray:
        return np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2


def delta_state(window: Window, x: int, component: str = "upper") -> State:
    """Unit point mass at site x in one component."""
    upper = np.zeros(window.size, dtype=complex)
    lower = np.zeros(window.size, dtype=complex)
    if component == "upper":
        upper[window.index(x)] = 1.0
    elif component == "lower":
        lower[window.index(x)] = 1.0
    else:
        raise ConfigError(f"component must be 'upper' or 'lower', got {component!r}")
    return State(window, upper, lower)


def state_to_vector(state: State) -> np.ndarray:
    vec = np.empty(2 * state.window.size, dtype=complex)
    vec[0::2] = state.upper
    vec[1::2] = state.lower
    return vec


def vector_to_state(window: Window, vec: np.ndarray) -> State:
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (2 * window.size,):
        raise DimensionMismatch(f"vector length {vec.shape} does not match window of {window.size} sites")
    return State(window, vec[0::2].copy(), vec[1::2].copy())


def apply(ops: WalkOperators, state: State) -> State:
    if state.window != ops.window:
        raise DimensionMismatch("state and operators live on different windows")
    return vector_to_state(ops.window, ops.u @ state_to_vector(state))


def apply_power(ops: WalkOperators, state: State, t: int) -> State:
    if t < 0 or int(t) != t:
        raise DomainError(f"power must be a nonnegative integer, got {t}")
    out = state
    for _ in range(int(t)):
        out = apply(ops, out)
    return out


def unitarity_residual(matrix: np.ndarray) -> float:
    n = matrix.shape[0]
    return float(np.abs(matrix.conj().T @ matrix - np.eye(n)).max())


def chiral_residual(u: np.ndarray, involution: np.ndarray) -> float:
    return float(np.abs(u.conj().T - involution @ u @ involution).max())


def translation_matrix(window: Window) -> np.ndarray:
    """Cyclic two-component translation (both components shifted left)."""
    n = window.size
    t = np.zeros((2 * n, 2 * n), dtype=complex)
    nxt = (np.arange(n) + 1) % n
    for comp in (0, 1):
        t[2 * np.arange(n) + comp, 2 * nxt + comp] = 1.0
    return t


def save_state_csv(state: State, path) -> None:
    """Write columns x, re_upper, im_upper, re_lower, im_lower."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_upper", "im_upper", "re_lower", "im_lower"])
        for i, x in enumerate(state.window.sites):
            writer.writerow(
                [
                    int(x),
                    repr(float(state.upper[i].real)),
                    repr(float(state.upper[i].imag)),
                    repr(float(state.lower[i].real)),
                    repr(float(state.lower[i].imag)),
                ]
            )


def load_state_csv(path, boundary: str = OPEN) -> State:
    """Read a state written by ``save_state_csv``; sites must be contiguous."""
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"no state rows in {path}")
    xs = np.array([int(r["x"]) for r in rows])
    if not (np.diff(xs) == 1).all():
        raise ConfigError("state sites must be contiguous and increasing")
    upper = np.array([float(r["re_upper"]) + 1j * float(r["im_upper"]) for r in rows])
    lower = np.array([float(r["re_lower"]) + 1j * float(r["im_lower"]) for r in rows])
    return State(Window(int(xs[0]), int(xs[-1]), boundary), upper, lower)
