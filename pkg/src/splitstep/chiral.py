"""Finite chiral pairs: gradings, block structure, and integer invariants.

A chiral pair is a unitary self-adjoint involution G together with a
unitary U satisfying U* = G U G. The Hilbert space splits into the +1
and -1 eigenspaces of G; in that splitting U takes the form

    [[r1, i q2], [i q1, r2]]

with r1, r2 self-adjoint and q2 = q1*. Four integers survive compact
perturbations: the signed kernel dimensions at the two symmetry points
+1 and -1 of U, and their sum/difference (the Witten indices of the
pair and of the swapped pair (G U, U)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonIntegerTrace, StructureError

#: relative singular-value threshold below which a direction counts as kernel
KERNEL_TOL = 1e-8

#: structural identities (involution, unitarity, symmetry) must hold to this
PAIR_TOL = 1e-12

#: largest tolerated distance of a symmetry trace from the nearest integer
TRACE_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class ChiralPair:
    """Unitary involution ``chiral_op`` and unitary ``u`` with u* = chiral_op u chiral_op."""

    chiral_op: np.ndarray
    u: np.ndarray

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def validate_pair(pair: ChiralPair, tol: float = PAIR_TOL) -> ChiralPair:
    """Verify the defining identities entrywise to ``tol``; return the pair."""
    g, u = np.asarray(pair.chiral_op), np.asarray(pair.u)
    if g.shape != u.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"need square matrices of equal shape, got {g.shape} and {u.shape}")
    eye = np.eye(g.shape[0])
    checks = {
        "chiral_op self-adjoint": np.abs(g - g.conj().T).max(),
        "chiral_op involutive": np.abs(g @ g - eye).max(),
        "u unitary": np.abs(u.conj().T @ u - eye).max(),
        "chiral symmetry": np.abs(u.conj().T - g @ u @ g).max(),
    }
    for name, err in checks.items():
        if err > tol:
            raise StructureError(f"{name} fails: residual {err:.3e} > {tol:.1e}")
    return pair


def prime_pair(pair: ChiralPair) -> ChiralPair:
    """The companion pair (G U, U); G U is again a unitary involution."""
    return ChiralPair(chiral_op=pair.chiral_op @ pair.u, u=pair.u)


def grading(chiral_op: np.ndarray, tol: float = PAIR_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases (columns) of the +1 and -1 eigenspaces of an involution."""
    w, v = np.linalg.eigh(chiral_op)
    if np.abs(np.abs(w) - 1.0).max() > max(tol, 1e-10):
        raise StructureError("matrix is not a unitary involution: eigenvalues stray from +-1")
    return v[:, w > 0], v[:, w < 0]


@dataclass(frozen=True)
class StandardRep:
    """Blocks of U in the grading of the chiral involution.

    ``plus_basis`` and ``minus_basis`` hold the eigenbasis columns;
    r1/r2 are the self-adjoint diagonal blocks of (U + U*)/2 and
    q1/q2 the off-diagonal blocks of (U - U*)/(2i), q2 = q1*.
    """

    r1: np.ndarray
    r2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    plus_basis: np.ndarray
    minus_basis: np.ndarray


def standard_representation(pair: ChiralPair, tol: float = PAIR_TOL) -> StandardRep:
    """Compute the block form of ``pair.u`` in the grading of the involution.

    Raises ``StructureError`` when the symmetric part leaks off the block
    diagonal, the antisymmetric part leaks onto it, or the blocks fail to
    reassemble U to ``tol``.
    """
    plus, minus = grading(pair.chiral_op, tol)
    u = pair.u
    r = (u + u.conj().T) / 2.0
    q = (u - u.conj().T) / 2.0j
    r1 = plus.conj().T @ r @ plus
    r2 = minus.conj().T @ r @ minus
    q1 = minus.conj().T @ q @ plus
    q2 = plus.conj().T @ q @ minus
    leaks = {
        "symmetric part off-diagonal": max(
            np.abs(plus.conj().T @ r @ minus).max(initial=0.0),
            np.abs(minus.conj().T @ r @ plus).max(initial=0.0),
        ),
        "antisymmetric part on-diagonal": max(
            np.abs(plus.conj().T @ q @ plus).max(initial=0.0),
            np.abs(minus.conj().T @ q @ minus).max(initial=0.0),
        ),
        "q2 adjoint to q1": np.abs(q2 - q1.conj().T).max(initial=0.0),
    }
    basis = np.hstack([plus, minus])
    n1 = plus.shape[1]
    rebuilt = np.zeros_like(u)
    rebuilt[:n1, :n1] = r1
    rebuilt[:n1, n1:] = 1j * q2
    rebuilt[n1:, :n1] = 1j * q1
    rebuilt[n1:, n1:] = r2
    leaks["reassembly"] = np.abs(basis @ rebuilt @ basis.conj().T - u).max()
    for name, err in leaks.items():
        if err > tol:
            raise StructureError(f"{name}: residual {err:.3e} > {tol:.1e}")
    return StandardRep(r1=r1, r2=r2, q1=q1, q2=q2, plus_basis=plus, minus_basis=minus)


def kernel_dim(matrix: np.ndarray, shift: complex = 0.0, tol: float = KERNEL_TOL) -> int:
    """dim ker(matrix - shift) by singular values below ``tol`` relative to the largest.

    Works for rectangular matrices (shift only allowed square); a zero
    matrix has full kernel.
    """
    m = np.asarray(matrix, dtype=complex)
    if shift != 0.0:
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch("shift needs a square matrix")
        m = m - shift * np.eye(m.shape[0])
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return m.shape[1]
    rank = int(np.count_nonzero(s >= tol * s[0]))
    return m.shape[1] - rank


def kernel_basis(matrix: np.ndarray, shift: complex = 0.0, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal columns spanning ker(matrix - shift), via SVD."""
    m = np.asarray(matrix, dtype=complex)
    if shift != 0.0:
        m = m - shift * np.eye(m.shape[0])
    _, s, vh = np.linalg.svd(m)
    n = m.shape[1]
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n, dtype=complex)
    small = np.zeros(n, dtype=bool)
    small[s.size :] = True  # structural kernel of a wide matrix
    small[: s.size] = s < tol * s[0]
    return vh[small].conj().T


@dataclass(frozen=True)
class TraceIndex:
    """Integer symmetry index with the distance of the raw trace from it."""

    value: int
    drift: float


def index_via_trace(pair: ChiralPair, sign: int, tol: float = KERNEL_TOL) -> TraceIndex:
    """Trace of the chiral involution over ker(u - sign).

    The kernel is invariant under the involution, so the trace is an
    integer up to numerical drift; raises ``NonIntegerTrace`` when the
    drift exceeds ``TRACE_DRIFT_TOL``.
    """
    basis = kernel_basis(pair.u, shift=float(sign), tol=tol)
    if basis.shape[1] == 0:
        return TraceIndex(0, 0.0)
    t = complex(np.trace(basis.conj().T @ pair.chiral_op @ basis))
    value = round(t.real)
    drift = abs(t - value)
    if drift > TRACE_DRIFT_TOL:
        raise NonIntegerTrace(t.real, drift)
    return TraceIndex(int(value), float(drift))


def index_via_blocks(pair: ChiralPair, sign: int, tol: float = KERNEL_TOL) -> int:
    """dim ker(r1 - sign) - dim ker(r2 - sign) in the standard representation."""
    rep = standard_representation(pair)
    return kernel_dim(rep.r1, shift=float(sign), tol=tol) - kernel_dim(rep.r2, shift=float(sign), tol=tol)


def witten_index(pair: ChiralPair) -> int:
    """Sum of the indices at +1 and -1."""
    return index_via_trace(pair, +1).value + index_via_trace(pair, -1).value


def witten_index_prime(pair: ChiralPair) -> int:
    """Difference of the indices at +1 and -1: the Witten index of the companion pair."""
    return index_via_trace(pair, +1).value - index_via_trace(pair, -1).value


def offdiag_kernel_index(pair: ChiralPair, tol: float = KERNEL_TOL) -> int:
    """dim ker q1 - dim ker q2. Equals ``witten_index`` for exactly unitary pairs."""
    rep = standard_representation(pair)
    return kernel_dim(rep.q1, tol=tol) - kernel_dim(rep.q2, tol=tol)


@dataclass(frozen=True)
class NegationChecks:
    """Index identities under negating the unitary or the involution."""

    flip_u_swaps_signs: bool
    flip_u_keeps_witten: bool
    flip_op_negates_signs: bool
    flip_op_negates_witten: bool

    @property
    def all_hold(self) -> bool:
        return (
            self.flip_u_swaps_signs
            and self.flip_u_keeps_witten
            and self.flip_op_negates_signs
            and self.flip_op_negates_witten
        )


def negation_identities(pair: ChiralPair) -> NegationChecks:
    """Check the four negation identities numerically on this pair."""
    base = {s: index_via_trace(pair, s).value for s in (+1, -1)}
    neg_u = ChiralPair(pair.chiral_op, -pair.u)
    neg_op = ChiralPair(-pair.chiral_op, pair.u)
    neg_u_idx = {s: index_via_trace(neg_u, s).value for s in (+1, -1)}
    neg_op_idx = {s: index_via_trace(neg_op, s).value for s in (+1, -1)}
    return NegationChecks(
        flip_u_swaps_signs=(neg_u_idx[+1] == base[-1] and neg_u_idx[-1] == base[+1]),
        flip_u_keeps_witten=(neg_u_idx[+1] + neg_u_idx[-1] == base[+1] + base[-1]),
        flip_op_negates_signs=(neg_op_idx[+1] == -base[+1] and neg_op_idx[-1] == -base[-1]),
        flip_op_negates_witten=(neg_op_idx[+1] + neg_op_idx[-1] == -(base[+1] + base[-1])),
    )


@dataclass(frozen=True)
class SquareIndices:
    """Indices of (chiral_op, u^2) with the kernel dimensions at +-1."""

    ind_plus: int
    ind_minus: int
    dim_ker_minus_one: int
    dim_ker_plus_one: int


def square_indices(pair: ChiralPair, tol: float = KERNEL_TOL) -> SquareIndices:
    """Index data of the squared walk; (chiral_op, u^2) is again a chiral pair."""
    u2 = pair.u @ pair.u
    squared = ChiralPair(pair.chiral_op, u2)
    return SquareIndices(
        ind_plus=index_via_trace(squared, +1, tol).value,
        ind_minus=index_via_trace(squared, -1, tol).value,
        dim_ker_minus_one=kernel_dim(u2, shift=1.0, tol=tol),
        dim_ker_plus_one=kernel_dim(u2, shift=-1.0, tol=tol),
    )


def conjugated_pair(pair: ChiralPair, eps: np.ndarray) -> ChiralPair:
    """Conjugate both members by a unitary eps: (eps* G eps, eps* U eps)."""
    eps = np.asarray(eps)
    if eps.shape != pair.u.shape:
        raise DimensionMismatch(f"conjugator shape {eps.shape} does not match pair shape {pair.u.shape}")
    e_dag = eps.conj().T
    return ChiralPair(e_dag @ pair.chiral_op @ eps, e_dag @ pair.u @ eps)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian with phase-fixed R."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_involution(rng: np.random.Generator, dim: int, n_plus: int) -> np.ndarray:
    """Random unitary involution with an n_plus-dimensional +1 eigenspace."""
    if not 0 <= n_plus <= dim:
        raise DimensionMismatch(f"n_plus must lie in [0, {dim}], got {n_plus}")
    v = random_unitary(rng, dim)
    d = np.concatenate([np.ones(n_plus), -np.ones(dim - n_plus)])
    g = (v * d) @ v.conj().T
    return (g + g.conj().T) / 2.0


def random_chiral_pair(
    rng: np.random.Generator,
    dim: int,
    n_plus: int | None = None,
    n_plus_prime: int | None = None,
) -> ChiralPair:
    """Random pair built from two independent involutions G, G' with u = G G'.

    Signatures default to a random split keeping both eigenspaces
    non-trivial. The product of two involutions is unitary and satisfies
    the chiral identity for G exactly.
    """
    if n_plus is None:
        n_plus = int(rng.integers(1, dim))
    if n_plus_prime is None:
        n_plus_prime = int(rng.integers(1, dim))
    g = random_involution(rng, dim, n_plus)
    g_prime = random_involution(rng, dim, n_plus_prime)
    return ChiralPair(chiral_op=g, u=g @ g_prime)
