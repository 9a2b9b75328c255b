"""Essential-spectrum bands, gap widths, and classified truncated spectra.

The essential spectrum of a two-phase walk is the pair of unit-circle arcs
whose real parts fill the intervals I(-inf) and I(+inf) determined by the
asymptotic coin data.  A gap at +1 or -1 is an algebraic condition on the
limits; its width is measured along the real axis.  Finite surrogates come
from exactly unitary periodic truncations, whose eigenvalues split into
band points, isolated mid-gap states bound to the phase interface, and
artifacts bound to the wrap seam.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import params
from .errors import ConfigError, GapBoundViolation, StructureError
from .indices import GAP_TOL
from .walk import PERIODIC, Window, build_walk

#: eigenvalues whose real part is at most this far from a band count as band
BAND_DIST_TOL = 1e-2
#: non-band eigenvalues closer than this are treated as one degenerate cluster
CLUSTER_TOL = 1e-8
#: unitarity safety net for truncated eigenvalues
UNIT_MODULUS_TOL = 1e-9

BAND = "band"
ISOLATED = "isolated"
SEAM_ARTIFACT = "seam-artifact"


@dataclass(frozen=True)
class Interval:
    """Closed real interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ConfigError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def distance(self, x: float) -> float:
        """Distance from x to the interval; zero inside."""
        return max(self.lo - x, x - self.hi, 0.0)


@dataclass(frozen=True)
class SpectralBands:
    """Essential-spectrum data of a two-phase model.

    ``interval_minus`` and ``interval_plus`` hold the real parts contributed
    by each end of the lattice; ``arc_minus`` and ``arc_plus`` give the same
    sets as (lo, hi) ranges of |arg z| in [0, pi].  Gap flags and widths
    refer to the spectral points +1 and -1.
    """

    interval_minus: Interval
    interval_plus: Interval
    arc_minus: tuple[float, float]
    arc_plus: tuple[float, float]
    gap_at_plus1: bool
    gap_at_minus1: bool
    gap_width_plus1: float
    gap_width_minus1: float

    def band_distance(self, re_part: float) -> float:
        """Distance from a real part to the union of the two intervals."""
        return min(self.interval_minus.distance(re_part), self.interval_plus.distance(re_part))

    def to_dict(self) -> dict:
        return {
            "interval_minus": [self.interval_minus.lo, self.interval_minus.hi],
            "interval_plus": [self.interval_plus.lo, self.interval_plus.hi],
            "arc_minus": list(self.arc_minus),
            "arc_plus": list(self.arc_plus),
            "gap_at_plus1": self.gap_at_plus1,
            "gap_at_minus1": self.gap_at_minus1,
            "gap_width_plus1": self.gap_width_plus1,
            "gap_width_minus1": self.gap_width_minus1,
        }


def _band_interval(p: float, a: float) -> Interval:
    center = p * a
    half = np.sqrt(1.0 - p * p) * np.sqrt(1.0 - a * a)
    lo = max(-1.0, center - half)
    hi = min(1.0, center + half)
    return Interval(float(lo), float(hi))


def _arc(interval: Interval) -> tuple[float, float]:
    return (float(np.arccos(interval.hi)), float(np.arccos(interval.lo)))


def essential_bands(limits: params.PhaseLimits) -> SpectralBands:
    """Band intervals, arcs, gap flags and gap widths from asymptotic limits."""
    for label, star in (("-inf", -1), ("+inf", +1)):
        p, a = limits.at(star)
        for which, val in (("p", p), ("a", a)):
            if abs(val) >= 1.0 - params.UNIT_MARGIN:
                raise GapBoundViolation(which, val, site=label)
    iv_minus = _band_interval(*limits.at(-1))
    iv_plus = _band_interval(*limits.at(+1))
    gap_plus = all(abs(p - a) > GAP_TOL for p, a in (limits.at(-1), limits.at(+1)))
    gap_minus = all(abs(p + a) > GAP_TOL for p, a in (limits.at(-1), limits.at(+1)))
    # a closed gap means the band touches the point exactly; do not let the
    # rounded edge leak a phantom positive width
    width_plus = max(0.0, 1.0 - max(iv_minus.hi, iv_plus.hi)) if gap_plus else 0.0
    width_minus = max(0.0, 1.0 + min(iv_minus.lo, iv_plus.lo)) if gap_minus else 0.0
    return SpectralBands(
        interval_minus=iv_minus,
        interval_plus=iv_plus,
        arc_minus=_arc(iv_minus),
        arc_plus=_arc(iv_plus),
        gap_at_plus1=gap_plus,
        gap_at_minus1=gap_minus,
        gap_width_plus1=width_plus,
        gap_width_minus1=width_minus,
    )


def model_bands(model: params.Model) -> SpectralBands:
    """Bands for a two-phase or constant model.

    Periodic models with more than one cell have no two-ended band formula
    here and are rejected.
    """
    limits = params.asymptotic_limits(model)
    if limits is None:
        if isinstance(model, params.PeriodicModel) and len(model.cells) == 1:
            cell = model.cells[0]
            limits = params.PhaseLimits(cell.p, cell.a, cell.p, cell.a)
        else:
            raise ConfigError("bands need a two-phase or constant model")
    return essential_bands(limits)


def _require_ring(model: params.Model, window: Window) -> None:
    if window.boundary != PERIODIC:
        raise ConfigError("truncated spectra use periodic windows; got open boundary")
    if isinstance(model, params.PeriodicModel) and window.size % len(model.cells):
        raise ConfigError(
            f"window size {window.size} is not a multiple of the cell period {len(model.cells)}"
        )


def truncated_spectrum(model: params.Model, window: Window) -> np.ndarray:
    """Eigenvalues of the truncated walk on a ring, sorted by argument."""
    _require_ring(model, window)
    values = np.linalg.eigvals(build_walk(model, window).u)
    drift = float(np.abs(np.abs(values) - 1.0).max())
    if drift > UNIT_MODULUS_TOL:
        raise StructureError(f"truncated eigenvalues left the unit circle by {drift:.3e}")
    return values[np.argsort(np.angle(values))]


@dataclass(frozen=True)
class SpectralPoint:
    """One truncated eigenvalue with its classification.

    ``seam_mass`` is the weight the eigenvector carries on the half of the
    ring nearer the wrap seam than the interface; it is None for band points,
    whose vectors are not localized.
    """

    eigenvalue: complex
    classification: str
    band_distance: float
    seam_mass: float | None = None

    def to_row(self) -> dict:
        return {
            "re": float(self.eigenvalue.real),
            "im": float(self.eigenvalue.imag),
            "classification": self.classification,
        }


def _seam_mask(window: Window) -> np.ndarray:
    """Componentwise 0/1 weights for sites nearer the seam than the origin."""
    sites = window.sites
    seam_dist = np.minimum(sites - window.lo, window.hi - sites)
    return np.repeat((seam_dist < np.abs(sites)).astype(float), 2)


def _clusters(values: np.ndarray, indices: np.ndarray) -> list[list[int]]:
    """Group near-degenerate eigenvalues by complex distance."""
    groups: list[list[int]] = []
    for i in indices:
        for group in groups:
            if abs(values[i] - values[group[0]]) <= CLUSTER_TOL:
                group.append(int(i))
                break
        else:
            groups.append([int(i)])
    return groups


def classified_spectrum(
    model: params.Model, window: Window, band_tol: float = BAND_DIST_TOL
) -> list[SpectralPoint]:
    """Truncated eigenvalues labeled band / isolated / seam-artifact.

    Mid-gap eigenvalues bound to the interface and to the wrap seam are
    numerically degenerate once the window dwarfs the decay length, so each
    near-degenerate cluster is split by diagonalizing the seam-weight form
    on its orthonormalized eigenspace before labeling.
    """
    bands = model_bands(model)
    _require_ring(model, window)
    values, vectors = np.linalg.eig(build_walk(model, window).u)
    order = np.argsort(np.angle(values), kind="stable")
    values, vectors = values[order], vectors[:, order]

    dist = np.array([bands.band_distance(float(v.real)) for v in values])
    points: list[SpectralPoint | None] = [None] * values.size
    for i in np.nonzero(dist <= band_tol)[0]:
        points[i] = SpectralPoint(complex(values[i]), BAND, float(dist[i]))

    mask = _seam_mask(window)
    outliers = np.nonzero(dist > band_tol)[0]
    for group in _clusters(values, outliers):
        basis, _ = np.linalg.qr(vectors[:, group])
        form = basis.conj().T @ (mask[:, None] * basis)
        masses = np.linalg.eigvalsh((form + form.conj().T) / 2.0)
        for i, mass in zip(group, masses):
            label = SEAM_ARTIFACT if mass > 0.5 else ISOLATED
            points[i] = SpectralPoint(complex(values[i]), label, float(dist[i]), float(mass))
    return [pt for pt in points if pt is not None]


def expected_isolated(model: params.Model) -> dict:
    """Predicted interface eigenvalue counts at +1 and -1 from the indices.

    A closed gap predicts none: the band itself reaches the point.  On a
    ring the seam acts as a second interface with reversed limits, so each
    predicted state appears alongside one seam artifact.
    """
    from .errors import GapClosed
    from .indices import two_phase_index

    limits = params.asymptotic_limits(model)
    if limits is None:
        raise ConfigError("isolated-state prediction needs a two-phase model")
    counts = {}
    for sign, key in ((+1, "plus_one"), (-1, "minus_one")):
        try:
            counts[key] = abs(two_phase_index(limits, sign))
        except GapClosed:
            counts[key] = 0
    return counts


def save_spectrum_csv(points: list[SpectralPoint], path) -> None:
    """Write classified eigenvalues as plot-ready CSV rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["re", "im", "classification"], lineterminator="\n")
        writer.writeheader()
        for pt in points:
            row = pt.to_row()
            writer.writerow(
                {
                    "re": repr(row["re"]),
                    "im": repr(row["im"]),
                    "classification": row["classification"],
                }
            )
