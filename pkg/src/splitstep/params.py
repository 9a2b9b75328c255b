"""Site-dependent coin parameters for split-step walks on the integer lattice.

A walk is specified by four bounded sequences (p, q, a, b) with
p(x)^2 + |q(x)|^2 = 1 and a(x)^2 + |b(x)|^2 = 1 at every site, p and a
real-valued. Three model kinds cover the use cases:

* ``TwoPhaseModel``: constant values on each half-line (the phase boundary
  sits between x = -1 and x = 0) plus a finitely supported table of
  sitewise overrides.
* ``PeriodicModel``: values repeat with the period of the supplied cell list.
* ``TabulatedModel``: explicit values on a finite window, constant tails
  on both sides.

When q or b is omitted the positive real gauge is used: q = sqrt(1 - p^2),
b = sqrt(1 - a^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

import numpy as np

from .errors import ConfigError, DomainError, GapBoundViolation, NormalizationError

#: sitewise constraint tolerance for p^2 + |q|^2 = 1 and a^2 + |b|^2 = 1
NORMALIZATION_TOL = 1e-12

#: |p| and |a| must stay below 1 by more than this margin
UNIT_MARGIN = 1e-12


def mobius_weight(kappa: float) -> float:
    """Map kappa in (-1, 1) to (1 + kappa) / (1 - kappa) in (0, inf).

    Strictly increasing bijection; the weight of -kappa is the reciprocal,
    and products of weights compare to 1 exactly as the sum of arguments
    compares to 0.
    """
    if not -1.0 < kappa < 1.0:
        raise DomainError(f"mobius_weight needs kappa in (-1, 1), got {kappa!r}")
    return (1.0 + kappa) / (1.0 - kappa)


def log_mobius_weight(kappa: float) -> float:
    """log of ``mobius_weight`` computed stably near the endpoints."""
    if not -1.0 < kappa < 1.0:
        raise DomainError(f"log_mobius_weight needs kappa in (-1, 1), got {kappa!r}")
    return math.log1p(kappa) - math.log1p(-kappa)


@dataclass(frozen=True)
class SiteCoeffs:
    """Coin data of one site: reals p, a and complex q, b on the unit spheres."""

    p: float
    q: complex
    a: float
    b: complex


def coeffs(p: float, a: float, q: complex | None = None, b: complex | None = None) -> SiteCoeffs:
    """Build ``SiteCoeffs``, defaulting q and b to the positive real gauge."""
    if q is None:
        q = math.sqrt(max(0.0, 1.0 - p * p))
    if b is None:
        b = math.sqrt(max(0.0, 1.0 - a * a))
    return SiteCoeffs(float(p), complex(q), float(a), complex(b))


@dataclass(frozen=True)
class PhaseLimits:
    """Asymptotic values of p and a on each end of the lattice."""

    p_minus: float
    a_minus: float
    p_plus: float
    a_plus: float

    def at(self, star: int) -> tuple[float, float]:
        """(p, a) at the end labeled by the sign of ``star``."""
        if star < 0:
            return self.p_minus, self.a_minus
        return self.p_plus, self.a_plus


@dataclass(frozen=True)
class TwoPhaseModel:
    """Half-line constants with finitely many sitewise overrides.

    Sites x >= 0 carry the +inf values, sites x <= -1 the -inf values;
    entries of ``bumps`` replace the coin data of individual sites.
    """

    limits: PhaseLimits
    bumps: Mapping[int, SiteCoeffs] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bumps", dict(self.bumps))


@dataclass(frozen=True)
class PeriodicModel:
    """Coin data repeating the supplied cells over the whole lattice."""

    cells: tuple[SiteCoeffs, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if not self.cells:
            raise ConfigError("periodic model needs at least one cell")

    @property
    def period(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class TabulatedModel:
    """Explicit coin data on [lo, lo + len(cells) - 1], constant tails outside."""

    lo: int
    cells: tuple[SiteCoeffs, ...]
    tail_left: SiteCoeffs
    tail_right: SiteCoeffs

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if not self.cells:
            raise ConfigError("tabulated model needs at least one table row")

    @property
    def hi(self) -> int:
        return self.lo + len(self.cells) - 1


Model = Union[TwoPhaseModel, PeriodicModel, TabulatedModel]


def site_coeffs(model: Model, x: int) -> SiteCoeffs:
    """Coin data of site x; defined for every integer."""
    if isinstance(model, TwoPhaseModel):
        hit = model.bumps.get(int(x))
        if hit is not None:
            return hit
        p, a = model.limits.at(1 if x >= 0 else -1)
        return coeffs(p, a)
    if isinstance(model, PeriodicModel):
        return model.cells[int(x) % model.period]
    if isinstance(model, TabulatedModel):
        if x < model.lo:
            return model.tail_left
        if x > model.hi:
            return model.tail_right
        return model.cells[int(x) - model.lo]
    raise TypeError(f"not a parameter model: {model!r}")


def site_coeffs_arrays(model: Model, sites: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``site_coeffs``: arrays (p, q, a, b) over the given sites."""
    rows = [site_coeffs(model, int(x)) for x in np.asarray(sites, dtype=int)]
    p = np.array([r.p for r in rows], dtype=float)
    q = np.array([r.q for r in rows], dtype=complex)
    a = np.array([r.a for r in rows], dtype=float)
    b = np.array([r.b for r in rows], dtype=complex)
    return p, q, a, b


def _named_rows(model: Model) -> Iterator[tuple[object, SiteCoeffs]]:
    """Every distinct coin datum the model can produce, with a label for diagnostics."""
    if isinstance(model, TwoPhaseModel):
        yield "-inf", coeffs(model.limits.p_minus, model.limits.a_minus)
        yield "+inf", coeffs(model.limits.p_plus, model.limits.a_plus)
        for x in sorted(model.bumps):
            yield x, model.bumps[x]
    elif isinstance(model, PeriodicModel):
        for i, row in enumerate(model.cells):
            yield i, row
    elif isinstance(model, TabulatedModel):
        yield "left tail", model.tail_left
        for i, row in enumerate(model.cells):
            yield model.lo + i, row
        yield "right tail", model.tail_right
    else:
        raise TypeError(f"not a parameter model: {model!r}")


def validate_model(model: Model, tol: float = NORMALIZATION_TOL) -> Model:
    """Check sitewise constraints on every distinct coin datum; return the model.

    Raises ``GapBoundViolation`` when |p| or |a| reaches 1 (within
    ``UNIT_MARGIN``) and ``NormalizationError`` when a unit-sphere
    constraint fails beyond ``tol``.
    """
    for label, row in _named_rows(model):
        for which, val in (("p", row.p), ("a", row.a)):
            if abs(val) >= 1.0 - UNIT_MARGIN:
                raise GapBoundViolation(which, val, site=label)
        np_norm = row.p * row.p + abs(row.q) ** 2
        if abs(np_norm - 1.0) > tol:
            raise NormalizationError(label, "p", np_norm)
        na_norm = row.a * row.a + abs(row.b) ** 2
        if abs(na_norm - 1.0) > tol:
            raise NormalizationError(label, "a", na_norm)
    return model


def support_radius(model: Model) -> int:
    """Smallest R >= 1 such that beyond |x| < R the model equals its tails.

    Periodic models have no tails in this sense; they return 1 for
    uniformity (every site is 'tail' in the periodic reading).
    """
    if isinstance(model, TwoPhaseModel):
        if not model.bumps:
            return 1
        return max(abs(int(x)) for x in model.bumps) + 1
    if isinstance(model, TabulatedModel):
        return max(abs(model.lo), abs(model.hi)) + 1
    return 1


def asymptotic_limits(model: Model) -> PhaseLimits | None:
    """(p, a) limits at both ends, or None when the model has no constant tails."""
    if isinstance(model, TwoPhaseModel):
        return model.limits
    if isinstance(model, TabulatedModel):
        return PhaseLimits(
            p_minus=model.tail_left.p,
            a_minus=model.tail_left.a,
            p_plus=model.tail_right.p,
            a_plus=model.tail_right.a,
        )
    return None


# ---------------------------------------------------------------------------
# serialization


def _complex_to_cfg(z: complex) -> object:
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def _complex_from_cfg(v: object, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{where}: expected a number or [re, im] pair, got {v!r}")


def _row_to_cfg(row: SiteCoeffs) -> dict:
    out: dict = {"p": row.p, "a": row.a}
    default_q = math.sqrt(max(0.0, 1.0 - row.p**2))
    default_b = math.sqrt(max(0.0, 1.0 - row.a**2))
    if row.q != default_q:
        out["q"] = _complex_to_cfg(row.q)
    if row.b != default_b:
        out["b"] = _complex_to_cfg(row.b)
    return out


def _row_from_cfg(d: Mapping, where: str, extra_keys: tuple[str, ...] = ()) -> SiteCoeffs:
    allowed = {"p", "a", "q", "b", *extra_keys}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    for key in ("p", "a"):
        if key not in d:
            raise ConfigError(f"{where}: missing required key '{key}'")
        if not isinstance(d[key], (int, float)):
            raise ConfigError(f"{where}: '{key}' must be a number, got {d[key]!r}")
    q = _complex_from_cfg(d["q"], f"{where}.q") if "q" in d else None
    b = _complex_from_cfg(d["b"], f"{where}.b") if "b" in d else None
    return coeffs(float(d["p"]), float(d["a"]), q, b)


def model_to_dict(model: Model) -> dict:
    """Plain-data form of a model, the inverse of ``model_from_dict``."""
    if isinstance(model, TwoPhaseModel):
        out = {
            "kind": "two_phase",
            "limits": {
                "p_minus": model.limits.p_minus,
                "a_minus": model.limits.a_minus,
                "p_plus": model.limits.p_plus,
                "a_plus": model.limits.a_plus,
            },
        }
        if model.bumps:
            out["perturbation"] = [{"x": x, **_row_to_cfg(model.bumps[x])} for x in sorted(model.bumps)]
        return out
    if isinstance(model, PeriodicModel):
        return {"kind": "periodic", "cell": [_row_to_cfg(r) for r in model.cells]}
    if isinstance(model, TabulatedModel):
        return {
            "kind": "tabulated",
            "lo": model.lo,
            "table": [_row_to_cfg(r) for r in model.cells],
            "tail_left": _row_to_cfg(model.tail_left),
            "tail_right": _row_to_cfg(model.tail_right),
        }
    raise TypeError(f"not a parameter model: {model!r}")


def model_from_dict(data: Mapping) -> Model:
    """Parse a model from plain data, rejecting unknown keys."""
    if not isinstance(data, Mapping):
        raise ConfigError(f"model section must be a table, got {data!r}")
    kind = data.get("kind")
    if kind == "two_phase":
        unknown = set(data) - {"kind", "limits", "perturbation"}
        if unknown:
            raise ConfigError(f"two_phase model: unknown keys {sorted(unknown)}")
        lim = data.get("limits")
        if not isinstance(lim, Mapping):
            raise ConfigError("two_phase model: missing [limits] table")
        lim_unknown = set(lim) - {"p_minus", "a_minus", "p_plus", "a_plus"}
        if lim_unknown:
            raise ConfigError(f"limits: unknown keys {sorted(lim_unknown)}")
        try:
            limits = PhaseLimits(
                p_minus=float(lim["p_minus"]),
                a_minus=float(lim["a_minus"]),
                p_plus=float(lim["p_plus"]),
                a_plus=float(lim["a_plus"]),
            )
        except KeyError as missing:
            raise ConfigError(f"limits: missing key {missing}") from None
        bumps = {}
        for i, entry in enumerate(data.get("perturbation", [])):
            where = f"perturbation[{i}]"
            if "x" not in entry:
                raise ConfigError(f"{where}: missing site index 'x'")
            if not isinstance(entry["x"], int):
                raise ConfigError(f"{where}: 'x' must be an integer, got {entry['x']!r}")
            bumps[int(entry["x"])] = _row_from_cfg(entry, where, extra_keys=("x",))
        return TwoPhaseModel(limits=limits, bumps=bumps)
    if kind == "periodic":
        unknown = set(data) - {"kind", "cell"}
        if unknown:
            raise ConfigError(f"periodic model: unknown keys {sorted(unknown)}")
        rows = data.get("cell")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("periodic model: needs a non-empty [[cell]] list")
        return PeriodicModel(cells=tuple(_row_from_cfg(r, f"cell[{i}]") for i, r in enumerate(rows)))
    if kind == "tabulated":
        unknown = set(data) - {"kind", "lo", "table", "tail_left", "tail_right"}
        if unknown:
            raise ConfigError(f"tabulated model: unknown keys {sorted(unknown)}")
        if not isinstance(data.get("lo"), int):
            raise ConfigError("tabulated model: 'lo' must be an integer")
        rows = data.get("table")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("tabulated model: needs a non-empty [[table]] list")
        for side in ("tail_left", "tail_right"):
            if not isinstance(data.get(side), Mapping):
                raise ConfigError(f"tabulated model: missing [{side}] table")
        return TabulatedModel(
            lo=int(data["lo"]),
            cells=tuple(_row_from_cfg(r, f"table[{i}]") for i, r in enumerate(rows)),
            tail_left=_row_from_cfg(data["tail_left"], "tail_left"),
            tail_right=_row_from_cfg(data["tail_right"], "tail_right"),
        )
    raise ConfigError(f"unknown model kind {kind!r}; expected two_phase, periodic, or tabulated")


def _toml_scalar(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_scalar(t) for t in v) + "]"
    raise TypeError(f"cannot serialize {v!r} to TOML")


def dump_model_toml(model: Model) -> str:
    """Render a model as TOML text; ``load_model_toml`` inverts it."""
    data = model_to_dict(model)
    lines = [f"kind = {_toml_scalar(data['kind'])}"]
    for key in ("lo",):
        if key in data:
            lines.append(f"{key} = {_toml_scalar(data[key])}")
    if "limits" in data:
        lines.append("")
        lines.append("[limits]")
        for k, v in data["limits"].items():
            lines.append(f"{k} = {_toml_scalar(v)}")
    for side in ("tail_left", "tail_right"):
        if side in data:
            lines.append("")
            lines.append(f"[{side}]")
            for k, v in data[side].items():
                lines.append(f"{k} = {_toml_scalar(v)}")
    for list_key in ("perturbation", "cell", "table"):
        for entry in data.get(list_key, []):
            lines.append("")
            lines.append(f"[[{list_key}]]")
            for k, v in entry.items():
                lines.append(f"{k} = {_toml_scalar(v)}")
    return "\n".join(lines) + "\n"


def load_model_toml(text: str) -> Model:
    """Parse and validate a model from TOML text (model keys only)."""
    import tomli

    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as err:
        raise ConfigError(f"config is not valid TOML: {err}") from None
    data.pop("run", None)
    return validate_model(model_from_dict(data))
