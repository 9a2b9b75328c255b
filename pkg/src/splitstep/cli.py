"""Command-line front end: reproducible reports from TOML configs.

A config file holds a model (the lattice-parameter schema) plus an optional
[run] table with command settings; flags override the file.  Reports are
JSON with sorted keys and no timestamps, sequences and tables are CSV, and
every run with an output directory also writes a manifest naming the config
hash, package version, effective settings, and produced files.

Exit codes: 0 success, 1 a verification failed, 2 invalid input or a
gapless configuration.
"""

import argparse
import csv
import hashlib
import io
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import tomli

from . import __version__, params, verify
from .eigenstates import (
    build_eigenstate,
    decay_rates,
    eigenstate_report,
    empirical_onset,
    envelope_check,
)
from .errors import (
    ConfigError,
    EnvelopeViolation,
    GapClosed,
    NonIntegerTrace,
    SplitStepError,
    StructureError,
)
from .indices import (
    GAP_TOL,
    PARTIAL_SUM_METHOD,
    RATIO_METHOD,
    classify_index,
    index_report,
    representative_limits,
    sixteen_case_row,
)
from .spectrum import (
    BAND,
    BAND_DIST_TOL,
    ISOLATED,
    SEAM_ARTIFACT,
    classified_spectrum,
    expected_isolated,
    model_bands,
    save_spectrum_csv,
)
from .walk import OPEN, PERIODIC, Window, equivalence_residual, save_state_csv

COMMANDS = ("index", "eigenstate", "spectrum", "table16", "verify", "equivalence")

_RUN_KEYS = {"command", "window", "boundary", "seed", "out", "tol", "branch", "sign", "policy"}
_WINDOW_RE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")

#: default windows per command; index works from the series alone
DEFAULT_WINDOWS = {
    "eigenstate": (-80, 79, OPEN),
    "spectrum": (-200, 200, PERIODIC),
    "equivalence": (-40, 39, PERIODIC),
}


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one invocation after merging file and flags."""

    command: str
    model: Optional[params.Model]
    window: Optional[tuple[int, int]]
    boundary: Optional[str]
    seed: int
    out: Optional[Path]
    tol: Optional[float]
    branch: Optional[int]
    sign: Optional[int]
    policy: str
    config_sha256: str


def _parse_window(text: str) -> tuple[int, int]:
    match = _WINDOW_RE.match(text.strip())
    if not match:
        raise ConfigError(f"window must look like LO..HI with integers, got {text!r}")
    return int(match.group(1)), int(match.group(2))


def _parse_sign(value: object) -> int:
    if value in (+1, -1):
        return int(value)
    if value in ("+1", "-1", "+", "-"):
        return 1 if str(value).startswith("+") else -1
    raise ConfigError(f"sign must be +1 or -1, got {value!r}")


def _effective_window(cfg: RunConfig) -> Window:
    lo, hi, default_boundary = DEFAULT_WINDOWS[cfg.command]
    if cfg.window is not None:
        lo, hi = cfg.window
    return Window(lo, hi, cfg.boundary or default_boundary)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the TOML config (if any) with command-line flags; flags win."""
    run: dict = {}
    model = None
    sha = hashlib.sha256()
    if args.config is not None:
        raw = Path(args.config).read_bytes()
        sha.update(raw)
        try:
            data = tomli.loads(raw.decode("utf-8"))
        except tomli.TOMLDecodeError as err:
            raise ConfigError(f"config is not valid TOML: {err}") from None
        run = data.pop("run", {})
        if not isinstance(run, dict):
            raise ConfigError("[run] must be a table")
        unknown = set(run) - _RUN_KEYS
        if unknown:
            raise ConfigError(f"[run]: unknown keys {sorted(unknown)}")
        if data:
            model = params.validate_model(params.model_from_dict(data))
    command = args.command or run.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}; got {command!r}")

    window = None
    if args.window is not None:
        window = _parse_window(args.window)
    elif "window" in run:
        window = _parse_window(str(run["window"]))
    boundary = args.boundary if args.boundary is not None else run.get("boundary")
    if boundary is not None and boundary not in (PERIODIC, OPEN):
        raise ConfigError(f"boundary must be periodic or open, got {boundary!r}")
    seed = args.seed if args.seed is not None else run.get("seed", verify.DEFAULT_SEED)
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    out = args.out if args.out is not None else run.get("out")
    tol = args.tol if args.tol is not None else run.get("tol")
    if tol is not None:
        tol = float(tol)
        if not tol > 0.0:
            raise ConfigError(f"tol must be positive, got {tol}")
    branch = run.get("branch")
    if branch is not None and branch not in (1, 2):
        raise ConfigError(f"branch must be 1 or 2, got {branch!r}")
    sign = _parse_sign(run["sign"]) if "sign" in run else None
    policy = run.get("policy", RATIO_METHOD)
    if policy not in (RATIO_METHOD, PARTIAL_SUM_METHOD):
        raise ConfigError(f"policy must be {RATIO_METHOD} or {PARTIAL_SUM_METHOD}, got {policy!r}")

    if args.config is None:
        canon = {
            "command": command,
            "model": params.model_to_dict(model) if model is not None else None,
            "window": list(window) if window else None,
            "boundary": boundary,
            "seed": seed,
            "tol": tol,
        }
        sha.update(json.dumps(canon, sort_keys=True).encode("utf-8"))
    return RunConfig(
        command=command,
        model=model,
        window=window,
        boundary=boundary,
        seed=seed,
        out=Path(out) if out is not None else None,
        tol=tol,
        branch=branch,
        sign=sign,
        policy=policy,
        config_sha256=sha.hexdigest(),
    )


def _require_model(cfg: RunConfig) -> params.Model:
    if cfg.model is None:
        raise ConfigError(f"the {cfg.command} command needs a model section in the config")
    return cfg.model


def _manifest(cfg: RunConfig, window: Optional[Window], tolerances: dict, outputs: list) -> dict:
    return {
        "command": cfg.command,
        "config_sha256": cfg.config_sha256,
        "version": __version__,
        "seed": cfg.seed,
        "window": [window.lo, window.hi] if window is not None else None,
        "boundary": window.boundary if window is not None else None,
        "tolerances": tolerances,
        "outputs": outputs,
    }


def _emit(cfg: RunConfig, report: dict, manifest: dict, extra_files: dict) -> None:
    """Print the JSON report; with an output directory also write files."""
    print(json.dumps(report, indent=2, sort_keys=True))
    if cfg.out is None:
        return
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for name, writer in extra_files.items():
        writer(cfg.out / name)
    (cfg.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_index(cfg: RunConfig) -> int:
    model = _require_model(cfg)
    report = index_report(model, policy=cfg.policy)
    manifest = _manifest(
        cfg, None, {"gap": GAP_TOL, "policy": cfg.policy}, ["report.json"] if cfg.out else []
    )
    report["manifest"] = manifest
    _emit(cfg, report, manifest, {})
    closed = [name for name, flag in (("+1", report["gap_plus"]), ("-1", report["gap_minus"])) if flag is False]
    if closed:
        print(
            f"gap closed at {' and '.join(closed)}: the asymptotic limits meet, "
            "the symmetry point lies in the essential spectrum",
            file=sys.stderr,
        )
        return 2
    return 0


def _branches_to_build(cfg: RunConfig, model: params.Model) -> list[tuple[int, int]]:
    if cfg.branch is not None and cfg.sign is not None:
        return [(cfg.branch, cfg.sign)]
    if cfg.branch is not None or cfg.sign is not None:
        raise ConfigError("branch and sign must be given together")
    combos = []
    for sign in (+1, -1):
        value = classify_index(model, sign, policy=cfg.policy).value
        if value == +1:
            combos.append((1, sign))
        elif value == -1:
            combos.append((2, sign))
    return combos


def cmd_eigenstate(cfg: RunConfig) -> int:
    model = _require_model(cfg)
    window = _effective_window(cfg)
    states = []
    files: dict = {}
    for j, sign in _branches_to_build(cfg, model):
        bundle = build_eigenstate(model, j, sign, window)
        rates = decay_rates(model, j, sign)
        try:
            envelope = envelope_check(bundle, rates)
            onset = envelope.x_star
        except EnvelopeViolation:
            onset = empirical_onset(bundle, rates)
            envelope = envelope_check(bundle, rates, x_star=onset)
        entry = eigenstate_report(bundle, rates)
        entry["envelope"] = envelope.to_dict()
        entry["envelope"]["x_star_formula"] = rates.x_star
        name = f"state_branch{j}_{'plus' if sign > 0 else 'minus'}.csv"
        entry["csv"] = name if cfg.out else None
        states.append(entry)
        files[name] = lambda path, s=bundle.state: save_state_csv(s, path)
    outputs = ["report.json", *files] if cfg.out else []
    manifest = _manifest(cfg, window, {"residual": cfg.tol, "gap": GAP_TOL}, outputs)
    report = {"states": states, "count": len(states), "manifest": manifest}
    _emit(cfg, report, manifest, files)
    if cfg.tol is not None and any(s["residual"] >= cfg.tol for s in states):
        print(f"eigenvector residual exceeded tol={cfg.tol}", file=sys.stderr)
        return 1
    return 0


def cmd_spectrum(cfg: RunConfig) -> int:
    model = _require_model(cfg)
    window = _effective_window(cfg)
    band_tol = cfg.tol if cfg.tol is not None else BAND_DIST_TOL
    points = classified_spectrum(model, window, band_tol=band_tol)
    bands = model_bands(model)
    counts = {BAND: 0, ISOLATED: 0, SEAM_ARTIFACT: 0}
    outliers = []
    for pt in points:
        counts[pt.classification] += 1
        if pt.classification != BAND:
            outliers.append(
                {
                    "re": pt.eigenvalue.real,
                    "im": pt.eigenvalue.imag,
                    "classification": pt.classification,
                    "seam_mass": pt.seam_mass,
                    "band_distance": pt.band_distance,
                }
            )
    prediction = None
    if params.asymptotic_limits(model) is not None:
        prediction = expected_isolated(model)
    outputs = ["report.json", "spectrum.csv"] if cfg.out else []
    manifest = _manifest(cfg, window, {"band": band_tol}, outputs)
    report = {
        "bands": bands.to_dict(),
        "counts": counts,
        "eigenvalues": len(points),
        "outliers": outliers,
        "predicted_isolated": prediction,
        "manifest": manifest,
    }
    _emit(cfg, report, manifest, {"spectrum.csv": lambda path: save_spectrum_csv(points, path)})
    return 0


def _table16_text() -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["case", "left", "right", "p_minus", "a_minus", "p_plus", "a_plus",
         "ind_plus", "ind_minus", "i_plus", "i_minus"]
    )
    for case_id in range(1, 17):
        limits = representative_limits(case_id)
        row = sixteen_case_row(limits)
        writer.writerow(
            [row.case_id, row.left_pattern, row.right_pattern,
             repr(limits.p_minus), repr(limits.a_minus), repr(limits.p_plus), repr(limits.a_plus),
             row.ind_plus, row.ind_minus, row.i_plus, row.i_minus]
        )
    return buffer.getvalue()


def cmd_table16(cfg: RunConfig) -> int:
    text = _table16_text()
    print(text, end="")
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "table16.csv").write_text(text)
        manifest = _manifest(cfg, None, {"case_boundary": GAP_TOL}, ["table16.csv"])
        (cfg.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    summary = verify.run_all(cfg.seed)
    outputs = ["report.json"] if cfg.out else []
    manifest = _manifest(
        cfg,
        None,
        {
            "chiral": verify.CHIRAL_TOL,
            "residual": verify.RESIDUAL_TOL,
            "slope": verify.SLOPE_TOL,
            "band": verify.BAND_TOL,
            "point": verify.POINT_TOL,
            "equivalence": verify.EQUIVALENCE_TOL,
        },
        outputs,
    )
    summary["manifest"] = manifest
    _emit(cfg, summary, manifest, {})
    return 0 if summary["all_passed"] else 1


def _profile_periods(size: int, count: int = 5) -> list[int]:
    divisors = [d for d in range(2, size + 1) if size % d == 0]
    return divisors[:count] if divisors else [size]


def cmd_equivalence(cfg: RunConfig) -> int:
    import numpy as np

    window = _effective_window(cfg)
    tol = cfg.tol if cfg.tol is not None else verify.EQUIVALENCE_TOL
    rng = np.random.default_rng(cfg.seed)
    draws = []
    for _ in range(20):
        t1, t2 = rng.uniform(-1.35, 1.35, size=2)
        draws.append({"kind": "constant", "residual": equivalence_residual(float(t1), float(t2), window)})
    for period in _profile_periods(window.size):
        t1 = rng.uniform(-1.3, 1.3, size=period)
        t2 = rng.uniform(-1.3, 1.3, size=period)
        draws.append({"kind": f"profile period {period}",
                      "residual": equivalence_residual(t1, t2, window)})
    worst = max(d["residual"] for d in draws)
    passed = worst < tol
    outputs = ["report.json"] if cfg.out else []
    manifest = _manifest(cfg, window, {"residual": tol}, outputs)
    report = {
        "draws": draws,
        "max_residual": worst,
        "tolerance": tol,
        "passed": passed,
        "manifest": manifest,
    }
    _emit(cfg, report, manifest, {})
    if not passed:
        print(f"equivalence residual {worst:.3e} exceeded tol={tol}", file=sys.stderr)
        return 1
    return 0


DISPATCH = {
    "index": cmd_index,
    "eigenstate": cmd_eigenstate,
    "spectrum": cmd_spectrum,
    "table16": cmd_table16,
    "verify": cmd_verify,
    "equivalence": cmd_equivalence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitstep",
        description="Split-step walk indices, symmetry-protected eigenstates, and spectra.",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="what to run; may also come from [run] in the config")
    parser.add_argument("--config", metavar="PATH", help="TOML file with a model and a [run] table")
    parser.add_argument("--command", dest="command_flag", choices=COMMANDS,
                        help="alternative to the positional command")
    parser.add_argument("--window", metavar="LO..HI", help="integer site range, e.g. -80..79")
    parser.add_argument("--boundary", choices=[PERIODIC, OPEN], help="window boundary handling")
    parser.add_argument("--seed", type=int, help="seed for randomized suites")
    parser.add_argument("--out", metavar="DIR", help="directory for report, data files, manifest")
    parser.add_argument("--tol", type=float, help="command-specific tolerance override")
    return parser


def _normalize_argv(argv: Sequence[str]) -> list:
    """Join '--window' with its value so negative bounds survive argparse."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--window" and i + 1 < len(argv):
            out.append("--window=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_normalize_argv(argv))
    if args.command and args.command_flag and args.command != args.command_flag:
        print(f"conflicting commands {args.command!r} and {args.command_flag!r}", file=sys.stderr)
        return 2
    args.command = args.command or args.command_flag
    try:
        cfg = load_run_config(args)
        return DISPATCH[cfg.command](cfg)
    except GapClosed as err:
        print(f"gapless configuration: {err}", file=sys.stderr)
        return 2
    except (StructureError, NonIntegerTrace, EnvelopeViolation) as err:
        print(f"verification failure: {err}", file=sys.stderr)
        return 1
    except SplitStepError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
