"""Command-line entry point, strict configuration parsing and serialization.

Exit codes: 0 success, 1 assumption or precondition failure (the report is
still written), 2 numerical failure or invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve_geometry import (
    DECAYING_PRESETS,
    PERIODIC_PRESETS,
    CurvatureProfile,
    check_assumptions,
    fourier_profile,
    preset_profile,
)
from .errors import AssumptionError, ConvergenceError, LeakyBandsError, PreconditionError, QuadratureError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("validate-curve", "bands", "gaps", "transverse", "fiber2d", "straight")

EXIT_OK, EXIT_ASSUMPTION, EXIT_NUMERICAL = 0, 1, 2


class ConfigError(LeakyBandsError, ValueError):
    """Configuration document is malformed or a knob is out of range."""


# --------------------------------------------------------------------------
# profiles


def parse_profile(doc) -> CurvatureProfile:
    if not isinstance(doc, dict):
        raise ConfigError("profile: expected a JSON object")
    kind = doc.get("kind")
    if kind == "fourier":
        allowed = {"kind", "L", "sin", "cos", "shift"}
        _reject_unknown(doc, allowed, "profile")
        if "L" not in doc:
            raise ConfigError("profile.L: required for kind 'fourier'")
        L = _number(doc["L"], "profile.L")
        if not L > 0:
            raise ConfigError("profile.L: must be > 0")
        sin = _number_list(doc.get("sin", []), "profile.sin")
        cos = _number_list(doc.get("cos", []), "profile.cos")
        if cos and cos[0] != 0.0:
            raise ConfigError("profile.cos[0]: the constant term is forbidden (zero-mean curvature required)")
        return fourier_profile(L, sin=sin, cos=cos, shift=_number(doc.get("shift", 0.0), "profile.shift"))
    if kind in ("preset", "decaying"):
        name = doc.get("name")
        table = {**PERIODIC_PRESETS, **DECAYING_PRESETS}
        if name not in table:
            raise ConfigError(f"profile.name: unknown preset {name!r}; known: {sorted(table)}")
        required, defaults = table[name]
        _reject_unknown(doc, {"kind", "name", "shift"} | required | set(defaults), "profile")
        params = {k: _number(v, f"profile.{k}") for k, v in doc.items() if k not in ("kind", "name", "shift")}
        missing = required - set(params)
        if missing:
            raise ConfigError(f"profile: preset {name!r} needs {sorted(missing)}")
        try:
            return preset_profile(name, shift=_number(doc.get("shift", 0.0), "profile.shift"), **params)
        except ValueError as exc:
            raise ConfigError(f"profile: {exc}") from exc
    raise ConfigError(f"profile.kind: expected 'fourier' or 'preset', got {kind!r}")


def _reject_unknown(doc, allowed, where):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")


def _number(x, name):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ConfigError(f"{name}: expected a finite number, got {x!r}")
    return float(x)


def _integer(x, name, lo, hi=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{name}: expected an integer, got {x!r}")
    if x < lo or (hi is not None and x > hi):
        raise ConfigError(f"{name}: {x} outside [{lo}, {hi if hi is not None else 'inf'}]")
    return x


def _number_list(x, name):
    if not isinstance(x, list):
        raise ConfigError(f"{name}: expected a list of numbers")
    return [_number(v, f"{name}[{i}]") for i, v in enumerate(x)]


# --------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    subcommand: str
    profile: dict | None = None
    n_modes: int = 128
    theta_count: int = 65
    J: int | None = None
    a: float = 0.05
    beta: float | None = None
    betas: list[float] = field(default_factory=lambda: [20.0, 40.0])
    thetas: list[float] = field(default_factory=lambda: [0.0])
    n_s: int = 128
    n_u: int = 128
    search_max: int = 12
    gap_tolerance: float | None = None
    R: float = 40.0
    n_points: int = 8192
    transverse: list[dict] = field(default_factory=list)

    def to_dict(self):
        return dataclasses.asdict(self)

    def curvature(self) -> CurvatureProfile:
        return parse_profile(self.profile)


_DEFAULT_J = {"fiber2d": 3}
_TRANSVERSE_KEYS = {"a", "beta", "gamma_plus", "variant"}


def parse_config(document) -> RunConfig:
    """Validate a JSON document (text or already-decoded dict) and fill defaults."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: not valid JSON ({exc})") from exc
    if not isinstance(document, dict):
        raise ConfigError("config: expected a JSON object")
    names = {f.name for f in dataclasses.fields(RunConfig)}
    _reject_unknown(document, names, "config")
    sub = document.get("subcommand")
    if sub not in SUBCOMMANDS:
        raise ConfigError(f"subcommand: expected one of {list(SUBCOMMANDS)}, got {sub!r}")
    cfg = RunConfig(subcommand=sub)

    if sub != "transverse" or document.get("profile") is not None:
        if document.get("profile") is None:
            raise ConfigError("profile: required for this subcommand")
        prof = parse_profile(document["profile"])
        if sub == "straight" and prof.periodic:
            raise ConfigError("profile: 'straight' needs a decaying preset")
        if sub not in ("straight", "transverse") and not prof.periodic:
            raise ConfigError(f"profile: {sub!r} needs a periodic profile")
        cfg.profile = dict(document["profile"])

    d = document
    cfg.n_modes = _integer(d.get("n_modes", cfg.n_modes), "n_modes", 2, 4096)
    cfg.theta_count = _integer(d.get("theta_count", cfg.theta_count), "theta_count", 1, 4096)
    jmax = 10 if sub == "fiber2d" else 2 * cfg.n_modes + 1
    J = d.get("J")
    cfg.J = _integer(J, "J", 1, jmax) if J is not None else _DEFAULT_J.get(sub, 8)
    cfg.a = _number(d.get("a", cfg.a), "a")
    if not cfg.a > 0:
        raise ConfigError("a: must be > 0")
    if d.get("beta") is not None:
        cfg.beta = _number(d["beta"], "beta")
        if not cfg.beta > 1:
            raise ConfigError("beta: must be > 1 (a(beta) = 6 log(beta) / beta must be positive)")
    cfg.betas = _number_list(d.get("betas", cfg.betas), "betas")
    for i, b in enumerate(cfg.betas):
        if not b > 1:
            raise ConfigError(f"betas[{i}]: must be > 1")
        if sub == "fiber2d" and not 6.0 * math.log(b) > 8.0:
            raise ConfigError(f"betas[{i}]: beta*a(beta) = 6 log(beta) = {6 * math.log(b):.6g} must exceed 8")
    cfg.thetas = _number_list(d.get("thetas", cfg.thetas), "thetas")
    for name in ("n_s", "n_u"):
        setattr(cfg, name, _integer(d.get(name, getattr(cfg, name)), name, 4, 4096))
    if cfg.n_u % 2:
        raise ConfigError("n_u: must be even so that u = 0 is a grid row")
    # the default search depth shrinks with a small basis; an explicit value must fit
    cfg.search_max = _integer(d.get("search_max", min(cfg.search_max, 2 * cfg.n_modes)), "search_max", 1, 2 * cfg.n_modes)
    if d.get("gap_tolerance") is not None:
        cfg.gap_tolerance = _number(d["gap_tolerance"], "gap_tolerance")
        if not cfg.gap_tolerance > 0:
            raise ConfigError("gap_tolerance: must be > 0")
    cfg.R = _number(d.get("R", cfg.R), "R")
    if not cfg.R > 0:
        raise ConfigError("R: must be > 0")
    cfg.n_points = _integer(d.get("n_points", cfg.n_points), "n_points", 16, 1 << 20)
    if cfg.n_points % 2:
        raise ConfigError("n_points: must be even")
    cases = d.get("transverse", [])
    if not isinstance(cases, list):
        raise ConfigError("transverse: expected a list of cases")
    cfg.transverse = []
    for i, case in enumerate(cases):
        if not isinstance(case, dict):
            raise ConfigError(f"transverse[{i}]: expected an object")
        _reject_unknown(case, _TRANSVERSE_KEYS, f"transverse[{i}]")
        for key in ("a", "beta"):
            if key not in case or not _number(case[key], f"transverse[{i}].{key}") > 0:
                raise ConfigError(f"transverse[{i}].{key}: required and > 0")
        g = _number(case.get("gamma_plus", 0.0), f"transverse[{i}].gamma_plus")
        if g < 0:
            raise ConfigError(f"transverse[{i}].gamma_plus: must be >= 0")
        variant = case.get("variant", "DirichletPlus")
        if variant not in ("DirichletPlus", "RobinMinus"):
            raise ConfigError(f"transverse[{i}].variant: expected DirichletPlus or RobinMinus")
        cfg.transverse.append(
            {"a": float(case["a"]), "beta": float(case["beta"]), "gamma_plus": g, "variant": variant}
        )
    if sub == "transverse" and not cfg.transverse:
        raise ConfigError("transverse: at least one case is required")
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)


# --------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    """Shortest round-trip representation of a float."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def atomic_write(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def band_table_csv(table) -> str:
    header = ["theta"] + [f"mu_{j + 1}" for j in range(table.J)]
    return csv_text(header, [[t, *row] for t, row in table.rows()])


# --------------------------------------------------------------------------
# subcommands


def _validate_curve(cfg, out, jobs):
    prof = cfg.curvature()
    rep = check_assumptions(prof, cfg.a)
    atomic_write(out / "assumptions.json", json_text(rep.to_dict()))
    return EXIT_OK if rep.all_passed else EXIT_ASSUMPTION


def _bands(cfg, out, jobs):
    from .band_assembly import assemble_bands
    from .hill_floquet import band_table

    prof = cfg.curvature()
    table = band_table(prof, cfg.theta_count, cfg.J, cfg.n_modes, jobs)
    atomic_write(out / "bands.csv", band_table_csv(table))
    if cfg.beta is not None:
        try:
            res = assemble_bands(prof, cfg.beta, table=table)
        except AssumptionError as exc:
            atomic_write(out / "assumptions.json", json_text(exc.report.to_dict()))
            raise
        header = ["theta"] + [f"lambda_{j + 1}" for j in range(table.J)]
        atomic_write(out / "lambda.csv", csv_text(header, [[t, *row] for t, row in res.rows()]))
        atomic_write(out / "band_structure.json", json_text(res.to_dict()))
    return EXIT_OK


def _gaps(cfg, out, jobs):
    from .gap_analysis import curvature_criterion, gap_report
    from .hill_floquet import band_table

    prof = cfg.curvature()
    J = max(cfg.J, cfg.search_max + 1)
    table = band_table(prof, cfg.theta_count, J, cfg.n_modes, jobs)
    rep = gap_report(table, cfg.gap_tolerance, curvature_criterion(prof, cfg.search_max))
    atomic_write(out / "gaps.json", json_text(rep.to_dict()))
    return EXIT_OK


def _transverse(cfg, out, jobs):
    from .transverse_delta import TransverseSpec, Variant, solve_transverse

    rows = []
    for case in cfg.transverse:
        spec = TransverseSpec(case["a"], case["beta"], case["gamma_plus"], Variant(case["variant"]))
        m = solve_transverse(spec)
        rows.append([spec.a, spec.beta, spec.gamma_plus, spec.variant.value, m.zeta, m.bound_lo, m.bound_hi,
                     m.within_bounds])
    header = ["a", "beta", "gamma_plus", "variant", "zeta", "bound_lo", "bound_hi", "within_bounds"]
    atomic_write(out / "transverse.csv", csv_text(header, rows))
    return EXIT_OK


def _fiber2d(cfg, out, jobs):
    from .fiber2d import StripGrid, a_of_beta, bracketing_report

    prof = cfg.curvature()
    for beta in cfg.betas:
        rep = check_assumptions(prof, a_of_beta(beta))
        if not rep.all_passed:
            atomic_write(out / "assumptions.json", json_text({"beta": beta, **rep.to_dict()}))
            raise AssumptionError(f"assumptions {rep.failed()} fail at a(beta) for beta = {beta}", rep)
    grid = StripGrid(cfg.n_s, cfg.n_u)
    for i, beta in enumerate(cfg.betas):
        for k, theta in enumerate(cfg.thetas):
            spec = bracketing_report(prof, beta, theta, cfg.J, grid, cfg.n_modes)
            atomic_write(out / f"fiber2d_{i}_{k}.json", json_text(spec.to_dict()))
    return EXIT_OK


def _straight(cfg, out, jobs):
    from .straight_line import check_decay_assumptions, line_asymptotics, line_discrete_spectrum

    prof = cfg.curvature()
    rep = check_decay_assumptions(prof, cfg.R)
    atomic_write(out / "decay_assumptions.json", json_text(rep.to_dict()))
    if not rep.all_passed:
        return EXIT_ASSUMPTION
    spec = line_discrete_spectrum(prof, cfg.R, cfg.n_points)
    atomic_write(out / "line_spectrum.csv", csv_text(["j", "mu_j"], [[j + 1, m] for j, m in enumerate(spec.mu)]))
    if not spec.convergence_flag:
        raise ConvergenceError(f"line spectrum unstable under R doubling (change {spec.change_under_doubling:.2e})")
    asym = line_asymptotics(spec, cfg.betas)
    header = ["beta"] + [f"lambda_{j + 1}" for j in range(spec.n)]
    atomic_write(out / "line_asymptotics.csv", csv_text(header, [[b, *row] for b, row in zip(asym.betas, asym.lambdas)]))
    return EXIT_OK


_RUNNERS = {
    "validate-curve": _validate_curve,
    "bands": _bands,
    "gaps": _gaps,
    "transverse": _transverse,
    "fiber2d": _fiber2d,
    "straight": _straight,
}


def run(cfg: RunConfig, out=Path("out"), jobs: int = 1) -> int:
    out = Path(out)
    try:
        return _RUNNERS[cfg.subcommand](cfg, out, jobs)
    except (AssumptionError, PreconditionError) as exc:
        logger.error("%s", exc)
        return EXIT_ASSUMPTION
    except (ConvergenceError, QuadratureError) as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leaky-bands", description="Strong-coupling bands of a leaky periodic wire.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    ap.add_argument("--out", default=Path("out"), type=Path, help="output directory (default ./out)")
    ap.add_argument("--jobs", default=1, type=int, help="worker threads for theta sweeps")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        logger.error("--jobs must be >= 1")
        return EXIT_NUMERICAL
    try:
        doc = json.loads(args.config.read_text())
        if isinstance(doc, dict):
            doc.setdefault("subcommand", args.subcommand)
            if doc["subcommand"] != args.subcommand:
                raise ConfigError(f"subcommand: config says {doc['subcommand']!r}, command line says {args.subcommand!r}")
        cfg = parse_config(doc)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_NUMERICAL
    return run(cfg, args.out, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
