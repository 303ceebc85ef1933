"""Command line front end: ``nonthin <command> --config cfg.json --out dir``.

Exit status: 0 success, 1 verification failure (or a nondeterministic rerun
under ``--seedless``), 2 invalid input.  Nothing is written unless the
configuration validates and the computation finishes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance, asymptotics, extremal, genus0, plotting, regions

CSV_VERSION = "v1"
COMMANDS = ("green", "profile", "robin", "slope", "genus0", "verify", "plot")

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("nonthin").joinpath("schemas", f"{name}.schema.json").read_text())


def _validate(obj, name):
    try:
        jsonschema.validate(obj, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{name} invalid at {where}: {exc.message}") from None


# ------------------------------------------------------------------ helpers

def csv_text(command: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# nonthin-csv {CSV_VERSION}; command={command}; all logarithms are natural (suffix _natlog)\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real!r}{v.imag:+}j"
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _point_label(p) -> str:
    return " ".join(f"{complex(c).real:g}{complex(c).imag:+g}j" for c in np.atleast_1d(p))


def _region(cfg):
    if "region" not in cfg:
        raise ConfigError("this command needs a 'region'")
    _validate(cfg["region"], "region")
    return regions.from_json(cfg["region"])


def _family(cfg):
    if "family" not in cfg:
        raise ConfigError("this command needs a 'family'")
    _validate(cfg["family"], "family")
    return genus0.from_json(cfg["family"])


def _point(value, dim):
    p = np.asarray(regions.parse_vector(value), dtype=complex)
    if p.size != dim:
        raise ConfigError(f"point {value!r} has {p.size} coordinates, expected {dim}")
    return p


def _density(cfg):
    d = cfg.get("density")
    return regions.Density(**d) if d else None


def _truncation(cfg, spec):
    if "R" in cfg:
        return float(cfg["R"])
    if spec.bounded and math.isfinite(spec.circumradius()):
        return spec.circumradius() * (1 + 1e-9)
    raise ConfigError("unbounded region: give a truncation radius 'R'")


def _schedule(cfg, minimum=3):
    if "schedule" not in cfg:
        raise ConfigError("this command needs a 'schedule' of truncation radii")
    try:
        sched = regions.TruncationSchedule(tuple(cfg["schedule"]))
    except regions.RegionError as exc:
        raise ConfigError(str(exc)) from None
    if len(sched) < minimum:
        raise ConfigError(f"schedule needs at least {minimum} radii")
    return sched


# ----------------------------------------------------------------- commands

def cmd_green(cfg, threads):
    spec = _region(cfg)
    pts = [_point(p, spec.dim) for p in cfg.get("points", [])]
    if not pts:
        raise ConfigError("green needs 'points'")
    n = cfg.get("degree", 8)
    K = cfg.get("phases", extremal.DEFAULT_PHASES)
    cloud = regions.sample(spec, _truncation(cfg, spec), _density(cfg))
    rows = []
    ests = extremal.green_grid(cloud, np.array(pts), n, K, threads)
    degrees = cfg.get("degrees")
    for p, e in zip(pts, ests):
        row = {"z": _point_label(p), "degree": n, "phases": K, "value_natlog": e.value,
               "raw_natlog": e.raw_value, "slack_natlog": e.slack, "iterations": e.iterations, "status": e.status}
        if degrees:
            row["extrapolated_natlog"] = extremal.degree_trend(cloud, p, tuple(degrees), K).extrapolated
        rows.append(row)
    cols = ["z", "degree", "phases", "value_natlog", "raw_natlog", "slack_natlog", "iterations", "status"]
    if degrees:
        cols.append("extrapolated_natlog")
    ok = all(e.converged for e in ests)
    return {"green.csv": csv_text("green", cols, rows)}, {"converged": ok, "points": len(rows)}


def _profile(cfg, threads):
    spec = _region(cfg)
    if "z" not in cfg:
        raise ConfigError("profile needs an evaluation point 'z'")
    return asymptotics.thinness_profile(spec, _point(cfg["z"], spec.dim), _schedule(cfg), cfg.get("degree", 8),
                                        cfg.get("phases", extremal.DEFAULT_PHASES), _density(cfg), threads)


def _profile_outputs(prof):
    rows = [{"R": r["R"], "v_natlog": r["v"], "v_raw_natlog": r["v_raw"], "slack_natlog": r["slack"],
             "degree": r["degree"]} for r in prof.rows()]
    text = csv_text("profile", ["R", "v_natlog", "v_raw_natlog", "slack_natlog", "degree"], rows)
    summary = {"verdict": prof.verdict, "extrapolated_natlog": prof.extrapolated, "converged": prof.converged}
    return text, summary


def cmd_profile(cfg, threads):
    text, summary = _profile_outputs(_profile(cfg, threads))
    return {"profile.csv": text}, summary


def cmd_robin(cfg, threads):
    spec = _region(cfg)
    try:
        est = asymptotics.robin_constant(spec, cfg.get("degree", 8), cfg.get("radii"), cfg.get("directions", 8),
                                         cfg.get("phases", extremal.DEFAULT_PHASES), _density(cfg), threads)
    except asymptotics.AsymptoticsError as exc:
        raise ConfigError(str(exc)) from None
    rows = [{"radius": R, "direction_index": j, "excess_natlog": est.excess[i, j]}
            for i, R in enumerate(est.radii) for j in range(est.excess.shape[1])]
    summary = {"gamma_natlog": est.gamma, "capacity": est.capacity, "converged": est.converged}
    return {"robin.csv": csv_text("robin", ["radius", "direction_index", "excess_natlog"], rows)}, summary


def _slope(cfg, threads):
    spec = _region(cfg)
    if "C_m" not in cfg:
        raise ConfigError("slope needs 'C_m'; there is deliberately no default")
    return asymptotics.capacity_slope(spec, _schedule(cfg), cfg["C_m"], cfg.get("degree", 8),
                                      cfg.get("phases", extremal.DEFAULT_PHASES), cfg.get("directions", 8),
                                      _density(cfg), threads)


def _slope_outputs(sl):
    rows = [{"R": r["R"], "gamma_natlog": r["gamma"], "capacity": r["capacity"]} for r in sl.rows()]
    summary = {"slope": sl.slope, "threshold": sl.threshold, "C_m": sl.C_m, "verdict": sl.verdict,
               "conditional_on_C_m": True}
    return csv_text("slope", ["R", "gamma_natlog", "capacity"], rows), summary


def cmd_slope(cfg, threads):
    text, summary = _slope_outputs(_slope(cfg, threads))
    return {"slope.csv": text}, summary


def _n_range(g):
    spec = g.get("n_range", {"start": 10, "stop": 100, "step": 10})
    if isinstance(spec, dict):
        return tuple(range(spec["start"], spec["stop"] + 1, spec.get("step", 1)))
    return tuple(int(n) for n in spec)


def _lambdas(g, fam):
    spec = g.get("lambdas")
    if spec is None:
        if fam.dim == 1:
            return np.ones((1, 1), dtype=complex)
        spec = {"grid": 16}
    if isinstance(spec, dict):
        return genus0.DirectionGrid.for_dim(fam.dim, spec["grid"]).directions
    lams = np.array([_point(v, fam.dim) for v in spec])
    norms = np.linalg.norm(lams, axis=1)
    if np.any(norms == 0):
        raise ConfigError("directions must be nonzero")
    return lams / norms[:, None]


def _r_rule(g):
    rule = g.get("R_rule", "sqrt")
    if rule == "sqrt":
        return genus0.sqrt_rule
    p = float(rule["power"])
    return lambda n: float(n) ** p


def cmd_genus0(cfg, threads):
    fam = _family(cfg)
    g = cfg.get("genus0", {})
    n_range = _n_range(g)
    lams = _lambdas(g, fam)
    files, summary = {}, {}
    try:
        rep = genus0.condition_checks(fam, lams, n_range, _r_rule(g), tuple(g.get("radii", (2.0, 4.0, 8.0, 16.0))))
    except genus0.GenusZeroError as exc:
        raise ConfigError(str(exc)) from None
    files["conditions.csv"] = csv_text("genus0", ["condition", "n", "lambda_index", "param", "value"], rep.rows())
    summary.update({"kappa": rep.kappa, "unit_count_proxy_max": float(rep.unit_count_proxy.max()),
                    "tail_proxy_at_largest_R": float(rep.tail_proxy[:, -1].max()),
                    "n_range": [n_range[0], n_range[-1]], "warnings": rep.warnings})
    if "t" in g:
        grid = genus0.DirectionGrid.for_dim(fam.dim)
        rows = [{"n": n, "t": g["t"], "eta": genus0.counting_integrated(fam, n, g["t"], grid)} for n in n_range]
        files["counting.csv"] = csv_text("genus0", ["n", "t", "eta"], rows)
    exit_code = EXIT_OK
    if "growth" in g:
        gr = g["growth"]
        if "region" in gr:
            _validate(gr["region"], "region")
            spec = regions.from_json(gr["region"])
            E = regions.sample(spec, float(gr.get("R", 4.0)))
        elif "E" in gr:
            E = np.array([_point(p, fam.dim) for p in gr["E"]])
        else:
            raise ConfigError("growth needs 'E' points or a 'region'")
        grid = np.array([_point(p, fam.dim) for p in gr["grid"]])
        rep_g = genus0.growth_verify(fam, E, grid, n_range, gr.get("tolerance", 0.05))
        files["growth.csv"] = csv_text("genus0", ["quantity", "value"], rep_g.rows())
        summary["growth_verified"] = rep_g.verified
    if "theorem5" in g:
        t5 = g["theorem5"]
        w = np.array([genus0._complex(v) for v in t5["w_grid"]])
        try:
            rep5 = genus0.theorem5_check(fam, lams, w, n_range, t5["tau"], t5["beta"], t5["C_m"],
                                         quadrature=t5.get("quadrature", genus0.DEFAULT_QUADRATURE),
                                         tolerance=t5.get("tolerance", 0.05))
        except genus0.GenusZeroError as exc:
            raise ConfigError(str(exc)) from None
        files["theorem5.csv"] = csv_text("genus0", ["lambda_index", "C_lambda", "ratio"], rep5.rows())
        summary.update({"theorem5_exponent": rep5.exponent, "theorem5_ratio": rep5.ratio,
                        "theorem5_passed": rep5.passed, "quadrature_flagged": rep5.flagged})
    return files, summary, exit_code


def cmd_verify(cfg, threads, echo=None):
    results = acceptance.run(set(cfg["only"]) if cfg.get("only") else None, echo=echo)
    rows = [{"criterion": r.number, "name": r.name, "passed": int(r.passed), "detail": r.detail} for r in results]
    text = csv_text("verify", ["criterion", "name", "passed", "detail"], rows)
    passed = all(r.passed for r in results)
    summary = {"passed": passed, "failed": [r.number for r in results if not r.passed]}
    return {"verify.csv": text}, summary, EXIT_OK if passed else EXIT_FAILED


def _svg(draw, *args) -> bytes:
    buf = io.BytesIO()
    draw(*args, buf)
    return buf.getvalue()


def cmd_plot(cfg, threads):
    kind = cfg.get("plot", "profile")
    if kind == "profile":
        prof = _profile(cfg, threads)
        text, summary = _profile_outputs(prof)
        svg = _svg(lambda path: plotting.profile_figure(prof, path))
        return {"profile.csv": text, "profile.svg": svg}, summary
    if kind == "slope":
        sl = _slope(cfg, threads)
        text, summary = _slope_outputs(sl)
        return {"slope.csv": text, "slope.svg": _svg(lambda path: plotting.slope_figure(sl, path))}, summary
    fam = _family(cfg)
    g = cfg.get("genus0", {})
    n_range = _n_range(g)
    lams = _lambdas(g, fam)
    series = {f"lambda {i}": [genus0.circle_average(fam, n, lam) for n in n_range] for i, lam in enumerate(lams)}
    rows = [{"n": n, "lambda_index": i, "average_natlog": v}
            for i, vals in enumerate(series.values()) for n, v in zip(n_range, vals)]
    svg = _svg(lambda path: plotting.series_figure(n_range, series, path, ylabel="circle average / k_n"))
    return ({"circle.csv": csv_text("plot", ["n", "lambda_index", "average_natlog"], rows), "circle.svg": svg},
            {"lambdas": len(lams)})


DISPATCH = {"green": cmd_green, "profile": cmd_profile, "robin": cmd_robin, "slope": cmd_slope,
            "genus0": cmd_genus0, "verify": cmd_verify, "plot": cmd_plot}


def compute(command: str, cfg: dict, threads: int = 1, echo=None):
    """Validate and run; returns ``(files, summary, exit_code)`` without touching disk."""
    _validate(cfg, "config")
    if cfg.get("command", command) != command:
        raise ConfigError(f"config is for '{cfg['command']}', not '{command}'")
    try:
        if command == "verify":
            return cmd_verify(cfg, threads, echo)
        out = DISPATCH[command](cfg, threads)
    except (regions.RegionError, genus0.GenusZeroError, asymptotics.AsymptoticsError,
            extremal.InsufficientSamplesError) as exc:
        raise ConfigError(str(exc)) from None
    if len(out) == 2:
        return out[0], out[1], EXIT_OK
    return out


def write_atomic(out_dir: Path, files: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        data = content.encode() if isinstance(content, str) else content
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, out_dir / name)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonthin", description="Siciak extremal values, thinness at infinity, "
                                "capacities and genus-zero growth checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent LPs")
    p.add_argument("--seedless", action="store_true",
                   help="run twice and fail unless both runs produce identical artifacts")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr
    if args.threads < 1:
        print("error: --threads must be >= 1", file=err)
        return EXIT_INVALID
    if args.config is None:
        if args.command != "verify":
            print("error: --config is required", file=err)
            return EXIT_INVALID
        cfg = {}
    else:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=err)
            return EXIT_INVALID
    echo = (lambda line: print(line, flush=True)) if args.command == "verify" else None
    try:
        files, summary, code = compute(args.command, cfg, args.threads, echo)
        if args.seedless:
            again, _, _ = compute(args.command, cfg, args.threads)
            if again != files:
                print("error: rerun produced different artifacts", file=err)
                return EXIT_FAILED
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    write_atomic(args.out, files)
    summary["files"] = sorted(files)
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n")
    print(json.dumps(summary, sort_keys=True, default=float))
    return code


if __name__ == "__main__":
    sys.exit(main())
