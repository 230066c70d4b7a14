"""Command-line entry point: ``tipinfo <subcommand> [flags]``.

Every subcommand writes its tables plus a ``manifest.json`` into the output
directory. Settings come from built-in defaults, then an optional JSON config
file (``--config``; a previous run's manifest also works), then explicit
flags, with later sources winning.

Exit status is 0 on success, 1 for invalid usage or configuration and 2 when
a computation fails; failures print a single JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
import warnings
from pathlib import Path

import numba
import numpy as np
import scipy

from . import __version__
from .calibration import CalibrationError, complexity_curve, match_noise
from .features import curve_features, role_scores
from .graph import EnsembleExhausted, Graph, erdos_renyi_ensemble, load_graph, named_graph
from .infoflow import DEFAULT_T_MAX, UndefinedPartitionError, info_curves
from .ising import ExactnessCapError, ModelParams
from .paths import enumerate_tipping_trajectories, flip_expectations, max_likelihood_trajectories
from .sim import DEFAULT_SEEDS, intervention_sweep
from .susceptibility import binary_entropy, susceptibility_curve

OUTPUT_ENV = "TIPINFO_OUTPUT_DIR"

DEFAULTS = {
    "graph": "kite",
    "beta": "auto",
    "J": 1.0,
    "t_max": DEFAULT_T_MAX,
    "steps": 1_000_000,
    "seeds": list(DEFAULT_SEEDS),
    "workers": None,
    "out": None,
    "format": "csv",
    "gamma": None,
    "node": None,
    "t_min": 0.1,
    "t_hi": 10.0,
    "k": list(range(1, 9)),
    "f": None,
    "weighting": "probability",
    "pinned_state": 0,
    "n": 10,
    "p": 0.2,
    "count": 100,
    "seed": 0,
}

UNITS = {
    "node": "index",
    "gamma": "fraction of nodes in state 1",
    "t": "update steps",
    "mi_bits": "bits",
    "mu": "bit-steps",
    "omega": "bits",
    "mu_star_max": "dimensionless",
    "omega_star_max": "dimensionless",
    "role": "dimensionless",
    "k": "neighbours",
    "f": "fraction of neighbours in state 0",
    "beta": "inverse temperature",
    "expectation": "probability",
    "neighborhood_entropy": "bits",
    "graph_id": "index",
    "pinned_node": "index",
    "seed": "integer",
    "eta_below_rel": "ratio to control",
    "eta_above_rel": "ratio to control",
    "frac_time_below_rel": "difference from control",
    "transitions": "count",
    "transitions_control": "count",
    "error": "text",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output helpers -----------------------------------------------------

def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


class Writer:
    def __init__(self, out: Path, fmt: str):
        self.out = out
        self.fmt = fmt
        self.files: dict[str, dict] = {}
        out.mkdir(parents=True, exist_ok=True)

    def table(self, stem: str, columns: list[str], rows) -> Path:
        units = {c: UNITS[c] for c in columns}
        if self.fmt == "json":
            path = self.out / f"{stem}.json"
            records = [dict(zip(columns, r)) for r in rows]
            path.write_text(json.dumps(_jsonable({"columns": units, "rows": records})) + "\n")
        else:
            path = self.out / f"{stem}.csv"
            with path.open("w", newline="") as fh:
                fh.write("# units: " + "; ".join(f"{c}={u}" for c, u in units.items()) + "\n")
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(columns)
                for r in rows:
                    w.writerow([_cell(x) for x in r])
        self.files[path.name] = {"columns": units}
        return path

    def document(self, name: str, payload: dict, description: str) -> Path:
        path = self.out / name
        path.write_text(json.dumps(_jsonable(payload), indent=1) + "\n")
        self.files[name] = {"description": description}
        return path


# -- config -------------------------------------------------------------

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    if "config" in data and "versions" in data:  # a manifest from an earlier run
        data = data["config"]
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["workers"] is None:
        cfg["workers"] = os.cpu_count() or 1
    if cfg["out"] is None:
        cfg["out"] = os.environ.get(OUTPUT_ENV, "tipinfo-out")
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    beta = cfg["beta"]
    if beta != "auto":
        try:
            beta = float(beta)
        except (TypeError, ValueError):
            raise UsageError(f"beta must be a number or 'auto', got {beta!r}") from None
        if not beta >= 0:
            raise UsageError("beta must be non-negative")
        cfg["beta"] = beta
    for key in ("t_max", "steps", "workers", "count", "n"):
        if int(cfg[key]) < 1:
            raise UsageError(f"{key} must be a positive integer")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if cfg["weighting"] not in ("probability", "uniform"):
        raise UsageError("weighting must be probability or uniform")
    if not 0.0 <= float(cfg["p"]) <= 1.0:
        raise UsageError("p must lie in [0, 1]")
    if cfg["pinned_state"] not in (0, 1):
        raise UsageError("pinned_state must be 0 or 1")
    if not isinstance(cfg["graph"], str) or not cfg["graph"]:
        raise UsageError("exactly one graph source is required")


def _graphs(source: str) -> list[Graph]:
    """A named generator, a graph file, inline JSON, or a directory of graph files."""
    try:
        path = Path(source)
        if not source.lstrip().startswith("{") and path.is_dir():
            files = sorted(p for p in path.iterdir() if p.suffix in (".edgelist", ".json"))
            if not files:
                raise UsageError(f"no graph files in {source}")
            return [load_graph(p) for p in files]
        if source.lstrip().startswith("{") or path.is_file():
            return [load_graph(source)]
        return [named_graph(source)]
    except UsageError:
        raise
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad graph source {source!r}: {exc}") from exc


def _graph(cfg: dict) -> Graph:
    gs = _graphs(cfg["graph"])
    if len(gs) != 1:
        raise UsageError("this subcommand takes a single graph")
    return gs[0]


def _beta(cfg: dict, g: Graph, ctx: dict) -> float:
    if cfg["beta"] == "auto":
        beta = match_noise(g, (cfg["t_min"], cfg["t_hi"]), J=cfg["J"])
        ctx.setdefault("calibrated_beta", []).append(beta)
        return beta
    return float(cfg["beta"])


# -- subcommands --------------------------------------------------------

def _calibrate(cfg, w, ctx):
    g = _graph(cfg)
    beta = match_noise(g, (cfg["t_min"], cfg["t_hi"]), J=cfg["J"])
    temps = np.linspace(cfg["t_min"], cfg["t_hi"], 200)
    curve = [[r.temperature, r.entropy_normalized, r.disequilibrium, r.complexity]
             for r in complexity_curve(g, temps, J=cfg["J"])]
    ctx["beta"] = beta
    ctx["calibrated_beta"] = beta
    w.document("calibrate.json", {
        "beta_star": beta,
        "temperature": 1.0 / beta,
        "complexity_curve": curve,
        "complexity_curve_columns": ["T", "entropy_normalized", "disequilibrium", "complexity"],
    }, "statistical complexity curve and its maximiser beta_star")
    return beta


def _curves(cfg, g, beta, gammas=None):
    return info_curves(g, ModelParams(beta, J=cfg["J"]), t_max=int(cfg["t_max"]),
                       gammas=gammas, nodes=cfg["node"], workers=int(cfg["workers"]))


def _infoflow(cfg, w, ctx):
    g = _graph(cfg)
    beta = ctx["beta"] if "beta" in ctx else _beta(cfg, g, ctx)
    ctx["beta"] = beta
    curves = _curves(cfg, g, beta, cfg["gamma"])
    rows = ((c.node, c.gamma, t, v) for c in curves for t, v in enumerate(c.values))
    w.table("infoflow", ["node", "gamma", "t", "mi_bits"], rows)
    return curves


def _roles(cfg, w, ctx, curves=None):
    g = _graph(cfg)
    beta = ctx["beta"] if "beta" in ctx else _beta(cfg, g, ctx)
    ctx["beta"] = beta
    if curves is None:
        curves = _curves(cfg, g, beta)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        feats = curve_features(curves, g.n)
    if caught:
        ctx.setdefault("warnings", []).extend(str(c.message) for c in caught)
    nodes = sorted({c.node for c in curves})
    ks = sorted({int(round(c.gamma * g.n)) for c in curves})
    table = role_scores(feats.mu[np.ix_(nodes, ks)], feats.omega[np.ix_(nodes, ks)])
    rows = []
    for a, v in enumerate(nodes):
        for b, k in enumerate(ks):
            rows.append((v, k / g.n, table.mu[a, b], table.omega[a, b],
                         table.mu_star[a], table.omega_star[a], table.role[a]))
    w.table("roles", ["node", "gamma", "mu", "omega", "mu_star_max", "omega_star_max", "role"],
            rows)
    return dict(zip(nodes, table.role))


def _paths(cfg, w, ctx):
    g = _graph(cfg)
    beta = _beta(cfg, g, ctx)
    ctx["beta"] = beta
    trajs = enumerate_tipping_trajectories(g, ModelParams(beta, J=cfg["J"]))
    best = max_likelihood_trajectories(trajs)
    w.document("paths.json", {
        "count": len(trajs),
        "max_log_prob": best[0].log_prob,
        "argmax_trajectories": [list(t.nodes) for t in best],
        "flip_expectations": flip_expectations(trajs, g.n, cfg["weighting"]),
        "weighting": cfg["weighting"],
    }, "tipping trajectories; flip_expectations[node][level] = P(node in state 1)")


def _susceptibility(cfg, w, ctx):
    beta = 0.5 if cfg["beta"] == "auto" else float(cfg["beta"])
    ctx["beta"] = beta
    f = None if cfg["f"] is None else np.asarray(cfg["f"], dtype=float)
    rows = []
    for k in cfg["k"]:
        c = susceptibility_curve(int(k), beta, f)
        rows.extend(zip([c.k] * c.f.size, c.f, [beta] * c.f.size, c.expectation,
                        binary_entropy(c.f)))
    w.table("susceptibility", ["k", "f", "beta", "expectation", "neighborhood_entropy"], rows)


def _intervene(cfg, w, ctx):
    gs = _graphs(cfg["graph"])
    betas = [_beta(cfg, g, ctx) for g in gs]
    ctx["betas"] = betas
    res = intervention_sweep(gs, betas, seeds=[int(s) for s in cfg["seeds"]],
                             steps=int(cfg["steps"]), nodes=cfg["node"],
                             workers=int(cfg["workers"]), J=cfg["J"],
                             pinned_state=int(cfg["pinned_state"]))
    cols = ["graph_id", "pinned_node", "seed", "eta_below_rel", "eta_above_rel",
            "frac_time_below_rel", "transitions", "transitions_control", "error"]
    rows = [(r.graph_id, r.pinned_node, r.seed, r.eta_below_rel, r.eta_above_rel,
             r.frac_time_below_rel, r.transitions, r.transitions_control, r.error)
            for r in res.records]
    w.table("intervention", cols, rows)
    failed = [r.error for r in res.records if r.error]
    if failed:
        raise RuntimeError(f"{len(failed)} intervention cells failed, first: {failed[0]}")
    return res


def _gen_graphs(cfg, w, ctx):
    gs = erdos_renyi_ensemble(int(cfg["n"]), float(cfg["p"]), int(cfg["count"]),
                              seed=int(cfg["seed"]))
    gdir = w.out / "graphs"
    gdir.mkdir(exist_ok=True)
    ext = "json" if cfg["format"] == "json" else "edgelist"
    for i, g in enumerate(gs):
        text = g.to_json() + "\n" if ext == "json" else g.to_edgelist()
        (gdir / f"graph_{i:03d}.{ext}").write_text(text)
    w.files["graphs/"] = {"description": f"{len(gs)} non-isomorphic connected graphs"}


def _pipeline(cfg, w, ctx):
    g = _graph(cfg)
    if cfg["beta"] == "auto":
        _calibrate(cfg, w, ctx)
    else:
        ctx["beta"] = float(cfg["beta"])
    curves = _infoflow(cfg, w, ctx)
    roles = _roles(cfg, w, ctx, curves)
    res = intervention_sweep([g], [ctx["beta"]], seeds=[int(s) for s in cfg["seeds"]],
                             steps=int(cfg["steps"]), nodes=cfg["node"],
                             workers=int(cfg["workers"]), J=cfg["J"],
                             pinned_state=int(cfg["pinned_state"]))
    cols = ["graph_id", "pinned_node", "seed", "eta_below_rel", "eta_above_rel",
            "frac_time_below_rel", "transitions", "transitions_control", "role", "error"]
    rows = [(r.graph_id, r.pinned_node, r.seed, r.eta_below_rel, r.eta_above_rel,
             r.frac_time_below_rel, r.transitions, r.transitions_control,
             roles.get(r.pinned_node), r.error) for r in res.records]
    w.table("intervention", cols, rows)


COMMANDS = {
    "calibrate": (_calibrate, "match the noise level to peak statistical complexity"),
    "infoflow": (_infoflow, "exact lagged mutual information curves"),
    "roles": (_roles, "integrated/asymptotic information and role scores"),
    "paths": (_paths, "enumerate trajectories to the tipping point"),
    "susceptibility": (_susceptibility, "flip susceptibility against degree"),
    "intervene": (_intervene, "Monte-Carlo pinning interventions"),
    "gen-graphs": (_gen_graphs, "non-isomorphic connected Erdos-Renyi ensemble"),
    "pipeline": (_pipeline, "calibrate, infoflow, roles and intervene in one run"),
}


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()]


def _float_list(s):
    return [float(x) for x in s.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tipinfo", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"tipinfo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file or earlier manifest; flags override it")
    common.add_argument("--graph", help="generator (kite, path:5, ...), graph file, inline "
                                        "JSON, or a directory of graph files (intervene)")
    common.add_argument("--beta", help="inverse temperature, or 'auto' to calibrate")
    common.add_argument("--J", type=float, help="coupling strength")
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./tipinfo-out)")
    common.add_argument("--format", choices=["csv", "json"], help="table format")
    common.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    common.add_argument("--t-max", dest="t_max", type=int, help="information-flow horizon")
    common.add_argument("--steps", type=int, help="Monte-Carlo steps per run")
    common.add_argument("--seeds", type=_int_list, help="comma-separated seeds")
    common.add_argument("--gamma", type=_float_list, help="comma-separated partitions k/n")
    common.add_argument("--node", type=_int_list, help="comma-separated nodes")
    common.add_argument("--t-min", dest="t_min", type=float, help="calibration bracket low T")
    common.add_argument("--t-hi", dest="t_hi", type=float, help="calibration bracket high T")
    common.add_argument("--k", type=_int_list, help="comma-separated degrees")
    common.add_argument("--f", type=_float_list, help="comma-separated neighbour fractions")
    common.add_argument("--weighting", choices=["probability", "uniform"])
    common.add_argument("--pinned-state", dest="pinned_state", type=int, choices=[0, 1])
    common.add_argument("--n", type=int, help="ensemble node count")
    common.add_argument("--p", type=float, help="ensemble edge probability")
    common.add_argument("--count", type=int, help="ensemble size")
    common.add_argument("--seed", type=int, help="ensemble seed")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return p


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": " ".join(str(message).split())}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        cfg = _resolve(args)
    except UsageError as exc:
        return _fail(1, "usage", exc)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    writer = Writer(Path(cfg["out"]), cfg["format"])
    ctx: dict = {}
    status, error = 0, None
    try:
        COMMANDS[args.command][0](cfg, writer, ctx)
    except UsageError as exc:
        return _fail(1, "usage", exc)
    except (ExactnessCapError, UndefinedPartitionError, EnsembleExhausted,
            CalibrationError, ValueError, RuntimeError) as exc:
        status, error = 2, {"error": type(exc).__name__, "message": str(exc)}

    manifest = {
        "command": args.command,
        "config": cfg,
        "seeds": cfg["seeds"],
        "beta_used": ctx.get("beta", ctx.get("betas")),
        "calibrated_beta": ctx.get("calibrated_beta"),
        "versions": {
            "tipinfo": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
        "wall_time_s": time.perf_counter() - start,
        "outputs": writer.files,
        "warnings": ctx.get("warnings", []),
        "error": error,
    }
    (writer.out / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=1) + "\n")
    if error:
        return _fail(status, error["error"], error["message"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
