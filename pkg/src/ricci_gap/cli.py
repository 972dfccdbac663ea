"""Command-line entry point: ``ricci-gap <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 capability guard, 4 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .curvature import as_fraction, curvature_profile
from .errors import InputError, RicciGapError
from .generators import FAMILIES, SHIPPED_FAMILIES, FamilySpec, generate
from .graph_core import Graph, load_graph
from .local_profile import ball_census, profile_distance
from .report import COLUMNS, report_rows
from .spectral import count_above, eigen_basis, local_spectral_measure
from .trichotomy import evaluate, sweep
from .walks import (
    coupled_meeting_experiment,
    entropy_series,
    regular_tree_chain,
    spectral_radius_estimate,
)

THREADS_ENV = "RICCI_GAP_THREADS"


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


class _Run:
    """Collects manifest data while a subcommand runs."""

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.inputs: dict[str, str] = {}
        self.mode = "rational"
        self.seed = getattr(args, "seed", None)
        self.start = time.perf_counter()

    def graph(self, path: str) -> Graph:
        data = Path(path).read_bytes()
        self.inputs[path] = hashlib.sha256(data).hexdigest()
        return load_graph(path)

    def manifest(self) -> dict:
        return {
            "command_line": self.argv,
            "input_sha256": self.inputs,
            "seed": self.seed,
            "tool_version": __version__,
            "arithmetic_mode": self.mode,
            "wall_time_s": round(time.perf_counter() - self.start, 6),
        }


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be an integer") from None
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise InputError("--threads must be >= 1")
    return n


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_params(text: str | None) -> dict:
    if not text:
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--params must be JSON: {exc}") from None


# -- subcommands -----------------------------------------------------------


def cmd_generate(args, run: _Run) -> str:
    params = _parse_params(args.params)
    for name in ("n", "m", "d", "depth"):
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    if args.orders:
        params["orders"] = [int(x) for x in args.orders.split(",")]
    if args.generators:
        params["generators"] = [[int(c) for c in g.split(",")] for g in args.generators.split(";")]
    spec = FamilySpec(args.family, params, args.seed)
    return generate(spec).to_json() + "\n"


def cmd_curvature(args, run: _Run) -> tuple[str, dict]:
    g = run.graph(args.input)
    eps_list = [as_fraction(e) for e in args.eps.split(",")] if args.eps else []
    prof = curvature_profile(g, eps_list, workers=_threads(args))
    rows = [(e.edge[0], e.edge[1], e.kappa.numerator, e.kappa.denominator) for e in prof.per_edge]
    summary = {
        "min": _frac(prof.min_kappa),
        "histogram": {_frac(k): c for k, c in prof.histogram().items()},
        "negative_fraction": {_frac(e): _frac(f) for e, f in prof.negative_fraction_at.items()},
    }
    return _csv(rows, ("u", "v", "kappa_num", "kappa_den")), summary


def cmd_spectrum(args, run: _Run) -> str:
    run.mode = "float"
    g = run.graph(args.input)
    basis = eigen_basis(g)
    if args.count_above is not None:
        return f"{count_above(g, args.count_above, strict=not args.at_least_rho, basis=basis)}\n"
    if args.local_measure is not None:
        mu = local_spectral_measure(g, args.local_measure, basis)
        return _csv([(f"{lam:.15g}", f"{w:.15g}") for lam, w in mu.atoms], ("lambda", "weight"))
    return _csv([(f"{lam:.15g}",) for lam in basis.eigenvalues], ("lambda",))


def cmd_walk(args, run: _Run) -> str:
    if args.tree:
        d, depth = (int(x) for x in args.tree.split(","))
        g = regular_tree_chain(d, depth)
        root = 0
    elif args.input:
        g = run.graph(args.input)
        root = args.root
    else:
        raise InputError("walk needs --in or --tree")
    if args.meet:
        if args.seed is None:
            raise InputError("--meet requires --seed")
        if not isinstance(g, Graph):
            raise InputError("--meet needs an explicit graph (--in)")
        run.mode = "float"
        x, y = args.meet
        exp = coupled_meeting_experiment(g, x, y, args.horizon, args.trials, args.seed, _threads(args))
        return _csv([(t, f"{p:.12g}") for t, p in exp.tail], ("t", "p_tau_gt_t"))
    if args.entropy is not None:
        series = entropy_series(g, root, args.entropy, args.mode)
        run.mode = "rational" if series.mode == "exact" else "float"
        rows = [(t, f"{h:.15g}", f"{h / t:.15g}" if t else "") for t, h in series.values]
        return _csv(rows, ("t", "entropy", "rate"))
    if args.radius is not None:
        run.mode = "float"
        rs = spectral_radius_estimate(g, root, args.radius)
        return _csv([(t, f"{r:.15g}") for t, r in rs.values], ("t", "radius_estimate"))
    raise InputError("walk needs one of --entropy, --radius, --meet")


def cmd_profile(args, run: _Run) -> str:
    g = run.graph(args.input)
    if args.compare:
        h = run.graph(args.compare)
        pd = profile_distance(g, h, args.depth)
        rows = [(t, _frac(tv), f"{float(tv):.12g}") for t, tv in pd.per_depth_tv]
        rows.append(("aggregate", _frac(pd.aggregate), f"{float(pd.aggregate):.12g}"))
        return _csv(rows, ("depth", "tv", "tv_float"))
    census = ball_census(g, args.depth)
    return json.dumps(census.to_json_dict(), indent=1) + "\n"


def cmd_trichotomy(args, run: _Run) -> str:
    run.mode = "mixed"
    g = run.graph(args.input)
    rep = evaluate(g, args.delta, args.rho, args.eps, args.at_least_rho, workers=_threads(args))
    return json.dumps(rep.to_dict(), indent=1, sort_keys=True) + "\n"


def _load_specs(path: str | None, run: _Run) -> list[FamilySpec]:
    if path is None:
        return list(SHIPPED_FAMILIES)
    data = Path(path).read_bytes()
    run.inputs[path] = hashlib.sha256(data).hexdigest()
    try:
        items = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(items, dict):
        items = items.get("specs", [])
    return [FamilySpec.from_dict(x) for x in items]


def cmd_sweep(args, run: _Run) -> str:
    run.mode = "mixed"
    specs = _load_specs(args.manifest, run)
    grid = args.eps_grid.split(",")
    rows = sweep(specs, args.delta, args.rho, grid, args.at_least_rho, workers=_threads(args))
    out = [(r.family, r.label, r.n_vertices, str(r.eps), r.fired_clause) for r in rows]
    return _csv(out, ("family", "param", "n", "eps", "fired_clause"))


def cmd_report(args, run: _Run) -> str:
    run.mode = "mixed"
    specs = _load_specs(args.manifest, run)
    rows = report_rows(specs, args.delta, args.rho, args.eps, workers=_threads(args))
    return _csv([[r[c] for c in COLUMNS] for r in rows], COLUMNS)


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ricci-gap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, graph_in=True):
        if graph_in:
            sp.add_argument("--in", dest="input", help="Graph JSON or edge-list file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--manifest-out", help="run manifest path (default: <out>.manifest.json)")
        sp.add_argument("--threads", type=int, help=f"worker count (fallback: ${THREADS_ENV})")
        sp.add_argument("--seed", type=int)

    g = sub.add_parser("generate", help="emit a family member as Graph JSON")
    common(g, graph_in=False)
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--orders", help="cyclic orders, e.g. 5,5")
    g.add_argument("--generators", help="generators, e.g. '1,0;-1,0;0,1;0,-1'")
    g.add_argument("--params", help="extra parameters as JSON")

    c = sub.add_parser("curvature", help="per-edge curvature CSV + JSON summary")
    common(c)
    c.add_argument("--eps", help="comma-separated eps values for negative fractions")
    c.add_argument("--summary", help="summary JSON path (default: <out>.summary.json, or stderr)")

    s = sub.add_parser("spectrum", help="lazy-walk eigenvalues")
    common(s)
    s.add_argument("--local-measure", type=int, metavar="O")
    s.add_argument("--count-above", type=float, metavar="RHO")
    s.add_argument("--at-least-rho", action="store_true")

    w = sub.add_parser("walk", help="entropy / radius series or coupled meeting times")
    common(w)
    w.add_argument("--tree", metavar="D,DEPTH", help="use the lumped d-regular tree truncation instead of --in")
    w.add_argument("--root", type=int, default=0)
    w.add_argument("--entropy", type=int, metavar="T_MAX")
    w.add_argument("--radius", type=int, metavar="T_MAX")
    w.add_argument("--meet", type=int, nargs=2, metavar=("X", "Y"))
    w.add_argument("--trials", type=int, default=1000)
    w.add_argument("--horizon", type=int, default=1000)
    w.add_argument("--mode", default="auto", choices=("auto", "exact", "float"))

    pr = sub.add_parser("profile", help="ball census JSON or per-depth TV table")
    common(pr)
    pr.add_argument("--depth", type=int, default=2)
    pr.add_argument("--compare", metavar="OTHER")

    for name, helptext in (("trichotomy", "evaluate the three clauses on one graph"),):
        t = sub.add_parser(name, help=helptext)
        common(t)
        t.add_argument("--delta", type=int, required=True)
        t.add_argument("--rho", type=float, required=True)
        t.add_argument("--eps", type=str, required=True)
        t.add_argument("--at-least-rho", action="store_true")

    sw = sub.add_parser("sweep", help="clause table over family specs and an eps grid")
    common(sw, graph_in=False)
    sw.add_argument("--manifest", help="JSON list of family specs (default: shipped families)")
    sw.add_argument("--delta", type=int, required=True)
    sw.add_argument("--rho", type=float, required=True)
    sw.add_argument("--eps-grid", required=True)
    sw.add_argument("--at-least-rho", action="store_true")

    r = sub.add_parser("report", help="acceptance-style table over family specs")
    common(r, graph_in=False)
    r.add_argument("--manifest", help="JSON list of family specs (default: shipped families)")
    r.add_argument("--delta", type=int, default=4)
    r.add_argument("--rho", type=float, default=0.9)
    r.add_argument("--eps", default="0.001")
    return p


_COMMANDS = {
    "generate": cmd_generate,
    "curvature": cmd_curvature,
    "spectrum": cmd_spectrum,
    "walk": cmd_walk,
    "profile": cmd_profile,
    "trichotomy": cmd_trichotomy,
    "sweep": cmd_sweep,
    "report": cmd_report,
}

_NEEDS_INPUT = {"curvature", "spectrum", "profile", "trichotomy"}


def _write(path: str | None, text: str, stream) -> None:
    if path:
        Path(path).write_text(text)
    else:
        stream.write(text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    run = _Run(argv, args)
    try:
        if args.command in _NEEDS_INPUT and not args.input:
            raise InputError(f"{args.command} requires --in")
        result = _COMMANDS[args.command](args, run)
        summary = None
        if isinstance(result, tuple):
            result, summary = result
        _write(args.out, result, sys.stdout)
        if summary is not None:
            text = json.dumps(summary, indent=1, sort_keys=True) + "\n"
            target = args.summary or (f"{args.out}.summary.json" if args.out else None)
            _write(target, text, sys.stderr)
        manifest_path = args.manifest_out or (f"{args.out}.manifest.json" if args.out else None)
        if manifest_path:
            Path(manifest_path).write_text(json.dumps(run.manifest(), indent=1, sort_keys=True) + "\n")
    except RicciGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
