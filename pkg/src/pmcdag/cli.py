"""Command-line front end.

    pmcdag --model dice.pmc --prop reach --target six \\
           --grid "x=0.002:0.002:0.998" --arith interval --out six.dat

Loads and trims the model, builds the result circuit by state elimination,
optionally merges equal sub-circuits by random evaluation (``--simplify sz``),
evaluates it at every grid point and writes a ``.dat`` table.  A one-line
``key=value`` run report goes to standard error.

Conventions: accumulated rewards (``--prop acc``) do not collect the reward
of the target state itself.  Grid points must keep every transition
expression inside (0, 1]; this is checked at the first grid point.  Local
rewrite rules are always applied while building circuits, so
``--simplify none`` and ``--simplify local`` behave the same.
"""
import argparse
import itertools
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import corpus
from .acir import (Interval, eval_exact, eval_float_batch, eval_interval_batch,
                   interval_columns, write_acir)
from .acir.evaluate import eval_exact_many
from .acir.sz import DEFAULT_POINTS, apply_substitution, sz_canonicalize
from .elim import NAMES, Heuristic, accumulated_reward, lra, reach_probability
from .errors import (GraphNotPreserved, MalformedGrid, PmcError,
                     UnknownParameter)
from .modelio import format_dat, load_model, write_dat

CHUNK = 4096


@dataclass
class GridSpec:
    """One inclusive arithmetic progression of exact rationals per parameter."""
    axes: dict

    def values(self, name):
        return self.axes[name]

    def points(self, parameters):
        """Cartesian product in declaration order; the first parameter is outermost."""
        missing = [p for p in parameters if p not in self.axes]
        if missing:
            raise MalformedGrid(f"grid gives no values for parameter {missing[0]!r}")
        extra = [p for p in self.axes if p not in parameters]
        if extra:
            raise UnknownParameter(extra[0], "grid")
        return list(itertools.product(*(self.axes[p] for p in parameters)))

    def centroid(self, parameters):
        return {p: (self.axes[p][0] + self.axes[p][-1]) / 2 for p in parameters}


def _rational(text, what):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedGrid(f"bad {what} {text.strip()!r}") from None


def parse_grid(text, parameters=None):
    """Parse ``"x=0.002:0.002:0.998,y=0.5"`` into a GridSpec.

    ``start:step:end`` includes ``end`` when a step lands on it exactly; a
    single number is a one-point axis.
    """
    axes = {}
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        name, sep, spec = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise MalformedGrid(f"expected name=start:step:end, got {part!r}")
        if parameters is not None and name not in parameters:
            raise UnknownParameter(name, "grid")
        if name in axes:
            raise MalformedGrid(f"parameter {name!r} appears twice")
        fields = spec.split(":")
        if len(fields) == 1:
            axes[name] = [_rational(fields[0], "value")]
            continue
        if len(fields) != 3:
            raise MalformedGrid(f"expected start:step:end for {name!r}")
        start, step, end = (_rational(f, "bound") for f in fields)
        if step <= 0:
            raise MalformedGrid(f"step for {name!r} must be positive")
        if start > end:
            raise MalformedGrid(f"start exceeds end for {name!r}")
        count = (end - start) // step + 1
        axes[name] = [start + i * step for i in range(int(count))]
    return GridSpec(axes)


def parse_valuation(text, parameters):
    grid = parse_grid(text, parameters)
    for name, values in grid.axes.items():
        if len(values) != 1:
            raise MalformedGrid(f"witness needs a single value for {name!r}")
    return {name: values[0] for name, values in grid.axes.items()}


@dataclass
class RunReport:
    elim_ms: float = 0.0
    simplify_ms: float = 0.0
    eval_ms: float = 0.0
    nodes_before: int = 0
    nodes_after: int = 0
    points: int = 0
    max_diameter: float = None

    def line(self):
        fields = [f"elim_ms={self.elim_ms:.3f}", f"simplify_ms={self.simplify_ms:.3f}",
                  f"eval_ms={self.eval_ms:.3f}", f"nodes_before={self.nodes_before}",
                  f"nodes_after={self.nodes_after}", f"points={self.points}"]
        if self.max_diameter is not None:
            fields.append(f"max_diameter={self.max_diameter!r}")
        return " ".join(fields)


def _ms(start):
    return (time.perf_counter() - start) * 1000.0


def _show(valuation):
    return ", ".join(f"{k}={v}" for k, v in valuation.items())


def check_graph_preserved(pmc, valuation):
    """Every transition expression must lie in (0, 1] at ``valuation``."""
    nodes = sorted({node for _, _, node in pmc.transition_nodes()})
    values = eval_exact_many(pmc.store, nodes, valuation)
    for s, t, node in pmc.transition_nodes():
        if not 0 < values[node] <= 1:
            raise GraphNotPreserved(
                f"transition {s} -> {t} evaluates to {values[node]} at "
                f"{_show(valuation)}; grid valuations must keep it in (0, 1]")


def _chunks(n, size=CHUNK):
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def evaluate_grid(store, root, points, arith, jobs=1):
    """Values at each point: Fractions, floats or Intervals, in point order."""
    n = len(points)
    nparams = len(store.parameters)
    if arith == "exact":
        return [eval_exact(store, root, list(p)) for p in points]
    if arith == "float":
        cols = [np.array([float(p[i]) for p in points]) for i in range(nparams)]

        def work(span):
            a, b = span
            if not cols:
                return np.full(b - a, eval_float_batch(store, root, [])[0])
            return eval_float_batch(store, root, [c[a:b] for c in cols])
    elif arith == "interval":
        bounds = [interval_columns([p[i] for p in points]) for i in range(nparams)]

        def work(span):
            a, b = span
            lo, hi = eval_interval_batch(store, root, [lo[a:b] for lo, _ in bounds],
                                         [hi[a:b] for _, hi in bounds])
            return np.broadcast_to(lo, (b - a,)), np.broadcast_to(hi, (b - a,))
    else:
        raise ValueError(f"unknown arithmetic {arith!r}")
    spans = _chunks(n)
    if jobs > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, spans))
    else:
        parts = [work(span) for span in spans]
    if arith == "float":
        return [float(v) for part in parts for v in part]
    return [Interval(float(lo), float(hi))
            for los, his in parts for lo, hi in zip(los, his)]


def load(model):
    if model.startswith("bundled:"):
        return corpus.bundled(model.split(":", 1)[1])
    if model.startswith("brp:"):
        args = [int(x) for x in model.split(":")[1:]]
        return corpus.brp(*args)
    return load_model(model)


def solve(pmc, prop, heuristic, target=None, reward=None, reward_up=None,
          reward_low=None, witness=None):
    if prop == "reach":
        return reach_probability(pmc, pmc.label(target), heuristic)
    if prop == "acc":
        return accumulated_reward(pmc, pmc.reward(reward), pmc.label(target),
                                  heuristic, witness)
    if prop == "lra":
        return lra(pmc, pmc.reward(reward_up), pmc.reward(reward_low),
                   heuristic, witness)
    raise ValueError(f"unknown property {prop!r}")


def run(model, prop, grid="", target=None, reward=None, reward_up=None,
        reward_low=None, heuristic="target-bfs", seed=0, arith="exact",
        simplify="local", sz_points=DEFAULT_POINTS, witness=None,
        emit_dag=None, out=None, jobs=1):
    """Execute one analysis; returns ``(report, rows, root)``.

    ``model`` is a path, ``bundled:NAME``, ``brp:CHUNKS:MAX`` or an already
    parsed Pmc.  ``rows`` are ``(point, value)`` pairs as written to ``out``.
    """
    pmc = load(model) if isinstance(model, str) else model
    params = pmc.store.parameters
    gridspec = parse_grid(grid, params)
    points = gridspec.points(params)
    if witness is None:
        witness_val = gridspec.centroid(params)
    elif isinstance(witness, str):
        witness_val = parse_valuation(witness, params)
    else:
        witness_val = dict(witness)
    if points:
        check_graph_preserved(pmc, dict(zip(params, points[0])))
    report = RunReport(points=len(points))

    start = time.perf_counter()
    root = solve(pmc, prop, Heuristic(heuristic, seed), target, reward,
                 reward_up, reward_low, witness_val)
    report.elim_ms = _ms(start)
    report.nodes_before = report.nodes_after = pmc.store.size(root)

    if simplify == "sz":
        start = time.perf_counter()
        subst = sz_canonicalize(pmc.store, (root,), sz_points, seed)
        root = apply_substitution(pmc.store, root, subst)
        report.simplify_ms = _ms(start)
        report.nodes_after = pmc.store.size(root)
    elif simplify not in ("none", "local"):
        raise ValueError(f"unknown simplification {simplify!r}")

    was_frozen = pmc.store.frozen
    pmc.store.freeze()
    try:
        start = time.perf_counter()
        values = evaluate_grid(pmc.store, root, points, arith, jobs)
        report.eval_ms = _ms(start)
    finally:
        pmc.store.frozen = was_frozen
    if arith == "interval":
        report.max_diameter = max((v.diameter for v in values), default=0.0)

    rows = list(zip(points, values))
    if emit_dag:
        write_acir(emit_dag, pmc.store, [root])
    if out:
        write_dat(rows, out)
    return report, rows, root


def build_parser():
    p = argparse.ArgumentParser(
        prog="pmcdag", description=__doc__.split("\n\n")[0],
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Rewards for --prop acc exclude the target state's own reward.")
    p.add_argument("--model", required=True,
                   help="model file, bundled:NAME or brp:CHUNKS:MAX")
    p.add_argument("--prop", required=True, choices=("reach", "acc", "lra"))
    p.add_argument("--target", help="label of the target states (reach, acc)")
    p.add_argument("--reward", help="reward structure (acc)")
    p.add_argument("--reward-up", help="numerator reward structure (lra)")
    p.add_argument("--reward-low", help="denominator reward structure (lra)")
    p.add_argument("--heuristic", default="target-bfs", choices=NAMES)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for --heuristic random and --simplify sz")
    p.add_argument("--grid", default="",
                   help='per-parameter start:step:end, e.g. "x=0.002:0.002:0.998"')
    p.add_argument("--arith", default="exact", choices=("exact", "float", "interval"))
    p.add_argument("--simplify", default="local", choices=("none", "local", "sz"),
                   help="sz merges equal sub-circuits; none and local are the same")
    p.add_argument("--sz-points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--witness", help="valuation for well-formedness checks "
                   "(default: grid centroid)")
    p.add_argument("--emit-dag", metavar="PATH", help="write the circuit as .acir")
    p.add_argument("--out", metavar="PATH", help=".dat output (default: stdout)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.prop in ("reach", "acc") and not args.target:
        parser.error(f"--prop {args.prop} needs --target")
    if args.prop == "acc" and not args.reward:
        parser.error("--prop acc needs --reward")
    if args.prop == "lra" and not (args.reward_up and args.reward_low):
        parser.error("--prop lra needs --reward-up and --reward-low")
    if args.sz_points < 1 or args.jobs < 1:
        parser.error("--sz-points and --jobs must be positive")
    try:
        report, rows, _ = run(
            args.model, args.prop, args.grid, args.target, args.reward,
            args.reward_up, args.reward_low, args.heuristic, args.seed,
            args.arith, args.simplify, args.sz_points, args.witness,
            args.emit_dag, args.out, args.jobs)
    except (PmcError, KeyError, OSError, RecursionError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"pmcdag: error: {msg}", file=sys.stderr)
        return 1
    if not args.out:
        sys.stdout.write(format_dat(rows))
    print(report.line(), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
