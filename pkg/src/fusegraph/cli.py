"""Command-line interface: ``fusegraph gen | optimize | succprob | sweep``.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 numerical
degeneracy in the distribution calculus.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import random
import sys
import time
from pathlib import Path

from .generators import FamilySpecError, generate, parse_family
from .graph import Graph, GraphError, p_succ_from_loss
from .io import (
    FormatError,
    RunManifest,
    distribution_summary,
    distribution_to_csv,
    dumps,
    graph_from_dict,
    graph_to_dict,
    graph_to_dot,
    network_to_dot,
    outcome_from_dict,
    outcome_to_dict,
    schedule_to_dict,
    unraveled_to_dot,
)
from .network import NetworkError
from .optimizer import Adaptive, Fixed, StrategyConfig, default_workers, optimize
from .ordering import FUSIONS, OVERHEAD, OrderingError, evaluate_order
from .succprob import (
    DistributionError,
    NumericalDegeneracyError,
    distribution,
    distribution_to_tail,
    quantile,
    schedule_polynomial,
)
from .unravel import UnravelError

__all__ = ["main", "build_parser"]

log = logging.getLogger("fusegraph")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

_INPUT_ERRORS = (
    FamilySpecError,
    FormatError,
    GraphError,
    UnravelError,
    NetworkError,
    OrderingError,
    DistributionError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


class InputError(Exception):
    pass


def _sub_seed(*parts) -> int:
    digest = hashlib.blake2b(":".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _load_graph(source: str, seed: int) -> tuple[Graph, dict[str, str]]:
    """A family spec string or a path to a graph JSON file."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        data = path.read_bytes()
        d = json.loads(data)
        if "vertices" not in d and "unravel" in d:
            d = d["unravel"]["original"]
        return graph_from_dict(d), {str(path): hashlib.sha256(data).hexdigest()}
    return generate(parse_family(source), random.Random(seed)), {}


def _p_succ(args) -> float:
    if args.loss is not None:
        return p_succ_from_loss(args.loss)
    return args.p_succ


def _mode(args):
    if args.fixed is not None:
        return Fixed(args.fixed)
    return Adaptive(args.adaptive, args.max_trials)


def _write(path: Path, text: str, manifest: RunManifest | None) -> None:
    path.write_text(text, encoding="utf-8")
    if manifest is not None:
        manifest.outputs[path.name] = hashlib.sha256(text.encode("utf-8")).hexdigest()


# -- subcommands ----------------------------------------------------------


def cmd_gen(args) -> int:
    graph, _ = _load_graph(args.family, args.seed)
    text = dumps(graph_to_dict(graph))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(graph), encoding="utf-8")
    print(f"|V|={graph.num_vertices} |E|={graph.num_edges}", file=sys.stderr)
    return EXIT_OK


def cmd_optimize(args) -> int:
    t0 = time.perf_counter()
    graph, inputs = _load_graph(args.graph, args.seed)
    cfg = StrategyConfig.for_strategy(
        args.strategy, p_succ=_p_succ(args), measure=args.measure, master_seed=args.seed
    )
    out = optimize(graph, cfg, _mode(args), workers=args.workers)
    other = FUSIONS if cfg.measure == OVERHEAD else OVERHEAD
    other_q = evaluate_order(out.network, out.schedule.order, cfg.p_succ, other)
    print(f"Q_opt={out.q_opt:.10g}")
    fusions = out.q_opt if cfg.measure == FUSIONS else other_q
    overhead = out.q_opt if cfg.measure == OVERHEAD else other_q
    print(f"expected_fusions={fusions:.10g}")
    print(f"expected_resource_states={overhead:.10g}")
    print(f"links={len(out.network.links)} nodes={len(out.network.nodes)} "
          f"trials={out.trials_run} best_trial={out.trial_index}")
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            ["optimize", *args.argv], {
                "graph": args.graph,
                "strategy": cfg.strategy,
                "p_succ": cfg.p_succ,
                "measure": cfg.measure,
                "mode": repr(_mode(args)),
            },
            args.seed, inputs,
        )
        _write(d / "graph.json", dumps(graph_to_dict(graph)), manifest)
        _write(d / "outcome.json", dumps(outcome_to_dict(out)), manifest)
        _write(d / "schedule.json", dumps(schedule_to_dict(out.schedule)), manifest)
        if args.dot:
            ur = out.unravel_result
            _write(d / "original.dot", graph_to_dot(graph, ur.cliffords, "original"), manifest)
            _write(d / "unraveled.dot", unraveled_to_dot(ur), manifest)
            _write(d / "network.dot", network_to_dot(out.network, out.schedule), manifest)
        manifest.wall_clock_s = round(time.perf_counter() - t0, 3)
        (d / "manifest.json").write_text(dumps(manifest.to_dict()), encoding="utf-8")
    elif args.dot:
        print("--dot needs --out", file=sys.stderr)
    return EXIT_OK


def _load_outcome(source: str, args):
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        d = json.loads(path.read_text(encoding="utf-8"))
        if "schedule" not in d:
            raise InputError(f"{source} is not an outcome JSON (no schedule)")
        return outcome_from_dict(d)
    graph = generate(parse_family(source), random.Random(args.seed))
    cfg = StrategyConfig.for_strategy(
        args.strategy, p_succ=_p_succ(args), master_seed=args.seed
    )
    return optimize(graph, cfg, _mode(args), workers=args.workers)


def cmd_succprob(args) -> int:
    out = _load_outcome(args.source, args)
    p = out.schedule.p_succ
    if out.schedule.measure != OVERHEAD:
        raise InputError("distributions need a schedule optimised for the overhead measure")
    if args.cmax is not None:
        L = schedule_polynomial(out.network, out.schedule, p).degree
        if args.cmax < L:
            raise InputError(f"--cmax {args.cmax} is below the minimum resource count L={L}")
        dist = distribution(out.network, out.schedule, p, args.cmax)
    else:
        dist = distribution_to_tail(out.network, out.schedule, p, tail=args.tail)
    text = distribution_to_csv(dist)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    summary = distribution_summary(dist, coefficients=args.coefficients)
    summary["q"] = out.q_opt
    if args.json:
        Path(args.json).write_text(dumps(summary), encoding="utf-8")
    print(f"L={dist.L} c_max={dist.c_max} tail={dist.tail:.3g} mean={dist.mean():.10g}",
          file=sys.stderr)
    if args.target is not None:
        print(quantile(dist, args.target), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def _er_sample(n: int, m: int, seed: int, attempts: int) -> Graph | None:
    # Components with fewer than three vertices cannot be built from
    # 3-qubit resource states, so such samples are redrawn.
    rng = random.Random(seed)
    for _ in range(attempts):
        g = generate(parse_family(f"er:{n},{m}"), rng)
        if all(len(c) >= 3 for c in g.connected_components()):
            return g
    return None


SWEEP_FIELDS = [
    "n", "ratio", "num_edges", "p_succ", "sample", "strategy",
    "q_opt", "trials", "best_trial", "seconds",
]


def sweep_rows(
    vertices, ratios, p_values, samples, strategies, seed, mode, workers=None,
    attempts: int = 1000,
):
    """Yield one result row per (graph sample, strategy)."""
    for n in vertices:
        emax = n * (n - 1) // 2
        for ratio in ratios:
            m = round(ratio * emax)
            if not 1 <= m <= emax:
                log.warning("skipping n=%d ratio=%g: %d edges infeasible", n, ratio, m)
                continue
            for p in p_values:
                for s in range(samples):
                    g = _er_sample(n, m, _sub_seed(seed, n, ratio, s), attempts)
                    if g is None:
                        log.warning(
                            "skipping n=%d ratio=%g sample %d: no graph without "
                            "components smaller than 3 in %d draws", n, ratio, s, attempts,
                        )
                        continue
                    for strat in strategies:
                        cfg = StrategyConfig.for_strategy(
                            strat, p_succ=p, master_seed=_sub_seed(seed, n, ratio, p, s)
                        )
                        t0 = time.perf_counter()
                        out = optimize(g, cfg, mode, workers=workers)
                        yield {
                            "n": n,
                            "ratio": ratio,
                            "num_edges": m,
                            "p_succ": p,
                            "sample": s,
                            "strategy": strat,
                            "q_opt": repr(out.q_opt),
                            "trials": out.trials_run,
                            "best_trial": out.trial_index,
                            "seconds": f"{time.perf_counter() - t0:.3f}",
                        }


def cmd_sweep(args) -> int:
    strategies = args.strategies.split(",")
    for s in strategies:
        StrategyConfig.for_strategy(s)
    rows = sweep_rows(
        args.vertices, args.ratios, args.p_succ, args.samples, strategies,
        args.seed, _mode(args), args.workers,
    )
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
            fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _prob(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return x


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _positive(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _add_run_options(p: argparse.ArgumentParser, with_measure: bool = True) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p-succ", type=_prob, default=0.5, help="fusion success probability")
    g.add_argument("--loss", type=_prob, default=None,
                   help="photon loss rate; p_succ = (1 - loss)^2 / 2")
    if with_measure:
        p.add_argument("--measure", choices=[OVERHEAD, FUSIONS], default=OVERHEAD)
    it = p.add_mutually_exclusive_group()
    it.add_argument("--fixed", type=_positive, metavar="N", help="run exactly N trials")
    it.add_argument("--adaptive", type=_positive, metavar="M", default=200,
                    help="adaptive iteration with initial batch M (default 200)")
    p.add_argument("--max-trials", type=_positive, default=None,
                   help="cap on trials in adaptive mode")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--strategy", choices=["full", "s1", "s2"], default="full")
    p.add_argument("--workers", type=_positive, default=None,
                   help="worker processes (default: FUSEGRAPH_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fusegraph",
        description="Fusion-based graph-state generation: optimise schedules and "
        "compute resource-overhead distributions.",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph as JSON")
    p.add_argument("family", help='family spec such as "star:6" or "parity:3star,4,4"')
    p.add_argument("--seed", type=int, default=0, help="seed for random families")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--dot", help="also write a DOT drawing to this path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("optimize", help="find a low-overhead fusion schedule")
    p.add_argument("graph", help="family spec or graph JSON file")
    _add_run_options(p)
    p.add_argument("--out", help="output directory for JSON (and DOT) files")
    p.add_argument("--dot", action="store_true", help="write DOT drawings to --out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("succprob", help="distribution of the resource count")
    p.add_argument("source", help="outcome JSON from optimize, or a family spec")
    _add_run_options(p, with_measure=False)
    p.add_argument("--cmax", type=int, default=None,
                   help="truncate at this count (default: until tail < --tail)")
    p.add_argument("--tail", type=float, default=1e-8)
    p.add_argument("--target", type=float, default=None,
                   help="print the smallest c with P_succ(c) >= target")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--json", help="write a JSON summary (L, mass, mean) here")
    p.add_argument("--coefficients", action="store_true",
                   help="include polynomial coefficients in the JSON summary")
    p.set_defaults(func=cmd_succprob)

    p = sub.add_parser("sweep", help="Q_opt over random graphs, one CSV row per sample and strategy")
    p.add_argument("--vertices", type=_ints, default=[12])
    p.add_argument("--ratios", type=_floats, default=[0.6], help="|E| / |E|_max values")
    p.add_argument("--p-succ", type=_floats, default=[0.5])
    p.add_argument("--samples", type=_positive, default=10)
    p.add_argument("--strategies", default="full,s1,s2")
    it = p.add_mutually_exclusive_group()
    it.add_argument("--fixed", type=_positive, metavar="N")
    it.add_argument("--adaptive", type=_positive, metavar="M", default=200)
    p.add_argument("--max-trials", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive, default=None)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    args.argv = argv[argv.index(args.command) + 1 :]
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        return args.func(args)
    except NumericalDegeneracyError as exc:
        print(f"error: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, *_INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
