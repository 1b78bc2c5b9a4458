"""JSON, DOT and CSV formats for graphs, unravel results, fusion networks,
schedules, optimisation outcomes and overhead distributions.

Every ``*_to_dict`` has a matching ``*_from_dict`` so that
``parse(serialize(x)) == x``. JSON text is written with sorted keys and a
fixed layout so that equal objects give identical bytes.
"""

from __future__ import annotations

import hashlib
import io as _io
import csv
import json
import platform
import sys
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any

from .clifford import Clifford, CliffordRecord
from .graph import Graph, _key
from .network import FLink, FNode, FusionNetwork
from .optimizer import Outcome, StrategyConfig
from .ordering import FusionSchedule
from .succprob import OverheadDistribution
from .unravel import BcsUnravel, CliqueUnravel, UnravelResult

__all__ = [
    "FormatError",
    "RunManifest",
    "dumps",
    "graph_to_dict",
    "graph_from_dict",
    "unravel_to_dict",
    "unravel_from_dict",
    "network_to_dict",
    "network_from_dict",
    "schedule_to_dict",
    "schedule_from_dict",
    "outcome_to_dict",
    "outcome_from_dict",
    "distribution_to_csv",
    "distribution_summary",
    "graph_to_dot",
    "unraveled_to_dot",
    "network_to_dot",
    "link_label",
    "file_sha256",
]

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _need(d: dict, *keys: str) -> None:
    if not isinstance(d, dict):
        raise FormatError(f"expected a JSON object, got {type(d).__name__}")
    missing = [k for k in keys if k not in d]
    if missing:
        raise FormatError(f"missing field(s) {missing}")


# -- graphs ---------------------------------------------------------------


def graph_to_dict(graph: Graph) -> dict:
    return {
        "vertices": graph.sorted_vertices(),
        "edges": [list(e) for e in graph.sorted_edges()],
    }


def graph_from_dict(d: dict) -> Graph:
    _need(d, "vertices", "edges")
    try:
        edges = [tuple(str(x) for x in e) for e in d["edges"]]
    except TypeError:
        raise FormatError("edges must be a list of vertex pairs") from None
    if any(len(e) != 2 for e in edges):
        raise FormatError("every edge needs exactly two endpoints")
    try:
        return Graph([str(v) for v in d["vertices"]], edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# -- unravel results ------------------------------------------------------


def _event_to_dict(ev) -> dict:
    if isinstance(ev, BcsUnravel):
        return {
            "kind": "bcs",
            "part1": list(ev.part1),
            "part2": list(ev.part2),
            "new_v1": ev.new_v1,
            "new_v2": ev.new_v2,
        }
    return {
        "kind": "clique",
        "clique": list(ev.clique),
        "v0": ev.v0,
        "new_v1": ev.new_v1,
        "new_v2": ev.new_v2,
        "lc_vertex": ev.lc_vertex,
    }


def _event_from_dict(d: dict):
    _need(d, "kind")
    if d["kind"] == "bcs":
        _need(d, "part1", "part2", "new_v1", "new_v2")
        return BcsUnravel(tuple(d["part1"]), tuple(d["part2"]), d["new_v1"], d["new_v2"])
    if d["kind"] == "clique":
        _need(d, "clique", "v0", "new_v1", "new_v2", "lc_vertex")
        return CliqueUnravel(
            tuple(d["clique"]), d["v0"], d["new_v1"], d["new_v2"], d["lc_vertex"]
        )
    raise FormatError(f"unknown journal entry kind {d['kind']!r}")


def unravel_to_dict(result: UnravelResult) -> dict:
    labels = result.cliffords.non_identity()
    return {
        "original": graph_to_dict(result.original),
        "unraveled": graph_to_dict(result.unraveled),
        "external_fusions": [list(p) for p in result.external_fusions],
        # Only vertices carrying a non-trivial Clifford are listed.
        "cliffords": {v: str(labels[v]) for v in sorted(labels, key=_key)},
        "journal": [_event_to_dict(ev) for ev in result.journal],
    }


def unravel_from_dict(d: dict) -> UnravelResult:
    _need(d, "original", "unraveled", "external_fusions", "cliffords", "journal")
    try:
        labels = {v: Clifford.parse(s) for v, s in d["cliffords"].items()}
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return UnravelResult(
        graph_from_dict(d["original"]),
        graph_from_dict(d["unraveled"]),
        tuple(_event_from_dict(e) for e in d["journal"]),
        tuple(tuple(p) for p in d["external_fusions"]),
        CliffordRecord(labels),
    )


# -- networks and schedules -----------------------------------------------


def link_label(link: FLink, order: int | None) -> str:
    """Order number with a trailing ``C`` when Cliffords accompany the fusion."""
    text = "" if order is None else str(order)
    return text + ("C" if link.clifford_flag else "")


def _gates(link: FLink, cliffords: CliffordRecord) -> list[list[str]]:
    return [list(cliffords[v].word()) if v is not None else [] for v in link.vertices]


def network_to_dict(
    network: FusionNetwork,
    schedule: FusionSchedule | None = None,
    cliffords: CliffordRecord | None = None,
) -> dict:
    """Nodes and links; with ``cliffords``, each Clifford-flagged link also
    lists the generator word applied to each of its two qubits."""
    rounds = schedule.round_of() if schedule is not None else {}
    out = {
        "nodes": [
            {
                "name": n.name,
                "group": n.group,
                "seed": n.is_seed,
                "free_leaf_slots": n.free_leaf_slots,
                "root_used": n.root_used,
                "hosted": list(n.hosted),
            }
            for n in network.nodes
        ],
        "links": [
            {
                "index": i,
                "ends": list(l.ends),
                "roots": list(l.roots),
                "type": l.kind,
                "provenance": l.provenance,
                "clifford": l.clifford_flag,
                "vertices": list(l.vertices),
                "order": rounds.get(i),
                "label": link_label(l, rounds.get(i)),
            }
            for i, l in enumerate(network.links)
        ],
    }
    if cliffords is not None:
        for l, d in zip(network.links, out["links"]):
            if l.clifford_flag:
                d["gates"] = _gates(l, cliffords)
    return out


def network_from_dict(d: dict) -> FusionNetwork:
    _need(d, "nodes", "links")
    nodes = []
    for n in d["nodes"]:
        _need(n, "name", "group", "seed")
        nodes.append(
            FNode(
                n["name"], n["group"], bool(n["seed"]),
                int(n.get("free_leaf_slots", 0)), bool(n.get("root_used", False)),
                tuple(n.get("hosted", ())),
            )
        )
    names = {n.name for n in nodes}
    links = []
    for i, l in enumerate(d["links"]):
        _need(l, "ends", "roots", "provenance")
        if l.get("index", i) != i:
            raise FormatError("links must be listed in index order")
        ends, roots = tuple(l["ends"]), tuple(int(r) for r in l["roots"])
        if len(ends) != 2 or len(roots) != 2 or not set(roots) <= {0, 1}:
            raise FormatError(f"malformed link {l}")
        if not set(ends) <= names:
            raise FormatError(f"link {i} references unknown node(s) {ends}")
        link = FLink(
            ends, roots, l["provenance"], bool(l.get("clifford", False)),
            tuple(l.get("vertices", (None, None))),
        )
        if "type" in l and l["type"] != link.kind:
            raise FormatError(f"link {i} type {l['type']!r} contradicts its roots")
        links.append(link)
    return FusionNetwork(tuple(nodes), tuple(links))


def schedule_to_dict(schedule: FusionSchedule) -> dict:
    return {
        "rounds": [list(r) for r in schedule.rounds],
        "q": schedule.q_value,
        "p_succ": schedule.p_succ,
        "measure": schedule.measure,
    }


def schedule_from_dict(d: dict) -> FusionSchedule:
    _need(d, "rounds", "q", "p_succ", "measure")
    return FusionSchedule(
        tuple(tuple(int(x) for x in r) for r in d["rounds"]),
        float(d["q"]), float(d["p_succ"]), d["measure"],
    )


# -- outcomes -------------------------------------------------------------


def _config_to_dict(cfg: StrategyConfig) -> dict:
    return {
        "p_succ": cfg.p_succ,
        "measure": cfg.measure,
        "unraveling": cfg.unraveling,
        "ordering": cfg.ordering,
        "master_seed": cfg.master_seed,
        "strategy": cfg.strategy,
    }


def outcome_to_dict(outcome: Outcome) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "q_opt": outcome.q_opt,
        "measure": outcome.config.measure,
        "config": _config_to_dict(outcome.config),
        "trial_index": outcome.trial_index,
        "trials_run": outcome.trials_run,
        "batch_minima": list(outcome.batch_minima),
        "num_fusions": len(outcome.network.links),
        "num_resource_states": len(outcome.network.nodes),
        "unravel": unravel_to_dict(outcome.unravel_result),
        "network": network_to_dict(
            outcome.network, outcome.schedule, outcome.unravel_result.cliffords
        ),
        "schedule": schedule_to_dict(outcome.schedule),
    }


def outcome_from_dict(d: dict) -> Outcome:
    _need(d, "q_opt", "config", "trial_index", "trials_run", "unravel", "network", "schedule")
    c = d["config"]
    _need(c, "p_succ", "measure", "unraveling", "ordering", "master_seed")
    cfg = StrategyConfig(
        float(c["p_succ"]), c["measure"], bool(c["unraveling"]), c["ordering"],
        int(c["master_seed"]),
    )
    return Outcome(
        float(d["q_opt"]),
        unravel_from_dict(d["unravel"]),
        network_from_dict(d["network"]),
        schedule_from_dict(d["schedule"]),
        int(d["trial_index"]),
        int(d["trials_run"]),
        cfg,
        tuple(float(x) for x in d.get("batch_minima", ())),
    )


# -- distributions ---------------------------------------------------------


def distribution_to_csv(dist: OverheadDistribution) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "pmf", "cmf"])
    for c, b, d in zip(dist.counts, dist.pmf, dist.cmf):
        w.writerow([int(c), repr(float(b)), repr(float(d))])
    return buf.getvalue()


def distribution_summary(dist: OverheadDistribution, coefficients: bool = False) -> dict:
    out = {
        "L": dist.L,
        "c_max": dist.c_max,
        "mass": dist.mass,
        "tail": dist.tail,
        "mean": dist.mean(),
    }
    if coefficients:
        out["coefficients"] = [float(x) for x in dist.poly.coeffs]
    return out


# -- DOT ------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _vertex_lines(graph: Graph, cliffords: CliffordRecord | None) -> list[str]:
    marked = set(cliffords.non_identity()) if cliffords is not None else set()
    out = []
    for v in graph.sorted_vertices():
        attr = ' [style=filled, fillcolor="orange"]' if v in marked else ""
        out.append(f"  {_q(v)}{attr};")
    return out


def graph_to_dot(graph: Graph, cliffords: CliffordRecord | None = None, name: str = "G") -> str:
    """Undirected DOT; vertices with non-trivial Cliffords are filled orange."""
    lines = [f"graph {_q(name)} {{", "  node [shape=circle];"]
    lines += _vertex_lines(graph, cliffords)
    lines += [f"  {_q(u)} -- {_q(v)};" for u, v in graph.sorted_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def unraveled_to_dot(result: UnravelResult, name: str = "unraveled") -> str:
    """Unraveled graph with external fusions as red dashed lines."""
    g = result.unraveled
    lines = [f"graph {_q(name)} {{", "  node [shape=circle];"]
    lines += _vertex_lines(g, result.cliffords)
    lines += [f"  {_q(u)} -- {_q(v)};" for u, v in g.sorted_edges()]
    lines += [
        f"  {_q(a)} -- {_q(b)} [style=dashed, color=red];"
        for a, b in result.external_fusions
    ]
    lines.append("}")
    return "\n".join(lines) + "\n"


def network_to_dot(
    network: FusionNetwork, schedule: FusionSchedule | None = None, name: str = "network"
) -> str:
    """Fusion network drawing.

    Leaf-to-leaf links are black solid lines, root-to-root links red dashed
    lines, root-to-leaf links blue arrows from the leaf side to the root side.
    Labels give the fusion order with a trailing ``C`` for Clifford-accompanied
    fusions.
    """
    rounds = schedule.round_of() if schedule is not None else {}
    lines = [f"digraph {_q(name)} {{", "  node [shape=circle];"]
    for n in network.nodes:
        shape = "doublecircle" if n.is_seed else "circle"
        lines.append(f"  {_q(n.name)} [shape={shape}];")
    for i, l in enumerate(network.links):
        a, b = l.ends
        label = link_label(l, rounds.get(i))
        lab = f", label={_q(label)}" if label else ""
        if l.kind == "LL":
            lines.append(f"  {_q(a)} -> {_q(b)} [dir=none, color=black{lab}];")
        elif l.kind == "RR":
            lines.append(f"  {_q(a)} -> {_q(b)} [dir=none, style=dashed, color=red{lab}];")
        else:
            leaf, root = (a, b) if l.roots == (0, 1) else (b, a)
            lines.append(f"  {_q(leaf)} -> {_q(root)} [color=blue{lab}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- run manifests --------------------------------------------------------


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    """What was run, with which settings, and on which inputs.

    ``outputs`` maps written file names to their SHA-256 so that a re-run
    can be byte-compared. Wall-clock time is recorded but excluded from
    that comparison.
    """

    command: list[str]
    config: dict
    master_seed: int
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    wall_clock_s: float = 0.0
    tool_version: str = field(default_factory=_tool_version)
    python: str = field(default_factory=lambda: sys.version.split()[0])
    platform: str = field(default_factory=platform.platform)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "master_seed": self.master_seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "wall_clock_s": self.wall_clock_s,
            "tool_version": self.tool_version,
            "python": self.python,
            "platform": self.platform,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunManifest:
        _need(d, "command", "config", "master_seed")
        return cls(
            list(d["command"]), dict(d["config"]), int(d["master_seed"]),
            dict(d.get("inputs", {})), dict(d.get("outputs", {})),
            float(d.get("wall_clock_s", 0.0)),
            d.get("tool_version", "unknown"), d.get("python", ""), d.get("platform", ""),
        )
