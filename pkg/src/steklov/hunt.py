"""Search campaigns for eigenvalue-monotonicity counterexamples.

Two standing questions drive the module: does removing a pendant vertex
ever *decrease* a higher eigenvalue on trees (problem "1"), and does the
same happen on general graphs whose boundary is the degree-1 vertices when
growth is restricted to pendant additions (problem "2")?  The engine
enumerates base graphs (exhaustively for small orders, seeded-randomly
beyond), attaches one pendant at a time, compares spectra index by index,
and records every violation as a self-contained, re-verifiable pair.

Runs are deterministic given the config: instance idx -> content is a pure
function of (problem, n_max, seed), so a report can be resumed from its
cursor and a parallel run merges to byte-identical results.
"""

from __future__ import annotations

import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import GraphValidationError
from .graphs import BoundaryGraph, add_pendant, build, random_tree
from .serialize import to_edge_list
from .spectral import steklov_spectrum

VIOLATION_TOL = 1e-8
REVERIFY_TOL = 1e-9

_HIST_EDGES = (-math.inf, -1e-8, 0.0, 1e-4, 1e-2, 0.1, 0.5, math.inf)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class HuntConfig:
    problem: str  # "1" (trees), "2" (general graphs), "fig1"
    n_max: int
    k_min: int = 3
    k_max: int | None = None
    budget: int = 1000
    seed: int = 0
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        problem = str(self.problem)
        object.__setattr__(self, "problem", problem)
        if problem not in {"1", "2", "fig1"}:
            raise ValueError(f"unknown problem {problem!r}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.k_min < 2:
            raise ValueError("eigenvalue index starts at 2")
        if self.k_max is not None and self.k_max < self.k_min:
            raise ValueError("k_max below k_min")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        floor = 6 if problem == "fig1" else 4
        if self.n_max < floor:
            raise ValueError(f"n_max must be >= {floor} for problem {problem}")

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "n_max": self.n_max,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "budget": self.budget,
            "seed": self.seed,
            "workers": self.workers,
            "out": self.out,
        }

    @staticmethod
    def from_json(doc: dict) -> "HuntConfig":
        return HuntConfig(**doc)


# ---------------------------------------------------------------------------
# candidate pairs


@dataclass(frozen=True)
class CandidatePair:
    """A comparison g1 vs g2 where g2 extends g1.

    relation is "pendant" (g2 = g1 plus one pendant at `attachment`) or
    "vertex_deletion" (g1 = g2 minus one vertex); either way g1 embeds in
    g2, which is what the monotonicity questions quantify over.
    """

    g1: BoundaryGraph
    g2: BoundaryGraph
    attachment: int | None
    relation: str
    eigenvalues1: tuple[float, ...]
    eigenvalues2: tuple[float, ...]
    margins: dict[int, float]

    @property
    def min_margin(self) -> float:
        if not self.margins:
            return math.inf
        return min(self.margins.values())

    @property
    def violating_k(self) -> list[int]:
        return sorted(k for k, m in self.margins.items() if m < -VIOLATION_TOL)

    def to_json(self) -> dict:
        return {
            "g1": _graph_doc(self.g1),
            "g2": _graph_doc(self.g2),
            "attachment": self.attachment,
            "relation": self.relation,
            "eigenvalues1": list(self.eigenvalues1),
            "eigenvalues2": list(self.eigenvalues2),
            "margins": {str(k): v for k, v in self.margins.items()},
        }

    @staticmethod
    def from_json(doc: dict) -> "CandidatePair":
        return CandidatePair(
            g1=_graph_from_doc(doc["g1"]),
            g2=_graph_from_doc(doc["g2"]),
            attachment=doc["attachment"],
            relation=doc["relation"],
            eigenvalues1=tuple(doc["eigenvalues1"]),
            eigenvalues2=tuple(doc["eigenvalues2"]),
            margins={int(k): v for k, v in doc["margins"].items()},
        )


def _graph_doc(g: BoundaryGraph) -> dict:
    return {
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "boundary": sorted(g.boundary),
        "strict": g.strict,
    }


def _graph_from_doc(doc: dict) -> BoundaryGraph:
    return build(
        doc["n"],
        [tuple(e) for e in doc["edges"]],
        boundary=set(doc["boundary"]),
        strict=doc["strict"],
    )


def make_pair(
    g1: BoundaryGraph,
    g2: BoundaryGraph,
    attachment: int | None,
    relation: str,
    k_min: int,
    k_max: int | None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CandidatePair:
    """Compare lambda_k(g1) against lambda_k(g2) for every shared index k."""
    s1 = steklov_spectrum(g1, tol)
    s2 = steklov_spectrum(g2, tol)
    top = min(len(s1.eigenvalues), len(s2.eigenvalues))
    if k_max is not None:
        top = min(top, k_max)
    margins = {
        k: s1.lambda_k(k) - s2.lambda_k(k) for k in range(k_min, top + 1)
    }
    return CandidatePair(
        g1=g1,
        g2=g2,
        attachment=attachment,
        relation=relation,
        eigenvalues1=tuple(float(w) for w in s1.eigenvalues),
        eigenvalues2=tuple(float(w) for w in s2.eigenvalues),
        margins=margins,
    )


def reverify(pair: CandidatePair, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Recompute both spectra from the stored graphs alone and confirm the
    recorded eigenvalues and margins to REVERIFY_TOL."""
    fresh = make_pair(
        pair.g1,
        pair.g2,
        pair.attachment,
        pair.relation,
        k_min=min(pair.margins) if pair.margins else 2,
        k_max=max(pair.margins) if pair.margins else None,
        tol=tol,
    )
    for old, new in (
        (pair.eigenvalues1, fresh.eigenvalues1),
        (pair.eigenvalues2, fresh.eigenvalues2),
    ):
        if len(old) != len(new):
            return False
        if any(abs(a - b) > REVERIFY_TOL for a, b in zip(old, new)):
            return False
    if set(pair.margins) != set(fresh.margins):
        return False
    return all(
        abs(pair.margins[k] - fresh.margins[k]) <= REVERIFY_TOL
        for k in pair.margins
    )


# ---------------------------------------------------------------------------
# reports


@dataclass
class HuntReport:
    config: HuntConfig
    instances: int
    violations: list[CandidatePair]
    histogram: dict[str, int]
    wall_time_s: float
    status: str  # "complete" | "budget_exhausted"
    cursor: int
    anomalies: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "instances": self.instances,
            "violations": [p.to_json() for p in self.violations],
            "histogram": dict(self.histogram),
            "wall_time_s": self.wall_time_s,
            "status": self.status,
            "cursor": self.cursor,
            "anomalies": list(self.anomalies),
        }

    @staticmethod
    def from_json(doc: dict) -> "HuntReport":
        return HuntReport(
            config=HuntConfig.from_json(doc["config"]),
            instances=doc["instances"],
            violations=[CandidatePair.from_json(p) for p in doc["violations"]],
            histogram=dict(doc["histogram"]),
            wall_time_s=doc["wall_time_s"],
            status=doc["status"],
            cursor=doc["cursor"],
            anomalies=list(doc.get("anomalies", [])),
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=1) + "\n")
        for i, pair in enumerate(self.violations):
            for tag, g in (("g1", pair.g1), ("g2", pair.g2)):
                side = path.with_suffix(f".v{i}.{tag}.edges")
                side.write_text(to_edge_list(g))

    @staticmethod
    def load(path: str | Path) -> "HuntReport":
        return HuntReport.from_json(json.loads(Path(path).read_text()))


def _hist_label(i: int) -> str:
    lo, hi = _HIST_EDGES[i], _HIST_EDGES[i + 1]
    return f"[{lo:g},{hi:g})"


def _empty_histogram() -> dict[str, int]:
    return {_hist_label(i): 0 for i in range(len(_HIST_EDGES) - 1)}


def _hist_add(hist: dict[str, int], value: float) -> None:
    for i in range(len(_HIST_EDGES) - 1):
        if _HIST_EDGES[i] <= value < _HIST_EDGES[i + 1]:
            hist[_hist_label(i)] += 1
            return
    hist[_hist_label(len(_HIST_EDGES) - 2)] += 1  # value == +inf


# ---------------------------------------------------------------------------
# enumeration


def enumerate_trees(n: int):
    """One tree per isomorphism class, canonical generation order."""
    if not 3 <= n <= 12:
        raise ValueError(f"tree enumeration supports 3 <= n <= 12, got {n}")
    for t in nx.nonisomorphic_trees(n):
        yield build(n, sorted(tuple(sorted(e)) for e in t.edges()), boundary=None)


def enumerate_graphs(n: int):
    """Connected graphs on n vertices with at least one degree-1 vertex,
    in graph-atlas order."""
    if not 3 <= n <= 7:
        raise ValueError(f"graph enumeration supports 3 <= n <= 7, got {n}")
    for g in nx.graph_atlas_g():
        if g.number_of_nodes() != n or g.number_of_edges() == 0:
            continue
        if not nx.is_connected(g):
            continue
        degrees = dict(g.degree())
        if min(degrees.values()) != 1:
            continue
        edges = sorted(tuple(sorted(e)) for e in g.edges())
        yield build(n, edges, boundary=None)


def _random_general_graph(n: int, rng: random.Random) -> BoundaryGraph:
    """Random connected graph with degree-1 boundary: a tree plus a few
    extra edges between interior vertices (leaves stay leaves)."""
    t = random_tree(n, rng.randrange(2**32))
    interior = sorted(v for v in range(t.n) if t.degree(v) >= 2)
    edges = set(t.edges)
    if len(interior) >= 2:
        for _ in range(rng.randint(1, 3)):
            for _attempt in range(10):
                a, b = rng.sample(interior, 2)
                e = (a, b) if a < b else (b, a)
                if e not in edges:
                    edges.add(e)
                    break
    return build(n, sorted(edges), boundary=None)


# ---------------------------------------------------------------------------
# deterministic instance streams


def _instance(cfg: HuntConfig, idx: int, exhaustive: list) -> tuple | None:
    """Instance #idx of the stream for cfg, or None past the end.

    The prefix is the materialized exhaustive list; the tail draws a random
    base graph from a sub-seed bound to idx alone, so the mapping never
    depends on budget, cursor, or worker count.
    """
    if idx < len(exhaustive):
        return exhaustive[idx]
    lo, hi = 11, cfg.n_max - 1
    if cfg.problem == "2":
        lo = 8
    if hi < lo:
        return None
    rng = random.Random(f"{cfg.seed}:{idx}")
    n = rng.randint(lo, hi)
    if cfg.problem == "2":
        g1 = _random_general_graph(n, rng)
    else:
        g1 = random_tree(n, rng.randrange(2**32))
    x = rng.randrange(g1.n)
    return (g1, x)


def _exhaustive_instances(cfg: HuntConfig) -> list[tuple]:
    out: list[tuple] = []
    if cfg.problem == "2":
        top = min(cfg.n_max - 1, 7)
        gen = enumerate_graphs
    else:
        top = min(cfg.n_max - 1, 10)
        gen = enumerate_trees
    for n in range(3, top + 1):
        for g in gen(n):
            for x in range(g.n):
                out.append((g, x))
    return out


def _eval_instance(payload: tuple) -> tuple[int, float, dict | None]:
    """Worker body: one pendant addition, one spectral comparison."""
    idx, n, edges, boundary, strict, x, k_min, k_max = payload
    g1 = build(n, [tuple(e) for e in edges], boundary=set(boundary), strict=strict)
    g2 = add_pendant(g1, x)
    pair = make_pair(g1, g2, x, "pendant", k_min, k_max)
    doc = pair.to_json() if pair.min_margin < -VIOLATION_TOL else None
    return idx, pair.min_margin, doc


def _payload(cfg: HuntConfig, idx: int, inst: tuple) -> tuple:
    g1, x = inst
    return (
        idx,
        g1.n,
        [list(e) for e in g1.edges],
        sorted(g1.boundary),
        g1.strict,
        x,
        cfg.k_min,
        cfg.k_max,
    )


def _run_hunt(cfg: HuntConfig, resume: HuntReport | None) -> HuntReport:
    start = time.monotonic()
    exhaustive = _exhaustive_instances(cfg)
    cursor = 0
    violations: list[CandidatePair] = []
    histogram = _empty_histogram()
    examined = 0
    if resume is not None:
        stream_keys = ("problem", "n_max", "k_min", "k_max", "seed")
        old, new = resume.config.to_json(), cfg.to_json()
        if any(old[k] != new[k] for k in stream_keys):
            raise ValueError(
                "resume report comes from a different instance stream "
                f"({ {k: old[k] for k in stream_keys} } vs "
                f"{ {k: new[k] for k in stream_keys} })"
            )
        cursor = resume.cursor
        violations = list(resume.violations)
        histogram = dict(resume.histogram)
        examined = resume.instances

    pending: list[tuple] = []
    idx = cursor
    while examined + len(pending) < cfg.budget:
        inst = _instance(cfg, idx, exhaustive)
        if inst is None:
            break
        pending.append(_payload(cfg, idx, inst))
        idx += 1

    if cfg.workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_eval_instance, pending, chunksize=8))
    else:
        results = [_eval_instance(p) for p in pending]
    results.sort(key=lambda r: r[0])

    for _idx, margin, doc in results:
        _hist_add(histogram, margin)
        if doc is not None:
            violations.append(CandidatePair.from_json(doc))
    examined += len(results)
    cursor = idx
    exhausted = _instance(cfg, cursor, exhaustive) is None
    status = "complete" if exhausted else "budget_exhausted"
    report = HuntReport(
        config=cfg,
        instances=examined,
        violations=violations,
        histogram=histogram,
        wall_time_s=time.monotonic() - start,
        status=status,
        cursor=cursor,
    )
    if cfg.out:
        report.save(cfg.out)
    return report


def hunt_problem1(cfg: HuntConfig, resume: HuntReport | None = None) -> HuntReport:
    """Search trees for lambda_k(g1) < lambda_k(g1 + pendant)."""
    if cfg.problem != "1":
        raise ValueError("config is not for problem 1")
    return _run_hunt(cfg, resume)


def hunt_problem2(cfg: HuntConfig, resume: HuntReport | None = None) -> HuntReport:
    """Search degree-1-boundary graphs (pendant growth only, so the cycle
    structure is preserved) for the same violation."""
    if cfg.problem != "2":
        raise ValueError("config is not for problem 2")
    return _run_hunt(cfg, resume)


# ---------------------------------------------------------------------------
# the two-thirds pair


def _delete_vertex(g: BoundaryGraph, v: int) -> BoundaryGraph | None:
    keep = [u for u in range(g.n) if u != v]
    relabel = {old: new for new, old in enumerate(keep)}
    edges = [
        (relabel[a], relabel[b]) for a, b in g.edges if a != v and b != v
    ]
    try:
        h = build(len(keep), edges, boundary=None)
    except GraphValidationError:
        return None
    return h


def find_fig1(
    n_max: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> CandidatePair | None:
    """A subgraph pair on general graphs where the gap moves the wrong way:
    lambda_2 rises from 1/2 to 2/3 when the deleted cycle vertex returns.

    The known reconstruction — a 4-cycle with pendants on opposite corners,
    against the 5-path left by removing a bare cycle vertex — is validated
    first; an atlas scan backs it up if validation ever fails.
    """
    if n_max < 6:
        raise ValueError("n_max must be >= 6")
    cycle = [(0, 1), (1, 2), (2, 3), (0, 3)]
    g2 = build(6, cycle + [(0, 4), (2, 5)], boundary=None)
    g1 = _delete_vertex(g2, 1)
    if g1 is not None:
        pair = make_pair(g1, g2, None, "vertex_deletion", 2, 2, tol)
        if (
            abs(pair.eigenvalues1[1] - 0.5) <= REVERIFY_TOL
            and abs(pair.eigenvalues2[1] - 2.0 / 3.0) <= REVERIFY_TOL
        ):
            return pair
    for n in range(6, min(n_max, 7) + 1):
        for g2 in enumerate_graphs(n):
            lam2 = steklov_spectrum(g2, tol).lambda2
            if abs(lam2 - 2.0 / 3.0) > REVERIFY_TOL:
                continue
            for v in range(g2.n):
                g1 = _delete_vertex(g2, v)
                if g1 is None:
                    continue
                lam1 = steklov_spectrum(g1, tol).lambda2
                if abs(lam1 - 0.5) <= REVERIFY_TOL:
                    return make_pair(g1, g2, None, "vertex_deletion", 2, 2, tol)
    return None
