"""Counterexample hunts: enumeration, streams, determinism, reports."""

import dataclasses
import itertools
import json

import pytest

from steklov import (
    HuntConfig,
    HuntReport,
    add_pendant,
    enumerate_graphs,
    enumerate_trees,
    find_fig1,
    from_edge_list,
    hunt_problem1,
    hunt_problem2,
    make_pair,
    path_tree,
    reverify,
    tree_canonical_form,
)

# one tree per isomorphism class; the unlabeled-tree counting sequence
TREE_COUNTS = {3: 1, 4: 2, 5: 3, 6: 6, 7: 11, 8: 23, 9: 47, 10: 106}
# connected graphs with at least one degree-1 vertex, from the atlas
GRAPH_COUNTS = {3: 1, 4: 3, 5: 10, 6: 51, 7: 346}


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_trees_counts():
    for n, count in TREE_COUNTS.items():
        assert sum(1 for _ in enumerate_trees(n)) == count


def test_enumerate_trees_matches_prufer_oracle():
    # independent route: decode every Prufer sequence, dedupe by canonical form
    from steklov.graphs import _prufer_decode, build as _build

    for n in range(3, 7):
        oracle = set()
        for seq in itertools.product(range(n), repeat=n - 2):
            g = _build(n, _prufer_decode(list(seq), n))
            oracle.add(tree_canonical_form(g))
        enumerated = [tree_canonical_form(g) for g in enumerate_trees(n)]
        assert len(enumerated) == len(set(enumerated))  # pairwise distinct
        assert set(enumerated) == oracle


def test_enumerate_graphs_counts_and_shape():
    for n, count in GRAPH_COUNTS.items():
        if n > 6:
            continue  # n=7 is covered by the count probe below
        graphs = list(enumerate_graphs(n))
        assert len(graphs) == count
        for g in graphs:
            assert g.n == n
            assert min(g.degree(v) for v in range(g.n)) == 1


def test_enumerate_graphs_n7_count():
    assert sum(1 for _ in enumerate_graphs(7)) == GRAPH_COUNTS[7]


def test_enumeration_range_errors():
    with pytest.raises(ValueError):
        list(enumerate_trees(2))
    with pytest.raises(ValueError):
        list(enumerate_trees(13))
    with pytest.raises(ValueError):
        list(enumerate_graphs(8))


# ---------------------------------------------------------------------------
# configuration


def test_config_validation():
    with pytest.raises(ValueError):
        HuntConfig(problem="1", n_max=9, budget=0)
    with pytest.raises(ValueError):
        HuntConfig(problem="1", n_max=9, k_min=1)
    with pytest.raises(ValueError):
        HuntConfig(problem="1", n_max=9, k_min=4, k_max=3)
    with pytest.raises(ValueError):
        HuntConfig(problem="1", n_max=9, workers=0)
    with pytest.raises(ValueError):
        HuntConfig(problem="7", n_max=9)
    with pytest.raises(ValueError):
        HuntConfig(problem="1", n_max=3)
    with pytest.raises(ValueError):
        HuntConfig(problem="fig1", n_max=5)
    HuntConfig(problem="fig1", n_max=6)  # floor is inclusive


def test_config_normalizes_problem_and_round_trips():
    cfg = HuntConfig(problem=1, n_max=9, budget=50)
    assert cfg.problem == "1"
    assert HuntConfig.from_json(cfg.to_json()) == cfg


# ---------------------------------------------------------------------------
# pair bookkeeping


def test_make_pair_path_growth():
    g1 = path_tree(3)
    pair = make_pair(g1, add_pendant(g1, 3), 3, "pendant", 2, None)
    assert pair.margins == {2: pytest.approx(1.0 / 6.0, abs=1e-10)}
    assert pair.min_margin > 0
    assert pair.violating_k == []
    assert reverify(pair)


def test_pair_json_round_trip():
    g1 = path_tree(3)
    pair = make_pair(g1, add_pendant(g1, 1), 1, "pendant", 2, 3)
    back = type(pair).from_json(pair.to_json())
    assert back.g1 == pair.g1 and back.g2 == pair.g2
    assert back.margins == pytest.approx(pair.margins)
    assert back.relation == "pendant" and back.attachment == 1


def test_reverify_rejects_tampered_pair():
    pair = find_fig1(6)
    assert pair is not None
    tampered = dataclasses.replace(
        pair, eigenvalues1=tuple(w + 0.01 for w in pair.eigenvalues1)
    )
    assert reverify(pair)
    assert not reverify(tampered)


# ---------------------------------------------------------------------------
# the two-thirds pair


def test_find_fig1_values():
    pair = find_fig1(6)
    assert pair is not None
    assert pair.relation == "vertex_deletion"
    assert pair.eigenvalues1[1] == pytest.approx(0.5, abs=1e-9)
    assert pair.eigenvalues2[1] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert pair.margins[2] == pytest.approx(-1.0 / 6.0, abs=1e-9)
    assert pair.violating_k == [2]
    assert pair.g1.is_tree and not pair.g2.is_tree
    assert pair.g2.n == 6 and pair.g1.n == 5


def test_find_fig1_rejects_small_n():
    with pytest.raises(ValueError):
        find_fig1(5)


# ---------------------------------------------------------------------------
# hunts: determinism, workers, resume, gates


def _strip_time(report: HuntReport) -> dict:
    doc = report.to_json()
    doc.pop("wall_time_s")
    return doc


def test_hunt1_exhaustive_small_is_clean_and_complete():
    cfg = HuntConfig(problem="1", n_max=6, k_min=2, budget=1000)
    rep = hunt_problem1(cfg)
    # trees on 3..5 vertices, every attachment: 1*3 + 2*4 + 3*5
    assert rep.instances == 26
    assert rep.status == "complete"
    assert rep.violations == []
    assert sum(rep.histogram.values()) == rep.instances
    assert rep.cursor == 26


def test_hunt1_deterministic():
    cfg = HuntConfig(problem="1", n_max=12, k_min=3, budget=60, seed=11)
    assert _strip_time(hunt_problem1(cfg)) == _strip_time(hunt_problem1(cfg))


def test_hunt1_worker_independent():
    base = dict(problem="1", n_max=6, k_min=2, budget=1000)
    solo = hunt_problem1(HuntConfig(**base, workers=1))
    duo = hunt_problem1(HuntConfig(**base, workers=2))
    a, b = _strip_time(solo), _strip_time(duo)
    a["config"].pop("workers")
    b["config"].pop("workers")
    assert a == b


def test_hunt1_resume_equivalence():
    full = hunt_problem1(HuntConfig(problem="1", n_max=6, k_min=2, budget=26))
    half = hunt_problem1(HuntConfig(problem="1", n_max=6, k_min=2, budget=10))
    assert half.status == "budget_exhausted" and half.cursor == 10
    resumed = hunt_problem1(
        HuntConfig(problem="1", n_max=6, k_min=2, budget=26), resume=half
    )
    assert _strip_time(resumed) == _strip_time(full)
    assert resumed.status == "complete"


def test_hunt1_resume_rejects_foreign_stream():
    half = hunt_problem1(HuntConfig(problem="1", n_max=6, k_min=2, budget=10))
    with pytest.raises(ValueError, match="different instance stream"):
        hunt_problem1(
            HuntConfig(problem="1", n_max=6, k_min=2, budget=26, seed=99),
            resume=half,
        )


def test_hunt1_random_tail_reaches_big_trees():
    from steklov.hunt import _exhaustive_instances

    cfg = HuntConfig(problem="1", n_max=12, k_min=3, budget=2000, seed=5)
    prefix = len(_exhaustive_instances(cfg))
    assert prefix < 2000  # the run below must enter the random tail
    rep = hunt_problem1(cfg)
    assert rep.instances == 2000
    assert rep.status == "budget_exhausted"
    assert rep.violations == []
    assert sum(rep.histogram.values()) == 2000


def test_hunt2_exhaustive_small_is_clean():
    cfg = HuntConfig(problem="2", n_max=6, k_min=2, budget=1000)
    rep = hunt_problem2(cfg)
    # leafy connected graphs on 3..5 vertices: 1*3 + 3*4 + 10*5
    assert rep.instances == 65
    assert rep.status == "complete"
    assert rep.violations == []


def test_hunt_problem_id_guards():
    with pytest.raises(ValueError):
        hunt_problem1(HuntConfig(problem="2", n_max=9))
    with pytest.raises(ValueError):
        hunt_problem2(HuntConfig(problem="1", n_max=9))


def test_seed_changes_random_tail_only():
    from steklov.hunt import _exhaustive_instances, _instance

    a = HuntConfig(problem="1", n_max=13, k_min=3, budget=10, seed=1)
    b = HuntConfig(problem="1", n_max=13, k_min=3, budget=10, seed=2)
    ex = _exhaustive_instances(a)
    # the exhaustive prefix is seed-independent ...
    assert _instance(a, 0, ex) == _instance(b, 0, ex)
    # ... and the random tail is not
    idx = len(ex)
    tails_a = [_instance(a, idx + j, ex) for j in range(5)]
    tails_b = [_instance(b, idx + j, ex) for j in range(5)]
    assert tails_a != tails_b


# ---------------------------------------------------------------------------
# report persistence


def test_report_save_load_round_trip(tmp_path):
    pair = find_fig1(6)
    cfg = HuntConfig(problem="fig1", n_max=6)
    report = HuntReport(
        config=cfg,
        instances=1,
        violations=[pair],
        histogram={"all": 1},
        wall_time_s=0.25,
        status="complete",
        cursor=1,
    )
    path = tmp_path / "hunt.json"
    report.save(path)
    loaded = HuntReport.load(path)
    assert loaded.config == cfg
    assert loaded.instances == 1 and loaded.status == "complete"
    assert loaded.violations[0].margins == pytest.approx(pair.margins)
    # the side files carry structure and boundary (strictness is implicit)
    for tag, g in (("g1", pair.g1), ("g2", pair.g2)):
        side = from_edge_list((tmp_path / f"hunt.v0.{tag}.edges").read_text())
        assert (side.n, side.edges, side.boundary) == (g.n, g.edges, g.boundary)


def test_hunt_out_config_writes_report(tmp_path):
    out = tmp_path / "auto.json"
    cfg = HuntConfig(problem="1", n_max=6, k_min=2, budget=12, out=str(out))
    rep = hunt_problem1(cfg)
    assert out.exists()
    doc = json.loads(out.read_text())
    assert doc["instances"] == rep.instances == 12
    assert doc["cursor"] == 12


def test_histogram_bins_are_fixed():
    rep = hunt_problem1(HuntConfig(problem="1", n_max=6, k_min=2, budget=5))
    assert len(rep.histogram) == 7
    assert any(label.startswith("[-inf") for label in rep.histogram)
    assert sum(rep.histogram.values()) == 5


def test_instance_stream_ignores_budget():
    from steklov.hunt import _exhaustive_instances, _instance

    a = HuntConfig(problem="1", n_max=13, k_min=3, budget=10, seed=4)
    b = HuntConfig(problem="1", n_max=13, k_min=3, budget=5000, seed=4)
    ex_a, ex_b = _exhaustive_instances(a), _exhaustive_instances(b)
    for idx in (0, 20, 400, 401):
        ia, ib = _instance(a, idx, ex_a), _instance(b, idx, ex_b)
        assert ia is not None and ib is not None
        assert ia[0] == ib[0] and ia[1] == ib[1]
