import math

import numpy as np
import pytest

from vnsolver.dataset import (CorpusConfig, CorpusRecord, SplitSpec, build_corpus,
                              generate_planted_hamiltonian, generate_random_graph, read_manifest,
                              split, write_manifest)
from vnsolver.graph import encode_graph6, from_edge_list, write_graph6_file
from vnsolver.oracle import is_hamiltonian


def test_gnp_extremes():
    assert generate_random_graph(7, 0.0, 1).num_edges == 0
    assert generate_random_graph(7, 1.0, 1).num_edges == 21
    with pytest.raises(ValueError):
        generate_random_graph(5, 1.5, 0)


def test_gnp_deterministic():
    assert generate_random_graph(12, 0.4, 3) == generate_random_graph(12, 0.4, 3)


def test_gnp_mean_edges():
    counts = [generate_random_graph(20, 0.3, s).num_edges for s in range(1000)]
    assert abs(np.mean(counts) - 57) <= 3


def test_planted_cycle_only():
    g = generate_planted_hamiltonian(9, 0, 4)
    assert g.num_edges == 9
    assert all(len(nb) == 2 for nb in g.adj)
    assert is_hamiltonian(g).hamiltonian


def test_planted_saturates_to_complete():
    g = generate_planted_hamiltonian(10, 35, 0)
    assert g.num_edges == 45
    assert is_hamiltonian(g).hamiltonian


def test_planted_capacity():
    with pytest.raises(ValueError):
        generate_planted_hamiltonian(10, 36, 0)
    with pytest.raises(ValueError):
        generate_planted_hamiltonian(2, 0, 0)


def test_planted_always_hamiltonian():
    for s in range(200):
        n = 3 + s % 15
        extra = s % (n * (n - 1) // 2 - n + 1)
        assert is_hamiltonian(generate_planted_hamiltonian(n, extra, s)).hamiltonian


def test_synthetic_corpus_fraction():
    recs = build_corpus(CorpusConfig(size=1500, n_min=6, n_max=15, positive_fraction=0.55, seed=1))
    assert len(recs) == 1500
    pos = sum(r.label for r in recs)
    assert 795 <= pos <= 855
    assert len({r.graph6 for r in recs}) == 1500
    for r in recs[:200]:
        assert r.label == is_hamiltonian(r.graph).hamiltonian
        assert 6 <= r.graph.n <= 15


def test_corpus_deterministic():
    cfg = CorpusConfig(size=60, seed=5)
    a = [(r.graph6, r.label, r.source) for r in build_corpus(cfg)]
    b = [(r.graph6, r.label, r.source) for r in build_corpus(cfg)]
    assert a == b


def test_empty_corpus():
    assert build_corpus(CorpusConfig(size=0)) == []


def test_unreachable_fraction():
    # complete-ish graphs are never negative
    with pytest.raises(RuntimeError):
        build_corpus(CorpusConfig(size=10, p_min=1.0, p_max=1.0, max_attempts=200))


def test_ingest_graph6(tmp_path, graph_a, graph_b):
    path = tmp_path / "fig1.g6"
    write_graph6_file(path, [graph_a, graph_b], header=True)
    recs = build_corpus(CorpusConfig(graph6_files=(str(path),)))
    assert [r.label for r in recs] == [True, False]
    assert recs[0].source == "graph6:fig1.g6:1"


def test_ingest_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        build_corpus(CorpusConfig(graph6_files=(str(tmp_path / "nope.g6"),)))


def test_manifest_round_trip(tmp_path, graph_a, graph_b):
    recs = [CorpusRecord(graph_a, True, "x"), CorpusRecord(graph_b, None, "y")]
    path = tmp_path / "m.tsv"
    write_manifest(path, recs)
    assert path.read_text() == f"{encode_graph6(graph_a)}\t1\tx\n{encode_graph6(graph_b)}\t?\ty\n"
    back = read_manifest(path)
    assert [(r.graph, r.label, r.source) for r in back] == [(graph_a, True, "x"), (graph_b, None, "y")]


def _labels(n, frac, seed=0):
    rng = np.random.default_rng(seed)
    y = np.zeros(n, dtype=bool)
    y[: int(round(frac * n))] = True
    rng.shuffle(y)
    return list(y)


def test_split_sizes_small():
    parts = split(_labels(700, 0.55), SplitSpec(train_total=100, test_total=500))
    assert (len(parts.train), len(parts.val), len(parts.test)) == (80, 20, 500)


def test_split_sizes_and_disjoint():
    labels = _labels(1600, 0.55)
    parts = split(labels, SplitSpec(train_total=1000, test_total=500, seed=3))
    sets = [set(parts.train), set(parts.val), set(parts.test)]
    assert [len(s) for s in sets] == [800, 200, 500]
    assert len(sets[0] | sets[1] | sets[2]) == 1500
    for s in sets:
        frac = sum(labels[i] for i in s) / len(s)
        assert abs(frac - 0.55) <= 0.03


def test_split_deterministic():
    labels = _labels(900, 0.4)
    a = split(labels, SplitSpec(200, 500, seed=9))
    b = split(labels, SplitSpec(200, 500, seed=9))
    c = split(labels, SplitSpec(200, 500, seed=10))
    assert (a.train, a.val, a.test) == (b.train, b.val, b.test)
    assert a.test != c.test


def test_split_insufficient():
    with pytest.raises(ValueError):
        split(_labels(100, 0.5), SplitSpec(100, 500))


def test_split_disjoint_by_graph6():
    recs = build_corpus(CorpusConfig(size=300, seed=2))
    parts = split(recs, SplitSpec(train_total=100, test_total=150, seed=1))
    codes = [{recs[i].graph6 for i in getattr(parts, k)} for k in ("train", "val", "test")]
    assert not (codes[0] & codes[1] or codes[0] & codes[2] or codes[1] & codes[2])


def test_val_count_rounding():
    assert SplitSpec(train_total=1000).val_count == 200
    assert SplitSpec(train_total=7).val_count == math.floor(1.4 + 0.5)
