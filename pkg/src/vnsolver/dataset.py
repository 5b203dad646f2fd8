"""Labelled graph corpora, manifests and stratified splits."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import rng
from .graph import Graph, encode_graph6, from_edge_list, parse_graph6, read_graph6_file
from .oracle import DEFAULT_BUDGET, OracleUndecided, is_hamiltonian

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusRecord:
    graph: Graph
    label: bool | None
    source: str
    # True when the label came from ingest metadata rather than the oracle
    trusted: bool = False

    @property
    def graph6(self) -> str:
        return encode_graph6(self.graph)


@dataclass(frozen=True)
class SplitSpec:
    train_total: int = 1000
    test_total: int = 500
    val_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.train_total < 0 or self.test_total < 0:
            raise ValueError("split sizes must be non-negative")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must lie in [0, 1)")

    @property
    def val_count(self) -> int:
        return int(math.floor(self.val_fraction * self.train_total + 0.5))


@dataclass(frozen=True)
class CorpusConfig:
    """Either ``graph6_files`` (ingest) or synthetic generator parameters."""

    graph6_files: tuple = ()
    size: int = 0
    n_min: int = 6
    n_max: int = 15
    p_min: float = 0.1
    p_max: float = 0.6
    positive_fraction: float = 0.55
    seed: int = 0
    max_attempts: int = 100_000
    budget: int = DEFAULT_BUDGET


@dataclass
class Splits:
    train: list = field(default_factory=list)
    val: list = field(default_factory=list)
    test: list = field(default_factory=list)


# generators -------------------------------------------------------------------

def generate_random_graph(n: int, p: float, seed: int, *stream: int) -> Graph:
    """Erdos-Renyi G(n, p): every pair included independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    gen = rng.generator(seed, rng.STREAM_GRAPH, *stream)
    draws = gen.random(n * (n - 1) // 2)
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if draws[k] < p:
                edges.append((i, j))
            k += 1
    return from_edge_list(n, edges)


def generate_planted_hamiltonian(n: int, extra_edges: int, seed: int, *stream: int) -> Graph:
    """A uniformly random Hamiltonian cycle on ``n`` nodes plus ``extra_edges``
    distinct random chords."""
    if n < 3:
        raise ValueError("a Hamiltonian cycle needs n >= 3")
    chords = n * (n - 1) // 2 - n
    if not 0 <= extra_edges <= chords:
        raise ValueError(f"extra_edges must lie in [0, {chords}] for n={n}, got {extra_edges}")
    gen = rng.generator(seed, rng.STREAM_GRAPH, *stream)
    order = [int(v) for v in gen.permutation(n)]
    cycle = {tuple(sorted((order[i], order[(i + 1) % n]))) for i in range(n)}
    rest = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in cycle]
    pick = gen.choice(len(rest), size=extra_edges, replace=False) if extra_edges else []
    return from_edge_list(n, list(cycle) + [rest[int(k)] for k in sorted(pick)])


# labelling ---------------------------------------------------------------------

def label_graph(g: Graph, budget: int = DEFAULT_BUDGET) -> bool | None:
    """Oracle label, or ``None`` when the search budget runs out."""
    try:
        return is_hamiltonian(g, budget).hamiltonian
    except OracleUndecided:
        return None


def label_records(records, budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[CorpusRecord]:
    """Relabel every record with the oracle; undecided graphs are dropped and logged."""
    graphs = [r.graph for r in records]
    if workers > 1 and len(graphs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(workers) as pool:
            labels = list(pool.map(partial(label_graph, budget=budget), graphs, chunksize=16))
    else:
        labels = [label_graph(g, budget) for g in graphs]
    out = []
    for rec, lab in zip(records, labels):
        if lab is None:
            log.warning("dropping undecided graph %s (%s)", rec.graph6, rec.source)
            continue
        if rec.label is not None and rec.trusted and rec.label != lab:
            log.warning("ingest label %s disagrees with oracle for %s", rec.label, rec.graph6)
        out.append(CorpusRecord(rec.graph, lab, rec.source))
    return out


def _ingest(cfg: CorpusConfig) -> list[CorpusRecord]:
    records = []
    for path in cfg.graph6_files:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"graph6 input file not found: {path}")
        for i, g in enumerate(read_graph6_file(path)):
            records.append(CorpusRecord(g, None, f"graph6:{path.name}:{i + 1}"))
    return records


def _synthetic(cfg: CorpusConfig) -> list[CorpusRecord]:
    want_pos = int(math.floor(cfg.size * cfg.positive_fraction + 0.5))
    want_neg = cfg.size - want_pos
    pos: list[CorpusRecord] = []
    neg: list[CorpusRecord] = []
    seen: set[str] = set()
    gen = rng.generator(cfg.seed, rng.STREAM_CORPUS)

    attempts = 0
    while len(neg) < want_neg or len(pos) < want_pos:
        attempts += 1
        if attempts > cfg.max_attempts:
            raise RuntimeError(
                f"could not reach {want_pos} positives / {want_neg} negatives "
                f"after {cfg.max_attempts} attempts (have {len(pos)} / {len(neg)})"
            )
        n = int(gen.integers(cfg.n_min, cfg.n_max + 1))
        p = float(gen.uniform(cfg.p_min, cfg.p_max))
        # random graphs until the negatives are filled, planted cycles afterwards
        if len(neg) < want_neg:
            g = generate_random_graph(n, p, cfg.seed, attempts)
            source = f"gnp:n={n}:p={p:.4f}:seed={cfg.seed}:k={attempts}"
        else:
            # match the expected edge count of G(n, p) so density alone
            # does not separate planted positives from random negatives
            chords = n * (n - 1) // 2 - n
            extra = min(chords, max(0, int(gen.binomial(n * (n - 1) // 2, p)) - n))
            g = generate_planted_hamiltonian(n, extra, cfg.seed, attempts)
            source = f"planted:n={n}:extra={extra}:seed={cfg.seed}:k={attempts}"
        code = encode_graph6(g)
        if code in seen:
            continue
        lab = label_graph(g, cfg.budget)
        if lab is None:
            log.warning("dropping undecided synthetic graph %s", code)
            continue
        bucket, want = (pos, want_pos) if lab else (neg, want_neg)
        if len(bucket) < want:
            seen.add(code)
            bucket.append(CorpusRecord(g, lab, source))

    records = pos + neg
    order = rng.generator(cfg.seed, rng.STREAM_CORPUS, 1).permutation(len(records))
    return [records[int(i)] for i in order]


def build_corpus(cfg: CorpusConfig) -> list[CorpusRecord]:
    """Labelled corpus from graph6 files or from the synthetic generators.

    Synthetic corpora mix oracle-labelled G(n, p) graphs with planted
    Hamiltonian graphs so that the positive fraction is met exactly (up to
    rounding). Duplicates, by graph6 string, are never emitted.
    """
    if cfg.graph6_files:
        records = label_records(_ingest(cfg), cfg.budget)
        seen: set[str] = set()
        unique = []
        for r in records:
            if r.graph6 not in seen:
                seen.add(r.graph6)
                unique.append(r)
        return unique
    if cfg.size <= 0:
        return []
    return _synthetic(cfg)


# manifests ---------------------------------------------------------------------

def write_manifest(path, records) -> None:
    """One record per line: graph6, label (0/1, or ``?`` if unlabelled), source."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for r in records:
            lab = "?" if r.label is None else str(int(r.label))
            fh.write(f"{r.graph6}\t{lab}\t{r.source}\n")


def read_manifest(path) -> list[CorpusRecord]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    records = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[1] not in ("0", "1", "?"):
                raise ValueError(f"{path}:{lineno}: expected 'graph6<TAB>label<TAB>source'")
            lab = None if parts[1] == "?" else parts[1] == "1"
            records.append(CorpusRecord(parse_graph6(parts[0]), lab, parts[2]))
    return records


# splits ------------------------------------------------------------------------

def split(corpus, spec: SplitSpec) -> Splits:
    """Stratified seeded split: test first, then ``train_total`` which is cut
    into train and validation parts. Returns lists of corpus indices."""
    need = spec.train_total + spec.test_total
    if len(corpus) < need:
        raise ValueError(f"corpus has {len(corpus)} records, split needs {need}")
    gen = rng.generator(spec.seed, rng.STREAM_SPLIT)
    labels = [bool(r.label) if isinstance(r, CorpusRecord) else bool(r) for r in corpus]
    pos = [i for i, lab in enumerate(labels) if lab]
    neg = [i for i, lab in enumerate(labels) if not lab]
    pos = [pos[int(k)] for k in gen.permutation(len(pos))]
    neg = [neg[int(k)] for k in gen.permutation(len(neg))]
    frac = len(pos) / len(labels) if labels else 0.0

    def take(count: int) -> list[int]:
        k = min(int(math.floor(count * frac + 0.5)), len(pos))
        k = max(k, count - len(neg))
        chosen = pos[:k] + neg[:count - k]
        del pos[:k]
        del neg[:count - k]
        return chosen

    test = take(spec.test_total)
    val = take(spec.val_count)
    train = take(spec.train_total - spec.val_count)
    return Splits(train=sorted(train), val=sorted(val), test=sorted(test))
