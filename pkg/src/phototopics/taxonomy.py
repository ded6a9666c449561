"""Hypernym DAG with information content, LCS and Lin similarity.

The graph is a simplified stand-in for a WordNet noun hierarchy: synset
ids connected by hypernym (ancestor) edges, a lemma index from tokens to
synsets, and an IC value per synset. File formats are plain TSV (see
``load_taxonomy``).
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field

from .exceptions import ValidationError


@dataclass
class TaxonomyGraph:
    """Immutable after load; all queries are read-only."""

    parents: dict[str, tuple[str, ...]]
    lemma_index: dict[str, tuple[str, ...]]
    ic: dict[str, float]
    children: dict[str, list[str]] = field(init=False, repr=False)

    def __post_init__(self):
        children: dict[str, list[str]] = {s: [] for s in self.parents}
        for s, ps in self.parents.items():
            for p in ps:
                children[p].append(s)
        self.children = children

    @property
    def synsets(self) -> set[str]:
        return set(self.parents)

    def roots(self) -> list[str]:
        return sorted(s for s, ps in self.parents.items() if not ps)

    def ancestors(self, synset: str) -> set[str]:
        """All ancestors of a synset, including itself."""
        if synset not in self.parents:
            raise ValidationError(f"unknown synset {synset!r}")
        seen = {synset}
        queue = deque([synset])
        while queue:
            s = queue.popleft()
            for p in self.parents[s]:
                if p not in seen:
                    seen.add(p)
                    queue.append(p)
        return seen

    def hops_up(self, synset: str) -> dict[str, int]:
        """Shortest upward hop count from a synset to each of its ancestors."""
        dist = {synset: 0}
        queue = deque([synset])
        while queue:
            s = queue.popleft()
            for p in self.parents[s]:
                if p not in dist:
                    dist[p] = dist[s] + 1
                    queue.append(p)
        return dist


def _topological_order(parents: dict[str, tuple[str, ...]]) -> list[str]:
    """Parents-before-children order; raises on a cycle, naming one edge."""
    indegree = {s: len(ps) for s, ps in parents.items()}
    children: dict[str, list[str]] = {s: [] for s in parents}
    for s, ps in parents.items():
        for p in ps:
            children[p].append(s)
    queue = deque(sorted(s for s, d in indegree.items() if d == 0))
    order = []
    while queue:
        s = queue.popleft()
        order.append(s)
        for c in children[s]:
            indegree[c] -= 1
            if indegree[c] == 0:
                queue.append(c)
    if len(order) < len(parents):
        stuck = sorted(s for s, d in indegree.items() if d > 0)
        culprit = stuck[0]
        edge_parent = next(p for p in parents[culprit] if p in stuck)
        raise ValidationError(
            f"taxonomy contains a cycle through edge {edge_parent!r} -> {culprit!r}")
    return order


def _parse_tsv(stream, what: str) -> list[tuple[str, str]]:
    rows = []
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(
                f"malformed {what} line {lineno}: expected 2 tab-separated fields")
        rows.append((parts[0].strip(), parts[1].strip()))
    return rows


def load_taxonomy(taxonomy_stream, lexicon_stream,
                  ic_stream=None, counts_stream=None) -> TaxonomyGraph:
    """Load the synset DAG, lemma index and IC values.

    Taxonomy TSV: ``synset_id<TAB>comma-separated-parent-ids`` (empty
    parents field for roots). Lexicon TSV: ``token<TAB>synset-ids``.
    IC TSV gives precomputed values; a counts TSV gives raw sense-tagged
    frequencies from which IC is derived via ``compute_ic``. With neither,
    IC defaults to 0 everywhere with a warning.
    """
    parents: dict[str, tuple[str, ...]] = {}
    for synset, parent_field in _parse_tsv(taxonomy_stream, "taxonomy"):
        ps = tuple(p.strip() for p in parent_field.split(",") if p.strip())
        parents[synset] = ps
    for s, ps in parents.items():
        for p in ps:
            if p not in parents:
                raise ValidationError(f"synset {s!r} names unknown parent {p!r}")
    _topological_order(parents)  # validates acyclicity

    lemma_index: dict[str, tuple[str, ...]] = {}
    for token, synset_field in _parse_tsv(lexicon_stream, "lexicon"):
        ids = tuple(s.strip() for s in synset_field.split(",") if s.strip())
        for s in ids:
            if s not in parents:
                raise ValidationError(
                    f"lexicon token {token!r} references unknown synset {s!r}")
        lemma_index[token.lower()] = ids

    if ic_stream is not None:
        ic = {}
        for synset, value in _parse_tsv(ic_stream, "ic"):
            if synset not in parents:
                raise ValidationError(f"ic entry references unknown synset {synset!r}")
            ic[synset] = float(value)
        for s in parents:
            ic.setdefault(s, 0.0)
    elif counts_stream is not None:
        counts = {}
        for synset, value in _parse_tsv(counts_stream, "counts"):
            if synset not in parents:
                raise ValidationError(
                    f"counts entry references unknown synset {synset!r}")
            counts[synset] = float(value)
        graph = TaxonomyGraph(parents=parents, lemma_index=lemma_index,
                              ic={s: 0.0 for s in parents})
        graph.ic = compute_ic(graph, counts)
        return graph
    else:
        warnings.warn("no IC source given; all IC values set to 0",
                      RuntimeWarning, stacklevel=2)
        ic = {s: 0.0 for s in parents}
    return TaxonomyGraph(parents=parents, lemma_index=lemma_index, ic=ic)


def compute_ic(graph: TaxonomyGraph, counts: dict[str, float]) -> dict[str, float]:
    """Derive IC from raw sense frequencies.

    Each synset's cumulative count is its own count plus that of every
    descendant, counted once per synset regardless of how many paths lead
    up (DAG-aware). IC(s) = -log((cumulative + 1) / (total + |synsets|))
    with add-one smoothing; roots are then clamped to the minimum IC.
    """
    if any(c < 0 for c in counts.values()):
        raise ValidationError("raw counts must be non-negative")
    total = sum(counts.values())
    if total <= 0:
        raise ValidationError("total raw count must be positive")
    n = len(graph.parents)
    cumulative = {s: 0.0 for s in graph.parents}
    for s, c in counts.items():
        if c == 0:
            continue
        for a in graph.ancestors(s):
            cumulative[a] += c
    ic = {s: -math.log((cumulative[s] + 1.0) / (total + n)) for s in graph.parents}
    min_ic = min(ic.values())
    for r in graph.roots():
        ic[r] = min_ic
    return ic


def lcs(graph: TaxonomyGraph, s1: str, s2: str) -> str | None:
    """Lowest common subsumer: the common ancestor with maximal IC.

    Ties go to the ancestor minimizing the combined upward hop distance
    from both synsets, then to synset-id order. A node counts as its own
    ancestor. Returns None when the synsets share no ancestor.
    """
    common = graph.ancestors(s1) & graph.ancestors(s2)
    if not common:
        return None
    h1 = graph.hops_up(s1)
    h2 = graph.hops_up(s2)
    return min(common, key=lambda a: (-graph.ic[a], h1[a] + h2[a], a))


def lin_similarity(graph: TaxonomyGraph, s1: str, s2: str) -> float:
    """2 * IC(LCS) / (IC(s1) + IC(s2)); 0 without an LCS or with zero ICs."""
    subsumer = lcs(graph, s1, s2)
    if subsumer is None:
        return 0.0
    denom = graph.ic[s1] + graph.ic[s2]
    if denom <= 0.0:
        return 0.0
    return 2.0 * graph.ic[subsumer] / denom


def word_similarity(graph: TaxonomyGraph, w1: str, w2: str) -> float:
    """Max Lin similarity over all sense pairs; unknown words score 0."""
    senses1 = graph.lemma_index.get(w1.lower(), ())
    senses2 = graph.lemma_index.get(w2.lower(), ())
    best = 0.0
    for a in senses1:
        for b in senses2:
            sim = lin_similarity(graph, a, b)
            if sim > best:
                best = sim
    return best
