"""Correspondence-pattern classifier.

Training sites are collapsed into distinct patterns, linked when they are
compatible (agree wherever both are filled), and every maximal clique of
that graph yields a consensus pattern.  Prediction picks the best fully
compatible consensus pattern and falls back to partial agreement.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .context import ContextConfig, EnrichedSite
from .wordlist import MISSING, UNKNOWN

DEFAULT_NODE_CAP = 20000


class SchemaError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


@dataclass
class SitePattern:
    key: tuple
    labels: Counter = field(default_factory=Counter)

    @property
    def support(self):
        return sum(self.labels.values())


@dataclass(frozen=True)
class ConsensusPattern:
    key: tuple
    label: str
    reflex_count: int
    coverage: int

    @property
    def rank(self):
        """Sort key for prediction: most reflexes first, then coverage, then key."""
        return (-self.reflex_count, -self.coverage, self.key)


def compatible(p, q):
    """True if the keys agree at every position where neither is "Ø"."""
    a = getattr(p, "key", p)
    b = getattr(q, "key", q)
    if len(a) != len(b):
        raise SchemaError(f"pattern lengths differ: {len(a)} vs {len(b)}")
    return all(x == y or x == MISSING or y == MISSING for x, y in zip(a, b))


class PatternGraph:
    """Compatibility graph; adjacency is held as integer bitsets."""

    def __init__(self, nodes, node_cap=DEFAULT_NODE_CAP):
        self.nodes = list(nodes)
        n = len(self.nodes)
        if n > node_cap:
            raise ResourceError(f"{n} distinct patterns exceed the node cap of {node_cap}")
        if n and len({len(p.key) for p in self.nodes}) > 1:
            raise SchemaError("patterns with different key lengths")
        self.adj = [0] * n
        if not n:
            return
        width = len(self.nodes[0].key)
        # bucket by value per position to avoid n^2 key comparisons
        everyone = (1 << n) - 1
        compat = [everyone] * n
        for pos in range(width):
            filled = {}
            wild = 0
            for i, p in enumerate(self.nodes):
                v = p.key[pos]
                if v == MISSING:
                    wild |= 1 << i
                else:
                    filled[v] = filled.get(v, 0) | (1 << i)
            for i, p in enumerate(self.nodes):
                v = p.key[pos]
                if v != MISSING:
                    compat[i] &= filled[v] | wild
        for i in range(n):
            self.adj[i] = compat[i] & ~(1 << i)

    @classmethod
    def from_edges(cls, nodes, edges):
        """Graph with explicit edges instead of compatibility-derived ones."""
        g = cls.__new__(cls)
        g.nodes = list(nodes)
        g.adj = [0] * len(g.nodes)
        for i, j in edges:
            if i != j:
                g.adj[i] |= 1 << j
                g.adj[j] |= 1 << i
        return g

    @property
    def edges(self):
        out = set()
        for i, mask in enumerate(self.adj):
            for j in _bits(mask):
                if i < j:
                    out.add((i, j))
        return out

    def __len__(self):
        return len(self.nodes)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _components(adj):
    n = len(adj)
    left = (1 << n) - 1
    while left:
        seed = left & -left
        comp = seed
        frontier = seed
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        left &= ~comp
        yield comp


def _bron_kerbosch(adj, P):
    """Maximal cliques inside vertex set P (bitset), Tomita-style pivoting."""
    out = []
    stack = [(0, P, 0)]
    while stack:
        R, P, X = stack.pop()
        if not P:
            if not X:
                out.append(R)
            continue
        pivot = max(_bits(P | X), key=lambda u: (P & adj[u]).bit_count())
        for v in _bits(P & ~adj[pivot]):
            bit = 1 << v
            stack.append((R | bit, P & adj[v], X & adj[v]))
            P &= ~bit
            X |= bit
    return out


def enumerate_cliques(g: PatternGraph):
    """All maximal cliques as sorted tuples of node indices.

    Ordered by size (descending), total support (descending), then the node
    index tuple.
    """
    cliques = []
    for comp in _components(g.adj):
        if comp & (comp - 1) == 0:
            cliques.append(comp)
        else:
            cliques.extend(_bron_kerbosch(g.adj, comp))
    support = [p.support for p in g.nodes]
    result = [tuple(_bits(c)) for c in cliques]
    result.sort(key=lambda c: (-len(c), -sum(support[i] for i in c), c))
    return result


def consensus(clique, nodes=None) -> ConsensusPattern:
    """Merge a clique of patterns into one consensus pattern.

    ``clique`` is a sequence of SitePatterns, or node indices into ``nodes``.
    """
    members = [nodes[i] for i in clique] if nodes is not None else list(clique)
    width = len(members[0].key)
    key = []
    for pos in range(width):
        filled = {m.key[pos] for m in members} - {MISSING}
        if len(filled) > 1:
            raise SchemaError(f"members disagree at position {pos}: not a clique")
        key.append(filled.pop() if filled else MISSING)
    labels = Counter()
    for m in members:
        labels.update(m.labels)
    best = max(labels.values())
    label = min(lab for lab, n in labels.items() if n == best)
    return ConsensusPattern(tuple(key), label, sum(labels.values()), len(members))


def collapse_sites(sites, languages, cfg: ContextConfig):
    """Identical site keys become one pattern carrying its label counts."""
    patterns: dict[tuple, SitePattern] = {}
    for site in sites:
        key = site.key(languages, cfg)
        pat = patterns.get(key)
        if pat is None:
            pat = patterns[key] = SitePattern(key)
        pat.labels[site.label] += 1
    return list(patterns.values())


@dataclass(frozen=True)
class CorparModel:
    languages: tuple
    context: ContextConfig
    patterns: tuple  # ConsensusPatterns in clique-ranking order

    @cached_property
    def _ranked(self):
        return sorted(self.patterns, key=lambda p: p.rank)

    @cached_property
    def _index(self):
        # per position: value -> bitset of ranked patterns agreeing or "Ø" there
        ranked = self._ranked
        width = len(ranked[0].key) if ranked else 0
        index = []
        for pos in range(width):
            wild = 0
            by_value = {}
            for i, p in enumerate(ranked):
                v = p.key[pos]
                if v == MISSING:
                    wild |= 1 << i
                else:
                    by_value[v] = by_value.get(v, 0) | (1 << i)
            index.append((wild, by_value))
        return index


def corpar_train(sites, languages, cfg: ContextConfig, node_cap=DEFAULT_NODE_CAP) -> CorparModel:
    if not sites:
        raise ValueError("no training sites")
    nodes = collapse_sites(sites, languages, cfg)
    graph = PatternGraph(nodes, node_cap=node_cap)
    patterns = tuple(consensus(c, nodes) for c in enumerate_cliques(graph))
    return CorparModel(tuple(languages), cfg, patterns)


def corpar_predict(site, model: CorparModel) -> str:
    if not model.patterns:
        raise ValueError("empty model")
    key = site.key(model.languages, model.context) if isinstance(site, EnrichedSite) else tuple(site)
    ranked = model._ranked
    if len(key) != len(ranked[0].key):
        raise SchemaError("site does not match the model's pattern schema")

    mask = (1 << len(ranked)) - 1
    for pos, v in enumerate(key):
        if v == MISSING:
            continue
        wild, by_value = model._index[pos]
        mask &= wild | by_value.get(v, 0)
        if not mask:
            break
    if mask:
        return ranked[(mask & -mask).bit_length() - 1].label

    best, best_score = None, 0
    for p in ranked:
        score = sum(1 for x, y in zip(key, p.key) if x == y and x != MISSING)
        if score > best_score:
            best, best_score = p, score
    return best.label if best is not None else UNKNOWN


def format_patterns(model: CorparModel):
    """TSV export: key cells, label, coverage, reflex count."""
    header = list(model.languages) + list(model.context.slots) + ["LABEL", "COVERAGE", "REFLEXES"]
    lines = ["\t".join(header)]
    for p in model.patterns:
        lines.append("\t".join(list(p.key) + [p.label, str(p.coverage), str(p.reflex_count)]))
    return "\n".join(lines) + "\n"


def parse_patterns(text, languages, cfg: ContextConfig) -> CorparModel:
    lines = [l for l in text.splitlines() if l.strip()]
    width = len(languages) + len(cfg.slots)
    patterns = []
    for line in lines[1:]:
        cells = line.split("\t")
        if len(cells) != width + 3:
            raise SchemaError(f"pattern line has {len(cells)} cells, expected {width + 3}")
        patterns.append(ConsensusPattern(tuple(cells[:width]), cells[width],
                                         int(cells[width + 2]), int(cells[width + 1])))
    return CorparModel(tuple(languages), cfg, tuple(patterns))
