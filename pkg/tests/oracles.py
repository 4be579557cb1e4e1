"""Brute-force reference implementations used as test oracles."""

from functools import lru_cache
from itertools import combinations, product

GAP = "-"


def all_pairwise_alignments(a, b):
    """Every global alignment of a and b as (row_a, row_b)."""
    if not a and not b:
        yield [], []
        return
    if a and b:
        for ra, rb in all_pairwise_alignments(a[1:], b[1:]):
            yield [a[0]] + ra, [b[0]] + rb
    if a:
        for ra, rb in all_pairwise_alignments(a[1:], b):
            yield [a[0]] + ra, [GAP] + rb
    if b:
        for ra, rb in all_pairwise_alignments(a, b[1:]):
            yield [GAP] + ra, [b[0]] + rb


def all_multiple_alignments(words, max_width):
    """Every multiple alignment of ``words`` with at most ``max_width`` columns."""
    n = len(words)
    steps = [s for s in product((0, 1), repeat=n) if any(s)]

    def rec(pos, width):
        if all(p == len(w) for p, w in zip(pos, words)):
            yield [[] for _ in words]
            return
        if width == max_width:
            return
        for step in steps:
            if any(p + d > len(w) for p, d, w in zip(pos, step, words)):
                continue
            col = [w[p] if d else GAP for p, d, w in zip(pos, step, words)]
            for rest in rec(tuple(p + d for p, d in zip(pos, step)), width + 1):
                yield [[c] + r for c, r in zip(col, rest)]

    yield from rec(tuple(0 for _ in words), 0)


def sum_of_pairs(rows, pair_score):
    return sum(pair_score(rows[i], rows[j]) for i, j in combinations(range(len(rows)), 2))


def levenshtein(a, b):
    """Recursive definition of edit distance, memoised."""
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def bcubed_by_definition(pred_row, gold_row):
    """B-Cubed F over aligned rows, straight from the pairwise definition."""
    n = len(pred_row)
    p = r = 0.0
    for i in range(n):
        same_pred = [j for j in range(n) if pred_row[j] == pred_row[i]]
        same_gold = [j for j in range(n) if gold_row[j] == gold_row[i]]
        both = [j for j in same_pred if gold_row[j] == gold_row[i]]
        p += len(both) / len(same_pred)
        r += len(both) / len(same_gold)
    p, r = p / n, r / n
    return 2 * p * r / (p + r)


def maximal_cliques(n, edges):
    """All maximal cliques of a graph on nodes 0..n-1, by subset enumeration."""
    adj = {i: set() for i in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    cliques = []
    for mask in range(1, 1 << n):
        nodes = [i for i in range(n) if mask >> i & 1]
        if all(j in adj[i] for i, j in combinations(nodes, 2)):
            cliques.append(frozenset(nodes))
    return {c for c in cliques if not any(c < d for d in cliques)}
