"""Edit distance, normalised edit distance and B-Cubed F-scores on token sequences."""

from __future__ import annotations

from dataclasses import dataclass

from .alignment import DEFAULT_SCHEME, align_pairwise, expand_tokens


@dataclass(frozen=True)
class EvalReport:
    ed: float
    ned: float
    bc: float
    n: int


def edit_distance(a, b):
    """Token-level Levenshtein distance with unit costs."""
    a, b = list(a), list(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def ned(a, b):
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return edit_distance(a, b) / longest


def bcubed_f(pred, gold, scheme=DEFAULT_SCHEME):
    """B-Cubed F-score of two sequences viewed as classifications of aligned slots.

    The sequences are aligned first; gaps then count as ordinary symbols.
    """
    pred, gold = list(pred), list(gold)
    if not pred or not gold:
        raise ValueError("B-Cubed needs two non-empty sequences")
    ap, ag = align_pairwise(pred, gold, scheme)[:2]
    pairs = list(zip(ap, ag))
    n = len(pairs)
    by_pred, by_gold, by_both = {}, {}, {}
    for p, g in pairs:
        by_pred[p] = by_pred.get(p, 0) + 1
        by_gold[g] = by_gold.get(g, 0) + 1
        by_both[p, g] = by_both.get((p, g), 0) + 1
    precision = sum(by_both[p, g] / by_pred[p] for p, g in pairs) / n
    recall = sum(by_both[p, g] / by_gold[g] for p, g in pairs) / n
    return 2 * precision * recall / (precision + recall)


def score_pair(pred, gold):
    """(ED, NED, BC) for one prediction; merged tokens are expanded first.

    An empty prediction has no slots to compare and scores BC 0.
    """
    pred, gold = expand_tokens(pred), expand_tokens(gold)
    bc = bcubed_f(pred, gold) if pred and gold else float(pred == gold)
    return edit_distance(pred, gold), ned(pred, gold), bc


def evaluate(pairs) -> EvalReport:
    """Unweighted means of ED, NED and BC over (pred, gold) pairs."""
    scores = [score_pair(p, g) for p, g in pairs]
    if not scores:
        raise ValueError("nothing to evaluate")
    n = len(scores)
    return EvalReport(
        sum(s[0] for s in scores) / n,
        sum(s[1] for s in scores) / n,
        sum(s[2] for s in scores) / n,
        n,
    )


def mean_report(reports) -> EvalReport:
    """Average of per-trial reports; n is the total item count."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports")
    k = len(reports)
    return EvalReport(
        sum(r.ed for r in reports) / k,
        sum(r.ned for r in reports) / k,
        sum(r.bc for r in reports) / k,
        sum(r.n for r in reports),
    )


REPORT_COLUMNS = ("CLASSIFIER", "ANALYSIS", "ED", "NED", "BC")


def format_report(rows, digits=4):
    """Result table as TSV. ``rows`` holds (classifier, analysis, EvalReport)."""
    lines = ["\t".join(REPORT_COLUMNS)]
    for clf, analysis, rep in rows:
        lines.append("\t".join([clf, analysis] + [f"{v:.{digits}f}" for v in (rep.ed, rep.ned, rep.bc)]))
    return "\n".join(lines) + "\n"
