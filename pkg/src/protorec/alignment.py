"""Sound-class scored global alignment, progressive multiple alignment and trimming.

Scoring follows a simplified sound-class approach: tokens are reduced to a
small set of classes and scored by class identity.  Columns whose
descendant cells are all gaps are folded into their neighbour by
:func:`trim`, so that every column of a training alignment carries at least
one reflex.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache

from .wordlist import GAP, MERGE, DataError

CLASSES = ("P", "T", "K", "S", "N", "L", "R", "W", "Y", "V", "H", "1")
FALLBACK_CLASS = "?"

_CHAR_CLASSES = {
    "P": "pbfvɸβʙ",
    "T": "tdθðʈɖ",
    "K": "kgqɢxɣχʁcɟɡ",
    "S": "szʃʒɕʑʂʐçʝ",
    "N": "mnɲŋɳɴɱ",
    "L": "lɫʎɭɬɮʟ",
    "R": "rɾʀɹɻɽ",
    "W": "wʋʍɥ",
    "Y": "j",
    "V": "aeiouyɛɔəɐɑæɪʊɯøœɨʉɒʌɤɘɵɞɜɶɚAEIOUY",
    "H": "hɦʔħʕ",
    "1": "0123456789⁰¹²³⁴⁵⁶⁷⁸⁹˥˦˧˨˩",
}

# multi-character tokens whose first character would mislead
_TOKEN_CLASSES = {
    "ts": "T", "dz": "T", "tʃ": "T", "dʒ": "T", "tɕ": "T", "dʑ": "T",
    "ʈʂ": "T", "ɖʐ": "T", "tʂ": "T", "dʐ": "T", "pf": "P", "kx": "K",
}

COMPATIBLE = frozenset(frozenset(p) for p in [
    ("T", "S"), ("K", "H"), ("L", "R"), ("W", "V"), ("Y", "V"), ("W", "Y"),
])


class SoundClassMap:
    """Total map from sound tokens to class symbols."""

    def __init__(self, extra=None):
        self.chars = {ch: cls for cls, chars in _CHAR_CLASSES.items() for ch in chars}
        self.tokens = dict(_TOKEN_CLASSES)
        if extra:
            self.tokens.update(extra)
        self._cache = {}

    def __call__(self, token):
        try:
            return self._cache[token]
        except KeyError:
            pass
        cls = self.tokens.get(token)
        if cls is None:
            base = unicodedata.normalize("NFD", token)
            cls = self.chars.get(base[:1], FALLBACK_CLASS) if base else FALLBACK_CLASS
        self._cache[token] = cls
        return cls

    def classes(self, tokens):
        return [self(t) for t in tokens]


DEFAULT_CLASS_MAP = SoundClassMap()


@dataclass(frozen=True)
class ScoringScheme:
    match: int = 2
    compatible: int = 1
    mismatch: int = -1
    gap: int = -1
    compatible_pairs: frozenset = COMPATIBLE
    class_map: SoundClassMap = field(default=DEFAULT_CLASS_MAP, compare=False, hash=False)

    def __post_init__(self):
        if self.gap >= 0:
            raise ValueError("gap penalty must be negative")
        if not self.match >= self.compatible >= self.mismatch:
            raise ValueError("scores must satisfy match >= compatible >= mismatch")

    def class_score(self, a, b):
        if a == b:
            return self.match
        if frozenset((a, b)) in self.compatible_pairs:
            return self.compatible
        return self.mismatch

    def __call__(self, x, y):
        return self.class_score(self.class_map(x), self.class_map(y))


DEFAULT_SCHEME = ScoringScheme()


class AlignmentError(DataError):
    pass


class UntrimmableError(AlignmentError):
    pass


@dataclass(frozen=True)
class Alignment:
    languages: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(self.languages) != len(self.rows):
            raise AlignmentError("one language name per row required")
        if len({len(r) for r in self.rows}) > 1:
            raise AlignmentError("rows differ in length")
        for c in range(self.width):
            if all(r[c] == GAP for r in self.rows):
                raise AlignmentError(f"column {c} consists of gaps only")

    @property
    def width(self):
        return len(self.rows[0]) if self.rows else 0

    def column(self, c):
        return tuple(r[c] for r in self.rows)

    def ungapped(self, i):
        return [t for t in self.rows[i] if t != GAP]


@dataclass(frozen=True)
class TrimmedAlignment(Alignment):
    """Alignment with a designated proto row (or none, at prediction time).

    Proto cells may hold merged tokens such as ``"r.E"``.
    """
    proto_index: int | None = None

    @property
    def descendant_indices(self):
        return [i for i in range(len(self.rows)) if i != self.proto_index]

    @property
    def proto_row(self):
        return None if self.proto_index is None else self.rows[self.proto_index]

    def proto_tokens(self):
        """Original proto token sequence, merges undone and gaps dropped."""
        return expand_tokens(self.proto_row)


def expand_tokens(cells):
    out = []
    for cell in cells:
        if cell == GAP:
            continue
        out.extend(p for p in cell.split(MERGE) if p and p != GAP)
    return out


def _global_dp(n, m, sub, gap):
    """Needleman-Wunsch with linear gaps.

    Returns (score, ops) where ops is a list of "D" (pair), "U" (item of the
    first sequence against a gap) and "L" (gap against the second).  On ties
    traceback prefers D, then U, then L.
    """
    S = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        S[i][0] = S[i - 1][0] + gap
    for j in range(1, m + 1):
        S[0][j] = S[0][j - 1] + gap
    for i in range(1, n + 1):
        prev, cur = S[i - 1], S[i]
        for j in range(1, m + 1):
            d = prev[j - 1] + sub(i - 1, j - 1)
            u = prev[j] + gap
            l = cur[j - 1] + gap
            cur[j] = d if d >= u and d >= l else (u if u >= l else l)

    ops = []
    i, j = n, m
    while i or j:
        if i and j and S[i][j] == S[i - 1][j - 1] + sub(i - 1, j - 1):
            ops.append("D")
            i -= 1
            j -= 1
        elif i and S[i][j] == S[i - 1][j] + gap:
            ops.append("U")
            i -= 1
        else:
            ops.append("L")
            j -= 1
    ops.reverse()
    return S[n][m], ops


def align_pairwise(a, b, scheme: ScoringScheme = DEFAULT_SCHEME):
    """Optimal global alignment of two token sequences.

    >>> align_pairwise(list("kato"), list("kto"))[:2]
    (['k', 'a', 't', 'o'], ['k', '-', 't', 'o'])
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise AlignmentError("cannot align an empty sequence")
    ca, cb = scheme.class_map.classes(a), scheme.class_map.classes(b)
    score, ops = _global_dp(len(a), len(b), lambda i, j: scheme.class_score(ca[i], cb[j]), scheme.gap)
    out_a, out_b = [], []
    i = j = 0
    for op in ops:
        if op == "D":
            out_a.append(a[i]); out_b.append(b[j]); i += 1; j += 1
        elif op == "U":
            out_a.append(a[i]); out_b.append(GAP); i += 1
        else:
            out_a.append(GAP); out_b.append(b[j]); j += 1
    return out_a, out_b, score


def alignment_score(row_a, row_b, scheme: ScoringScheme = DEFAULT_SCHEME):
    """Score of an existing pairwise alignment; gap against gap scores 0."""
    total = 0
    for x, y in zip(row_a, row_b):
        if x == GAP and y == GAP:
            continue
        if x == GAP or y == GAP:
            total += scheme.gap
        else:
            total += scheme(x, y)
    return total


def align_multiple(words, scheme: ScoringScheme = DEFAULT_SCHEME, languages=None) -> Alignment:
    """Progressive alignment, joining words in the given order.

    Each new word is aligned against the profile of the alignment built so
    far; a profile column scores against a token by the mean class score of
    its non-gap cells.
    """
    words = [list(w) for w in words]
    if not words or any(not w for w in words):
        raise AlignmentError("need at least one word and no empty words")
    if languages is None:
        languages = [str(i) for i in range(len(words))]
    cmap = scheme.class_map
    rows = [list(words[0])]
    # per column: list of classes of its non-gap cells
    profile = [[c] for c in cmap.classes(words[0])]
    for word in words[1:]:
        wc = cmap.classes(word)
        cache = {}

        def sub(i, j):
            key = (i, wc[j])
            if key not in cache:
                col = profile[i]
                cache[key] = sum(scheme.class_score(c, wc[j]) for c in col) / len(col)
            return cache[key]

        _, ops = _global_dp(len(profile), len(word), sub, scheme.gap)
        new_rows = [[] for _ in range(len(rows) + 1)]
        new_profile = []
        i = j = 0
        for op in ops:
            if op == "D":
                for r, row in enumerate(rows):
                    new_rows[r].append(row[i])
                new_rows[-1].append(word[j])
                new_profile.append(profile[i] + [wc[j]])
                i += 1
                j += 1
            elif op == "U":
                for r, row in enumerate(rows):
                    new_rows[r].append(row[i])
                new_rows[-1].append(GAP)
                new_profile.append(profile[i])
                i += 1
            else:
                for r in range(len(rows)):
                    new_rows[r].append(GAP)
                new_rows[-1].append(word[j])
                new_profile.append([wc[j]])
                j += 1
        rows, profile = new_rows, new_profile
    return Alignment(tuple(languages), tuple(tuple(r) for r in rows))


@lru_cache(maxsize=65536)
def cached_alignment(words: tuple, languages: tuple) -> Alignment:
    """align_multiple with the default scheme, memoised on the input words."""
    return align_multiple(words, DEFAULT_SCHEME, languages)


def trim(al: Alignment, proto_index: int) -> TrimmedAlignment:
    """Fold columns without descendant material into a neighbouring column.

    Such a column's proto cell is appended (joined with ".") to the nearest
    preceding surviving column; columns before the first surviving column
    are prepended to it instead.  Gap proto cells add nothing.
    """
    if len(al.rows) < 2:
        raise AlignmentError("trimming needs a proto row and at least one descendant row")
    if not 0 <= proto_index < len(al.rows):
        raise AlignmentError(f"proto index {proto_index} out of range")
    proto = al.rows[proto_index]
    desc = [r for k, r in enumerate(al.rows) if k != proto_index]
    keep = [any(r[c] != GAP for r in desc) for c in range(al.width)]
    if not any(keep):
        raise UntrimmableError("no column has descendant material")

    merged = []   # proto parts per surviving column
    kept = []     # surviving column indices
    leading = []
    for c in range(al.width):
        part = [] if proto[c] == GAP else [proto[c]]
        if keep[c]:
            merged.append(leading + part)
            kept.append(c)
            leading = []
        elif merged:
            merged[-1].extend(part)
        else:
            leading.extend(part)

    rows = []
    for k, row in enumerate(al.rows):
        if k == proto_index:
            rows.append(tuple(MERGE.join(p) if p else GAP for p in merged))
        else:
            rows.append(tuple(row[c] for c in kept))
    return TrimmedAlignment(al.languages, tuple(rows), proto_index)


def format_alignment(al: Alignment):
    """Debug rendering: one tab-separated line per row, language first."""
    return "\n".join("\t".join((lang,) + row) for lang, row in zip(al.languages, al.rows)) + "\n"
