"""Turning trimmed alignments into classifier-ready sites with optional context."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .alignment import DEFAULT_CLASS_MAP, Alignment, SoundClassMap
from .wordlist import GAP, MISSING

PROSODY_ORDER = ("C", "V", "c", "v", "T")
INITIAL, FINAL, MEDIAL = "^", "$", "-"


@dataclass(frozen=True)
class ContextConfig:
    pos: bool = False
    str: bool = False
    ini: bool = False

    @property
    def name(self):
        """Label as used in result tables: "PosStrIni" ... "none"."""
        label = "".join(n for n, on in (("Pos", self.pos), ("Str", self.str), ("Ini", self.ini)) if on)
        return label or "none"

    @property
    def slots(self):
        return tuple(s for s, on in (("POS", self.pos), ("STR", self.str), ("INI", self.ini)) if on)

    @classmethod
    def parse(cls, text):
        """Accept "pos,str,ini", "none" or a table label such as "StrIni"."""
        text = text.strip()
        if text.lower() in ("", "none"):
            return cls()
        parts = [p.strip().lower() for p in text.split(",")] if "," in text else None
        if parts is None:
            low = text.lower()
            parts = []
            for name in ("pos", "str", "ini"):
                if name in low:
                    parts.append(name)
                    low = low.replace(name, "", 1)
            if low:
                raise ValueError(f"unknown context coding {text!r}")
        unknown = set(parts) - {"pos", "str", "ini"}
        if unknown:
            raise ValueError(f"unknown context coding(s): {', '.join(sorted(unknown))}")
        return cls("pos" in parts, "str" in parts, "ini" in parts)

    def __str__(self):
        return self.name


# the eight codings, ordered as in the result tables
ALL_CONTEXTS = tuple(
    ContextConfig(p, s, i) for p, s, i in
    sorted(product((True, False), repeat=3), key=lambda c: (-sum(c), not c[0], not c[1], not c[2]))
)


@dataclass(frozen=True)
class EnrichedSite:
    reflexes: dict
    pos: int | None = None
    str: str | None = None
    ini: str | None = None
    label: str | None = None

    def context_values(self, cfg: ContextConfig):
        values = []
        if cfg.pos:
            values.append(str(self.pos))
        if cfg.str:
            values.append(self.str)
        if cfg.ini:
            values.append(self.ini)
        return tuple(values)

    def key(self, languages, cfg: ContextConfig):
        """Reflex cells in the given language order followed by context values."""
        return tuple(self.reflexes.get(lang, MISSING) for lang in languages) + self.context_values(cfg)


def prosodic_profile(tokens, scm: SoundClassMap = DEFAULT_CLASS_MAP):
    """Per-token prosodic role.

    C consonant before the first vowel, V first vowel, c later consonant,
    v later vowel, T tone.
    """
    out = []
    seen_vowel = False
    for cls in scm.classes(tokens):
        if cls == "1":
            out.append("T")
        elif cls == "V":
            out.append("v" if seen_vowel else "V")
            seen_vowel = True
        else:
            out.append("c" if seen_vowel else "C")
    return out


def _majority(symbols):
    counts = Counter(symbols)
    best = max(counts.values())
    return next(s for s in PROSODY_ORDER if counts.get(s) == best)


def enrich(tal: Alignment, cfg: ContextConfig, scm: SoundClassMap = DEFAULT_CLASS_MAP,
           missing=()) -> list[EnrichedSite]:
    """One site per alignment column.

    ``tal`` is a trimmed training alignment or a plain alignment of reflexes;
    the proto row, when present, supplies the site label.  Languages in
    ``missing`` are coded "Ø" in every site.
    """
    proto_index = getattr(tal, "proto_index", None)
    desc = [i for i in range(len(tal.rows)) if i != proto_index]
    missing = [m for m in missing if m not in tal.languages]

    profiles = {}
    if cfg.str:
        for i in desc:
            prof = iter(prosodic_profile(tal.ungapped(i), scm))
            profiles[i] = [next(prof) if tok != GAP else None for tok in tal.rows[i]]

    width = tal.width
    sites = []
    for c in range(width):
        reflexes = {tal.languages[i]: tal.rows[i][c] for i in desc}
        for lang in missing:
            reflexes[lang] = MISSING
        pros = None
        if cfg.str:
            pros = _majority([profiles[i][c] for i in desc if profiles[i][c] is not None])
        ini = None
        if cfg.ini:
            ini = INITIAL if c == 0 else FINAL if c == width - 1 else MEDIAL
        sites.append(EnrichedSite(
            reflexes,
            pos=c + 1 if cfg.pos else None,
            str=pros,
            ini=ini,
            label=tal.rows[proto_index][c] if proto_index is not None else None,
        ))
    return sites


def format_sites(sites, cfg: ContextConfig, languages=None):
    """Debug dump of sites in transposed layout: reflexes, then P/S/Ini."""
    if not sites:
        return ""
    languages = languages or list(sites[0].reflexes)
    header = list(languages) + [{"POS": "P", "STR": "S", "INI": "Ini"}[s] for s in cfg.slots]
    if sites[0].label is not None:
        header.append("PROTO")
    lines = ["\t".join(header)]
    for site in sites:
        row = list(site.key(languages, cfg))
        if site.label is not None:
            row.append(site.label)
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"
