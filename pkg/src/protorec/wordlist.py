"""Reading tokenized multilingual wordlists and grouping them into cognate sets."""

from __future__ import annotations

from dataclasses import dataclass, field

GAP = "-"
MISSING = "Ø"
UNKNOWN = "¿"
MERGE = "."

REQUIRED_COLUMNS = ("ID", "LANGUAGE", "CONCEPT", "TOKENS", "COGID")
COLUMN_ALIASES = {"DOCULECT": "LANGUAGE"}


class DataError(Exception):
    """Base class for problems with user-supplied data."""


class FormatError(DataError):
    pass


class DuplicateIdError(DataError):
    pass


class EmptyFormError(DataError):
    pass


class DuplicateReflexError(DataError):
    pass


class UnknownLanguageError(DataError):
    pass


@dataclass(frozen=True)
class WordForm:
    id: str
    language: str
    concept: str
    tokens: tuple[str, ...]
    cogid: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise EmptyFormError(f"form {self.id!r} has no tokens")
        for tok in self.tokens:
            check_token(tok, where=f"form {self.id!r}")


def check_token(tok, where=""):
    """Reject tokens that collide with the structural markers used downstream.

    "." is forbidden inside tokens because merged proto tokens are joined
    with it and split on it again when forms are rebuilt.
    """
    if not tok:
        raise FormatError(f"empty token in {where}")
    if tok in (GAP, MISSING, UNKNOWN):
        raise FormatError(f"reserved symbol {tok!r} used as a token in {where}")
    if MERGE in tok:
        raise FormatError(f"token {tok!r} in {where} contains the merge separator {MERGE!r}")


@dataclass(frozen=True)
class Wordlist:
    forms: tuple[WordForm, ...] = ()
    languages: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        langs = list(self.languages)
        for form in self.forms:
            if form.language not in langs:
                langs.append(form.language)
        object.__setattr__(self, "languages", tuple(langs))

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def to_tsv(self):
        lines = ["\t".join(REQUIRED_COLUMNS)]
        for f in self.forms:
            lines.append("\t".join([f.id, f.language, f.concept, " ".join(f.tokens), f.cogid]))
        return "\n".join(lines) + "\n"


@dataclass
class CognateSet:
    cogid: str
    proto: WordForm | None = None
    reflexes: dict[str, WordForm] = field(default_factory=dict)

    @property
    def usable(self):
        """True when the set can be used for training."""
        return self.proto is not None and bool(self.reflexes)

    @property
    def concept(self):
        if self.proto is not None:
            return self.proto.concept
        return next(iter(self.reflexes.values())).concept if self.reflexes else ""

    def __len__(self):
        return len(self.reflexes) + (self.proto is not None)


def parse_wordlist(text: str) -> Wordlist:
    """Parse a tab-separated wordlist with a header row.

    Required columns (case-insensitive): ID, LANGUAGE (or DOCULECT),
    CONCEPT, TOKENS, COGID.  Other columns are ignored.  TOKENS holds the
    segmented form with single spaces between sounds.
    """
    lines = text.splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
    if not lines:
        raise FormatError("no header row")
    header = [h.strip().upper() for h in lines[0].split("\t")]
    header = [COLUMN_ALIASES.get(h, h) for h in header]
    idx = {}
    for i, name in enumerate(header):
        idx.setdefault(name, i)
    for col in REQUIRED_COLUMNS:
        if col not in idx:
            raise FormatError(f"missing required column {col}")

    forms = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) < len(header):
            cells += [""] * (len(header) - len(cells))
        get = lambda col: cells[idx[col]].strip()
        fid = get("ID")
        if fid in seen:
            raise DuplicateIdError(f"duplicate ID {fid!r} (row {lineno})")
        seen.add(fid)
        raw = cells[idx["TOKENS"]].strip(" \r\n")
        if not raw.strip():
            raise EmptyFormError(f"empty TOKENS cell in row {lineno}")
        tokens = raw.split(" ")
        try:
            forms.append(WordForm(fid, get("LANGUAGE"), get("CONCEPT"), tokens, get("COGID")))
        except DataError as exc:
            raise type(exc)(f"row {lineno}: {exc}") from None
    return Wordlist(tuple(forms))


def read_wordlist(path) -> Wordlist:
    with open(path, encoding="utf-8") as handle:
        return parse_wordlist(handle.read())


def cognate_sets(wl: Wordlist, proto_language: str) -> list[CognateSet]:
    """Group forms by COGID, sets ordered by first appearance."""
    if proto_language not in wl.languages:
        raise UnknownLanguageError(f"proto-language {proto_language!r} not in wordlist")
    sets: dict[str, CognateSet] = {}
    for form in wl.forms:
        cset = sets.setdefault(form.cogid, CognateSet(form.cogid))
        if form.language == proto_language:
            if cset.proto is not None:
                raise DuplicateReflexError(
                    f"cognate set {form.cogid!r} has two forms for {form.language!r}")
            cset.proto = form
        else:
            if form.language in cset.reflexes:
                raise DuplicateReflexError(
                    f"cognate set {form.cogid!r} has two forms for {form.language!r}")
            cset.reflexes[form.language] = form
    return list(sets.values())
