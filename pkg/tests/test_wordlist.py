import pytest
from hypothesis import given, strategies as st

from protorec.wordlist import (DuplicateIdError, DuplicateReflexError, EmptyFormError, FormatError,
                               UnknownLanguageError, WordForm, Wordlist, cognate_sets, parse_wordlist)

HEADER = "ID\tLANGUAGE\tCONCEPT\tTOKENS\tCOGID\n"


def test_header_only():
    wl = parse_wordlist(HEADER)
    assert len(wl) == 0


def test_single_row():
    wl = parse_wordlist(HEADER + "1\tLatin\thand\tm a n u s\t7\n")
    (form,) = wl.forms
    assert form == WordForm("1", "Latin", "hand", ("m", "a", "n", "u", "s"), "7")
    assert wl.languages == ("Latin",)


def test_duplicate_id():
    text = HEADER + "1\tLatin\thand\tm a n u s\t7\n1\tItalian\thand\tm a n o\t7\n"
    with pytest.raises(DuplicateIdError, match="'1'"):
        parse_wordlist(text)


def test_missing_column_named():
    with pytest.raises(FormatError, match="COGID"):
        parse_wordlist("ID\tLANGUAGE\tCONCEPT\tTOKENS\n1\tA\tx\ta\n")


def test_empty_tokens_reports_row():
    with pytest.raises(EmptyFormError, match="row 3"):
        parse_wordlist(HEADER + "1\tA\tx\ta\t1\n2\tB\tx\t\t1\n")


@pytest.mark.parametrize("bad", ["a - b", "a Ø", "a ¿", "a r.E", "a  b"])
def test_reserved_symbols_rejected(bad):
    with pytest.raises(FormatError):
        parse_wordlist(HEADER + f"1\tA\tx\t{bad}\t1\n")


def test_aliases_case_and_extra_columns():
    text = "id\tdoculect\tconcept\tform\ttokens\tcogid\tnote\n1\tA\thand\tmanus\tm a\t3\tx\n"
    (form,) = parse_wordlist(text).forms
    assert form.language == "A" and form.tokens == ("m", "a") and form.cogid == "3"


def test_cognate_sets_grouping():
    text = HEADER + "".join([
        "1\tP\tx\tk a\t7\n", "2\tA\tx\tk a\t7\n", "3\tP\ty\tt u\t9\n",
        "4\tA\ty\tt u\t9\n", "5\tB\tx\tg a\t7\n"])
    sets = cognate_sets(parse_wordlist(text), "P")
    assert [s.cogid for s in sets] == ["7", "9"]
    assert sets[0].proto.id == "1"
    assert list(sets[0].reflexes) == ["A", "B"]


def test_proto_only_set_is_not_usable():
    text = HEADER + "1\tP\tx\tk a\t7\n2\tA\ty\tt u\t9\n"
    sets = cognate_sets(parse_wordlist(text), "P")
    assert sets[0].reflexes == {} and not sets[0].usable


def test_duplicate_reflex():
    text = HEADER + "1\tA\tx\tk a\t7\n2\tA\tx\tg a\t7\n"
    with pytest.raises(DuplicateReflexError, match="'7'.*'A'"):
        cognate_sets(parse_wordlist(text), "A")


def test_unknown_proto_language():
    with pytest.raises(UnknownLanguageError):
        cognate_sets(parse_wordlist(HEADER + "1\tA\tx\tk a\t7\n"), "Latin")


tokens = st.lists(st.sampled_from(["p", "a", "tʃ", "ŋ", "e", "¹", "aː"]), min_size=1, max_size=6)
rows = st.lists(st.tuples(st.sampled_from(["A", "B", "Proto"]), st.sampled_from(["hand", "foot"]),
                          tokens, st.sampled_from(["1", "2", "3"])), max_size=20)


@given(rows)
def test_round_trip(data):
    forms = tuple(WordForm(str(i), lang, concept, toks, cog) for i, (lang, concept, toks, cog) in enumerate(data))
    wl = Wordlist(forms)
    again = parse_wordlist(wl.to_tsv())
    assert again.forms == wl.forms


@given(rows)
def test_every_form_in_exactly_one_set(data):
    seen = set()
    forms = []
    for i, (lang, concept, toks, cog) in enumerate(data):
        if (lang, cog) in seen:
            continue
        seen.add((lang, cog))
        forms.append(WordForm(str(i), lang, concept, toks, cog))
    wl = Wordlist(tuple(forms))
    if "Proto" not in wl.languages:
        return
    sets = cognate_sets(wl, "Proto")
    assert sum(len(s) for s in sets) == len(wl)
    ids = [f.id for s in sets for f in ([s.proto] if s.proto else []) + list(s.reflexes.values())]
    assert sorted(ids) == sorted(f.id for f in wl)
