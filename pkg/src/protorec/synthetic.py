"""Toy language family evolved from a random proto-lexicon by regular sound laws.

Every daughter applies context-free substitutions; daughter C also changes
word-initial *p to f, and all daughters drop a word-final *e, which leaves
a descendant-less proto column for trimming to fold away.  Each proto
sound stays recoverable from the daughters jointly, so a classifier with
word-boundary context can reconstruct the lexicon without error.
"""

from __future__ import annotations

from .harness import split_sets, training_sites, usable_sets
from .context import ContextConfig
from .prng import SplitMix64
from .wordlist import WordForm, Wordlist

PROTO = "Proto"
CONSONANTS = ("p", "t", "k", "b", "d", "g", "s", "m", "n", "l", "r")
VOWELS = ("a", "e", "i", "o", "u")
LOST_FINAL = "e"

SUBSTITUTIONS = {
    "A": {"d": "t", "b": "v"},
    "B": {"g": "k", "o": "u", "e": "i"},
    "C": {"b": "p", "s": "ʃ", "u": "y"},
    "D": {"l": "r", "t": "θ", "a": "ə"},
}
INITIAL_CHANGES = {"C": {"p": "f"}}


def evolve(proto, daughter):
    """Apply one daughter's sound laws to a proto token sequence."""
    tokens = list(proto)
    if tokens and tokens[-1] == LOST_FINAL and len(tokens) > 1:
        tokens = tokens[:-1]
    subs = SUBSTITUTIONS[daughter]
    out = [subs.get(t, t) for t in tokens]
    initial = INITIAL_CHANGES.get(daughter, {})
    if tokens and tokens[0] in initial:
        out[0] = initial[tokens[0]]
    return out


def proto_word(rng, syllables, final_e_rate):
    word = []
    for k in range(syllables):
        word.append(rng.choice(CONSONANTS))
        last = k == syllables - 1
        if last and rng.random() < final_e_rate:
            word.append(LOST_FINAL)
        else:
            word.append(rng.choice(VOWELS))
    return word


def generate_family(n_words=400, seed=1, final_e_rate=0.4, drop_rate=0.0):
    """Wordlist with a proto language and daughters A-D, one cognate set per word.

    ``drop_rate`` removes daughter reflexes at random (never all of them).
    """
    rng = SplitMix64(seed)
    forms = []
    daughters = tuple(SUBSTITUTIONS)
    for w in range(n_words):
        proto = proto_word(rng, 2 if rng.random() < 0.6 else 3, final_e_rate)
        cogid = str(w + 1)
        concept = f"concept-{w + 1}"
        forms.append(WordForm(f"{cogid}-{PROTO}", PROTO, concept, proto, cogid))
        keep = [d for d in daughters if not (drop_rate and rng.random() < drop_rate)] or [daughters[0]]
        for d in keep:
            forms.append(WordForm(f"{cogid}-{d}", d, concept, evolve(proto, d), cogid))
    return Wordlist(tuple(forms), (PROTO,) + daughters)


def coverage_gaps(wl, context: ContextConfig, trials, train_fraction=0.9, seed=0, proto=PROTO):
    """Site keys that occur in a held-out split but never in its training split.

    Returns a list of (trial, key) for the given cross-validation protocol.
    """
    usable = usable_sets(wl, proto)
    languages = tuple(l for l in wl.languages if l != proto)
    keys = {}
    for cset in usable:
        keys[cset.cogid] = {s.key(languages, context) for s in training_sites(cset, languages, context)}
    gaps = []
    for t in range(trials):
        train, test = split_sets(usable, train_fraction, seed + t)
        seen = set().union(*(keys[s.cogid] for s in train))
        for cset in test:
            for key in sorted(keys[cset.cogid] - seen):
                gaps.append((t, key))
    return gaps


def covered_family(context: ContextConfig, trials, train_fraction=0.9, seed=0,
                   n_words=400, family_seed=1, attempts=20, **kwargs):
    """Generate families until every held-out pattern is attested in training.

    Tries successive family seeds; raises if none of ``attempts`` qualifies.
    """
    for k in range(attempts):
        wl = generate_family(n_words, family_seed + k, **kwargs)
        if not coverage_gaps(wl, context, trials, train_fraction, seed):
            return wl
    raise RuntimeError("could not generate a family with full pattern coverage")
