"""Training and prediction pipelines and the cross-validation driver."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .alignment import DEFAULT_CLASS_MAP, SoundClassMap, TrimmedAlignment, cached_alignment, trim
from .context import ContextConfig, enrich
from .corpar import CorparModel, corpar_predict, corpar_train, format_patterns, parse_patterns
from .evaluation import EvalReport, evaluate, mean_report
from .prng import shuffled
from .svm import LinearModel, SVMConfig, dump_model, load_model, svm_predict, svm_train
from .wordlist import GAP, MERGE, CognateSet, DataError, Wordlist, cognate_sets

CLASSIFIERS = ("svm", "corpar")
MIN_SETS = 10
MODEL_FORMAT = 1


class ExperimentError(DataError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    proto_language: str
    classifier: str = "svm"
    context: ContextConfig = ContextConfig()
    trials: int = 100
    train_fraction: float = 0.9
    seed: int = 0
    svm: SVMConfig = SVMConfig()

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class TrainedReconstructor:
    classifier: str
    model: LinearModel | CorparModel
    context: ContextConfig
    languages: tuple
    proto_language: str
    class_map: SoundClassMap = field(default=DEFAULT_CLASS_MAP, compare=False)
    # cognate sets whose sites went into training
    sources: frozenset = frozenset()

    def predict_site(self, site):
        if self.classifier == "svm":
            return svm_predict(site, self.model)
        return corpar_predict(site, self.model)


def descendant_languages(sets, proto_language=None):
    langs = []
    for cset in sets:
        for lang in cset.reflexes:
            if lang != proto_language and lang not in langs:
                langs.append(lang)
    return tuple(langs)


def training_alignment(cset: CognateSet, languages) -> TrimmedAlignment:
    present = [lang for lang in languages if lang in cset.reflexes]
    words = (cset.proto.tokens,) + tuple(cset.reflexes[lang].tokens for lang in present)
    al = cached_alignment(words, (cset.proto.language,) + tuple(present))
    return trim(al, 0)


def training_sites(cset: CognateSet, languages, context: ContextConfig, scm=DEFAULT_CLASS_MAP):
    tal = training_alignment(cset, languages)
    missing = [lang for lang in languages if lang not in cset.reflexes]
    return enrich(tal, context, scm, missing)


def train_pipeline(sets, cfg: ExperimentConfig, languages=None) -> TrainedReconstructor:
    """Align, trim, enrich and fit the configured classifier on all usable sets."""
    usable = [s for s in sets if s.usable]
    if not usable:
        raise ExperimentError("no usable cognate sets (need a proto form and at least one reflex)")
    if languages is None:
        languages = descendant_languages(usable, cfg.proto_language)
    languages = tuple(languages)
    sites = []
    for cset in usable:
        sites.extend(training_sites(cset, languages, cfg.context))
    if cfg.classifier == "svm":
        model = svm_train(sites, cfg.svm, languages, cfg.context)
    else:
        model = corpar_train(sites, languages, cfg.context)
    return TrainedReconstructor(cfg.classifier, model, cfg.context, languages, cfg.proto_language,
                                sources=frozenset(s.cogid for s in usable))


def _reflex_tokens(reflexes):
    out = {}
    for lang, form in reflexes.items():
        tokens = getattr(form, "tokens", form)
        if tokens:
            out[lang] = tuple(tokens)
    return out


def predict_labels(model: TrainedReconstructor, reflexes):
    """Per-column proto labels for a set of reflexes (language -> tokens)."""
    tokens = _reflex_tokens(reflexes)
    present = [lang for lang in model.languages if lang in tokens]
    if not present:
        raise ExperimentError("no reflexes in a language known to the model")
    al = cached_alignment(tuple(tokens[lang] for lang in present), tuple(present))
    missing = [lang for lang in model.languages if lang not in tokens]
    sites = enrich(TrimmedAlignment(al.languages, al.rows, None), model.context, model.class_map, missing)
    return [model.predict_site(site) for site in sites]


def predict_pipeline(model: TrainedReconstructor, reflexes):
    """Reconstruct a proto form as a token list; gaps vanish and merged labels split."""
    out = []
    for label in predict_labels(model, reflexes):
        if label == GAP:
            continue
        out.extend(label.split(MERGE))
    if not out:
        warnings.warn("every column was predicted as a gap; reconstruction is empty", stacklevel=2)
    return out


def usable_sets(wl: Wordlist, proto_language):
    return [s for s in cognate_sets(wl, proto_language) if s.usable]


def split_sets(usable, train_fraction, seed):
    """Shuffle sets with SplitMix64(seed) and cut at the train fraction."""
    order = shuffled(usable, seed)
    n = len(order)
    n_train = math.floor(round(n * train_fraction, 9))
    n_train = min(max(n_train, 1), n - 1)
    return order[:n_train], order[n_train:]


@dataclass
class TrialResult:
    trial: int
    classifier: str
    analysis: str
    report: EvalReport
    train_ids: tuple
    test_ids: tuple
    sources: frozenset
    predictions: list  # (cogid, predicted tokens, gold tokens)


def run_trial(usable, languages, cfg: ExperimentConfig, analyses, trial) -> list[TrialResult]:
    train, test = split_sets(usable, cfg.train_fraction, cfg.seed + trial)
    results = []
    for clf, ctx in analyses:
        sub = ExperimentConfig(cfg.proto_language, clf, ctx, cfg.trials, cfg.train_fraction,
                               cfg.seed, cfg.svm)
        model = train_pipeline(train, sub, languages)
        preds = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for cset in test:
                preds.append((cset.cogid, predict_pipeline(model, cset.reflexes), list(cset.proto.tokens)))
        report = evaluate([(p, g) for _, p, g in preds])
        results.append(TrialResult(trial, clf, ctx.name, report,
                                   tuple(s.cogid for s in train), tuple(s.cogid for s in test),
                                   model.sources, preds))
    return results


def _run_trial_star(args):
    return run_trial(*args)


def crossval_trials(wl: Wordlist, cfg: ExperimentConfig, analyses=None, jobs=1):
    """Per-trial results, ordered by trial then by analysis."""
    if analyses is None:
        analyses = [(cfg.classifier, cfg.context)]
    analyses = list(analyses)
    usable = usable_sets(wl, cfg.proto_language)
    if len(usable) < MIN_SETS:
        raise ExperimentError(
            f"cross-validation needs at least {MIN_SETS} usable cognate sets, found {len(usable)}")
    languages = tuple(l for l in wl.languages if l != cfg.proto_language)
    tasks = [(usable, languages, cfg, analyses, t) for t in range(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_run_trial_star, tasks))
    else:
        per_trial = [run_trial(*task) for task in tasks]
    return [r for trial in per_trial for r in trial]


def crossval(wl: Wordlist, cfg: ExperimentConfig, analyses=None, jobs=1) -> dict:
    """Mean report over trials for each requested (classifier, context)."""
    results = crossval_trials(wl, cfg, analyses, jobs)
    grouped = {}
    for r in results:
        grouped.setdefault((r.classifier, r.analysis), []).append(r.report)
    return {key: mean_report(reps) for key, reps in grouped.items()}


def dump_reconstructor(model: TrainedReconstructor):
    head = [
        f"# protorec-model {MODEL_FORMAT}",
        f"classifier\t{model.classifier}",
        f"proto\t{model.proto_language}",
        "languages\t" + "\t".join(model.languages),
        f"context\t{model.context.name}",
        "---",
    ]
    body = dump_model(model.model) if model.classifier == "svm" else format_patterns(model.model)
    return "\n".join(head) + "\n" + body


def load_reconstructor(text) -> TrainedReconstructor:
    head, sep, body = text.partition("\n---\n")
    lines = head.splitlines()
    if not sep or not lines or not lines[0].startswith("# protorec-model "):
        raise DataError("not a protorec model file")
    version = int(lines[0].split()[-1])
    if version != MODEL_FORMAT:
        raise DataError(f"unsupported model format {version}")
    meta = {}
    for line in lines[1:]:
        key, _, value = line.partition("\t")
        meta[key] = value
    languages = tuple(meta["languages"].split("\t"))
    context = ContextConfig.parse(meta["context"])
    if meta["classifier"] == "svm":
        inner = load_model(body)
    elif meta["classifier"] == "corpar":
        inner = parse_patterns(body, languages, context)
    else:
        raise DataError(f"unknown classifier {meta['classifier']!r}")
    return TrainedReconstructor(meta["classifier"], inner, context, languages, meta["proto"])
