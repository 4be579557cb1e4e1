"""Linear one-vs-rest SVM over one-hot coded sites, trained with Pegasos.

Pegasos without the projection step has a closed form: starting from
w_1 = 0 with step 1/(lambda t),

    w_{t+1} = (1 - 1/t) w_t + 1/(lambda t) * y_t x_t [margin violated]
            = A_t / (lambda t)

where A_t is the running sum of y x over all violating steps up to t.  With
binary features A_t is an integer matrix, so training is done on integer
accumulators (exact and platform independent) and the weights are scaled
once at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context import ContextConfig, EnrichedSite
from .prng import SplitMix64

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SVMConfig:
    lam: float = 1e-4
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")


class FeatureSpace:
    """(slot, symbol) -> column index; frozen once built."""

    def __init__(self, slots, index=None):
        self.slots = tuple(slots)
        self.index = dict(index or {})

    @classmethod
    def build(cls, sites, languages, context: ContextConfig):
        slots = tuple(languages) + context.slots
        index = {}
        for site in sites:
            for slot, value in zip(slots, site.key(languages, context)):
                index.setdefault((slot, value), len(index))
        return cls(slots, index)

    @property
    def dimension(self):
        return len(self.index)

    def __len__(self):
        return len(self.index)


def encode(site: EnrichedSite, fs: FeatureSpace, languages=None, context=None):
    """Sorted active feature indices; the bias (index ``fs.dimension``) is always last."""
    if languages is None:
        languages = [s for s in fs.slots if s not in ("POS", "STR", "INI")]
    if context is None:
        context = ContextConfig("POS" in fs.slots, "STR" in fs.slots, "INI" in fs.slots)
    active = []
    for slot, value in zip(fs.slots, site.key(languages, context)):
        idx = fs.index.get((slot, value))
        if idx is not None:
            active.append(idx)
    active.sort()
    active.append(fs.dimension)
    return active


@dataclass(frozen=True)
class LinearModel:
    classes: tuple
    weights: np.ndarray  # (n_classes, dimension + 1), bias last
    space: FeatureSpace
    languages: tuple
    context: ContextConfig
    config: SVMConfig

    def scores(self, active):
        return self.weights[:, active].sum(axis=1)


def svm_train(sites, cfg: SVMConfig = SVMConfig(), languages=None,
              context: ContextConfig = ContextConfig()) -> LinearModel:
    sites = list(sites)
    if not sites:
        raise ValueError("empty training set")
    if any(s.label is None for s in sites):
        raise ValueError("unlabelled training site")
    if languages is None:
        languages = tuple(sites[0].reflexes)
    fs = FeatureSpace.build(sites, languages, context)
    classes = tuple(sorted({s.label for s in sites}))
    class_idx = {c: i for i, c in enumerate(classes)}

    X = np.array([encode(s, fs, languages, context) for s in sites], dtype=np.int64)
    labels = np.array([class_idx[s.label] for s in sites], dtype=np.int64)
    n_classes, dim = len(classes), fs.dimension + 1

    acc = np.zeros((n_classes, dim), dtype=np.int64)
    rng = SplitMix64(cfg.seed)
    order = list(range(len(sites)))
    t = 0
    signs = np.empty(n_classes, dtype=np.int64)
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            cols = X[i]
            signs.fill(-1)
            signs[labels[i]] = 1
            # margin test y * A x / (lam (t-1)) < 1, kept in integers where possible
            margins = signs * acc[:, cols].sum(axis=1)
            if t == 1:
                viol = np.ones(n_classes, dtype=bool)
            else:
                viol = margins < cfg.lam * (t - 1)
            if viol.any():
                rows = np.flatnonzero(viol)
                acc[np.ix_(rows, cols)] += signs[rows, None]
    weights = acc / (cfg.lam * t)
    return LinearModel(classes, weights, fs, tuple(languages), context, cfg)


def svm_predict(site, model: LinearModel) -> str:
    """Highest-scoring class; ties go to the lexicographically smallest."""
    active = site if isinstance(site, (list, tuple, np.ndarray)) else encode(
        site, model.space, model.languages, model.context)
    scores = model.scores(active)
    return model.classes[int(np.argmax(scores))]


def objective(model: LinearModel, sites):
    """Regularised one-vs-rest hinge objective, summed over classes."""
    X = [encode(s, model.space, model.languages, model.context) for s in sites]
    total = 0.0
    for active, site in zip(X, sites):
        y = np.where(np.array(model.classes) == site.label, 1.0, -1.0)
        total += np.maximum(0.0, 1.0 - y * model.scores(active)).sum()
    reg = model.config.lam / 2 * float((model.weights ** 2).sum())
    return reg + total / len(sites)


def zero_objective(model: LinearModel):
    """Objective at w = 0: every class has hinge loss 1 on every site."""
    return float(len(model.classes))


def dump_model(model: LinearModel):
    """Versioned plain-text serialisation."""
    cfg = model.config
    lines = [
        f"# linear-svm {FORMAT_VERSION}",
        f"lambda\t{cfg.lam!r}",
        f"epochs\t{cfg.epochs}",
        f"seed\t{cfg.seed}",
        "languages\t" + "\t".join(model.languages),
        f"context\t{model.context.name}",
        f"features\t{model.space.dimension}",
    ]
    for (slot, value), idx in sorted(model.space.index.items(), key=lambda kv: kv[1]):
        lines.append(f"feature\t{idx}\t{slot}\t{value}")
    for label, row in zip(model.classes, model.weights):
        nz = np.flatnonzero(row)
        lines.append("class\t" + label + "\t" + " ".join(f"{j}:{float(row[j])!r}" for j in nz))
    return "\n".join(lines) + "\n"


def load_model(text) -> LinearModel:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# linear-svm "):
        raise ValueError("not a linear-svm model")
    version = int(lines[0].split()[-1])
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {version}")
    head = {}
    index = {}
    classes, rows = [], []
    for line in lines[1:]:
        if not line:
            continue
        kind, _, rest = line.partition("\t")
        if kind == "feature":
            idx, slot, value = rest.split("\t")
            index[(slot, value)] = int(idx)
        elif kind == "class":
            label, _, weights = rest.partition("\t")
            classes.append(label)
            rows.append([(int(j), float(w)) for j, w in
                         (item.split(":") for item in weights.split())])
        else:
            head[kind] = rest
    languages = tuple(head["languages"].split("\t")) if head.get("languages") else ()
    context = ContextConfig.parse(head["context"])
    dim = int(head["features"]) + 1
    weights = np.zeros((len(classes), dim))
    for r, row in enumerate(rows):
        for j, w in row:
            weights[r, j] = w
    cfg = SVMConfig(float(head["lambda"]), int(head["epochs"]), int(head["seed"]))
    fs = FeatureSpace(languages + context.slots, index)
    return LinearModel(tuple(classes), weights, fs, languages, context, cfg)
