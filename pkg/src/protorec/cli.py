"""Command line interface: align, train, predict, crossval, report."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from pathlib import Path

from .alignment import format_alignment
from .context import ALL_CONTEXTS, ContextConfig
from .corpar import ResourceError
from .evaluation import EvalReport, format_report
from .harness import (CLASSIFIERS, ExperimentConfig, crossval_trials, descendant_languages,
                      dump_reconstructor, load_reconstructor, predict_pipeline, train_pipeline,
                      training_alignment, usable_sets)
from .svm import SVMConfig
from .wordlist import CognateSet, DataError, cognate_sets, read_wordlist

log = logging.getLogger("protorec")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _contexts(values):
    if not values:
        return [ContextConfig()]
    out = []
    for value in values:
        if value.lower() == "all":
            out.extend(ALL_CONTEXTS)
        else:
            try:
                out.append(ContextConfig.parse(value))
            except ValueError as exc:
                raise UsageError(str(exc)) from None
    return list(dict.fromkeys(out))


def _classifiers(value):
    names = [v.strip() for v in value.split(",") if v.strip()]
    bad = [n for n in names if n not in CLASSIFIERS]
    if bad or not names:
        raise UsageError(f"unknown classifier(s): {', '.join(bad) or value!r}")
    return names


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _config(args, classifier, context, **kw):
    try:
        svm = SVMConfig(args.svm_lambda, args.svm_epochs, args.seed)
        return ExperimentConfig(args.proto, classifier, context, seed=args.seed, svm=svm, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_align(args):
    wl = read_wordlist(args.wordlist)
    sets = usable_sets(wl, args.proto)
    languages = descendant_languages(sets, args.proto)
    chunks = []
    for cset in sets:
        al = training_alignment(cset, languages)
        chunks.append(f"# {cset.cogid}\t{cset.concept}\n" + format_alignment(al))
    _write("\n".join(chunks), args.output)


def cmd_train(args):
    wl = read_wordlist(args.wordlist)
    contexts = _contexts(args.context)
    if len(contexts) != 1:
        raise UsageError("train takes exactly one context coding")
    clf = _classifiers(args.classifier)
    if len(clf) != 1:
        raise UsageError("train takes exactly one classifier")
    cfg = _config(args, clf[0], contexts[0])
    sets = cognate_sets(wl, args.proto)
    languages = tuple(l for l in wl.languages if l != args.proto)
    model = train_pipeline(sets, cfg, languages)
    _write(dump_reconstructor(model), args.output)


def cmd_predict(args):
    model = load_reconstructor(Path(args.model).read_text(encoding="utf-8"))
    wl = read_wordlist(args.wordlist)
    langs = set(wl.languages)
    proto = model.proto_language
    sets = cognate_sets(wl, proto) if proto in langs else _sets_without_proto(wl)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(["COGID", "CONCEPT", "PREDICTION", "GOLD"])
    for cset in sets:
        if not cset.reflexes:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            pred = predict_pipeline(model, cset.reflexes)
        for w in caught:
            log.warning("cognate set %s: %s", cset.cogid, w.message)
        gold = " ".join(cset.proto.tokens) if cset.proto else ""
        writer.writerow([cset.cogid, cset.concept, " ".join(pred), gold])
    _write(buf.getvalue(), args.output)


def _sets_without_proto(wl):
    sets = {}
    for form in wl.forms:
        cset = sets.setdefault(form.cogid, CognateSet(form.cogid))
        if form.language in cset.reflexes:
            raise DataError(f"cognate set {form.cogid!r} has two forms for {form.language!r}")
        cset.reflexes[form.language] = form
    return list(sets.values())


def _trial_table(results, dataset):
    lines = ["\t".join(["DATASET", "TRIAL", "CLASSIFIER", "ANALYSIS", "ED", "NED", "BC", "N"])]
    for r in results:
        rep = r.report
        lines.append("\t".join([dataset, str(r.trial), r.classifier, r.analysis,
                                repr(rep.ed), repr(rep.ned), repr(rep.bc), str(rep.n)]))
    return "\n".join(lines) + "\n"


def _summarise(rows):
    """Mean per (dataset, classifier, analysis) over trial rows, in first-seen order."""
    grouped = {}
    for row in rows:
        key = (row["DATASET"], row["CLASSIFIER"], row["ANALYSIS"])
        grouped.setdefault(key, []).append(row)
    out = {}
    for key, rs in grouped.items():
        k = len(rs)
        out[key] = EvalReport(sum(float(r["ED"]) for r in rs) / k,
                              sum(float(r["NED"]) for r in rs) / k,
                              sum(float(r["BC"]) for r in rs) / k,
                              sum(int(r["N"]) for r in rs))
    return out


def _tables(summary):
    """Result table averaged over datasets, plus a per-dataset BC table per classifier."""
    by_analysis = {}
    datasets = []
    for (ds, clf, an), rep in summary.items():
        by_analysis.setdefault((clf, an), []).append(rep)
        if ds not in datasets:
            datasets.append(ds)
    rows = []
    for (clf, an), reps in by_analysis.items():
        k = len(reps)
        rows.append((clf, an, EvalReport(sum(r.ed for r in reps) / k, sum(r.ned for r in reps) / k,
                                         sum(r.bc for r in reps) / k, sum(r.n for r in reps))))
    main = format_report(rows)
    analyses = list(dict.fromkeys(an for _, an, _ in rows))
    appendix = []
    if len(analyses) > 1:
        for clf in dict.fromkeys(c for c, _, _ in rows):
            lines = [f"# {clf}", "\t".join(["DATASET"] + analyses)]
            for ds in datasets:
                cells = [ds]
                for an in analyses:
                    rep = summary.get((ds, clf, an))
                    cells.append(f"{rep.bc:.4f}" if rep else "")
                lines.append("\t".join(cells))
            appendix.append("\n".join(lines) + "\n")
    return main, "\n".join(appendix)


def cmd_crossval(args):
    wl = read_wordlist(args.wordlist)
    contexts = _contexts(args.context)
    classifiers = _classifiers(args.classifier)
    cfg = _config(args, classifiers[0], contexts[0], trials=args.trials,
                  train_fraction=args.train_fraction)
    analyses = [(c, ctx) for c in classifiers for ctx in contexts]
    results = crossval_trials(wl, cfg, analyses, jobs=args.jobs)
    dataset = args.dataset or Path(args.wordlist).stem
    trial_text = _trial_table(results, dataset)
    if args.trials_output:
        _write(trial_text, args.trials_output)
    main, appendix = _tables(_summarise(_read_rows(trial_text)))
    _write(main, args.output)
    if appendix:
        sys.stderr.write(appendix)


def _read_rows(text):
    return list(csv.DictReader(io.StringIO(text), delimiter="\t"))


def cmd_report(args):
    rows = []
    for path in args.trial_files:
        file_rows = _read_rows(Path(path).read_text(encoding="utf-8"))
        if file_rows and "TRIAL" not in file_rows[0]:
            raise DataError(f"{path}: not a per-trial table (no TRIAL column)")
        rows.extend(file_rows)
    if not rows:
        raise DataError("no trial rows to report")
    main, appendix = _tables(_summarise(rows))
    _write(main, args.output)
    if appendix:
        if args.appendix:
            _write(appendix, args.appendix)
        else:
            sys.stderr.write(appendix)


def build_parser():
    p = _Parser(prog="protorec", description="Supervised proto-form reconstruction.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, context=True):
        sp.add_argument("wordlist", help="TSV wordlist (ID, LANGUAGE, CONCEPT, TOKENS, COGID)")
        sp.add_argument("--proto", required=True, help="name of the proto-language")
        sp.add_argument("--output", "-o", default="-")
        if context:
            sp.add_argument("--classifier", default="svm", help="svm, corpar or both comma-separated")
            sp.add_argument("--context", action="append",
                            help="pos,str,ini | none | all | label like StrIni (repeatable)")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--svm-lambda", type=float, default=1e-4)
            sp.add_argument("--svm-epochs", type=int, default=30)

    sp = sub.add_parser("align", help="dump trimmed training alignments")
    common(sp, context=False)
    sp.set_defaults(func=cmd_align)

    sp = sub.add_parser("train", help="train a model and write it to a file")
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="reconstruct proto forms for reflex sets")
    sp.add_argument("model")
    sp.add_argument("wordlist", help="TSV wordlist with reflexes grouped by COGID")
    sp.add_argument("--output", "-o", default="-")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("crossval", help="repeated random-split evaluation")
    common(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--train-fraction", type=float, default=0.9)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    sp.add_argument("--trials-output", help="also write per-trial scores here")
    sp.add_argument("--dataset", help="dataset name for per-trial rows (default: file stem)")
    sp.set_defaults(func=cmd_crossval)

    sp = sub.add_parser("report", help="summarise per-trial tables from one or more runs")
    sp.add_argument("trial_files", nargs="+")
    sp.add_argument("--output", "-o", default="-")
    sp.add_argument("--appendix", help="write the per-dataset BC tables here")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"protorec: error: {exc}\n")
        return EXIT_USAGE
    except (DataError, OSError, ValueError, ResourceError) as exc:
        sys.stderr.write(f"protorec: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
