"""Command line entry point: ``cardex <command> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on bad input data.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys

from . import __version__
from .corpus import load_corpus, load_gold, load_kb, make_sentence
from .crf import TrainConfig, load_model, save_model, train
from .errors import CardexError, DataError
from .evaluation import analyze_corpus, evaluate
from .extract import PredictConfig, baseline_random, load_predictions, predict_corpus
from .numtag import classify_numbers, default_rules, load_rules
from .supervise import Mode, SupervisionConfig, annotate

log = logging.getLogger("cardex")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _rules(args):
    return load_rules(args.rules) if args.rules else default_rules()


def cmd_analyze(args):
    census = analyze_corpus(load_corpus(args.corpus, _rules(args)), top_k=args.top)
    if args.json:
        print(json.dumps({"total": census.total, "counts": census.counts,
                          "frequencies": census.frequencies, "top_nouns": census.top_nouns}, indent=2))
        return
    print(f"{'tag':<10}{'count':>8}{'freq':>10}")
    for tag, c in sorted(census.counts.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"{tag:<10}{c:>8}{c / census.total:>10.2%}")
    print(f"{'total':<10}{census.total:>8}")
    if census.top_nouns:
        print("\nnouns after NUMBER: " + ", ".join(f"{n} ({c})" for n, c in census.top_nouns))


def cmd_annotate(args):
    config = SupervisionConfig(Mode(args.mode), args.min_count, use_gold=bool(args.gold))
    rules = _rules(args)
    docs = load_corpus(args.corpus, rules)
    kb = load_kb(args.kb)
    if args.gold:
        kb.gold_counts = load_gold(args.gold)
    with _output(args.out) as fh:
        for doc, seqs in annotate(docs, kb, config):
            for si, (sent, seq) in enumerate(zip(doc.sentences, seqs)):
                fh.write(json.dumps({
                    "subject": doc.subject_id, "predicate": doc.predicate_id, "sentence_idx": si,
                    "labels": list(seq.labels), "text": sent.text,
                    "tokens": [t.surface for t in sent.tokens],
                }, ensure_ascii=False) + "\n")


def read_labeled(path, rules=None):
    """(Sentence, labels) pairs from ``annotate`` output."""
    rules = rules or default_rules()
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                text, labels = rec["text"], rec["labels"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed labeled record ({exc})") from None
            sent = classify_numbers(make_sentence(text), rules)
            if len(labels) != len(sent.tokens):
                raise DataError(f"{path}:{lineno}: {len(labels)} labels for {len(sent.tokens)} tokens")
            out.append((sent, labels))
    return out


def cmd_train(args):
    config = TrainConfig(args.sigma, args.max_iter, args.tol, args.min_feature_count)
    dataset = read_labeled(args.labeled, _rules(args))
    model = train(dataset, config)
    save_model(model, args.out)
    log.info("trained on %d sequences, %d features -> %s", len(dataset), model.num_features, args.out)


def cmd_predict(args):
    config = PredictConfig(args.threshold, args.compositional, args.zero_one)
    docs = load_corpus(args.corpus, _rules(args))
    model = load_model(args.model)
    with _output(args.out) as fh:
        for pred in predict_corpus(model, docs, config):
            fh.write(pred.to_json() + "\n")


def cmd_baseline(args):
    docs = load_corpus(args.corpus, _rules(args))
    with _output(args.out) as fh:
        for k, doc in enumerate(docs):
            pred = baseline_random(doc, [args.seed, k])
            if pred is not None:
                fh.write(pred.to_json() + "\n")


def cmd_evaluate(args):
    preds = load_predictions(args.predictions)
    gold = load_gold(args.gold)
    predicates = sorted({k[1] for k in gold})
    reports = [evaluate(preds, gold, p) for p in predicates]
    unknown = [p for p in preds if p.key not in gold]
    if unknown:
        raise DataError(f"prediction for ({unknown[0].subject_id}, {unknown[0].predicate_id}) has no gold count")
    if len(predicates) > 1:
        reports.append(evaluate(preds, gold))
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
        return
    print(f"{'predicate':<20}{'#s':>7}{'#pred':>7}{'#corr':>7}{'P':>8}{'R':>8}{'F1':>8}")
    for r in reports:
        print(f"{r.predicate_id:<20}{r.n_subjects:>7}{r.n_predicted:>7}{r.n_correct:>7}"
              f"{r.precision:>8.3f}{r.recall:>8.3f}{r.f1:>8.3f}")


def build_parser():
    parser = _Parser(prog="cardex", description="Relation cardinality extraction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--rules", help="numeric-tagging lexicon file (default: bundled)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="numeric tag census of a corpus")
    p.add_argument("corpus")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("annotate", help="distant-supervision labels from KB counts")
    p.add_argument("corpus")
    p.add_argument("kb")
    p.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--gold", help="manual counts TSV; used instead of triple counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("train", help="train a CRF on annotate output")
    p.add_argument("labeled")
    p.add_argument("--out", required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--min-feature-count", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict one count per document")
    p.add_argument("corpus")
    p.add_argument("model")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--compositional", action="store_true")
    p.add_argument("--zero-one", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("baseline", help="random candidate number per document")
    p.add_argument("corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="precision / recall / F1 against gold counts")
    p.add_argument("predictions")
    p.add_argument("gold")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (CardexError, OSError) as exc:
        print(f"cardex: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cardex: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
