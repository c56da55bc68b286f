"""Train a CRF on a synthetic corpus and measure held-out F1.

This is the whole pipeline in library calls; the CLI equivalent is

    cardex annotate train.jsonl kb.tsv --mode nummod --out labeled.jsonl
    cardex train labeled.jsonl --out model.crf
    cardex predict test.jsonl model.crf --out predictions.jsonl
    cardex evaluate predictions.jsonl gold.tsv
"""

import logging
import time

from cardex import (
    KBStore, Mode, PredictConfig, SupervisionConfig, TrainConfig, annotate, evaluate, make_document,
    predict_corpus, train,
)
from cardex.extract import baseline_random
from cardex.synthetic import child_corpus

# With kb_recall < 1 some subjects lose every triple; annotate warns about
# and skips those, which is expected here.
logging.basicConfig(level=logging.ERROR)
corpus = child_corpus(1000, seed=7, kb_recall=0.9)
docs = [make_document(r["subject"], r["predicate"], r["text"]) for r in corpus.records]
train_docs, test_docs = docs[:800], docs[800:]

kb = KBStore({})
for s, p, _ in corpus.kb_rows:
    kb.counts[(s, p)] = kb.counts.get((s, p), 0) + 1

dataset = [pair for d, seqs in annotate(train_docs, kb, SupervisionConfig(Mode.ONLY_NUMMOD))
           for pair in zip(d.sentences, seqs)]
print(f"{len(dataset)} labeled sentences, {sum(s.labels.count('CARD') for _, s in dataset)} CARD tokens")

start = time.perf_counter()
model = train(dataset, TrainConfig(l2_sigma=1.0),
              callback=lambda it, obj: it % 5 == 0 and print(f"  iteration {it:3d}  objective {obj:.2f}"))
print(f"trained {model.num_features} features in {time.perf_counter() - start:.1f}s")

gold = {d.key: corpus.gold[d.key] for d in test_docs}
preds = predict_corpus(model, test_docs, PredictConfig())
crf = evaluate(preds, gold)
base = evaluate([p for k, d in enumerate(test_docs) if (p := baseline_random(d, [0, k]))], gold)
print(f"CRF      P={crf.precision:.3f} R={crf.recall:.3f} F1={crf.f1:.3f}")
print(f"baseline P={base.precision:.3f} R={base.recall:.3f} F1={base.f1:.3f}")

example = preds[0]
d = next(d for d in test_docs if d.key == example.key)
span = d.sentences[example.sentence].tokens[example.span[0]:example.span[1]]
print(f"\n{example.subject_id}: count {example.count} (confidence {example.confidence:.3f}) "
      f"from {' '.join(t.surface for t in span)!r}")
print("   ", d.sentences[example.sentence].text)
