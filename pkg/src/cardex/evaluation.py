"""Precision/recall/F1 of count predictions and the numeric-tag census."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import DataError
from .numtag import default_rules, is_adjective_like, is_noun_like


@dataclass(frozen=True)
class EvalReport:
    predicate_id: str
    n_subjects: int
    n_predicted: int
    n_correct: int
    precision: float
    recall: float
    f1: float

    def to_dict(self):
        return dict(self.__dict__)


def prf(n_subjects, n_predicted, n_correct):
    p = n_correct / n_predicted if n_predicted else 0.0
    r = n_correct / n_subjects if n_subjects else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def evaluate(predictions, gold: dict, predicate_id: str | None = None) -> EvalReport:
    """Exact-count scoring. Abstentions (no prediction) only cost recall.

    ``gold`` maps (subject, predicate) to the true count and defines the
    evaluated subjects; with ``predicate_id`` only that predicate is scored.
    """
    if predicate_id is not None:
        gold = {k: v for k, v in gold.items() if k[1] == predicate_id}
        predictions = [p for p in predictions if p.predicate_id == predicate_id]
    seen = set()
    n_correct = 0
    for p in predictions:
        if p.key not in gold:
            raise DataError(f"prediction for ({p.subject_id}, {p.predicate_id}) has no gold count")
        if p.key in seen:
            raise DataError(f"more than one prediction for ({p.subject_id}, {p.predicate_id})")
        seen.add(p.key)
        n_correct += p.count == gold[p.key]
    p, r, f = prf(len(gold), len(seen), n_correct)
    if predicate_id is None:
        preds = {k[1] for k in gold}
        predicate_id = preds.pop() if len(preds) == 1 else "*"
    return EvalReport(predicate_id, len(gold), len(seen), n_correct, p, r, f)


@dataclass
class TagCensus:
    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0
    top_nouns: list[tuple[str, int]] = field(default_factory=list)

    @property
    def frequencies(self) -> dict[str, float]:
        return {t: c / self.total for t, c in self.counts.items()} if self.total else {}


def _modified_noun(sentence, i, rules):
    toks = sentence.tokens
    for j in (i + 1, i + 2):
        if j >= len(toks) or toks[j].lemma == "of":
            return None
        if is_noun_like(toks[j], rules):
            return toks[j].lemma
        if not is_adjective_like(toks[j], rules):
            return None
    return None


def analyze_corpus(docs, top_k: int = 20) -> TagCensus:
    """Distribution of numeric tags, plus the nouns NUMBER tokens most often quantify."""
    rules = default_rules()
    counts: Counter = Counter()
    nouns: Counter = Counter()
    for doc in docs:
        for sent in doc.sentences:
            for tok in sent.tokens:
                if tok.num_tag == "NONE":
                    continue
                counts[tok.num_tag] += 1
                if tok.num_tag == "NUMBER":
                    noun = _modified_noun(sent, tok.index, rules)
                    if noun:
                        nouns[noun] += 1
    return TagCensus(dict(counts), sum(counts.values()),
                     sorted(nouns.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k])
