"""From per-token CARD marginals to one count per (subject, predicate)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import Document
from .crf import CARD_IDX, CrfModel, sentence_marginals
from .errors import DataError
from .numtag import default_rules, is_candidate, translate_zero_one
from .supervise import number_runs

TRANSLATED_CONFIDENCE = 0.5


class PredictionMode(str, Enum):
    SINGLE = "SINGLE"
    SUM = "SUM"
    TRANSLATED = "TRANSLATED"
    BASELINE = "BASELINE"


@dataclass(frozen=True)
class Prediction:
    subject_id: str
    predicate_id: str
    count: int
    confidence: float
    sentence: int
    span: tuple[int, int]       # token span, end exclusive
    mode: PredictionMode = PredictionMode.SINGLE

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"count must be non-negative, got {self.count}")
        if not 0 < self.confidence <= 1:
            raise ValueError(f"confidence must lie in (0, 1], got {self.confidence}")
        if not 0 <= self.span[0] < self.span[1]:
            raise ValueError(f"invalid evidence span {self.span}")

    @property
    def key(self):
        return (self.subject_id, self.predicate_id)

    def to_dict(self):
        return {
            "subject": self.subject_id,
            "predicate": self.predicate_id,
            "count": self.count,
            "confidence": self.confidence,
            "mode": self.mode.value,
            "evidence": {"sentence": self.sentence, "span": list(self.span)},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d):
        ev = d["evidence"]
        return cls(d["subject"], d["predicate"], int(d["count"]), float(d["confidence"]),
                   int(ev["sentence"]), tuple(ev["span"]), PredictionMode(d["mode"]))


@dataclass(frozen=True)
class PredictConfig:
    marginal_threshold: float = 0.1
    enable_compositional: bool = False
    enable_zero_one: bool = False
    consolidation: str = "MAX_MARGINAL"

    def __post_init__(self):
        if not 0 <= self.marginal_threshold < 1:
            raise ValueError(f"marginal_threshold must lie in [0, 1), got {self.marginal_threshold}")
        if self.consolidation != "MAX_MARGINAL":
            raise ValueError(f"unknown consolidation strategy {self.consolidation!r}")


def above_threshold(marginal: float, threshold: float) -> bool:
    """Strictly greater, treating values within float noise of the threshold as equal."""
    return marginal > threshold and not math.isclose(marginal, threshold, rel_tol=1e-9)


def _card_marginals(model, doc, marginals):
    if marginals is None:
        marginals = sentence_marginals(model, doc.sentences)
    return [m[:, CARD_IDX] for m in marginals]


def predict_count(model: CrfModel, doc: Document, config: PredictConfig = PredictConfig(),
                  marginals=None) -> Prediction | None:
    """Candidate with the highest CARD marginal above the threshold; None to abstain.

    Ties on the marginal go to the earliest position.
    """
    best = None
    for si, (sent, card) in enumerate(zip(doc.sentences, _card_marginals(model, doc, marginals))):
        for tok in sent.tokens:
            m = float(card[tok.index])
            if is_candidate(tok) and above_threshold(m, config.marginal_threshold):
                if best is None or m > best[0]:
                    best = (m, si, tok)
    if best is None:
        return None
    m, si, tok = best
    return Prediction(doc.subject_id, doc.predicate_id, tok.num_value, m, si,
                      (tok.index, tok.index + 1), PredictionMode.SINGLE)


def predict_compositional(model: CrfModel, doc: Document, config: PredictConfig = PredictConfig(),
                          marginals=None) -> Prediction | None:
    """Sum maximal runs of confident candidates ("two sons and one daughter").

    Each maximal run (a lone number is a run of one) proposes its sum with
    the weakest member's marginal as confidence. The most confident
    proposal wins; ties favor the longer run, then the earlier position.
    """
    rules = default_rules()
    best = None
    for si, (sent, card) in enumerate(zip(doc.sentences, _card_marginals(model, doc, marginals))):
        qualifying = [t.index for t in sent.tokens
                      if is_candidate(t) and above_threshold(float(card[t.index]), config.marginal_threshold)]
        for run in number_runs(sent, qualifying, rules):
            conf = min(float(card[i]) for i in run)
            if best is None or (conf, len(run)) > (best[0], len(best[2])):
                best = (conf, si, run)
    if best is None:
        return None
    conf, si, run = best
    total = sum(doc.sentences[si].tokens[i].num_value for i in run)
    mode = PredictionMode.SUM if len(run) > 1 else PredictionMode.SINGLE
    return Prediction(doc.subject_id, doc.predicate_id, total, conf, si, (run[0], run[-1] + 1), mode)


def consolidate(predictions, config: PredictConfig = PredictConfig()) -> Prediction | None:
    """Highest confidence wins; equal confidence goes to the smaller count."""
    predictions = list(predictions)
    if not predictions:
        return None
    return min(predictions, key=lambda p: (-p.confidence, p.count))


def apply_zero_one(doc: Document, config: PredictConfig = PredictConfig(), rules=None) -> Prediction | None:
    """Counts of zero or one read off negation and indefinite frames."""
    found = []
    for si, sent in enumerate(doc.sentences):
        for pos, value in translate_zero_one(sent, rules):
            found.append(Prediction(doc.subject_id, doc.predicate_id, value, TRANSLATED_CONFIDENCE,
                                    si, (pos, pos + 1), PredictionMode.TRANSLATED))
    return consolidate(found, config)


def predict_document(model: CrfModel, doc: Document, config: PredictConfig = PredictConfig(),
                     marginals=None) -> Prediction | None:
    """CRF answer (plain or compositional); zero/one translation only if the CRF abstains."""
    if marginals is None:
        marginals = sentence_marginals(model, doc.sentences)
    if config.enable_compositional:
        pred = predict_compositional(model, doc, config, marginals)
    else:
        pred = predict_count(model, doc, config, marginals)
    if pred is None and config.enable_zero_one:
        pred = apply_zero_one(doc, config)
    return pred


def predict_corpus(model: CrfModel, docs, config: PredictConfig = PredictConfig()):
    """Predictions for every document that gets an answer, in corpus order."""
    docs = list(docs)
    flat = [s for d in docs for s in d.sentences]
    marg = sentence_marginals(model, flat)
    out, k = [], 0
    for d in docs:
        n = len(d.sentences)
        pred = predict_document(model, d, config, marg[k:k + n])
        k += n
        if pred is not None:
            out.append(pred)
    return out


def candidate_pool(doc: Document):
    return [(si, t) for si, s in enumerate(doc.sentences) for t in s.tokens if is_candidate(t)]


def baseline_random(doc: Document, seed) -> Prediction | None:
    """Uniformly random candidate number from the document (seeded)."""
    pool = candidate_pool(doc)
    if not pool:
        return None
    rng = np.random.default_rng(seed)
    si, tok = pool[int(rng.integers(len(pool)))]
    return Prediction(doc.subject_id, doc.predicate_id, tok.num_value, 1.0 / len(pool), si,
                      (tok.index, tok.index + 1), PredictionMode.BASELINE)


def load_predictions(path) -> list[Prediction]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(Prediction.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: malformed prediction ({exc})") from None
    return out
