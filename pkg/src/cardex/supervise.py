"""Distant-supervision labeling of candidate numbers against KB counts."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .corpus import Document, KBStore, Sentence
from .errors import DataError
from .numtag import default_rules, is_adjective_like, is_candidate, is_noun_like, is_nummod

log = logging.getLogger(__name__)

CARD = "CARD"
O = "O"


class Mode(str, Enum):
    VANILLA = "vanilla"
    ONLY_NUMMOD = "nummod"
    RESILIENT = "resilient"
    COMPOSITIONAL = "comp"


@dataclass(frozen=True)
class LabelSequence:
    labels: tuple[str, ...]
    mode: Mode

    def card_positions(self):
        return {i for i, y in enumerate(self.labels) if y == CARD}


@dataclass(frozen=True)
class SupervisionConfig:
    mode: Mode = Mode.VANILLA
    min_kb_count: int = 1
    use_gold: bool = False

    def __post_init__(self):
        if self.min_kb_count < 1:
            raise ValueError(f"min_kb_count must be >= 1, got {self.min_kb_count}")


def _kb_count(doc: Document, kb: KBStore) -> int:
    count = kb.count(doc.subject_id, doc.predicate_id)
    if count is None:
        raise DataError(f"no KB count for ({doc.subject_id}, {doc.predicate_id})")
    return count


def _from_positions(sentence, positions, mode):
    return LabelSequence(tuple(CARD if i in positions else O for i in range(len(sentence))), mode)


def _candidates(sentence):
    return [t.index for t in sentence.tokens if is_candidate(t)]


def label_vanilla(doc: Document, kb: KBStore) -> list[LabelSequence]:
    count = _kb_count(doc, kb)
    return [
        _from_positions(s, {i for i in _candidates(s) if s.tokens[i].num_value == count}, Mode.VANILLA)
        for s in doc.sentences
    ]


def label_only_nummod(doc: Document, kb: KBStore) -> list[LabelSequence]:
    count = _kb_count(doc, kb)
    return [
        _from_positions(s, {i for i in _candidates(s)
                            if s.tokens[i].num_value == count and is_nummod(s, i)}, Mode.ONLY_NUMMOD)
        for s in doc.sentences
    ]


def label_resilient(doc: Document, kb: KBStore) -> list[LabelSequence]:
    count = _kb_count(doc, kb)
    return [
        _from_positions(s, {i for i in _candidates(s) if s.tokens[i].num_value >= count}, Mode.RESILIENT)
        for s in doc.sentences
    ]


def is_connector(token, rules=None) -> bool:
    """Tokens allowed between members of a number run: ',' 'and' nouns adjectives."""
    if token.surface == "," or token.lemma == "and":
        return True
    return is_noun_like(token, rules) or is_adjective_like(token, rules)


def connected(sentence: Sentence, a: int, b: int, rules=None) -> bool:
    """True if every token strictly between positions a < b is a connector."""
    return all(is_connector(sentence.tokens[k], rules) for k in range(a + 1, b))


def number_runs(sentence: Sentence, positions, rules=None) -> list[list[int]]:
    """Group sorted positions into maximal runs joined only by connectors."""
    runs = []
    for p in sorted(positions):
        if runs and connected(sentence, runs[-1][-1], p, rules):
            runs[-1].append(p)
        else:
            runs.append([p])
    return runs


def label_compositional(doc: Document, kb: KBStore) -> list[LabelSequence]:
    count = _kb_count(doc, kb)
    rules = default_rules()
    out = []
    for s in doc.sentences:
        cands = _candidates(s)
        card = {i for i in cands if s.tokens[i].num_value == count}
        for run in number_runs(s, cands, rules):
            if sum(s.tokens[i].num_value for i in run) == count:
                card.update(run)
        out.append(_from_positions(s, card, Mode.COMPOSITIONAL))
    return out


LABELERS = {
    Mode.VANILLA: label_vanilla,
    Mode.ONLY_NUMMOD: label_only_nummod,
    Mode.RESILIENT: label_resilient,
    Mode.COMPOSITIONAL: label_compositional,
}


def filter_subjects(kb: KBStore, config: SupervisionConfig) -> set[tuple[str, str]]:
    if config.use_gold:
        gold = kb.gold_counts or {}
        return {k for k, c in gold.items() if c >= config.min_kb_count}
    return {k for k, c in kb.counts.items() if c >= config.min_kb_count}


def annotate(docs, kb: KBStore, config: SupervisionConfig):
    """Label a document batch; yields (doc, [LabelSequence per sentence]).

    Documents whose pair is filtered out or has no count are skipped with a
    warning. With ``use_gold`` the manual counts replace triple counts.
    """
    keep = filter_subjects(kb, config)
    source = KBStore({k: kb.gold_counts[k] for k in keep}) if config.use_gold else kb
    available = (kb.gold_counts or {}) if config.use_gold else kb.counts
    labeler = LABELERS[Mode(config.mode)]
    for doc in docs:
        if doc.key not in keep:
            if doc.key not in available:
                log.warning("skipping (%s, %s): no count available", *doc.key)
            continue
        yield doc, labeler(doc, source)
