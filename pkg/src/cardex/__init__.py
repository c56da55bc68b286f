"""Relation cardinality extraction: how many children, spouses, parts ... a
subject has, read off numbers in text about it.

Typical flow::

    docs = load_corpus("corpus.jsonl")
    kb = load_kb("kb.tsv")
    labeled = [(s, seq) for doc, seqs in annotate(docs, kb, SupervisionConfig(Mode.ONLY_NUMMOD))
               for s, seq in zip(doc.sentences, seqs)]
    model = train(labeled)
    preds = predict_corpus(model, docs)
"""

__version__ = "0.1.0"

from .corpus import (Document, KBStore, Sentence, Token, load_corpus, load_gold, load_kb, make_document,
                     make_sentence, tokenize)
from .crf import CrfModel, TrainConfig, forward_backward, load_model, save_model, train, viterbi
from .evaluation import EvalReport, analyze_corpus, evaluate
from .extract import (Prediction, PredictConfig, apply_zero_one, baseline_random, consolidate,
                      predict_compositional, predict_corpus, predict_count, predict_document)
from .numtag import (classify_numbers, default_rules, is_candidate, is_nummod, parse_number_word,
                     translate_zero_one)
from .supervise import LabelSequence, Mode, SupervisionConfig, annotate
