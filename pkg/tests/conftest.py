import itertools
import math

import numpy as np
import pytest

from cardex.corpus import make_document
from cardex.crf import LABELS, CrfModel, extract_features, sentence_features
from cardex.numtag import is_candidate

_ACCEPTANCE = {}


def doc(text, subject="s1", predicate="child"):
    return make_document(subject, predicate, text)


@pytest.fixture
def make_doc():
    return doc


def brute_force(model: CrfModel, sentence):
    """Enumerate every labeling: (log Z, marginals, best labels, best score).

    Potentials are rebuilt from feature strings and raw weights with plain
    Python arithmetic, independent of the vectorized inference path.
    """
    n = len(sentence.tokens)
    psi = []
    for i in range(n):
        row = [0.0, 0.0]
        for f in extract_features(sentence, i):
            if f in model.feature_vocab:
                w = model.state_weights[model.feature_vocab[f]]
                row[0] += float(w[0])
                row[1] += float(w[1])
        psi.append(row)
    T = model.transition_weights
    scores = {}
    for ys in itertools.product(range(2), repeat=n):
        s = sum(psi[i][y] for i, y in enumerate(ys))
        s += sum(float(T[a][b]) for a, b in zip(ys, ys[1:]))
        scores[ys] = s
    top = max(scores.values())
    log_z = top + math.log(math.fsum(math.exp(s - top) for s in scores.values()))
    marg = np.zeros((n, 2))
    for ys, s in scores.items():
        p = math.exp(s - log_z)
        for i, y in enumerate(ys):
            marg[i, y] += p
    best = max(scores, key=scores.get)
    return log_z, marg, [LABELS[y] for y in best], scores[best], sorted(scores.values())


SENTENCE_WORDS = ["he", "has", "two", "sons", "and", "one", "daughter", "in", "1984", "the", "3",
                  "children", "of", "won", "7", "awards", ",", "$", "5", "million", "years", "four"]


def random_sentence(rng, n):
    """A tagged sentence of exactly ``n`` tokens drawn from a small vocabulary."""
    words = [SENTENCE_WORDS[k] for k in rng.integers(len(SENTENCE_WORDS), size=n)]
    return doc(" ".join(words)).sentences[0]


def random_model(rng, sentences, scale=1.0, sigma=1.0):
    """Model over every feature of ``sentences`` with Gaussian weights."""
    feats = sorted({f for s in sentences for fs in sentence_features(s) for f in fs})
    model = CrfModel.zeros(feats, sigma)
    return model.with_parameters(rng.normal(0.0, scale, size=model.parameters().shape))


def random_labels(rng, sentence):
    """Labels that put CARD only on candidate tokens."""
    return ["CARD" if is_candidate(t) and rng.random() < 0.5 else "O" for t in sentence.tokens]


def pytest_runtest_logreport(report):
    marker = getattr(report, "_acceptance", None)
    if marker and (report.when == "call" or report.outcome != "passed"):
        _ACCEPTANCE[marker] = report.outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m:
        rep._acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, desc), outcome in sorted(_ACCEPTANCE.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {desc}")
