"""Linear-chain CRF over the labels {CARD, O}.

State features are lemma n-grams in a 5-token window around each token plus
candidate/nummod indicators; transitions are a single 2x2 table shared by
all positions. All inference runs in log space. Training maximizes the
L2-penalized conditional log-likelihood with L-BFGS, starting from zero
weights, so a fixed dataset and config always give the same model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.optimize
import scipy.sparse

from .corpus import Sentence
from .errors import ModelFormatError, SupervisionError
from .numtag import is_candidate, is_nummod

LABELS = ("CARD", "O")
CARD_IDX, O_IDX = 0, 1
FORMAT_HEADER = "cardex-crf v1"
TEMPLATE_VERSION = 1
NUM = "<NUM>"
BOS, EOS = "BOS", "EOS"

_UNIGRAM_OFFSETS = (-2, -1, 0, 1, 2)
_BIGRAMS = ((-1, 0), (0, 1))
_TRIGRAMS = ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))


# ---------------------------------------------------------------------------
# features

def feature_lemmas(sentence: Sentence) -> list[str]:
    """Lemmas with every numeric token replaced by the <NUM> placeholder."""
    return [NUM if t.num_tag != "NONE" else t.lemma for t in sentence.tokens]


def _window_features(lemmas, i, cand, nummod):
    n = len(lemmas)

    def at(off):
        j = i + off
        if j < 0:
            return BOS
        if j >= n:
            return EOS
        return lemmas[j]

    feats = [f"U{k}={at(off)}" for k, off in enumerate(_UNIGRAM_OFFSETS)]
    feats += [f"B{k}={'|'.join(at(o) for o in offs)}" for k, offs in enumerate(_BIGRAMS, 1)]
    feats += [f"T{k}={'|'.join(at(o) for o in offs)}" for k, offs in enumerate(_TRIGRAMS, 1)]
    feats.append(f"C={int(cand)}")
    feats.append(f"N={int(nummod)}")
    return feats


def extract_features(sentence: Sentence, index: int) -> list[str]:
    if not 0 <= index < len(sentence.tokens):
        raise IndexError(f"token index {index} out of range for sentence of length {len(sentence.tokens)}")
    tok = sentence.tokens[index]
    cand = is_candidate(tok)
    return _window_features(feature_lemmas(sentence), index, cand, cand and is_nummod(sentence, index))


def sentence_features(sentence: Sentence) -> list[list[str]]:
    lemmas = feature_lemmas(sentence)
    out = []
    for i, tok in enumerate(sentence.tokens):
        cand = is_candidate(tok)
        out.append(_window_features(lemmas, i, cand, cand and is_nummod(sentence, i)))
    return out


# ---------------------------------------------------------------------------
# model

@dataclass(frozen=True)
class TrainConfig:
    l2_sigma: float = 1.0
    max_iterations: int = 200
    convergence_tol: float = 1e-5
    min_feature_count: int = 1

    def __post_init__(self):
        if self.l2_sigma <= 0 or self.max_iterations <= 0 or self.convergence_tol <= 0 \
                or self.min_feature_count <= 0:
            raise ValueError(f"all training parameters must be positive: {self}")


@dataclass
class CrfModel:
    feature_vocab: dict[str, int]
    state_weights: np.ndarray          # [num_features, 2], columns ordered as LABELS
    transition_weights: np.ndarray     # [2, 2], from-label x to-label
    sigma: float = 1.0
    labels: tuple[str, ...] = LABELS
    template_version: int = TEMPLATE_VERSION

    @classmethod
    def zeros(cls, features: Sequence[str], sigma=1.0):
        vocab = {f: i for i, f in enumerate(features)}
        return cls(vocab, np.zeros((len(vocab), 2)), np.zeros((2, 2)), sigma)

    @property
    def num_features(self):
        return len(self.feature_vocab)

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.state_weights.ravel(), self.transition_weights.ravel()])

    def with_parameters(self, theta: np.ndarray) -> "CrfModel":
        f = self.num_features
        return CrfModel(self.feature_vocab, theta[:2 * f].reshape(f, 2).copy(),
                        theta[2 * f:].reshape(2, 2).copy(), self.sigma, self.labels,
                        self.template_version)

    def feature_ids(self, sentence: Sentence) -> list[np.ndarray]:
        vocab = self.feature_vocab
        return [np.fromiter((vocab[f] for f in feats if f in vocab), dtype=np.int64)
                for feats in sentence_features(sentence)]


# ---------------------------------------------------------------------------
# inference

def _logsumexp(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return np.squeeze(np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m, axis=axis)


def _state_scores(model, ids_per_pos):
    psi = np.zeros((len(ids_per_pos), 2))
    for i, ids in enumerate(ids_per_pos):
        if len(ids):
            psi[i] = model.state_weights[ids].sum(axis=0)
    return psi


def log_potentials(model: CrfModel, sentence: Sentence):
    """Per-position state scores [len x 2] and the shared transition table [2 x 2]."""
    return _state_scores(model, model.feature_ids(sentence)), model.transition_weights


def _pad(psi_list):
    lengths = np.array([len(p) for p in psi_list], dtype=np.int64)
    L = int(lengths.max()) if len(lengths) else 0
    padded = np.zeros((len(psi_list), L, 2))
    for k, p in enumerate(psi_list):
        padded[k, :len(p)] = p
    return padded, lengths


def _forward_backward_batch(psi, lengths, trans):
    """Batched log-space forward-backward over padded sequences (all lengths >= 1).

    Returns log partition from the forward pass, from the backward pass,
    node marginals [N, L, 2] (zero on padding) and alpha/beta tables.
    """
    N, L, K = psi.shape
    alpha = np.empty((N, L, K))
    beta = np.zeros((N, L, K))
    alpha[:, 0] = psi[:, 0]
    for t in range(1, L):
        step = _logsumexp(alpha[:, t - 1, :, None] + trans[None], axis=1) + psi[:, t]
        alpha[:, t] = np.where((t < lengths)[:, None], step, alpha[:, t - 1])
    log_z = _logsumexp(alpha[np.arange(N), lengths - 1], axis=1)
    for t in range(L - 2, -1, -1):
        step = _logsumexp(trans[None] + (psi[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
        beta[:, t] = np.where((t + 1 < lengths)[:, None], step, 0.0)
    log_z_back = _logsumexp(psi[:, 0] + beta[:, 0], axis=1)
    mask = (np.arange(L)[None, :] < lengths[:, None])[..., None]
    marginals = np.where(mask, np.exp(alpha + beta - log_z[:, None, None]), 0.0)
    return log_z, log_z_back, marginals, alpha, beta


def _expected_transitions(psi, lengths, trans, alpha, beta, log_z):
    total = np.zeros((2, 2))
    for t in range(1, psi.shape[1]):
        live = t < lengths
        if not live.any():
            break
        a = alpha[live, t - 1][:, :, None]
        b = (psi[live, t] + beta[live, t])[:, None, :]
        total += np.exp(a + trans[None] + b - log_z[live][:, None, None]).sum(axis=0)
    return total


def forward_backward_scores(psi: np.ndarray, trans: np.ndarray):
    """(log partition, marginals [len x 2]) for one sequence of state scores."""
    if len(psi) == 0:
        return 0.0, np.zeros((0, 2))
    log_z, _, marg, _, _ = _forward_backward_batch(psi[None], np.array([len(psi)]), trans)
    return float(log_z[0]), marg[0]


def forward_backward(model: CrfModel, sentence: Sentence):
    psi, trans = log_potentials(model, sentence)
    return forward_backward_scores(psi, trans)


def sentence_marginals(model: CrfModel, sentences: Sequence[Sentence]) -> list[np.ndarray]:
    """CARD/O marginals for many sentences in one batched pass."""
    psi_list = [log_potentials(model, s)[0] for s in sentences]
    out = [np.zeros((0, 2))] * len(psi_list)
    live = [k for k, p in enumerate(psi_list) if len(p)]
    if live:
        padded, lengths = _pad([psi_list[k] for k in live])
        _, _, marg, _, _ = _forward_backward_batch(padded, lengths, model.transition_weights)
        for row, k in enumerate(live):
            out[k] = marg[row, :lengths[row]]
    return out


def _prefer_o_argmax(x, axis):
    # last maximal index along the label axis; O is the last label
    flipped = np.flip(x, axis=axis)
    return x.shape[axis] - 1 - np.argmax(flipped, axis=axis)


def viterbi_scores(psi: np.ndarray, trans: np.ndarray):
    n = len(psi)
    if n == 0:
        return [], 0.0
    delta = psi[0].copy()
    back = np.zeros((n, 2), dtype=np.int64)
    for t in range(1, n):
        cand = delta[:, None] + trans          # from x to
        back[t] = _prefer_o_argmax(cand, axis=0)
        delta = cand[back[t], np.arange(2)] + psi[t]
    y = [int(_prefer_o_argmax(delta, axis=0))]
    score = float(delta[y[0]])
    for t in range(n - 1, 0, -1):
        y.append(int(back[t, y[-1]]))
    y.reverse()
    return [LABELS[k] for k in y], score


def viterbi(model: CrfModel, sentence: Sentence):
    psi, trans = log_potentials(model, sentence)
    return viterbi_scores(psi, trans)


def sequence_score(psi, trans, label_ids) -> float:
    s = sum(psi[i, y] for i, y in enumerate(label_ids))
    s += sum(trans[a, b] for a, b in zip(label_ids, label_ids[1:]))
    return float(s)


# ---------------------------------------------------------------------------
# training

def _label_ids(labels):
    labels = getattr(labels, "labels", labels)
    try:
        return [LABELS.index(y) for y in labels]
    except ValueError:
        raise SupervisionError(f"labels must be drawn from {LABELS}, got {list(labels)}") from None


class _Encoded:
    """Sparse design matrix and padded index layout for a dataset."""

    def __init__(self, model, dataset):
        rows, cols, y = [], [], []
        self.lengths = []
        pos = 0
        for sentence, labels in dataset:
            ids = _label_ids(labels)
            if len(ids) != len(sentence.tokens):
                raise SupervisionError(
                    f"label count {len(ids)} != token count {len(sentence.tokens)} in {sentence.text!r}")
            for i, (tok, lab) in enumerate(zip(sentence.tokens, ids)):
                if lab == CARD_IDX and not is_candidate(tok):
                    raise SupervisionError(
                        f"CARD label on non-candidate token {tok.surface!r} in {sentence.text!r}")
            if not ids:
                continue
            for i, fids in enumerate(model.feature_ids(sentence)):
                rows.extend([pos + i] * len(fids))
                cols.extend(fids.tolist())
            y.extend(ids)
            pos += len(ids)
            self.lengths.append(len(ids))
        self.lengths = np.array(self.lengths, dtype=np.int64)
        self.y = np.array(y, dtype=np.int64)
        self.X = scipy.sparse.csr_matrix(
            (np.ones(len(rows)), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(pos, model.num_features))
        starts = np.concatenate([[0], np.cumsum(self.lengths)[:-1]]).astype(np.int64)
        L = int(self.lengths.max()) if len(self.lengths) else 0
        offs = np.arange(L)
        self.mask = offs[None, :] < self.lengths[:, None]
        self.flat_index = (starts[:, None] + offs[None, :])[self.mask]
        onehot = np.zeros((pos, 2))
        onehot[np.arange(pos), self.y] = 1.0
        self.empirical_state = self.X.T @ onehot
        self.empirical_trans = np.zeros((2, 2))
        if pos:
            inner = np.ones(pos, dtype=bool)
            inner[starts] = False  # no transition into a sequence start
            np.add.at(self.empirical_trans, (self.y[:-1][inner[1:]], self.y[1:][inner[1:]]), 1.0)

    def padded(self, flat):
        out = np.zeros(self.mask.shape + flat.shape[1:])
        out[self.mask] = flat
        return out


def _objective(model, enc, theta):
    f = model.num_features
    W = theta[:2 * f].reshape(f, 2)
    T = theta[2 * f:].reshape(2, 2)
    sigma2 = model.sigma ** 2
    psi_flat = enc.X @ W
    if len(enc.lengths):
        psi = enc.padded(psi_flat)
        log_z, _, marg, alpha, beta = _forward_backward_batch(psi, enc.lengths, T)
        exp_trans = _expected_transitions(psi, enc.lengths, T, alpha, beta, log_z)
        marg_flat = marg[enc.mask]
        total_log_z = log_z.sum()
    else:
        marg_flat, exp_trans, total_log_z = np.zeros((0, 2)), np.zeros((2, 2)), 0.0
    gold = psi_flat[np.arange(len(enc.y)), enc.y].sum() + (enc.empirical_trans * T).sum()
    obj = gold - total_log_z - theta @ theta / (2 * sigma2)
    grad_w = enc.empirical_state - enc.X.T @ marg_flat - W / sigma2
    grad_t = enc.empirical_trans - exp_trans - T / sigma2
    return float(obj), np.concatenate([np.asarray(grad_w).ravel(), grad_t.ravel()])


def log_likelihood_and_gradient(model: CrfModel, dataset):
    """Penalized log-likelihood and its gradient w.r.t. ``model.parameters()``.

    ``dataset`` is a sequence of (Sentence, labels) pairs.
    """
    return _objective(model, _Encoded(model, dataset), model.parameters())


def build_vocab(dataset, min_count=1) -> list[str]:
    counts: dict[str, int] = {}
    for sentence, _ in dataset:
        for feats in sentence_features(sentence):
            for f in feats:
                counts[f] = counts.get(f, 0) + 1
    return [f for f, c in counts.items() if c >= min_count]


def train(dataset, config: TrainConfig = TrainConfig(),
          callback: Callable[[int, float], None] | None = None) -> CrfModel:
    """Fit a CRF to (Sentence, labels) pairs.

    ``callback(iteration, objective)`` is called after each accepted step.
    """
    dataset = list(dataset)
    if not dataset:
        raise SupervisionError("cannot train on an empty dataset")
    n_card = sum(_label_ids(lab).count(CARD_IDX) for _, lab in dataset)
    if n_card == 0:
        raise SupervisionError(
            f"no CARD labels in {len(dataset)} training sequences; the model would never "
            "predict a cardinality (check KB counts and the supervision mode)")
    model = CrfModel.zeros(build_vocab(dataset, config.min_feature_count), config.l2_sigma)
    enc = _Encoded(model, dataset)
    state = {"it": 0}

    def fun(theta):
        obj, grad = _objective(model, enc, theta)
        return -obj, -grad

    def on_step(theta):
        state["it"] += 1
        if callback is not None:
            callback(state["it"], _objective(model, enc, theta)[0])

    result = scipy.optimize.minimize(
        fun, model.parameters(), jac=True, method="L-BFGS-B", callback=on_step,
        options={"maxiter": config.max_iterations, "ftol": config.convergence_tol, "gtol": 1e-8},
    )
    return model.with_parameters(result.x)


# ---------------------------------------------------------------------------
# persistence

def _fmt(x):
    return format(float(x), ".17g")


def save_model(model: CrfModel, path) -> None:
    lines = [FORMAT_HEADER, f"sigma\t{_fmt(model.sigma)}", "labels\t" + "\t".join(model.labels),
             f"template\t{model.template_version}"]
    for a, la in enumerate(model.labels):
        for b, lb in enumerate(model.labels):
            lines.append(f"{la} {lb} {_fmt(model.transition_weights[a, b])}")
    inv = sorted(model.feature_vocab.items(), key=lambda kv: kv[1])
    for feat, idx in inv:
        w = model.state_weights[idx]
        lines.append(f"{feat}\t{_fmt(w[0])}\t{_fmt(w[1])}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> CrfModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header = lines[0] if lines else ""
    if header != FORMAT_HEADER:
        raise ModelFormatError(f"{path}: model format {header!r} does not match expected {FORMAT_HEADER!r}")
    try:
        sigma = float(lines[1].split("\t")[1])
        labels = tuple(lines[2].split("\t")[1:])
        version = int(lines[3].split("\t")[1])
    except (IndexError, ValueError):
        raise ModelFormatError(f"{path}: malformed model header") from None
    if version != TEMPLATE_VERSION:
        raise ModelFormatError(f"{path}: feature template version {version} does not match "
                               f"expected version {TEMPLATE_VERSION}")
    if labels != LABELS:
        raise ModelFormatError(f"{path}: label set {labels} does not match {LABELS}")
    trans = np.zeros((2, 2))
    for line in lines[4:8]:
        a, b, w = line.split(" ")
        trans[labels.index(a), labels.index(b)] = float(w)
    feats, weights = [], []
    for lineno, line in enumerate(lines[8:], 9):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ModelFormatError(f"{path}:{lineno}: expected feature<TAB>w_CARD<TAB>w_O")
        feats.append(parts[0])
        weights.append((float(parts[1]), float(parts[2])))
    W = np.array(weights, dtype=float).reshape(len(feats), 2)
    return CrfModel({f: i for i, f in enumerate(feats)}, W, trans, sigma, labels, version)
