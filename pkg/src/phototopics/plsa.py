"""pLSA training by EM, folding-in inference and dominant-topic assignment.

The model decomposes each document's word distribution as
P(w|d) = sum_k P(z_k|d) P(w|z_k). Training estimates P(z), P(w|z) and
P(z|d) by EM over the sparse co-occurrence matrix; unseen documents get
a mixture via the folding-in heuristic (P(w|z) frozen, only the document
mixture updated).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .corpus import CooccurrenceMatrix, Vocabulary
from .exceptions import NumericError, ValidationError

DEFAULT_TOPICS = 8
DEFAULT_MAX_ITERS = 200
DEFAULT_TOL = 1e-6
DEFAULT_SMOOTHING = 1e-10
DEFAULT_NULL_THRESHOLD = 0.035
DEFAULT_TOP_WORDS = 10

MODEL_FORMAT_VERSION = 1

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class TrainConfig:
    n_topics: int = DEFAULT_TOPICS
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    seed: int = 0
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        if self.n_topics < 1:
            raise ValidationError("n_topics must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValidationError("tol must be > 0")
        if self.smoothing < 0:
            raise ValidationError("smoothing must be >= 0")


@dataclass(frozen=True)
class TopicAssignment:
    """Dominant topic for one image; ``topic`` is None for the Null topic."""

    image_id: str
    mixture: tuple[float, ...]
    topic: int | None
    max_prob: float


class PlsaModel:
    """Fitted pLSA parameters.

    ``word_given_topic`` is K x M (each row a distribution over words),
    ``doc_mixtures`` is N x K (each row a distribution over topics for a
    training document), ``topic_prior`` is the length-K P(z).
    """

    def __init__(self, word_given_topic: np.ndarray, doc_mixtures: np.ndarray,
                 topic_prior: np.ndarray, seed: int, vocab_hash: str = "",
                 n_iters: int = 0, final_log_likelihood: float = float("nan")):
        self.word_given_topic = np.asarray(word_given_topic, dtype=np.float64)
        self.doc_mixtures = np.asarray(doc_mixtures, dtype=np.float64)
        self.topic_prior = np.asarray(topic_prior, dtype=np.float64)
        self.seed = int(seed)
        self.vocab_hash = vocab_hash
        self.n_iters = n_iters
        self.final_log_likelihood = final_log_likelihood

    @property
    def n_topics(self) -> int:
        return self.word_given_topic.shape[0]

    @property
    def n_words(self) -> int:
        return self.word_given_topic.shape[1]

    def validate(self, atol: float = 1e-9) -> None:
        for name, arr in (("word_given_topic", self.word_given_topic),
                          ("doc_mixtures", self.doc_mixtures)):
            if np.any(arr < 0):
                raise NumericError(f"negative entry in {name}")
            if arr.size and np.max(np.abs(arr.sum(axis=1) - 1.0)) > atol:
                raise NumericError(f"row of {name} does not sum to 1")
        if np.any(self.topic_prior < 0):
            raise NumericError("negative entry in topic_prior")
        if abs(self.topic_prior.sum() - 1.0) > atol:
            raise NumericError("topic_prior does not sum to 1")

    def to_json(self, include_doc_mixtures: bool = True) -> str:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "n_topics": self.n_topics,
            "n_words": self.n_words,
            "seed": self.seed,
            "vocab_hash": self.vocab_hash,
            "n_iters": self.n_iters,
            "final_log_likelihood": self.final_log_likelihood,
            "topic_prior": self.topic_prior.tolist(),
            "word_given_topic": self.word_given_topic.tolist(),
        }
        if include_doc_mixtures:
            payload["doc_mixtures"] = self.doc_mixtures.tolist()
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PlsaModel":
        payload = json.loads(text)
        doc_mixtures = payload.get("doc_mixtures")
        n_topics = payload["n_topics"]
        if doc_mixtures is None:
            doc_mixtures = np.zeros((0, n_topics))
        return cls(
            word_given_topic=np.array(payload["word_given_topic"], dtype=np.float64),
            doc_mixtures=np.array(doc_mixtures, dtype=np.float64),
            topic_prior=np.array(payload["topic_prior"], dtype=np.float64),
            seed=payload["seed"],
            vocab_hash=payload.get("vocab_hash", ""),
            n_iters=payload.get("n_iters", 0),
            final_log_likelihood=payload.get("final_log_likelihood", float("nan")),
        )

    def save(self, path, include_doc_mixtures: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json(include_doc_mixtures=include_doc_mixtures))

    @classmethod
    def load(cls, path) -> "PlsaModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(f.read())


def init_model(n_topics: int, n_words: int, seed: int,
               n_docs: int = 0) -> PlsaModel:
    """Seeded random topic-word rows, uniform document mixtures."""
    if n_topics < 1 or n_words < 1:
        raise ValidationError("n_topics and n_words must be >= 1")
    rng = np.random.default_rng(seed)
    word_given_topic = rng.random((n_topics, n_words)) + 1e-3
    word_given_topic /= word_given_topic.sum(axis=1, keepdims=True)
    doc_mixtures = np.full((n_docs, n_topics), 1.0 / n_topics)
    topic_prior = np.full(n_topics, 1.0 / n_topics)
    return PlsaModel(word_given_topic, doc_mixtures, topic_prior, seed=seed)


def log_likelihood(model: PlsaModel, X: CooccurrenceMatrix) -> float:
    """Sum of X(w,d) * log P(w|d); zero-probability terms are floored."""
    if X.n_words != model.n_words:
        raise ValidationError(
            f"matrix has {X.n_words} words but model expects {model.n_words}")
    if X.n_docs != model.doc_mixtures.shape[0]:
        raise ValidationError(
            f"matrix has {X.n_docs} docs but model carries "
            f"{model.doc_mixtures.shape[0]} mixtures")
    if X.nnz == 0:
        return 0.0
    pwd = np.einsum("ik,ki->i",
                    model.doc_mixtures[X.cols, :],
                    model.word_given_topic[:, X.rows])
    return float(np.sum(X.vals * np.log(np.maximum(pwd, _TINY))))


def em_step(model: PlsaModel, X: CooccurrenceMatrix,
            smoothing: float = DEFAULT_SMOOTHING) -> tuple[PlsaModel, float]:
    """One EM iteration; returns the new model and the log-likelihood of
    the *input* model.

    E-step: P(z|d,w) proportional to P(z|d) P(w|z). M-step renormalizes
    the posterior-weighted counts; ``smoothing`` is added to the P(w|z)
    numerators. A topic with zero total mass is reset to a uniform row.
    """
    if X.n_words != model.n_words:
        raise ValidationError(
            f"matrix has {X.n_words} words but model expects {model.n_words}")
    if X.n_docs != model.doc_mixtures.shape[0]:
        raise ValidationError("matrix document count does not match model")
    n_topics, n_words = model.word_given_topic.shape
    nwz, nzd, nz, ll = _kernels.em_sufficient_stats(
        X.rows, X.cols, X.vals, model.word_given_topic, model.doc_mixtures)

    nwz = nwz + smoothing
    row_mass = nwz.sum(axis=1)
    word_given_topic = np.empty_like(nwz)
    for k in range(n_topics):
        if row_mass[k] <= 0.0:
            warnings.warn(f"topic {k} lost all mass; reset to uniform",
                          RuntimeWarning, stacklevel=2)
            word_given_topic[k] = 1.0 / n_words
        else:
            word_given_topic[k] = nwz[k] / row_mass[k]

    doc_mass = nzd.sum(axis=1, keepdims=True)
    doc_mixtures = np.where(doc_mass > 0.0,
                            nzd / np.maximum(doc_mass, _TINY),
                            1.0 / n_topics)

    nz_total = nz.sum()
    topic_prior = nz / nz_total if nz_total > 0 else np.full(n_topics, 1.0 / n_topics)

    new_model = PlsaModel(word_given_topic, doc_mixtures, topic_prior,
                          seed=model.seed, vocab_hash=model.vocab_hash)
    return new_model, ll


def train(X: CooccurrenceMatrix, cfg: TrainConfig | None = None,
          vocab: Vocabulary | None = None) -> PlsaModel:
    """Run EM until the relative log-likelihood change drops below tol."""
    cfg = cfg or TrainConfig()
    if X.n_docs == 0:
        raise ValidationError("cannot train on an empty corpus")
    if X.n_words == 0:
        raise ValidationError("cannot train with an empty vocabulary")
    model = init_model(cfg.n_topics, X.n_words, cfg.seed, n_docs=X.n_docs)
    if vocab is not None:
        model.vocab_hash = vocab.digest()
    prev_ll = None
    n_iters = 0
    for _ in range(cfg.max_iters):
        model, ll = em_step(model, X, smoothing=cfg.smoothing)
        n_iters += 1
        if prev_ll is not None:
            denom = max(abs(prev_ll), 1.0)
            if abs(ll - prev_ll) / denom < cfg.tol:
                prev_ll = ll
                break
        prev_ll = ll
    model.n_iters = n_iters
    model.final_log_likelihood = log_likelihood(model, X)
    if not np.isfinite(model.final_log_likelihood):
        raise NumericError("non-finite log-likelihood after training")
    return model


def fold_in(model: PlsaModel, word_indices, word_values,
            max_iters: int = DEFAULT_MAX_ITERS, tol: float = 1e-10) -> np.ndarray:
    """Topic mixture for one unseen document; the model is not modified.

    An empty document folds in to the uniform mixture.
    """
    widx = np.asarray(word_indices, dtype=np.int64)
    wval = np.asarray(word_values, dtype=np.float64)
    if len(widx) and widx.max() >= model.n_words:
        raise ValidationError("word index out of range for model")
    return _kernels.fold_in_kernel(widx, wval, model.word_given_topic,
                                   max_iters, tol)


def assign_topic(mixture, threshold: float = DEFAULT_NULL_THRESHOLD
                 ) -> tuple[int | None, float]:
    """Argmax topic (ties to the lowest index), or None below threshold."""
    mixture = np.asarray(mixture, dtype=np.float64)
    if abs(mixture.sum() - 1.0) > 1e-6:
        raise ValidationError(f"mixture sums to {mixture.sum()}, expected 1")
    topic = int(np.argmax(mixture))
    max_prob = float(mixture[topic])
    if max_prob < threshold:
        return None, max_prob
    return topic, max_prob


def top_words(model: PlsaModel, vocab: Vocabulary, topic: int,
              n_top: int = DEFAULT_TOP_WORDS) -> list[tuple[str, float]]:
    """Highest-probability words of one topic, ties broken lexicographically."""
    if not 0 <= topic < model.n_topics:
        raise ValidationError(f"topic {topic} out of range")
    if n_top < 1:
        raise ValidationError("n_top must be >= 1")
    if vocab.size != model.n_words:
        raise ValidationError("vocabulary size does not match model")
    probs = model.word_given_topic[topic]
    order = sorted(range(vocab.size), key=lambda i: (-probs[i], vocab.words[i]))
    return [(vocab.words[i], float(probs[i])) for i in order[:n_top]]
