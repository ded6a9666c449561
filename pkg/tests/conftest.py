import io
import json

import numpy as np
import pytest

from phototopics.corpus import CooccurrenceMatrix, Vocabulary
from phototopics.taxonomy import load_taxonomy


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba JIT compilation once so timed tests measure math only."""
    from phototopics import _kernels

    rows = np.array([0], dtype=np.int64)
    cols = np.array([0], dtype=np.int64)
    vals = np.array([1.0])
    pwz = np.array([[1.0]])
    pzd = np.array([[1.0]])
    _kernels.em_sufficient_stats(rows, cols, vals, pwz, pzd)
    _kernels.fold_in_kernel(rows, vals, pwz, 5, 1e-6)


def make_corpus(dense, doc_ids=None):
    """CooccurrenceMatrix from a dense M x N array."""
    dense = np.asarray(dense, dtype=np.float64)
    rows, cols = np.nonzero(dense)
    if doc_ids is None:
        doc_ids = [f"img{j}" for j in range(dense.shape[1])]
    return CooccurrenceMatrix(dense.shape[0], doc_ids, rows, cols,
                              dense[rows, cols])


def random_corpus(rng, max_docs=20, max_words=30):
    """Small random sparse count matrix for EM property tests."""
    n_docs = int(rng.integers(2, max_docs + 1))
    n_words = int(rng.integers(2, max_words + 1))
    dense = (rng.random((n_words, n_docs)) < 0.3).astype(float)
    dense *= rng.integers(1, 4, size=dense.shape)
    # make sure no document and no word is entirely empty
    for j in range(n_docs):
        if dense[:, j].sum() == 0:
            dense[int(rng.integers(n_words)), j] = 1.0
    return make_corpus(dense)


def planted_corpus(n_topics=3, words_per_topic=10, n_docs=300,
                   tags_per_doc=10, seed=1234):
    """Corpus with disjoint per-topic vocabularies and known labels."""
    rng = np.random.default_rng(seed)
    n_words = n_topics * words_per_topic
    labels = rng.integers(0, n_topics, size=n_docs)
    dense = np.zeros((n_words, n_docs))
    for j, z in enumerate(labels):
        draws = rng.integers(0, words_per_topic, size=tags_per_doc)
        for w in draws:
            dense[z * words_per_topic + int(w), j] = 1.0  # binary weighting
    return make_corpus(dense), labels


def toy_graph():
    """The 4-node chain root -> animal -> {dog, cat} with fixed ICs."""
    taxonomy = io.StringIO("n_root\t\nn_animal\tn_root\nn_dog\tn_animal\nn_cat\tn_animal\n")
    lexicon = io.StringIO("dog\tn_dog\ncat\tn_cat\nanimal\tn_animal\n")
    ic = io.StringIO("n_root\t0.0\nn_animal\t0.7\nn_dog\t2.0\nn_cat\t1.8\n")
    return load_taxonomy(taxonomy, lexicon, ic_stream=ic)


def random_dag_graph(rng, max_nodes=50):
    """Random rooted DAG with ICs derived from random sense counts."""
    n = int(rng.integers(3, max_nodes + 1))
    names = [f"s{i:02d}" for i in range(n)]
    tax_lines = [f"{names[0]}\t"]
    for i in range(1, n):
        n_parents = int(rng.integers(1, min(i, 3) + 1))
        parents = rng.choice(i, size=n_parents, replace=False)
        tax_lines.append(f"{names[i]}\t" + ",".join(names[p] for p in parents))
    lex_lines = [f"w{i:02d}\t{names[i]}" for i in range(n)]
    counts_lines = [f"{names[i]}\t{int(rng.integers(0, 20))}" for i in range(n)]
    counts_lines[-1] = f"{names[-1]}\t5"  # keep total positive
    return load_taxonomy(io.StringIO("\n".join(tax_lines)),
                         io.StringIO("\n".join(lex_lines)),
                         counts_stream=io.StringIO("\n".join(counts_lines)))


FOOD_WORDS = ["apple", "bread", "cheese", "pizza", "soup",
              "cake", "pasta", "rice", "salad", "stew"]
ANIMAL_WORDS = ["dog", "cat", "horse", "rabbit", "bird",
                "fox", "wolf", "cow", "sheep", "goat"]


def food_animal_setup(ic_scale=1.0):
    """Toy taxonomy with food/animal branches plus a two-topic model whose
    top words are hyponyms of food (topic 0) and animal (topic 1)."""
    tax_lines = ["root\t", "food\troot", "beverage\tfood",
                 "animal\troot", "pet\tanimal"]
    lex_lines = ["food\tfood", "drinks\tbeverage",
                 "animals\tanimal", "pets\tpet"]
    ic_values = {"root": 0.0, "food": 1.0, "beverage": 1.5,
                 "animal": 1.0, "pet": 1.5}
    for w in FOOD_WORDS:
        tax_lines.append(f"n_{w}\tfood")
        lex_lines.append(f"{w}\tn_{w}")
        ic_values[f"n_{w}"] = 2.0
    for w in ANIMAL_WORDS:
        tax_lines.append(f"n_{w}\tpet")
        lex_lines.append(f"{w}\tn_{w}")
        ic_values[f"n_{w}"] = 2.0
    ic_lines = [f"{s}\t{v * ic_scale}" for s, v in ic_values.items()]
    graph = load_taxonomy(io.StringIO("\n".join(tax_lines)),
                          io.StringIO("\n".join(lex_lines)),
                          ic_stream=io.StringIO("\n".join(ic_lines)))

    from phototopics.plsa import PlsaModel

    words = tuple(sorted(FOOD_WORDS + ANIMAL_WORDS))
    vocab = Vocabulary(words, 5, 2)
    pwz = np.full((2, len(words)), 1e-6)
    for i, w in enumerate(words):
        pwz[0 if w in FOOD_WORDS else 1, i] = 1.0
    pwz /= pwz.sum(axis=1, keepdims=True)
    model = PlsaModel(pwz, np.zeros((0, 2)), np.array([0.5, 0.5]), seed=0)
    return graph, model, vocab


def tag_record_line(image_id, collection_id, tags):
    return json.dumps({
        "image_id": image_id,
        "collection_id": collection_id,
        "tags": [{"tag": t, "confidence": c} for t, c in tags],
    })
