"""Latent-state learning: inside/outside features, per-symbol clustering,
and frequency-count parameter estimation.

The pipeline: every node of every (binarized) tree is mapped to a feature
vector, vectors are clustered per nonterminal symbol into ``m`` states, and
a grammar is read off the state-annotated treebank by relative-frequency
counting.  A second, semantic layer can be trained from bag-of-word
features enriched with word alignments of paraphrase pairs; combining both
layers yields the two-layer grammar used for paraphrase lattices.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AssignmentMismatch,
    EmptyTreebank,
    EstimationError,
    MissingAlignments,
)
from .grammar import (
    BinaryRhs,
    Context,
    LatentGrammar,
    LayerConfig,
    StateLabel,
)
from .treebank import (
    BIN_PREFIX,
    Path,
    Tree,
    decompose,
    iter_nodes,
    tree_yield,
)

FeatureVector = dict[str, float]
NodeKey = tuple[int, Path]  # (tree index, node path)

KMEANS_MAX_ITER = 50


@dataclass(frozen=True)
class StateAssignment:
    """Cluster index per (tree, node) for one layer."""

    m: int
    states: Mapping[NodeKey, int]

    def state_of(self, key: NodeKey) -> int:
        return self.states[key]


@dataclass(frozen=True)
class AlignmentRecord:
    qid_a: int
    qid_b: int
    pairs: tuple[tuple[int, int], ...]


def read_alignments(path: str) -> list[AlignmentRecord]:
    """Read "qidA<TAB>qidB<TAB>i-j[,i-j...]" alignment lines."""
    records: list[AlignmentRecord] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise EstimationError(f"{path}:{lineno}: expected 3 tab-separated fields")
            try:
                qa, qb = int(parts[0]), int(parts[1])
                pairs = tuple(
                    (int(i), int(j))
                    for i, j in (item.split("-") for item in parts[2].split(","))
                )
            except ValueError as exc:
                raise EstimationError(f"{path}:{lineno}: bad alignment {line!r}") from exc
            records.append(AlignmentRecord(qa, qb, pairs))
    return records


def aligned_words_index(
    treebank: Sequence[Tree], records: Iterable[AlignmentRecord]
) -> dict[int, dict[int, set[str]]]:
    """Per tree, per token position: the words aligned to that token.

    Alignment indices are validated against the tree yields.
    """
    yields = [tree_yield(t) for t in treebank]
    index: dict[int, dict[int, set[str]]] = defaultdict(lambda: defaultdict(set))
    for rec in records:
        if not (0 <= rec.qid_a < len(treebank) and 0 <= rec.qid_b < len(treebank)):
            raise EstimationError(f"alignment references unknown tree: {rec}")
        ya, yb = yields[rec.qid_a], yields[rec.qid_b]
        for i, j in rec.pairs:
            if i >= len(ya) or j >= len(yb) or i < 0 or j < 0:
                raise EstimationError(f"alignment index out of range: {rec}")
            index[rec.qid_a][i].add(yb[j])
            index[rec.qid_b][j].add(ya[i])
    return index


def _length_bucket(n: int) -> str:
    if n <= 2:
        return str(n)
    if n <= 5:
        return "3-5"
    return "6+"


def extract_features(
    tree: Tree,
    path: Path,
    layer: str = "syntactic",
    aligned: Mapping[int, set[str]] | None = None,
) -> FeatureVector:
    """Feature vector for one node of a binarized tree.

    The syntactic layer captures the local context: the node's rule
    signature, first/last inside terminal, parent and sibling labels from
    the outside tree, and a span-length bucket.  The semantic layer is a
    bag of the inside-yield words plus every word aligned to them in
    paraphrase pairs (``aligned`` maps token positions of this tree to
    aligned words); bag entries are presence indicators.
    """
    ctx = decompose(tree, path)
    inside = ctx.inside
    terms = tree_yield(inside)
    if layer == "syntactic":
        if inside.is_preterminal:
            rhs = inside.word
        else:
            rhs = " ".join(c.label for c in inside.children)
        return {
            f"rule={inside.label}->{rhs}": 1.0,
            f"first={terms[0]}": 1.0,
            f"last={terms[-1]}": 1.0,
            f"parent={ctx.parent_label}": 1.0,
            f"sibling={ctx.sibling_label}": 1.0,
            f"len={_length_bucket(len(terms))}": 1.0,
        }
    if layer == "semantic":
        if aligned is None:
            raise MissingAlignments("semantic features require alignment data")
        words = set(terms)
        for pos in range(*ctx.span):
            words.update(aligned.get(pos, ()))
        return {f"w={w}": 1.0 for w in words}
    raise EstimationError(f"unknown feature layer {layer!r}")


# --- clustering -------------------------------------------------------------

def _canonical_items(vec: FeatureVector) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(vec.items()))


def _symbol_seed(seed: int, symbol: str) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(symbol.encode("utf-8"))])


def _kmeans(
    points: np.ndarray, weights: np.ndarray, m: int, rng: np.random.Generator
) -> np.ndarray:
    """Weighted Lloyd k-means with k-means++ seeding; returns labels.

    ``points`` holds distinct rows; ``weights`` their multiplicities.
    Capped at KMEANS_MAX_ITER iterations; ties in assignment go to the
    lowest center index.
    """
    n = points.shape[0]
    k = min(m, n)
    centers = np.empty((k, points.shape[1]))
    probs = weights / weights.sum()
    first = rng.choice(n, p=probs)
    centers[0] = points[first]
    dist2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        mass = weights * dist2
        total = mass.sum()
        if total <= 0.0:
            # All remaining points coincide with chosen centers.
            k = c
            centers = centers[:k]
            break
        centers[c] = points[rng.choice(n, p=mass / total)]
        dist2 = np.minimum(dist2, ((points - centers[c]) ** 2).sum(axis=1))

    labels: np.ndarray | None = None
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            mask = labels == c
            if mask.any():
                w = weights[mask]
                centers[c] = (points[mask] * w[:, None]).sum(axis=0) / w.sum()
    return labels


def cluster_states(
    vectors: Mapping[NodeKey, FeatureVector],
    symbols: Mapping[NodeKey, str],
    m: int,
    seed: int,
) -> StateAssignment:
    """Cluster nodes into ``m`` states per nonterminal symbol.

    Vectors are tf-idf weighted (idf over the symbol's own collection) and
    L2-normalized.  Clustering runs over the distinct vectors, ordered
    canonically and weighted by multiplicity, so the result is independent
    of input order and duplicated inputs always share a state.  When a
    symbol has fewer distinct vectors than ``m`` the extra indices stay
    unused.
    """
    if m < 1:
        raise EstimationError(f"state count must be >= 1, got {m}")
    if not vectors:
        raise EstimationError("no vectors to cluster")

    by_symbol: dict[str, list[NodeKey]] = defaultdict(list)
    for key in vectors:
        by_symbol[symbols[key]].append(key)

    states: dict[NodeKey, int] = {}
    for symbol in sorted(by_symbol):
        keys = by_symbol[symbol]
        groups: dict[tuple, list[NodeKey]] = defaultdict(list)
        for key in keys:
            groups[_canonical_items(vectors[key])].append(key)
        distinct = sorted(groups)
        if m == 1 or len(distinct) == 1:
            for group in groups.values():
                for key in group:
                    states[key] = 0
            continue

        # tf-idf over the symbol's collection (duplicates included in df).
        df: Counter[str] = Counter()
        for items in distinct:
            mult = len(groups[items])
            for name, _ in items:
                df[name] += mult
        n_total = len(keys)
        names = sorted(df)
        col = {name: i for i, name in enumerate(names)}
        idf = {
            name: math.log((1.0 + n_total) / (1.0 + df[name])) + 1.0 for name in names
        }
        points = np.zeros((len(distinct), len(names)))
        for row, items in enumerate(distinct):
            for name, count in items:
                points[row, col[name]] = count * idf[name]
            norm = np.linalg.norm(points[row])
            if norm > 0:
                points[row] /= norm
        weights = np.array([float(len(groups[items])) for items in distinct])

        labels = _kmeans(points, weights, m, _symbol_seed(seed, symbol))
        for row, items in enumerate(distinct):
            for key in groups[items]:
                states[key] = int(labels[row])
    return StateAssignment(m=m, states=states)


# --- maximum likelihood estimation ------------------------------------------

def _node_symbols(treebank: Sequence[Tree]) -> dict[NodeKey, str]:
    return {
        (tid, path): node.label
        for tid, tree in enumerate(treebank)
        for path, node in iter_nodes(tree)
    }


def _check_coverage(
    treebank: Sequence[Tree], assignment: StateAssignment, layer: str, skip_bin: bool
) -> None:
    for tid, tree in enumerate(treebank):
        for path, node in iter_nodes(tree):
            if skip_bin and node.label.startswith(BIN_PREFIX):
                continue
            if (tid, path) not in assignment.states:
                raise AssignmentMismatch(
                    f"{layer} layer misses tree {tid} node {path}"
                )


def _inherited_semantic(
    sem: StateAssignment, tid: int, path: Path, label: str
) -> int:
    # Binarization artifacts carry the semantic state of the original parent.
    if not label.startswith(BIN_PREFIX):
        return sem.states[(tid, path)]
    probe = path
    while probe:
        probe = probe[:-1]
        if (tid, probe) in sem.states:
            return sem.states[(tid, probe)]
    raise AssignmentMismatch(f"no semantic ancestor for tree {tid} node {path}")


def estimate_mle(
    treebank: Sequence[Tree],
    assignment: StateAssignment,
    semantic: StateAssignment | None = None,
) -> LatentGrammar:
    """Relative-frequency estimates over the state-annotated treebank.

    Root probabilities are root-occurrence counts over the tree count;
    binary and lexical probabilities are conditional on the parent
    (symbol, state) context.  With ``semantic`` given, nodes carry joint
    two-layer states; "@" intermediate symbols inherit the semantic state
    of their original parent node.
    """
    if not treebank:
        raise EmptyTreebank("cannot estimate from an empty treebank")
    _check_coverage(treebank, assignment, "syntactic", skip_bin=False)
    if semantic is not None:
        _check_coverage(treebank, semantic, "semantic", skip_bin=True)
        layers = LayerConfig(assignment.m, semantic.m)
    else:
        layers = LayerConfig(assignment.m)

    def state_at(tid: int, path: Path, label: str) -> StateLabel:
        syn = assignment.states[(tid, path)]
        if semantic is None:
            return StateLabel(syn)
        return StateLabel(syn, _inherited_semantic(semantic, tid, path, label))

    root_counts: Counter[Context] = Counter()
    binary_counts: dict[Context, Counter[BinaryRhs]] = defaultdict(Counter)
    lexical_counts: dict[Context, Counter[str]] = defaultdict(Counter)
    interminals: set[str] = set()
    preterminals: set[str] = set()

    for tid, tree in enumerate(treebank):
        root_counts[(tree.label, state_at(tid, (), tree.label))] += 1
        for path, node in iter_nodes(tree):
            ctx = (node.label, state_at(tid, path, node.label))
            if node.is_preterminal:
                preterminals.add(node.label)
                lexical_counts[ctx][node.word] += 1
            else:
                if len(node.children) != 2:
                    raise EstimationError(
                        f"tree {tid} is not binarized at node {path}"
                    )
                interminals.add(node.label)
                left, right = node.children
                rhs = (
                    left.label, state_at(tid, path + (0,), left.label),
                    right.label, state_at(tid, path + (1,), right.label),
                )
                binary_counts[ctx][rhs] += 1

    both = interminals & preterminals
    if both:
        raise EstimationError(
            f"symbols used both as interminal and preterminal: {sorted(both)}"
        )

    n_trees = len(treebank)
    roots = {ctx: count / n_trees for ctx, count in root_counts.items()}
    binary = {
        ctx: {rhs: c / sum(table.values()) for rhs, c in table.items()}
        for ctx, table in binary_counts.items()
    }
    lexical = {
        ctx: {word: c / sum(table.values()) for word, c in table.items()}
        for ctx, table in lexical_counts.items()
    }
    return LatentGrammar(
        layers=layers,
        interminals=frozenset(interminals),
        preterminals=frozenset(preterminals),
        roots=roots,
        binary=binary,
        lexical=lexical,
    )


def annotate_bilayered(
    treebank: Sequence[Tree],
    syntactic: StateAssignment,
    semantic: StateAssignment,
) -> tuple[list[Tree], LatentGrammar]:
    """Doubly-annotated treebank plus the two-layer grammar.

    Returned trees carry "label-h1-h2" decorations for inspection; the
    grammar is the MLE over the joint annotation.
    """
    grammar = estimate_mle(treebank, syntactic, semantic)

    def decorate(tid: int, tree: Tree, path: Path) -> Tree:
        syn = syntactic.states[(tid, path)]
        sem = _inherited_semantic(semantic, tid, path, tree.label)
        label = f"{tree.label}-{syn}-{sem}"
        if tree.is_preterminal:
            return Tree(label, word=tree.word)
        return Tree(
            label,
            children=tuple(
                decorate(tid, c, path + (i,)) for i, c in enumerate(tree.children)
            ),
        )

    annotated = [decorate(tid, tree, ()) for tid, tree in enumerate(treebank)]
    return annotated, grammar


# --- end-to-end grammar training ---------------------------------------------

def train_syntactic_assignment(
    treebank: Sequence[Tree], m: int, seed: int
) -> StateAssignment:
    symbols = _node_symbols(treebank)
    vectors = {
        key: extract_features(treebank[key[0]], key[1], "syntactic")
        for key in symbols
    }
    return cluster_states(vectors, symbols, m, seed)


def train_semantic_assignment(
    treebank: Sequence[Tree],
    records: Iterable[AlignmentRecord],
    m: int,
    seed: int,
) -> StateAssignment:
    index = aligned_words_index(treebank, records)
    symbols = {
        key: sym
        for key, sym in _node_symbols(treebank).items()
        if not sym.startswith(BIN_PREFIX)
    }
    vectors = {
        key: extract_features(
            treebank[key[0]], key[1], "semantic", aligned=index.get(key[0], {})
        )
        for key in symbols
    }
    return cluster_states(vectors, symbols, m, seed)


def train_grammar(treebank: Sequence[Tree], m: int, seed: int) -> LatentGrammar:
    """One-layer grammar: cluster syntactic states, then count."""
    if not treebank:
        raise EmptyTreebank("cannot train on an empty treebank")
    return estimate_mle(treebank, train_syntactic_assignment(treebank, m, seed))


def train_bilayered_grammar(
    treebank: Sequence[Tree],
    records: Iterable[AlignmentRecord],
    m1: int,
    m2: int,
    seed: int,
) -> tuple[list[Tree], LatentGrammar]:
    """Two-layer grammar from a treebank plus paraphrase-pair alignments."""
    if not treebank:
        raise EmptyTreebank("cannot train on an empty treebank")
    syn = train_syntactic_assignment(treebank, m1, seed)
    sem = train_semantic_assignment(treebank, records, m2, seed)
    return annotate_bilayered(treebank, syn, sem)
