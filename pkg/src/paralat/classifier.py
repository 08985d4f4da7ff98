"""Paraphrase filtering: MT-style pair features, a dictionary entity
tagger, and a small logistic-regression classifier.

Feature extraction is deterministic and dependency-free: smoothed BLEU up
to order 4 in both directions, word-level edit rate, length ratio, unigram
precision/recall, and an entity-preservation bit from a gazetteer tagger.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .errors import ClassifierError, DegenerateLabels, EmptySentence
from .sampler import ParaphraseCandidate

LEARNING_RATE = 0.1
L2_STRENGTH = 1e-3
HELDOUT_FRACTION = 0.2


@dataclass(frozen=True)
class PairFeatures:
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    bleu_sym: float
    ter: float
    length_ratio: float
    unigram_precision: float
    unigram_recall: float
    ne_preserved: float

    def as_vector(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))


FEATURE_NAMES = tuple(f.name for f in fields(PairFeatures))


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int) -> float:
    """Cumulative BLEU with brevity penalty; add-1 smoothing for n >= 2."""
    log_precisions = []
    for n in range(1, max_n + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        total = max(sum(cand.values()), 0)
        if n >= 2:
            matches += 1
            total += 1
        if total == 0 or matches == 0:
            return 0.0
        log_precisions.append(math.log(matches / total))
    brevity = min(0.0, 1.0 - len(reference) / len(candidate))
    return math.exp(brevity + sum(log_precisions) / max_n)


def _edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    prev = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, 1):
        cur = [i]
        for j, tok_b in enumerate(b, 1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (tok_a != tok_b),
            ))
        prev = cur
    return prev[-1]


def _occurrences(haystack: Sequence[str], needle: Sequence[str]) -> int:
    if not needle:
        return 0
    count = 0
    i = 0
    while i + len(needle) <= len(haystack):
        if tuple(haystack[i:i + len(needle)]) == tuple(needle):
            count += 1
            i += len(needle)
        else:
            i += 1
    return count


def compute_features(
    source: Sequence[str],
    candidate: Sequence[str],
    entities: Sequence[tuple[int, int]] = (),
) -> PairFeatures:
    """Deterministic pair features; ``entities`` are token spans over the
    source whose surface strings must reappear verbatim in the candidate
    for the preservation bit to be 1."""
    if not source or not candidate:
        raise EmptySentence("both sentences must be non-empty")
    src = [t.lower() for t in source]
    cand = [t.lower() for t in candidate]

    bleus = [_bleu(cand, src, n) for n in range(1, 5)]
    reverse4 = _bleu(src, cand, 4)
    bleu_sym = math.sqrt(bleus[3] * reverse4)
    ter = min(2.0, _edit_distance(cand, src) / len(src))
    length_ratio = len(cand) / len(src)

    overlap = sum((Counter(cand) & Counter(src)).values())
    unigram_precision = overlap / len(cand)
    unigram_recall = overlap / len(src)

    mentions = Counter(tuple(src[i:j]) for i, j in entities)
    preserved = all(
        _occurrences(cand, mention) >= count
        for mention, count in mentions.items()
    )
    return PairFeatures(
        bleu1=bleus[0],
        bleu2=bleus[1],
        bleu3=bleus[2],
        bleu4=bleus[3],
        bleu_sym=bleu_sym,
        ter=ter,
        length_ratio=length_ratio,
        unigram_precision=unigram_precision,
        unigram_recall=unigram_recall,
        ne_preserved=1.0 if preserved else 0.0,
    )


# --- dictionary entity tagger -------------------------------------------------

class Gazetteer:
    """Entity surface forms, matched longest-first and case-insensitively.

    The line order of the dictionary file defines the rank used by the
    entity resolution lattice.
    """

    def __init__(self, surfaces: Iterable[Sequence[str]]) -> None:
        self.surfaces: list[tuple[str, ...]] = []
        seen = set()
        for surface in surfaces:
            key = tuple(t.lower() for t in surface)
            if key and key not in seen:
                seen.add(key)
                self.surfaces.append(key)
        self.rank = {s: i for i, s in enumerate(self.surfaces)}
        self._max_len = max((len(s) for s in self.surfaces), default=0)

    @classmethod
    def load(cls, path: str) -> "Gazetteer":
        with open(path, encoding="utf-8") as handle:
            lines = [
                line.strip().split()
                for line in handle
                if line.strip() and not line.startswith("#")
            ]
        return cls(lines)

    def tag(self, tokens: Sequence[str]) -> list[tuple[int, int]]:
        """Non-overlapping entity spans, longest match first."""
        lowered = [t.lower() for t in tokens]
        spans: list[tuple[int, int]] = []
        i = 0
        while i < len(lowered):
            match = 0
            for width in range(min(self._max_len, len(lowered) - i), 0, -1):
                if tuple(lowered[i:i + width]) in self.rank:
                    match = width
                    break
            if match:
                spans.append((i, i + match))
                i += match
            else:
                i += 1
        return spans


# --- the classifier -----------------------------------------------------------

@dataclass(frozen=True)
class ClassifierModel:
    """Linear model over raw PairFeatures values plus a decision threshold.

    Standardization learned at training time is folded into the stored
    weights, so scoring is a plain dot product.
    """

    weights: tuple[float, ...]
    bias: float
    threshold: float

    def score(self, features: PairFeatures) -> float:
        z = self.bias + sum(
            w * x for w, x in zip(self.weights, features.as_vector())
        )
        return _sigmoid(z)

    def weight_of(self, name: str) -> float:
        return self.weights[FEATURE_NAMES.index(name)]


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


LabeledPair = tuple[Sequence[str], Sequence[str], int]


def read_labeled_pairs(path: str) -> list[LabeledPair]:
    """Read "source<TAB>candidate<TAB>0|1" lines."""
    pairs: list[LabeledPair] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[2] not in ("0", "1"):
                raise ClassifierError(f"{path}:{lineno}: bad labeled pair")
            pairs.append((parts[0].split(), parts[1].split(), int(parts[2])))
    return pairs


Group = tuple[tuple[float, ...], int, int]  # (features, label, count)


def _grouped_split(
    rows: list[tuple[tuple[float, ...], int]], seed: int
) -> tuple[list[Group], list[Group]]:
    """Stratified 80/20 split by distinct (features, label) group.

    Everything downstream works on distinct groups weighted by their
    multiplicity, which keeps training bit-exactly stable when the dataset
    is duplicated; each class keeps at least one group in training.
    """
    by_class: dict[int, dict[tuple, int]] = {0: {}, 1: {}}
    for vec, label in rows:
        by_class[label][vec] = by_class[label].get(vec, 0) + 1
    rng = random.Random(seed)
    train: list[Group] = []
    heldout: list[Group] = []
    for label in (0, 1):
        groups = sorted(by_class[label])
        rng.shuffle(groups)
        class_total = sum(by_class[label].values())
        target = HELDOUT_FRACTION * class_total
        taken = 0
        for pos, vec in enumerate(groups):
            count = by_class[label][vec]
            is_last_for_train = pos == len(groups) - 1
            if taken < target and not is_last_for_train:
                heldout.append((vec, label, count))
                taken += count
            else:
                train.append((vec, label, count))
    return sorted(train), sorted(heldout)


def train(
    pairs: Sequence[LabeledPair],
    epochs: int = 200,
    seed: int = 0,
    gazetteer: Gazetteer | None = None,
) -> ClassifierModel:
    """Logistic regression by full-batch gradient descent.

    Features are standardized with training statistics; the learned
    weights are folded back to the raw feature scale for storage.  The
    decision threshold maximizes positive-class F1 on a held-out 20% split
    (falling back to the training rows when the held-out part is empty or
    single-class).  Deterministic given the seed.
    """
    labels = sorted({label for _, _, label in pairs})
    if labels != [0, 1]:
        raise DegenerateLabels(f"need both labels, got {labels}")
    rows: list[tuple[tuple[float, ...], int]] = []
    for source, candidate, label in pairs:
        spans = gazetteer.tag(source) if gazetteer is not None else ()
        rows.append((compute_features(source, candidate, spans).as_vector(), label))

    train_groups, heldout_groups = _grouped_split(rows, seed)
    points = np.array([vec for vec, _, _ in train_groups])
    y_train = np.array([label for _, label, _ in train_groups], dtype=float)
    counts = np.array([count for _, _, count in train_groups], dtype=float)
    frac = counts / counts.sum()

    mean = frac @ points
    var = frac @ (points - mean) ** 2
    std = np.sqrt(var)
    std[std == 0.0] = 1.0
    x_std = (points - mean) / std

    weights = np.zeros(x_std.shape[1])
    bias = 0.0
    for _ in range(epochs):
        z = np.clip(x_std @ weights + bias, -35.0, 35.0)
        prob = 1.0 / (1.0 + np.exp(-z))
        error = prob - y_train
        grad_w = x_std.T @ (frac * error) + L2_STRENGTH * weights
        grad_b = float(frac @ error)
        weights -= LEARNING_RATE * grad_w
        bias -= LEARNING_RATE * grad_b

    # Fold standardization into raw-scale weights.
    raw_w = weights / std
    raw_b = float(bias - (weights * mean / std).sum())

    def score_row(vec: tuple[float, ...]) -> float:
        return _sigmoid(raw_b + float(np.dot(raw_w, vec)))

    tune = heldout_groups
    if not tune or len({label for _, label, _ in tune}) < 2:
        tune = train_groups
    scored = [(score_row(vec), label, count) for vec, label, count in tune]
    best_threshold = 0.5
    best_f1 = -1.0
    for candidate_threshold in sorted({s for s, _, _ in scored}):
        tp = sum(c for s, y, c in scored if y == 1 and s >= candidate_threshold)
        fp = sum(c for s, y, c in scored if y == 0 and s >= candidate_threshold)
        fn = sum(c for s, y, c in scored if y == 1 and s < candidate_threshold)
        f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
        if f1 > best_f1 or (f1 == best_f1 and candidate_threshold < best_threshold):
            best_f1 = f1
            best_threshold = candidate_threshold
    return ClassifierModel(
        weights=tuple(float(w) for w in raw_w),
        bias=raw_b,
        threshold=best_threshold,
    )


def filter_candidates(
    model: ClassifierModel,
    source: Sequence[str],
    candidates: Sequence[ParaphraseCandidate],
    gazetteer: Gazetteer | None = None,
    threshold: float | None = None,
) -> list[tuple[ParaphraseCandidate, float]]:
    """Score candidates and drop those below the threshold.

    Returns (candidate, score) pairs ordered by descending score, ties by
    sample seed.
    """
    cut = model.threshold if threshold is None else threshold
    spans = gazetteer.tag(source) if gazetteer is not None else ()
    scored = [
        (cand, model.score(compute_features(source, cand.tokens, spans)))
        for cand in candidates
    ]
    kept = [(c, s) for c, s in scored if s >= cut]
    kept.sort(key=lambda item: (-item[1], item[0].seed))
    return kept


# --- model file ----------------------------------------------------------------

def save_model(model: ClassifierModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for name, weight in zip(FEATURE_NAMES, model.weights):
            handle.write(f"FEATURE\t{name}\t{format(weight, '.17g')}\n")
        handle.write(f"BIAS\t{format(model.bias, '.17g')}\n")
        handle.write(f"THRESHOLD\t{format(model.threshold, '.17g')}\n")


def load_model(path: str) -> ClassifierModel:
    weights: dict[str, float] = {}
    bias: float | None = None
    threshold: float | None = None
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            parts = line.rstrip("\n").split("\t")
            if parts[0] == "FEATURE" and len(parts) == 3:
                weights[parts[1]] = float(parts[2])
            elif parts[0] == "BIAS" and len(parts) == 2:
                bias = float(parts[1])
            elif parts[0] == "THRESHOLD" and len(parts) == 2:
                threshold = float(parts[1])
            else:
                raise ClassifierError(f"{path}:{lineno}: bad model line")
    if bias is None or threshold is None or set(weights) != set(FEATURE_NAMES):
        raise ClassifierError(f"{path}: incomplete model file")
    return ClassifierModel(
        weights=tuple(weights[name] for name in FEATURE_NAMES),
        bias=bias,
        threshold=threshold,
    )
