"""Toy knowledge-base question answering over semantic graphs.

Question graphs (hand-authored files; one designated TARGET node) are
grounded into KB subgraphs by beam search over per-edge and per-type
decisions, executed as conjunctive queries with TARGET as the answer
variable, and scored by a linear model trained with the averaged
structured perceptron against minimal-loss oracle groundings.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyGold,
    NoEntityCandidates,
    SemparseError,
    UnboundTarget,
)

DEFAULT_BEAM = 100
ORACLE_BEAM = 1000
ENTITY_LATTICE_TOP = 10

FeatureDict = dict[str, float]


# --- knowledge base -----------------------------------------------------------

@dataclass(frozen=True)
class KnowledgeGraph:
    entities: tuple[str, ...]  # in file order; order defines resolution rank
    triples: frozenset[tuple[str, str, str]]
    type_assertions: frozenset[tuple[str, str]]

    @property
    def relations(self) -> frozenset[str]:
        return frozenset(r for _, r, _ in self.triples)

    @property
    def types(self) -> frozenset[str]:
        return frozenset(t for _, t in self.type_assertions)

    def subjects(self, relation: str, obj: str) -> frozenset[str]:
        return frozenset(s for s, r, o in self.triples if r == relation and o == obj)

    def objects(self, subj: str, relation: str) -> frozenset[str]:
        return frozenset(o for s, r, o in self.triples if r == relation and s == subj)

    def entities_of_type(self, type_name: str) -> frozenset[str]:
        return frozenset(e for e, t in self.type_assertions if t == type_name)


def load_kb(path: str) -> KnowledgeGraph:
    """Read TSV triples plus "TYPE<TAB>entity<TAB>type" assertions."""
    entities: list[str] = []
    seen: set[str] = set()
    triples: set[tuple[str, str, str]] = set()
    types: set[tuple[str, str]] = set()

    def note(entity: str) -> None:
        if entity not in seen:
            seen.add(entity)
            entities.append(entity)

    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] == "TYPE" and len(parts) == 3:
                note(parts[1])
                types.add((parts[1], parts[2]))
            elif len(parts) == 3:
                note(parts[0])
                note(parts[2])
                triples.add((parts[0], parts[1], parts[2]))
            else:
                raise SemparseError(f"{path}:{lineno}: bad KB line {line!r}")
    return KnowledgeGraph(
        entities=tuple(entities),
        triples=frozenset(triples),
        type_assertions=frozenset(types),
    )


_CAMEL = re.compile(r"[A-Z][a-z]*|[a-z]+|\d+")


def entity_surface(entity: str) -> tuple[str, ...]:
    """Canonical mention tokens of a KB entity id (CamelCase split)."""
    return tuple(m.lower() for m in _CAMEL.findall(entity))


# --- question graphs -----------------------------------------------------------

@dataclass(frozen=True)
class UngroundedGraph:
    """A question's semantic graph plus the paraphrase it came from.

    Events carry binary NL predicates to entity mentions and the TARGET;
    type nodes constrain the TARGET (or a named entity node).
    """

    name: str
    target: str
    entity_nodes: tuple[tuple[str, tuple[str, ...]], ...]  # (id, mention tokens)
    type_nodes: tuple[tuple[str, str, str], ...]  # (id, label, constrained node)
    events: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (event, node, NL predicate)
    text: tuple[str, ...] = ()
    classifier_score: float = 1.0

    def entity_ids(self) -> tuple[str, ...]:
        return tuple(nid for nid, _ in self.entity_nodes)

    def mention_of(self, node_id: str) -> tuple[str, ...]:
        for nid, mention in self.entity_nodes:
            if nid == node_id:
                return mention
        raise SemparseError(f"{self.name}: unknown entity node {node_id!r}")

    def entity_edges(self) -> tuple[tuple[str, str, str, str], ...]:
        """Entity-entity edges: (event, node1, node2, NL predicate).

        An event with arcs to several entity/target nodes contributes one
        edge per node pair; the predicate joins the two arc labels.
        """
        grounded_kinds = set(self.entity_ids()) | {self.target}
        by_event: dict[str, list[tuple[str, str]]] = defaultdict(list)
        for event, node, label in self.edges:
            if node in grounded_kinds:
                by_event[event].append((node, label))
        out = []
        for event in self.events:
            neighbors = sorted(by_event.get(event, []))
            for (n1, l1), (n2, l2) in itertools.combinations(neighbors, 2):
                if n1 == n2:
                    continue
                out.append((event, n1, n2, f"{l1}|{l2}"))
        return tuple(out)


def load_ungrounded(path: str, name: str | None = None) -> UngroundedGraph:
    """Read a question graph file (ENTITY/TYPE/EVENT/TARGET/EDGE lines,
    optional TEXT and SCORE lines)."""
    target: str | None = None
    entity_nodes: list[tuple[str, tuple[str, ...]]] = []
    type_nodes: list[tuple[str, str, str]] = []
    events: list[str] = []
    edges: list[tuple[str, str, str]] = []
    text: tuple[str, ...] = ()
    score = 1.0
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "TEXT" and len(parts) >= 2:
                text = tuple(t.lower() for t in parts[1:])
            elif kind == "SCORE" and len(parts) == 2:
                score = float(parts[1])
            elif kind == "ENTITY" and len(parts) >= 3:
                entity_nodes.append((parts[1], tuple(t.lower() for t in parts[2:])))
            elif kind == "TYPE" and len(parts) in (3, 4):
                constrains = parts[3] if len(parts) == 4 else "target"
                type_nodes.append((parts[1], parts[2], constrains))
            elif kind == "EVENT" and len(parts) == 2:
                events.append(parts[1])
            elif kind == "TARGET" and len(parts) == 2:
                if target is not None:
                    raise SemparseError(f"{path}:{lineno}: second TARGET")
                target = parts[1]
            elif kind == "EDGE" and len(parts) == 4:
                edges.append((parts[1], parts[2], parts[3]))
            else:
                raise SemparseError(f"{path}:{lineno}: bad graph line {line!r}")
    if target is None:
        raise SemparseError(f"{path}: missing TARGET node")
    known = {nid for nid, _ in entity_nodes} | {target} | set(events)
    known |= {nid for nid, _, _ in type_nodes}
    for event, node, _ in edges:
        if event not in events:
            raise SemparseError(f"{path}: edge references unknown event {event!r}")
        if node not in known:
            raise SemparseError(f"{path}: edge references unknown node {node!r}")
    graph = UngroundedGraph(
        name=name or path,
        target=target,
        entity_nodes=tuple(entity_nodes),
        type_nodes=tuple(
            (nid, label, "target" if c == "target" else c)
            for nid, label, c in type_nodes
        ),
        events=tuple(events),
        edges=tuple(edges),
        text=text,
        classifier_score=score,
    )
    for nid, _, constrains in graph.type_nodes:
        if constrains != "target" and constrains not in known:
            raise SemparseError(f"{path}: type {nid!r} constrains unknown node")
    return graph


# --- grounded graphs and denotation --------------------------------------------

EdgeKey = tuple[str, str, str]  # (event, node1, node2)
EdgeChoice = tuple[str, str] | None  # (relation, "fwd"/"bwd") or skip


@dataclass(frozen=True)
class GroundedGraph:
    graph: UngroundedGraph
    entity_map: tuple[tuple[str, str], ...]  # node id -> KB entity
    edge_map: tuple[tuple[EdgeKey, EdgeChoice], ...]
    type_map: tuple[tuple[str, str | None], ...]  # type node id -> KB type
    lattice_score: float = 0.0

    def key(self) -> str:
        """Canonical text key; defines the deterministic tie-break order."""
        parts = [f"{nid}={ent}" for nid, ent in self.entity_map]
        parts += [
            f"{event}|{n1}|{n2}={'null' if choice is None else choice[0] + ':' + choice[1]}"
            for (event, n1, n2), choice in self.edge_map
        ]
        parts += [f"{nid}={t or 'null'}" for nid, t in self.type_map]
        return ";".join(parts)

    def entity_of(self, node_id: str) -> str:
        return dict(self.entity_map)[node_id]


def denotation(grounded: GroundedGraph, kb: KnowledgeGraph) -> frozenset[str]:
    """Entities reachable at the TARGET node of the grounded graph,
    evaluated as a conjunctive query over the KB."""
    graph = grounded.graph
    entity_of = dict(grounded.entity_map)
    target = graph.target

    target_bound = False
    candidates: set[str] | None = None  # None = all entities

    def narrow(allowed: Iterable[str]) -> None:
        nonlocal candidates
        allowed = set(allowed)
        candidates = allowed if candidates is None else candidates & allowed

    feasible = True
    for (event, n1, n2), choice in grounded.edge_map:
        if choice is None:
            continue
        relation, direction = choice
        subj, obj = (n1, n2) if direction == "fwd" else (n2, n1)
        if subj == target or obj == target:
            target_bound = True
        if subj == target and obj == target:
            raise SemparseError(f"{graph.name}: edge binds target twice")
        if subj == target:
            narrow(kb.subjects(relation, entity_of[obj]))
        elif obj == target:
            narrow(kb.objects(entity_of[subj], relation))
        else:
            if entity_of[obj] not in kb.objects(entity_of[subj], relation):
                feasible = False

    for nid, type_name in dict(grounded.type_map).items():
        if type_name is None:
            continue
        constrained = dict(
            (tid, c) for tid, _, c in graph.type_nodes
        )[nid]
        if constrained == "target":
            target_bound = True
            narrow(kb.entities_of_type(type_name))
        else:
            if entity_of[constrained] not in kb.entities_of_type(type_name):
                feasible = False

    if not target_bound:
        raise UnboundTarget(f"{graph.name}: no non-null constraint touches TARGET")
    if not feasible:
        return frozenset()
    return frozenset(candidates if candidates is not None else kb.entities)


def f1_loss(predicted: frozenset[str] | set[str], gold: frozenset[str] | set[str]) -> float:
    """1 - F1 of the predicted entity set; empty predictions score F1 = 0."""
    if not gold:
        raise EmptyGold("gold answer set must be non-empty")
    if not predicted:
        return 1.0
    overlap = len(set(predicted) & set(gold))
    if overlap == 0:
        return 1.0
    precision = overlap / len(predicted)
    recall = overlap / len(gold)
    return 1.0 - (2 * precision * recall / (precision + recall))


# --- entity resolution ----------------------------------------------------------

def entity_candidates(
    mention: Sequence[str], kb: KnowledgeGraph
) -> list[tuple[str, int, int]]:
    """(entity, match length, dictionary rank) candidates for a mention.

    A KB entity matches when its canonical surface equals the mention or
    one is a prefix of the other; longer matches rank first, then file
    order.
    """
    mention = tuple(t.lower() for t in mention)
    out = []
    for rank, entity in enumerate(kb.entities):
        surface = entity_surface(entity)
        if surface == mention:
            match = len(surface)
        elif surface[: len(mention)] == mention:
            match = len(mention)
        elif mention[: len(surface)] == surface:
            match = len(surface)
        else:
            continue
        out.append((entity, match, rank))
    out.sort(key=lambda item: (-item[1], item[2], item[0]))
    return out


def entity_assignments(
    graph: UngroundedGraph, kb: KnowledgeGraph, top: int = ENTITY_LATTICE_TOP
) -> list[tuple[tuple[tuple[str, str], ...], float]]:
    """Top joint entity assignments with their lattice scores."""
    node_ids = sorted(graph.entity_ids())
    per_node = []
    for nid in node_ids:
        cands = entity_candidates(graph.mention_of(nid), kb)
        if not cands:
            raise NoEntityCandidates(
                f"{graph.name}: no KB entity matches node {nid!r}"
            )
        per_node.append([(nid, c) for c in cands])
    joint = []
    for combo in itertools.product(*per_node):
        total_match = sum(c[1] for _, c in combo)
        total_rank = sum(c[2] for _, c in combo)
        assignment = tuple((nid, c[0]) for nid, c in combo)
        score = total_match - 0.01 * total_rank
        joint.append(((-total_match, total_rank, assignment), assignment, score))
    joint.sort(key=lambda item: item[0])
    return [(assignment, score) for _, assignment, score in joint[:top]]


# --- features -------------------------------------------------------------------

_SUFFIXES = ("ing", "ed", "es", "s")


def _stem(word: str) -> str:
    word = word.lower()
    for suffix in _SUFFIXES:
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            return word[: -len(suffix)]
    return word


def _name_tokens(name: str) -> list[str]:
    return [t for t in re.split(r"[._|]", name.lower()) if t]


def _stem_overlap(predicate: str, relation: str) -> int:
    pred = {_stem(t) for t in _name_tokens(predicate)}
    rel = {_stem(t) for t in _name_tokens(relation)}
    return len(pred & rel)


def tuple_features(grounded: GroundedGraph) -> FeatureDict:
    """Explicit named features over one (paraphrase, graph, grounding)
    tuple: alignment indicators, stem overlaps, word-relation pairs, the
    paraphrase classifier score, the entity lattice score, and
    null-grounding counts."""
    graph = grounded.graph
    feats: FeatureDict = defaultdict(float)
    feats["classifier_score"] = graph.classifier_score
    feats["lattice_score"] = grounded.lattice_score

    predicates = {
        (event, n1, n2): pred for event, n1, n2, pred in graph.entity_edges()
    }
    words = sorted(set(graph.text))
    for (event, n1, n2), choice in grounded.edge_map:
        pred = predicates[(event, n1, n2)]
        if choice is None:
            feats[f"align|{pred}|null"] += 1.0
            feats["null_edges"] += 1.0
        else:
            relation, direction = choice
            feats[f"align|{pred}|{relation}:{direction}"] += 1.0
            feats["stem_overlap"] += _stem_overlap(pred, relation)
            for word in words:
                feats[f"wordrel|{word}|{relation}"] = 1.0
    type_labels = {nid: label for nid, label, _ in graph.type_nodes}
    for nid, type_name in grounded.type_map:
        label = type_labels[nid]
        if type_name is None:
            feats[f"typealign|{label}|null"] += 1.0
            feats["null_types"] += 1.0
        else:
            feats[f"typealign|{label}|{type_name}"] += 1.0
            feats["stem_overlap"] += _stem_overlap(label, type_name)
    return dict(feats)


def dot_score(weights: Mapping[str, float], feats: FeatureDict) -> float:
    return math.fsum(weights.get(name, 0.0) * value for name, value in feats.items())


# --- beam-search grounding -------------------------------------------------------

def _edge_options(
    kb: KnowledgeGraph,
    entity_of: Mapping[str, str],
    target: str,
    n1: str,
    n2: str,
) -> list[EdgeChoice]:
    """Skip plus every KB relation compatible with the grounded endpoints."""
    options: list[EdgeChoice] = [None]
    found: set[tuple[str, str]] = set()
    for subj, obj, direction in ((n1, n2, "fwd"), (n2, n1, "bwd")):
        for s, r, o in kb.triples:
            if subj == target:
                ok = obj != target and o == entity_of[obj]
            elif obj == target:
                ok = s == entity_of[subj]
            else:
                ok = s == entity_of[subj] and o == entity_of[obj]
            if ok:
                found.add((r, direction))
    options.extend(sorted(found))
    return options


def _type_options(
    kb: KnowledgeGraph, entity_of: Mapping[str, str], constrained: str
) -> list[str | None]:
    options: list[str | None] = [None]
    if constrained == "target":
        options.extend(sorted(kb.types))
    else:
        options.extend(
            sorted(t for e, t in kb.type_assertions if e == entity_of[constrained])
        )
    return options


def ground(
    graph: UngroundedGraph,
    kb: KnowledgeGraph,
    weights: Mapping[str, float] | None = None,
    beam: int = DEFAULT_BEAM,
) -> list[tuple[GroundedGraph, float, FeatureDict]]:
    """Beam search over grounding decisions; returns up to ``beam``
    complete groundings ordered by (score, canonical key).

    Decision order: joint entity assignment (from the top lattice paths),
    then each entity-entity edge (a compatible relation or skip), then
    each type node (a compatible type or skip).
    """
    weights = weights or {}
    states: list[GroundedGraph] = [
        GroundedGraph(
            graph=graph,
            entity_map=assignment,
            edge_map=(),
            type_map=(),
            lattice_score=score,
        )
        for assignment, score in entity_assignments(graph, kb)
    ]

    def truncate(pool: list[GroundedGraph]) -> list[GroundedGraph]:
        scored = [
            (-dot_score(weights, tuple_features(g)), g.key(), g) for g in pool
        ]
        scored.sort(key=lambda item: (item[0], item[1]))
        return [g for _, _, g in scored[:beam]]

    states = truncate(states)
    for event, n1, n2, _pred in graph.entity_edges():
        pool = []
        for state in states:
            entity_of = dict(state.entity_map)
            for choice in _edge_options(kb, entity_of, graph.target, n1, n2):
                pool.append(
                    replace(
                        state,
                        edge_map=state.edge_map + (((event, n1, n2), choice),),
                    )
                )
        states = truncate(pool)
    for nid, _label, constrained in graph.type_nodes:
        pool = []
        for state in states:
            entity_of = dict(state.entity_map)
            for choice in _type_options(kb, entity_of, constrained):
                pool.append(replace(state, type_map=state.type_map + ((nid, choice),)))
        states = truncate(pool)

    out = []
    for state in states:
        feats = tuple_features(state)
        out.append((state, dot_score(weights, feats), feats))
    return out


# --- oracle tuples ----------------------------------------------------------------

@dataclass(frozen=True)
class OracleTuple:
    graph: UngroundedGraph
    grounding: GroundedGraph
    loss: float
    features: tuple[tuple[str, float], ...]


def oracle_set(
    graphs: Sequence[UngroundedGraph],
    kb: KnowledgeGraph,
    gold: frozenset[str] | set[str],
    big_beam: int = ORACLE_BEAM,
) -> list[OracleTuple]:
    """All tuples whose denotation reaches the minimal F1-loss over every
    grounding found with a very large beam."""
    if not gold:
        raise EmptyGold("gold answer set must be non-empty")
    scored: list[OracleTuple] = []
    for graph in graphs:
        try:
            results = ground(graph, kb, None, beam=big_beam)
        except NoEntityCandidates:
            continue
        for grounding, _score, feats in results:
            try:
                loss = f1_loss(denotation(grounding, kb), gold)
            except UnboundTarget:
                continue
            scored.append(
                OracleTuple(
                    graph=graph,
                    grounding=grounding,
                    loss=loss,
                    features=tuple(sorted(feats.items())),
                )
            )
    if not scored:
        return []
    best = min(t.loss for t in scored)
    return [t for t in scored if t.loss == best]


# --- averaged structured perceptron -------------------------------------------------

@dataclass
class PerceptronModel:
    weights: dict[str, float] = field(default_factory=dict)
    totals: dict[str, float] = field(default_factory=dict)
    steps: int = 0
    skipped: int = 0

    def snapshot(self) -> None:
        self.steps += 1
        for name, value in self.weights.items():
            self.totals[name] = self.totals.get(name, 0.0) + value

    def averaged(self) -> dict[str, float]:
        if self.steps == 0:
            return {}
        return {name: total / self.steps for name, total in self.totals.items()}


@dataclass(frozen=True)
class QAExample:
    question: tuple[str, ...]
    graphs: tuple[UngroundedGraph, ...]  # original graph first
    gold: frozenset[str]


def load_qa(path: str, graph_loader) -> list[QAExample]:
    """Read "question<TAB>graph-file[,graph-file...]<TAB>answer|answer..."
    lines; ``graph_loader`` maps a file name to an UngroundedGraph."""
    out: list[QAExample] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SemparseError(f"{path}:{lineno}: bad QA line")
            question = tuple(parts[0].lower().split())
            graphs = tuple(graph_loader(name) for name in parts[1].split(","))
            gold = frozenset(parts[2].split("|"))
            if not gold:
                raise SemparseError(f"{path}:{lineno}: empty gold answers")
            out.append(QAExample(question=question, graphs=graphs, gold=gold))
    return out


def _predict(
    graphs: Sequence[UngroundedGraph],
    kb: KnowledgeGraph,
    weights: Mapping[str, float],
    beam: int,
) -> tuple[GroundedGraph, FeatureDict] | None:
    """Global argmax over the beam outputs of every tuple."""
    best: tuple[float, str, GroundedGraph, FeatureDict] | None = None
    for graph in graphs:
        try:
            results = ground(graph, kb, weights, beam=beam)
        except NoEntityCandidates:
            continue
        for grounding, score, feats in results[:1]:
            key = f"{graph.name};{grounding.key()}"
            if best is None or score > best[0] or (score == best[0] and key < best[1]):
                best = (score, key, grounding, feats)
    if best is None:
        return None
    return best[2], best[3]


def perceptron_train(
    dataset: Sequence[QAExample],
    kb: KnowledgeGraph,
    epochs: int = 5,
    beam: int = DEFAULT_BEAM,
    seed: int = 0,
    big_beam: int = ORACLE_BEAM,
) -> PerceptronModel:
    """Averaged structured perceptron over question-answer pairs.

    Oracle tuples are found a priori with a large beam.  Each example
    updates the weights toward the best-scoring oracle tuple and away from
    the prediction; examples with an empty oracle set are recorded as
    skipped.  Training is strictly sequential in dataset order and
    deterministic (``seed`` only names the run; no randomness is used).
    """
    del seed
    model = PerceptronModel()
    oracles = [oracle_set(ex.graphs, kb, ex.gold, big_beam) for ex in dataset]
    for _ in range(epochs):
        for example, oracle in zip(dataset, oracles):
            if not oracle:
                model.skipped += 1
                continue
            predicted = _predict(example.graphs, kb, model.weights, beam)
            if predicted is None:
                model.skipped += 1
                continue
            _, predicted_feats = predicted

            best_oracle: tuple[float, str, OracleTuple] | None = None
            for tup in oracle:
                score = dot_score(model.weights, dict(tup.features))
                key = f"{tup.graph.name};{tup.grounding.key()}"
                if (
                    best_oracle is None
                    or score > best_oracle[0]
                    or (score == best_oracle[0] and key < best_oracle[1])
                ):
                    best_oracle = (score, key, tup)
            assert best_oracle is not None
            oracle_feats = dict(best_oracle[2].features)

            for name in set(oracle_feats) | set(predicted_feats):
                delta = oracle_feats.get(name, 0.0) - predicted_feats.get(name, 0.0)
                if delta:
                    model.weights[name] = model.weights.get(name, 0.0) + delta
            model.snapshot()
    return model


@dataclass(frozen=True)
class EvalReport:
    per_question: tuple[tuple[str, float, float, float], ...]

    @property
    def avg_precision(self) -> float:
        return self._avg(1)

    @property
    def avg_recall(self) -> float:
        return self._avg(2)

    @property
    def avg_f1(self) -> float:
        return self._avg(3)

    def _avg(self, idx: int) -> float:
        if not self.per_question:
            return 0.0
        return sum(row[idx] for row in self.per_question) / len(self.per_question)


def evaluate(
    dataset: Sequence[QAExample],
    kb: KnowledgeGraph,
    weights: Mapping[str, float],
    beam: int = DEFAULT_BEAM,
) -> EvalReport:
    """Average precision/recall/F1 of top-1 denotations against gold."""
    rows = []
    for example in dataset:
        predicted: frozenset[str] = frozenset()
        result = _predict(example.graphs, kb, weights, beam)
        if result is not None:
            try:
                predicted = denotation(result[0], kb)
            except UnboundTarget:
                predicted = frozenset()
        overlap = len(predicted & example.gold)
        precision = overlap / len(predicted) if predicted else 0.0
        recall = overlap / len(example.gold)
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        rows.append((" ".join(example.question), precision, recall, f1))
    return EvalReport(per_question=tuple(rows))


def oracle_best_f1(
    graphs: Sequence[UngroundedGraph],
    kb: KnowledgeGraph,
    gold: frozenset[str] | set[str],
    big_beam: int = ORACLE_BEAM,
) -> float:
    """Best reachable F1 over all groundings of all graphs (0 if nothing
    grounds)."""
    oracle = oracle_set(graphs, kb, gold, big_beam)
    if not oracle:
        return 0.0
    return 1.0 - oracle[0].loss


# --- model file ----------------------------------------------------------------------

def save_perceptron(model: PerceptronModel, path: str) -> None:
    averaged = model.averaged()
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"STEPS\t{model.steps}\n")
        handle.write(f"SKIPPED\t{model.skipped}\n")
        for name in sorted(averaged):
            handle.write(f"FEATURE\t{name}\t{format(averaged[name], '.17g')}\n")


def load_perceptron_weights(path: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            parts = line.rstrip("\n").split("\t")
            if parts[0] in ("STEPS", "SKIPPED") and len(parts) == 2:
                continue
            if parts[0] == "FEATURE" and len(parts) == 3:
                weights[parts[1]] = float(parts[2])
            else:
                raise SemparseError(f"{path}:{lineno}: bad model line")
    return weights
