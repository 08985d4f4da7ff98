"""Unweighted word lattices that constrain paraphrase generation.

A lattice is a token-labeled DAG with one source and one sink; every edge
lies on at least one source-to-sink path, and the input question survives
as one such path in every freshly built lattice.  Three builders are
provided: the bare question chain, parallel paths from a phrasal rewrite
database, and parallel words proposed by a two-layer grammar.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import EdgeNotInLattice, EmptyQuestion, LatticeError
from .grammar import LatentGrammar

ORIGIN_INPUT = "input"
ORIGIN_RULE = "rule"
ORIGIN_BILAYERED = "bilayered"


class Edge(NamedTuple):
    src: int
    dst: int
    token: str
    origin: str


@dataclass(frozen=True)
class WordLattice:
    source: int
    sink: int
    edges: tuple[Edge, ...]

    @property
    def nodes(self) -> tuple[int, ...]:
        seen = {self.source, self.sink}
        for e in self.edges:
            seen.add(e.src)
            seen.add(e.dst)
        return tuple(sorted(seen))

    def vocabulary(self) -> frozenset[str]:
        return frozenset(e.token for e in self.edges)

    def outgoing(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = defaultdict(list)
        for e in self.edges:
            out[e.src].append(e)
        return out

    def incoming(self) -> dict[int, list[Edge]]:
        inc: dict[int, list[Edge]] = defaultdict(list)
        for e in self.edges:
            inc[e.dst].append(e)
        return inc


def _canonical(edges: Iterable[Edge]) -> tuple[Edge, ...]:
    return tuple(sorted(set(edges)))


def _make(source: int, sink: int, edges: Iterable[Edge]) -> WordLattice:
    lat = WordLattice(source=source, sink=sink, edges=_canonical(edges))
    check_lattice(lat)
    return lat


def check_lattice(lat: WordLattice) -> None:
    """Assert the structural invariants: DAG, unique source/sink, and
    every edge on some source-to-sink path."""
    out = lat.outgoing()
    inc = lat.incoming()
    # Kahn toposort for acyclicity.
    nodes = set(lat.nodes)
    indeg = {n: len(inc.get(n, [])) for n in nodes}
    queue = deque(n for n in nodes if indeg[n] == 0)
    seen = 0
    while queue:
        n = queue.popleft()
        seen += 1
        for e in out.get(n, []):
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                queue.append(e.dst)
    if seen != len(nodes):
        raise LatticeError("lattice contains a cycle")
    for n in nodes:
        if n != lat.source and not inc.get(n):
            raise LatticeError(f"node {n} is a second source")
        if n != lat.sink and not out.get(n):
            raise LatticeError(f"node {n} is a second sink")
    if inc.get(lat.source):
        raise LatticeError("source has incoming edges")
    if out.get(lat.sink):
        raise LatticeError("sink has outgoing edges")


def _forward_reach(lat: WordLattice, start: int) -> set[int]:
    out = lat.outgoing()
    seen = {start}
    queue = deque([start])
    while queue:
        for e in out.get(queue.popleft(), []):
            if e.dst not in seen:
                seen.add(e.dst)
                queue.append(e.dst)
    return seen


def _backward_reach(lat: WordLattice, start: int) -> set[int]:
    inc = lat.incoming()
    seen = {start}
    queue = deque([start])
    while queue:
        for e in inc.get(queue.popleft(), []):
            if e.src not in seen:
                seen.add(e.src)
                queue.append(e.src)
    return seen


# --- builders ----------------------------------------------------------------

def build_naive(tokens: Sequence[str]) -> WordLattice:
    """Single chain carrying exactly the input question."""
    if not tokens:
        raise EmptyQuestion("cannot build a lattice for an empty question")
    edges = [
        Edge(i, i + 1, tok, ORIGIN_INPUT) for i, tok in enumerate(tokens)
    ]
    return _make(0, len(tokens), edges)


@dataclass(frozen=True)
class ParaphraseRuleDB:
    """Lexical and phrasal rewrites: source phrase -> target phrase."""

    rules: tuple[tuple[tuple[str, ...], tuple[str, ...], float], ...]

    @property
    def by_source(self) -> dict[tuple[str, ...], list[tuple[str, ...]]]:
        index: dict[tuple[str, ...], list[tuple[str, ...]]] = defaultdict(list)
        for src, tgt, _ in self.rules:
            if tgt not in index[src]:
                index[src].append(tgt)
        return index

    @property
    def max_source_len(self) -> int:
        return max((len(src) for src, _, _ in self.rules), default=0)


def load_rules(path: str, min_score: float | None = None) -> ParaphraseRuleDB:
    """Read "source<TAB>target<TAB>score" rewrite rules.

    Identity rewrites are dropped; ``min_score`` restricts to the
    high-precision subset.  Phrases are lowercased (matching is
    case-insensitive).
    """
    rules = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise LatticeError(f"{path}:{lineno}: expected 3 tab-separated fields")
            src = tuple(parts[0].lower().split())
            tgt = tuple(parts[1].lower().split())
            try:
                score = float(parts[2])
            except ValueError as exc:
                raise LatticeError(f"{path}:{lineno}: bad score {parts[2]!r}") from exc
            if not src or not tgt:
                raise LatticeError(f"{path}:{lineno}: empty phrase")
            if src == tgt:
                continue
            if min_score is not None and score < min_score:
                continue
            rules.append((src, tgt, score))
    return ParaphraseRuleDB(rules=tuple(rules))


def _add_parallel_path(
    edges: list[Edge],
    next_node: int,
    start: int,
    end: int,
    tokens: Sequence[str],
    origin: str,
) -> int:
    """Add a path carrying ``tokens`` from node ``start`` to ``end``;
    returns the next free node id."""
    prev = start
    for tok in tokens[:-1]:
        edges.append(Edge(prev, next_node, tok, origin))
        prev = next_node
        next_node += 1
    edges.append(Edge(prev, end, tokens[-1], origin))
    return next_node


def build_from_rules(tokens: Sequence[str], db: ParaphraseRuleDB) -> WordLattice:
    """Question chain plus one parallel path per matching rewrite rule.

    Every rule whose source phrase matches a contiguous token span adds a
    parallel path between the span's boundary nodes; overlapping matches
    coexist.  Matching is case-insensitive over lowercased tokens.
    """
    if not tokens:
        raise EmptyQuestion("cannot build a lattice for an empty question")
    lowered = [t.lower() for t in tokens]
    n = len(tokens)
    edges = [Edge(i, i + 1, tok, ORIGIN_INPUT) for i, tok in enumerate(tokens)]
    index = db.by_source
    next_node = n + 1
    max_len = min(db.max_source_len, n)
    for start in range(n):
        for width in range(1, max_len + 1):
            end = start + width
            if end > n:
                break
            span = tuple(lowered[start:end])
            for tgt in index.get(span, []):
                if list(tgt) == lowered[start:end]:
                    continue
                next_node = _add_parallel_path(
                    edges, next_node, start, end, tgt, ORIGIN_RULE
                )
    return _make(0, n, edges)


def build_bilayered(
    tokens: Sequence[str], grammar: LatentGrammar
) -> WordLattice:
    """Question chain plus single-word alternatives from a two-layer
    grammar.

    The question is parsed with the grammar; for every lexical derivation
    node with preterminal X and semantic state s emitting word w, every
    other word w' with a lexical rule under (X, any syntactic state, s)
    adds a parallel edge at w's position.
    """
    from .cky import cky_viterbi, lexical_leaves

    if not tokens:
        raise EmptyQuestion("cannot build a lattice for an empty question")
    if not grammar.layers.two_layer:
        raise LatticeError("bilayered lattices need a two-layer grammar")
    derivation = cky_viterbi(tokens, grammar)  # may raise ParseFailure

    # Alternatives per (preterminal, semantic state), from the full grammar.
    alternatives: dict[tuple[str, int], set[str]] = defaultdict(set)
    for (sym, state), table in grammar.lexical.items():
        alternatives[(sym, state.sem)].update(table)

    n = len(tokens)
    edges = [Edge(i, i + 1, tok, ORIGIN_INPUT) for i, tok in enumerate(tokens)]
    for pos, leaf in enumerate(lexical_leaves(derivation.root)):
        for alt in sorted(alternatives.get((leaf.symbol, leaf.state.sem), ())):
            if alt != tokens[pos]:
                edges.append(Edge(pos, pos + 1, alt, ORIGIN_BILAYERED))
    return _make(0, n, edges)


# --- path operations ----------------------------------------------------------

def remove_conflicting(lat: WordLattice, edge: Edge) -> WordLattice:
    """Keep only edges that co-occur with ``edge`` on some source-to-sink
    path.

    An edge conflicts with the chosen edge exactly when no complete path
    contains both; in a DAG this reduces to reachability between the two
    edges' endpoints.  The chosen edge itself is always retained, and the
    result is again a well-formed lattice (all surviving paths pass
    through ``edge``).
    """
    if edge not in lat.edges:
        raise EdgeNotInLattice(f"{edge} not in lattice")
    before = _backward_reach(lat, edge.src)
    after = _forward_reach(lat, edge.dst)
    kept = [
        e
        for e in lat.edges
        if e == edge or e.dst in before or e.src in after
    ]
    return WordLattice(source=lat.source, sink=lat.sink, edges=_canonical(kept))


def enumerate_edge_paths(lat: WordLattice, cap: int) -> list[tuple[Edge, ...]]:
    """Up to ``cap`` source-to-sink edge sequences, in canonical DFS order
    (outgoing edges explored in sorted order)."""
    if cap < 1:
        raise LatticeError("cap must be >= 1")
    out = lat.outgoing()
    for edges in out.values():
        edges.sort()
    paths: list[tuple[Edge, ...]] = []

    def walk(node: int, acc: list[Edge]) -> bool:
        if node == lat.sink:
            paths.append(tuple(acc))
            return len(paths) >= cap
        for e in out.get(node, []):
            acc.append(e)
            if walk(e.dst, acc):
                return True
            acc.pop()
        return False

    walk(lat.source, [])
    return paths


def enumerate_paths(lat: WordLattice, cap: int) -> list[tuple[str, ...]]:
    """Token sequences of up to ``cap`` source-to-sink paths."""
    return [
        tuple(e.token for e in path) for path in enumerate_edge_paths(lat, cap)
    ]


def dump_lattice(lat: WordLattice) -> str:
    """Canonical text dump: NODE lines then EDGE lines."""
    lines = [f"NODE {n}" for n in lat.nodes]
    lines.extend(
        f"EDGE {e.src} {e.dst} {e.token} {e.origin}" for e in lat.edges
    )
    return "\n".join(lines) + "\n"
