"""Viterbi CKY over a latent grammar.

The chart is indexed by (span, symbol, joint state); two-layer grammars
parse over the full joint state space, which stays small because only
observed (symbol, state) contexts carry rules.  Unknown words can be
admitted through a tiny floor probability attached to every preterminal
context; that floor exists only for parsing and never for generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import ParseFailure
from .grammar import Context, LatentGrammar, StateLabel, format_state, state_key

UNK_LOG_FLOOR = math.log(1e-6)


@dataclass(frozen=True)
class DerivationNode:
    symbol: str
    state: StateLabel
    word: str | None = None
    children: tuple["DerivationNode", ...] = ()

    @property
    def is_lexical(self) -> bool:
        return self.word is not None


@dataclass(frozen=True)
class DerivationTree:
    root: DerivationNode
    logprob: float


def lexical_leaves(node: DerivationNode) -> Iterator[DerivationNode]:
    if node.is_lexical:
        yield node
    for child in node.children:
        yield from lexical_leaves(child)


def derivation_yield(node: DerivationNode) -> tuple[str, ...]:
    return tuple(leaf.word for leaf in lexical_leaves(node))


def render_derivation(node: DerivationNode) -> str:
    """Bracketed derivation with "label-h1[-h2]" node names."""
    name = f"{node.symbol}-{format_state(node.state).replace(':', '-')}"
    if node.is_lexical:
        return f"({name} {node.word})"
    inner = " ".join(render_derivation(c) for c in node.children)
    return f"({name} {inner})"


def rescore(node: DerivationNode, grammar: LatentGrammar) -> float:
    """Sum of rule log-parameters of a derivation, root prior included."""
    total = math.log(grammar.roots[(node.symbol, node.state)])

    def walk(n: DerivationNode) -> None:
        nonlocal total
        ctx = (n.symbol, n.state)
        if n.is_lexical:
            total += math.log(grammar.lexical[ctx][n.word])
            return
        left, right = n.children
        rhs = (left.symbol, left.state, right.symbol, right.state)
        total += math.log(grammar.binary[ctx][rhs])
        walk(left)
        walk(right)

    walk(node)
    return total


def _ctx_key(ctx: Context) -> tuple:
    return (ctx[0], state_key(ctx[1]))


class _Index:
    """Grammar tables rearranged for chart filling."""

    def __init__(self, grammar: LatentGrammar) -> None:
        self.lex_by_word: dict[str, list[tuple[Context, float]]] = {}
        for ctx, table in grammar.lexical.items():
            for word, prob in table.items():
                self.lex_by_word.setdefault(word, []).append((ctx, math.log(prob)))
        for entries in self.lex_by_word.values():
            entries.sort(key=lambda e: _ctx_key(e[0]))
        self.all_preterminal_contexts = sorted(grammar.lexical, key=_ctx_key)
        self.by_children: dict[tuple[Context, Context], list[tuple[Context, float]]] = {}
        for ctx, table in grammar.binary.items():
            for (b, sb, c, sc), prob in table.items():
                key = ((b, sb), (c, sc))
                self.by_children.setdefault(key, []).append((ctx, math.log(prob)))
        for entries in self.by_children.values():
            entries.sort(key=lambda e: _ctx_key(e[0]))


def cky_viterbi(
    tokens: Sequence[str],
    grammar: LatentGrammar,
    allow_unknown: bool = True,
) -> DerivationTree:
    """Maximum-probability derivation of ``tokens``.

    Ties are broken lexicographically on (symbol, state indices, split
    point) so parsing is deterministic.  Raises ParseFailure when no
    derivation covers the input.
    """
    if not tokens:
        raise ParseFailure("empty input")
    index = _Index(grammar)
    n = len(tokens)

    # chart[(i, j)][ctx] = (logp, tiebreak, backpointer)
    # backpointer: ("lex", word) or ("bin", split, left_ctx, right_ctx)
    chart: dict[tuple[int, int], dict[Context, tuple[float, tuple, tuple]]] = {}

    for i, token in enumerate(tokens):
        cell: dict[Context, tuple[float, tuple, tuple]] = {}
        entries = index.lex_by_word.get(token)
        if entries is None:
            if not allow_unknown:
                raise ParseFailure(f"unknown word {token!r}")
            entries = [(ctx, UNK_LOG_FLOOR) for ctx in index.all_preterminal_contexts]
        for ctx, logp in entries:
            cell[ctx] = (logp, (), ("lex", token))
        if not cell:
            raise ParseFailure(f"no lexical rule covers {token!r}")
        chart[(i, i + 1)] = cell

    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for split in range(i + 1, j):
                left_cell = chart.get((i, split))
                right_cell = chart.get((split, j))
                if not left_cell or not right_cell:
                    continue
                for lctx in sorted(left_cell, key=_ctx_key):
                    lp = left_cell[lctx][0]
                    for rctx in sorted(right_cell, key=_ctx_key):
                        rules = index.by_children.get((lctx, rctx))
                        if not rules:
                            continue
                        rp = right_cell[rctx][0]
                        for ctx, rule_logp in rules:
                            cand = rule_logp + lp + rp
                            tie = (_ctx_key(lctx), _ctx_key(rctx), split)
                            prev = cell.get(ctx)
                            if (
                                prev is None
                                or cand > prev[0]
                                or (cand == prev[0] and tie < prev[1])
                            ):
                                cell[ctx] = (cand, tie, ("bin", split, lctx, rctx))
            if cell:
                chart[(i, j)] = cell

    full = chart.get((0, n), {})
    best: tuple[float, tuple, Context] | None = None
    for ctx in sorted(full, key=_ctx_key):
        prior = grammar.roots.get(ctx)
        if prior is None:
            continue
        total = math.log(prior) + full[ctx][0]
        key = _ctx_key(ctx)
        if best is None or total > best[0] or (total == best[0] and key < best[1]):
            best = (total, key, ctx)
    if best is None:
        raise ParseFailure(f"no derivation covers {' '.join(tokens)!r}")

    def build(span: tuple[int, int], ctx: Context) -> DerivationNode:
        _, _, back = chart[span][ctx]
        if back[0] == "lex":
            return DerivationNode(symbol=ctx[0], state=ctx[1], word=back[1])
        _, split, lctx, rctx = back
        return DerivationNode(
            symbol=ctx[0],
            state=ctx[1],
            children=(
                build((span[0], split), lctx),
                build((split, span[1]), rctx),
            ),
        )

    return DerivationTree(root=build((0, n), best[2]), logprob=best[0])
