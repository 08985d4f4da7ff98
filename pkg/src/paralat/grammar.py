"""The latent-state grammar: rule tables, validation and file round-trip.

A grammar has root, binary and lexical parameter tables.  Binary rules
rewrite an interminal into two nonterminals; lexical rules rewrite a
preterminal into a word.  Every nonterminal occurrence carries a
:class:`StateLabel` with a syntactic state and, in two-layer grammars, a
semantic state.

Probabilities are kept in linear space as the canonical values (the file
format stores them as decimal text that round-trips float64 exactly);
compute paths take logs on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .errors import MalformedGrammarFile

SUM_TOLERANCE = 1e-9


class StateLabel(NamedTuple):
    syn: int
    sem: int | None = None


class LayerConfig(NamedTuple):
    m1: int
    m2: int | None = None

    @property
    def two_layer(self) -> bool:
        return self.m2 is not None


# (b, state_b, c, state_c) right-hand side of a binary rule
BinaryRhs = tuple[str, StateLabel, str, StateLabel]
Context = tuple[str, StateLabel]


def state_key(state: StateLabel) -> tuple[int, int]:
    """Sort key that tolerates a missing semantic layer."""
    return (state.syn, -1 if state.sem is None else state.sem)


def format_state(state: StateLabel) -> str:
    if state.sem is None:
        return str(state.syn)
    return f"{state.syn}:{state.sem}"


def parse_state(text: str, layers: LayerConfig) -> StateLabel:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            if layers.two_layer:
                raise MalformedGrammarFile(f"state {text!r} missing semantic layer")
            return StateLabel(int(parts[0]))
        if len(parts) == 2:
            if not layers.two_layer:
                raise MalformedGrammarFile(f"state {text!r} has unexpected layer")
            return StateLabel(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise MalformedGrammarFile(f"bad state {text!r}") from exc
    raise MalformedGrammarFile(f"bad state {text!r}")


@dataclass(frozen=True)
class LatentGrammar:
    layers: LayerConfig
    interminals: frozenset[str]
    preterminals: frozenset[str]
    roots: Mapping[Context, float]
    binary: Mapping[Context, Mapping[BinaryRhs, float]]
    lexical: Mapping[Context, Mapping[str, float]]

    @property
    def nonterminals(self) -> frozenset[str]:
        return self.interminals | self.preterminals

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(w for table in self.lexical.values() for w in table)

    def rule_count(self) -> int:
        n = len(self.roots)
        n += sum(len(t) for t in self.binary.values())
        n += sum(len(t) for t in self.lexical.values())
        return n


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(grammar: LatentGrammar) -> ValidationReport:
    """Check normalization, symbol usage and support completeness.

    The report lists every violation; an empty list means the grammar is
    safe for parsing and sampling (no reachable context lacks a
    distribution).
    """
    bad: list[str] = []
    notes: list[str] = []
    layers = grammar.layers
    if layers.two_layer:
        notes.append(
            f"layer config: {layers.m1} syntactic x {layers.m2} semantic = "
            f"{layers.m1 * layers.m2:,} latent states"
        )
    else:
        notes.append(f"layer config: {layers.m1} latent states")

    overlap = grammar.interminals & grammar.preterminals
    if overlap:
        bad.append(f"symbols both interminal and preterminal: {sorted(overlap)}")

    def check_state(sym: str, state: StateLabel, where: str) -> None:
        if not 0 <= state.syn < layers.m1:
            bad.append(f"{where}: ({sym},{format_state(state)}) syntactic state out of range")
        if layers.two_layer:
            if state.sem is None or not 0 <= state.sem < layers.m2:
                bad.append(f"{where}: ({sym},{format_state(state)}) semantic state out of range")
        elif state.sem is not None:
            bad.append(f"{where}: ({sym},{format_state(state)}) has a semantic state in a one-layer grammar")

    if not grammar.roots:
        bad.append("no root entries")
    total = math.fsum(grammar.roots.values())
    if abs(total - 1.0) > SUM_TOLERANCE:
        bad.append(f"root distribution sums to {total!r}")
    for (sym, state), prob in grammar.roots.items():
        check_state(sym, state, "root")
        if sym not in grammar.nonterminals:
            bad.append(f"root symbol {sym!r} has no rules")
        if not (0.0 < prob <= 1.0) or not math.isfinite(prob):
            bad.append(f"root ({sym},{format_state(state)}) probability {prob!r} out of (0,1]")

    for (sym, state), table in grammar.binary.items():
        check_state(sym, state, "binary")
        if sym not in grammar.interminals:
            bad.append(f"binary parent {sym!r} is not an interminal")
        total = math.fsum(table.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            bad.append(f"binary ({sym},{format_state(state)}) sums to {total!r}")
        for (b, sb, c, sc), prob in table.items():
            check_state(b, sb, f"binary rhs of ({sym},{format_state(state)})")
            check_state(c, sc, f"binary rhs of ({sym},{format_state(state)})")
            if b not in grammar.nonterminals or c not in grammar.nonterminals:
                bad.append(f"binary rule ({sym},{format_state(state)}) -> {b} {c} uses unknown symbols")
            if not (0.0 < prob <= 1.0) or not math.isfinite(prob):
                bad.append(f"binary rule under ({sym},{format_state(state)}) probability {prob!r} out of (0,1]")

    for (sym, state), table in grammar.lexical.items():
        check_state(sym, state, "lexical")
        if sym not in grammar.preterminals:
            bad.append(f"lexical parent {sym!r} is not a preterminal")
        total = math.fsum(table.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            bad.append(f"lexical ({sym},{format_state(state)}) sums to {total!r}")
        for word, prob in table.items():
            if not (0.0 < prob <= 1.0) or not math.isfinite(prob):
                bad.append(f"lexical rule ({sym},{format_state(state)}) -> {word!r} probability {prob!r} out of (0,1]")

    # Deficit check: every context referenced as a root or as a binary child
    # must have an expansion table of the right kind.
    referenced: set[Context] = set(grammar.roots)
    for table in grammar.binary.values():
        for b, sb, c, sc in table:
            referenced.add((b, sb))
            referenced.add((c, sc))
    for sym, state in sorted(referenced, key=lambda x: (x[0], state_key(x[1]))):
        if sym in grammar.interminals and (sym, state) not in grammar.binary:
            bad.append(f"deficit: interminal context ({sym},{format_state(state)}) has no binary rules")
        elif sym in grammar.preterminals and (sym, state) not in grammar.lexical:
            bad.append(f"deficit: preterminal context ({sym},{format_state(state)}) has no lexical rules")

    return ValidationReport(violations=tuple(bad), notes=tuple(notes))


# --- serialization ----------------------------------------------------------

def _fmt(prob: float) -> str:
    return format(prob, ".17g")


def save_grammar(grammar: LatentGrammar, path: str) -> None:
    """Write the grammar in canonical order (stable byte-for-byte)."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_grammar(grammar))


def serialize_grammar(grammar: LatentGrammar) -> str:
    layers = grammar.layers
    lines = [
        f"LPCFG v1 layers={2 if layers.two_layer else 1} "
        f"m1={layers.m1} m2={layers.m2 or 0} "
        f"binarization=right-branching-@ vocab={len(grammar.vocabulary)}"
    ]
    for (sym, state), prob in sorted(
        grammar.roots.items(), key=lambda kv: (kv[0][0], state_key(kv[0][1]))
    ):
        lines.append(f"ROOT\t{sym}\t{format_state(state)}\t{_fmt(prob)}")
    for (sym, state), table in sorted(
        grammar.binary.items(), key=lambda kv: (kv[0][0], state_key(kv[0][1]))
    ):
        for (b, sb, c, sc), prob in sorted(
            table.items(), key=lambda kv: (kv[0][0], state_key(kv[0][1]), kv[0][2], state_key(kv[0][3]))
        ):
            lines.append(
                f"BIN\t{sym}\t{format_state(state)}\t{b}\t{format_state(sb)}"
                f"\t{c}\t{format_state(sc)}\t{_fmt(prob)}"
            )
    for (sym, state), table in sorted(
        grammar.lexical.items(), key=lambda kv: (kv[0][0], state_key(kv[0][1]))
    ):
        for word, prob in sorted(table.items()):
            lines.append(
                f"LEX\t{sym}\t{format_state(state)}\t{word}\t{_fmt(prob)}"
            )
    return "\n".join(lines) + "\n"


def load_grammar(path: str) -> LatentGrammar:
    """Load a grammar file; raises MalformedGrammarFile on any defect."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise MalformedGrammarFile(f"cannot read {path}: {exc}") from exc
    return deserialize_grammar(text, source=path)


def deserialize_grammar(text: str, source: str = "<string>") -> LatentGrammar:
    lines = text.splitlines()
    if not lines:
        raise MalformedGrammarFile(f"{source}: empty file")
    header = lines[0].split()
    if header[:2] != ["LPCFG", "v1"]:
        raise MalformedGrammarFile(f"{source}: bad header {lines[0]!r}")
    fields = dict(
        item.split("=", 1) for item in header[2:] if "=" in item
    )
    try:
        n_layers = int(fields["layers"])
        m1 = int(fields["m1"])
        m2 = int(fields["m2"])
    except (KeyError, ValueError) as exc:
        raise MalformedGrammarFile(f"{source}: bad header {lines[0]!r}") from exc
    if n_layers not in (1, 2) or (n_layers == 2) != (m2 > 0):
        raise MalformedGrammarFile(f"{source}: inconsistent layer header")
    layers = LayerConfig(m1, m2 if n_layers == 2 else None)

    roots: dict[Context, float] = {}
    binary: dict[Context, dict[BinaryRhs, float]] = {}
    lexical: dict[Context, dict[str, float]] = {}
    interminals: set[str] = set()
    preterminals: set[str] = set()

    def prob_of(token: str, lineno: int) -> float:
        try:
            prob = float(token)
        except ValueError as exc:
            raise MalformedGrammarFile(f"{source}:{lineno}: bad probability {token!r}") from exc
        if not math.isfinite(prob):
            raise MalformedGrammarFile(f"{source}:{lineno}: non-finite probability")
        return prob

    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "ROOT" and len(parts) == 4:
            ctx = (parts[1], parse_state(parts[2], layers))
            if ctx in roots:
                raise MalformedGrammarFile(f"{source}:{lineno}: duplicate root entry")
            roots[ctx] = prob_of(parts[3], lineno)
        elif kind == "BIN" and len(parts) == 8:
            ctx = (parts[1], parse_state(parts[2], layers))
            rhs = (
                parts[3], parse_state(parts[4], layers),
                parts[5], parse_state(parts[6], layers),
            )
            table = binary.setdefault(ctx, {})
            if rhs in table:
                raise MalformedGrammarFile(f"{source}:{lineno}: duplicate binary rule")
            table[rhs] = prob_of(parts[7], lineno)
            interminals.add(parts[1])
        elif kind == "LEX" and len(parts) == 5:
            ctx = (parts[1], parse_state(parts[2], layers))
            table = lexical.setdefault(ctx, {})
            if parts[3] in table:
                raise MalformedGrammarFile(f"{source}:{lineno}: duplicate lexical rule")
            table[parts[3]] = prob_of(parts[4], lineno)
            preterminals.add(parts[1])
        else:
            raise MalformedGrammarFile(f"{source}:{lineno}: unparseable line {line!r}")

    if not roots:
        raise MalformedGrammarFile(f"{source}: header requires at least one ROOT entry")
    if interminals & preterminals:
        raise MalformedGrammarFile(
            f"{source}: symbols used as both binary and lexical parents: "
            f"{sorted(interminals & preterminals)}"
        )
    return LatentGrammar(
        layers=layers,
        interminals=frozenset(interminals),
        preterminals=frozenset(preterminals),
        roots=roots,
        binary=binary,
        lexical=lexical,
    )
