"""Bracketed constituency trees: parsing, normalization, binarization and
inside/outside decomposition.

Trees are immutable.  A preterminal node carries its terminal word directly
(``Tree("NN", word="day")``); all other nodes carry children.  Node handles
are paths: tuples of child indices from the root (the root is ``()``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import (
    EmptyTree,
    NodeNotInTree,
    PreterminalWithMultipleChildren,
    TreebankError,
    UnbalancedBrackets,
)

# Label used to mark the excision point in an outside tree.
HOLE_LABEL = "<HOLE>"
# Prefix for intermediate symbols introduced by binarization.
BIN_PREFIX = "@"
# Joiner for collapsed unary chains (X -> Y becomes "X+Y").
UNARY_JOIN = "+"

Path = tuple[int, ...]


@dataclass(frozen=True)
class Tree:
    label: str
    children: tuple["Tree", ...] = ()
    word: str | None = None

    def __post_init__(self) -> None:
        if (self.word is None) == (not self.children):
            raise TreebankError(
                f"node {self.label!r} must have either children or a word"
            )

    @property
    def is_preterminal(self) -> bool:
        return self.word is not None

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class NodeContext:
    """Inside/outside split of a tree at one node.

    ``inside`` is the subtree rooted at the node; ``outside`` is the full
    tree with that subtree replaced by a ``HOLE_LABEL`` leaf.  Sentinels:
    ``parent_label`` is ``"TOP"`` and ``sibling_label`` ``"none"`` at the
    root.
    """

    inside: Tree
    outside: Tree
    parent_label: str
    sibling_label: str
    span: tuple[int, int]
    outside_terminals: tuple[str, ...]


def parse_tree(text: str) -> Tree:
    """Parse one PTB-style bracketed tree.

    Raises UnbalancedBrackets, EmptyTree or PreterminalWithMultipleChildren
    on malformed input.  Round-trips through :func:`render` modulo
    whitespace.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise EmptyTree("no tree in input")
    if tokens[0] != "(":
        raise UnbalancedBrackets(f"tree must start with '(': {text!r}")

    def read(pos: int) -> tuple[Tree, int]:
        # tokens[pos] == "("
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise EmptyTree(f"missing label near token {pos}")
        label = tokens[pos]
        pos += 1
        children: list[Tree] = []
        words: list[str] = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                child, pos = read(pos)
                children.append(child)
            else:
                words.append(tokens[pos])
                pos += 1
        if pos >= len(tokens):
            raise UnbalancedBrackets(f"unclosed bracket for {label!r}")
        pos += 1  # consume ")"
        if words and children:
            raise PreterminalWithMultipleChildren(
                f"{label!r} mixes terminals and subtrees"
            )
        if words:
            if len(words) > 1:
                raise PreterminalWithMultipleChildren(
                    f"preterminal {label!r} has {len(words)} terminals"
                )
            return Tree(label, word=words[0]), pos
        if not children:
            raise EmptyTree(f"node {label!r} has no children")
        return Tree(label, children=tuple(children)), pos

    tree, pos = read(0)
    if pos != len(tokens):
        raise UnbalancedBrackets("trailing content after tree")
    return tree


def render(tree: Tree) -> str:
    """Bracketed text for a tree; inverse of :func:`parse_tree`."""
    if tree.is_preterminal:
        return f"({tree.label} {tree.word})"
    inner = " ".join(render(c) for c in tree.children)
    return f"({tree.label} {inner})"


def tree_yield(tree: Tree) -> tuple[str, ...]:
    if tree.is_preterminal:
        return (tree.word,)
    out: list[str] = []
    for child in tree.children:
        out.extend(tree_yield(child))
    return tuple(out)


def iter_nodes(tree: Tree, path: Path = ()) -> Iterator[tuple[Path, Tree]]:
    """Pre-order traversal of (path, node) pairs."""
    yield path, tree
    for i, child in enumerate(tree.children):
        yield from iter_nodes(child, path + (i,))


def node_at(tree: Tree, path: Path) -> Tree:
    node = tree
    for i in path:
        if i >= len(node.children):
            raise NodeNotInTree(f"no node at path {path}")
        node = node.children[i]
    return node


def normalize(tree: Tree, preserve_case: frozenset[str] = frozenset()) -> Tree:
    """Ingestion normalization: collapse unary chains and lowercase tokens.

    A chain X -> Y (single child) becomes one node labeled "X+Y"; chains
    ending in a preterminal become composite preterminals, so normalized
    trees contain only n-ary (n >= 2) nodes and preterminals.  Tokens are
    lowercased unless listed in ``preserve_case`` (entity mentions).
    """
    if tree.is_preterminal:
        word = tree.word if tree.word in preserve_case else tree.word.lower()
        return Tree(tree.label, word=word)
    if len(tree.children) == 1:
        child = normalize(tree.children[0], preserve_case)
        label = tree.label + UNARY_JOIN + child.label
        if child.is_preterminal:
            return Tree(label, word=child.word)
        return Tree(label, children=child.children)
    return Tree(
        tree.label,
        children=tuple(normalize(c, preserve_case) for c in tree.children),
    )


def expand_unaries(tree: Tree) -> Tree:
    """Split "X+Y" composite labels back into unary chains (rendering aid)."""
    parts = tree.label.split(UNARY_JOIN)
    if tree.is_preterminal:
        node = Tree(parts[-1], word=tree.word)
    else:
        node = Tree(parts[-1], children=tuple(expand_unaries(c) for c in tree.children))
    for label in reversed(parts[:-1]):
        node = Tree(label, children=(node,))
    return node


def binarize(tree: Tree) -> Tree:
    """Right-branching binarization with "@Parent" intermediate symbols.

    A node A with children B C D becomes (A B (@A C D)).  Requires a
    normalized tree (no unary internal nodes).  Inverse: :func:`debinarize`.
    """
    if tree.is_preterminal:
        return tree
    if len(tree.children) == 1:
        raise TreebankError(
            f"cannot binarize unary node {tree.label!r}; normalize first"
        )
    children = [binarize(c) for c in tree.children]
    while len(children) > 2:
        tail = Tree(BIN_PREFIX + tree.label, children=(children[-2], children[-1]))
        children = children[:-2] + [tail]
    return Tree(tree.label, children=tuple(children))


def debinarize(tree: Tree) -> Tree:
    """Collapse "@"-symbols introduced by :func:`binarize`."""
    if tree.is_preterminal:
        return tree
    children: list[Tree] = []
    for child in tree.children:
        child = debinarize(child)
        if child.label.startswith(BIN_PREFIX):
            children.extend(child.children)
        else:
            children.append(child)
    return Tree(tree.label, children=tuple(children))


def is_binary(tree: Tree) -> bool:
    if tree.is_preterminal:
        return True
    return len(tree.children) == 2 and all(is_binary(c) for c in tree.children)


def decompose(tree: Tree, path: Path) -> NodeContext:
    """Split ``tree`` at ``path`` into its inside and outside context."""
    inside = node_at(tree, path)  # raises NodeNotInTree

    def excise(node: Tree, rel: Path) -> Tree:
        if not rel:
            return Tree(HOLE_LABEL, word=HOLE_LABEL)
        i = rel[0]
        children = list(node.children)
        children[i] = excise(children[i], rel[1:])
        return Tree(node.label, children=tuple(children))

    if path:
        outside = excise(tree, path)
        parent = node_at(tree, path[:-1])
        parent_label = parent.label
        siblings = [c for i, c in enumerate(parent.children) if i != path[-1]]
        sibling_label = siblings[0].label if siblings else "none"
    else:
        outside = Tree(HOLE_LABEL, word=HOLE_LABEL)
        parent_label = "TOP"
        sibling_label = "none"

    # Span of the inside yield within the full yield.
    start = 0
    node = tree
    for i in path:
        start += sum(len(tree_yield(c)) for c in node.children[:i])
        node = node.children[i]
    width = len(tree_yield(inside))
    outside_terms = tuple(
        t for t in tree_yield(outside) if t != HOLE_LABEL
    )
    return NodeContext(
        inside=inside,
        outside=outside,
        parent_label=parent_label,
        sibling_label=sibling_label,
        span=(start, start + width),
        outside_terminals=outside_terms,
    )


def read_treebank(
    path: str,
    preserve_case: frozenset[str] = frozenset(),
    normalize_trees: bool = True,
) -> list[Tree]:
    """Read one bracketed tree per line; blank and "#" lines are skipped."""
    trees: list[Tree] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                tree = parse_tree(line)
            except TreebankError as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from exc
            trees.append(normalize(tree, preserve_case) if normalize_trees else tree)
    return trees
