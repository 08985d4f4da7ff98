from __future__ import annotations

import pytest

from paralat.errors import AssignmentMismatch, EmptyTreebank, MissingAlignments
from paralat.estimation import (
    AlignmentRecord,
    StateAssignment,
    aligned_words_index,
    annotate_bilayered,
    cluster_states,
    estimate_mle,
    extract_features,
    train_bilayered_grammar,
    train_grammar,
    train_syntactic_assignment,
)
from paralat.grammar import StateLabel, serialize_grammar, validate
from paralat.treebank import binarize, iter_nodes, normalize, parse_tree

# Alignments over the paraphrase triplet that make all three root bags equal:
# every content position maps onto its counterpart(s), and "day" also aligns
# to "celebrated" so tree 0 sees the full shared vocabulary.
TRIPLET_ALIGNMENTS = [
    AlignmentRecord(0, 1, ((0, 0), (1, 0), (2, 1), (3, 2))),
    AlignmentRecord(0, 2, ((0, 0), (1, 0), (1, 3), (2, 1), (3, 2))),
    AlignmentRecord(1, 2, ((0, 0), (0, 3), (1, 1), (2, 2))),
]


class TestExtractFeatures:
    def test_preterminal_syntactic(self, triplet_trees):
        # (NN day) inside the leftmost question tree.
        feats = extract_features(triplet_trees[0], (0, 1), "syntactic")
        expected = {
            "rule=NN->day": 1.0,
            "first=day": 1.0,
            "last=day": 1.0,
            "parent=WHNP": 1.0,
            "sibling=WP": 1.0,
            "len=1": 1.0,
        }
        assert feats == expected

    def test_root_sentinels(self, triplet_trees):
        feats = extract_features(triplet_trees[0], (), "syntactic")
        assert "parent=TOP" in feats
        assert "sibling=none" in feats
        assert "len=3-5" in feats

    def test_semantic_bag_includes_aligned_words(self, triplet_trees):
        index = aligned_words_index(triplet_trees, TRIPLET_ALIGNMENTS)
        # The "day" leaf spans position 1 of tree 0; day aligns to "when".
        feats = extract_features(
            triplet_trees[0], (0, 1), "semantic", aligned=index[0]
        )
        assert feats["w=day"] == 1.0
        assert feats["w=when"] == 1.0
        assert "w=nochebuena" not in feats

    def test_semantic_requires_alignments(self, triplet_trees):
        with pytest.raises(MissingAlignments):
            extract_features(triplet_trees[0], (), "semantic")


class TestClusterStates:
    def test_single_state_assigns_zero(self, triplet_trees):
        assignment = train_syntactic_assignment(triplet_trees, m=1, seed=0)
        assert set(assignment.states.values()) == {0}

    def test_identical_vectors_share_cluster(self):
        vectors = {
            (0, ()): {"x": 1.0},
            (1, ()): {"x": 1.0},
        }
        symbols = {(0, ()): "S", (1, ()): "S"}
        assignment = cluster_states(vectors, symbols, m=2, seed=3)
        assert assignment.states[(0, ())] == assignment.states[(1, ())]

    def test_m24_assignment_covers_every_node(self, triplet_trees):
        assignment = train_syntactic_assignment(triplet_trees, m=24, seed=0)
        for tid, tree in enumerate(triplet_trees):
            for path, _ in iter_nodes(tree):
                assert (tid, path) in assignment.states
        assert all(s < 24 for s in assignment.states.values())

    def test_deterministic(self, triplet_trees):
        a = train_syntactic_assignment(triplet_trees, m=4, seed=9)
        b = train_syntactic_assignment(triplet_trees, m=4, seed=9)
        assert a == b

    def test_permutation_stable_partition(self, triplet_trees):
        a = train_syntactic_assignment(triplet_trees, m=3, seed=11)
        order = [2, 0, 1]
        shuffled = [triplet_trees[i] for i in order]
        b = train_syntactic_assignment(shuffled, m=3, seed=11)
        # Same partition up to tree relabeling: nodes co-clustered before
        # must be co-clustered after.
        def partition(assign, tree_order):
            groups = {}
            for (tid, path), state in assign.states.items():
                groups.setdefault(state, set()).add((tree_order[tid], path))
            return {frozenset(g) for g in groups.values()}

        assert partition(a, [0, 1, 2]) == partition(b, order)


class TestEstimateMle:
    def _assignment(self, treebank, state_map):
        states = {}
        for tid, tree in enumerate(treebank):
            for path, node in iter_nodes(tree):
                states[(tid, path)] = state_map.get((tid, path), 0)
        return StateAssignment(m=1, states=states)

    def test_frequency_ratios(self):
        # S -> A B three times, S -> A C once, all under state 0.
        trees = [binarize(normalize(parse_tree(s))) for s in (
            "(S (A a) (B b))",
            "(S (A a) (B b))",
            "(S (A a) (B b))",
            "(S (A a) (C c))",
        )]
        grammar = estimate_mle(trees, self._assignment(trees, {}))
        s0 = StateLabel(0)
        table = grammar.binary[("S", s0)]
        assert table[("A", s0, "B", s0)] == pytest.approx(0.75)
        assert table[("A", s0, "C", s0)] == pytest.approx(0.25)

    def test_duplication_leaves_parameters_unchanged(self, triplet_trees):
        assignment = train_syntactic_assignment(triplet_trees, m=2, seed=4)
        grammar = estimate_mle(triplet_trees, assignment)
        doubled = triplet_trees + triplet_trees
        dstates = dict(assignment.states)
        for (tid, path), st in assignment.states.items():
            dstates[(tid + 3, path)] = st
        doubled_grammar = estimate_mle(
            doubled, StateAssignment(m=assignment.m, states=dstates)
        )
        assert doubled_grammar.binary == grammar.binary
        assert doubled_grammar.lexical == grammar.lexical
        assert doubled_grammar.roots == grammar.roots

    def test_single_tree_root_mass(self):
        tree = binarize(normalize(parse_tree("(S (A a) (B b))")))
        grammar = estimate_mle([tree], self._assignment([tree], {}))
        assert grammar.roots == {("S", StateLabel(0)): 1.0}

    def test_validates_clean(self, triplet_trees):
        grammar = train_grammar(triplet_trees, m=3, seed=2)
        assert validate(grammar).ok

    def test_empty_treebank(self):
        with pytest.raises(EmptyTreebank):
            estimate_mle([], StateAssignment(m=1, states={}))

    def test_deterministic_serialization(self, triplet_trees):
        a = serialize_grammar(train_grammar(triplet_trees, m=4, seed=13))
        b = serialize_grammar(train_grammar(triplet_trees, m=4, seed=13))
        assert a == b

    def test_every_rule_observed(self, triplet_trees):
        # Monotone support: each grammar rule occurs in the treebank.
        assignment = train_syntactic_assignment(triplet_trees, m=2, seed=4)
        grammar = estimate_mle(triplet_trees, assignment)
        observed = set()
        for tid, tree in enumerate(triplet_trees):
            for path, node in iter_nodes(tree):
                state = StateLabel(assignment.states[(tid, path)])
                if node.is_preterminal:
                    observed.add(("LEX", node.label, state, node.word))
                else:
                    left, right = node.children
                    observed.add((
                        "BIN", node.label, state,
                        left.label, StateLabel(assignment.states[(tid, path + (0,))]),
                        right.label, StateLabel(assignment.states[(tid, path + (1,))]),
                    ))
        for (sym, state), table in grammar.lexical.items():
            for word in table:
                assert ("LEX", sym, state, word) in observed
        for (sym, state), table in grammar.binary.items():
            for (b, sb, c, sc) in table:
                assert ("BIN", sym, state, b, sb, c, sc) in observed


class TestBilayered:
    def test_labels_follow_two_part_scheme(self, triplet_trees):
        annotated, grammar = train_bilayered_grammar(
            triplet_trees, TRIPLET_ALIGNMENTS, m1=2, m2=2, seed=7
        )
        assert validate(grammar).ok
        for tree in annotated:
            for _, node in iter_nodes(tree):
                base, syn, sem = node.label.rsplit("-", 2)
                assert base
                assert syn.isdigit() and sem.isdigit()

    def test_m2_one_reduces_to_syntactic(self, triplet_trees):
        annotated, layered = train_bilayered_grammar(
            triplet_trees, TRIPLET_ALIGNMENTS, m1=2, m2=1, seed=7
        )
        plain = train_grammar(triplet_trees, m=2, seed=7)
        stripped = {
            (sym, StateLabel(st.syn)): prob
            for (sym, st), prob in layered.roots.items()
        }
        assert stripped == dict(plain.roots)
        assert all(st.sem == 0 for _, st in layered.roots)

    def test_shared_bags_cocluster_at_roots(self, triplet_trees):
        # The alignments give all three roots the same semantic bag, so
        # even with m2=2 they must land in the same semantic state.
        annotated, _ = train_bilayered_grammar(
            triplet_trees, TRIPLET_ALIGNMENTS, m1=2, m2=2, seed=7
        )
        root_sems = {tree.label.rsplit("-", 1)[1] for tree in annotated}
        assert len(root_sems) == 1

    def test_missing_layer_coverage_raises(self, triplet_trees):
        syn = train_syntactic_assignment(triplet_trees, m=2, seed=1)
        sem = StateAssignment(m=2, states={})
        with pytest.raises(AssignmentMismatch):
            annotate_bilayered(triplet_trees, syn, sem)
