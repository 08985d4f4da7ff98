from __future__ import annotations

import inspect

import pytest

from oracles import exhaustive_groundings
from paralat.errors import (
    EmptyGold,
    NoEntityCandidates,
    SemparseError,
    UnboundTarget,
)
from paralat.semparse import (
    GroundedGraph,
    KnowledgeGraph,
    PerceptronModel,
    QAExample,
    UngroundedGraph,
    denotation,
    dot_score,
    entity_candidates,
    evaluate,
    f1_loss,
    ground,
    load_kb,
    load_perceptron_weights,
    load_ungrounded,
    oracle_best_f1,
    oracle_set,
    perceptron_train,
    save_perceptron,
    tuple_features,
)


@pytest.fixture(scope="module")
def kb() -> KnowledgeGraph:
    return KnowledgeGraph(
        entities=(
            "CzechRepublic", "CzechLanguage", "Prague", "France",
            "French", "Paris", "Nochebuena", "December24",
        ),
        triples=frozenset({
            ("CzechRepublic", "official_language", "CzechLanguage"),
            ("France", "official_language", "French"),
            ("CzechRepublic", "capital", "Prague"),
            ("France", "capital", "Paris"),
            ("Nochebuena", "celebrated_on", "December24"),
        }),
        type_assertions=frozenset({
            ("CzechLanguage", "language.human_language"),
            ("French", "language.human_language"),
            ("Prague", "location.city"),
            ("Paris", "location.city"),
            ("December24", "time.date"),
        }),
    )


def _language_graph(score: float = 1.0) -> UngroundedGraph:
    """Graph of "what is czech republic 's language" (isomorphic to KB)."""
    return UngroundedGraph(
        name="para.lang",
        target="x",
        entity_nodes=(("e1", ("czech", "republic")),),
        type_nodes=(("t1", "language", "target"),),
        events=("ev1",),
        edges=(("ev1", "e1", "language.poss"), ("ev1", "x", "language.arg")),
        text=tuple("what is czech republic 's language".split()),
        classifier_score=score,
    )


def _people_graph() -> UngroundedGraph:
    """Original question graph with an extra ungroundable mention."""
    return UngroundedGraph(
        name="orig.people",
        target="x",
        entity_nodes=(("e1", ("czech", "republic")), ("e2", ("people",))),
        type_nodes=(("t1", "language", "target"),),
        events=("ev1",),
        edges=(
            ("ev1", "e2", "speak.arg1"),
            ("ev1", "x", "speak.arg2"),
            ("ev1", "e1", "speak.in"),
        ),
        text=tuple("what language do people in czech republic speak".split()),
    )


def _grounding(graph, kb, relation="official_language", type_choice="language.human_language"):
    (event, n1, n2, _), = graph.entity_edges()
    return GroundedGraph(
        graph=graph,
        entity_map=(("e1", "CzechRepublic"),),
        edge_map=(((event, n1, n2), (relation, "fwd") if relation else None),),
        type_map=((graph.type_nodes[0][0], type_choice),),
    )


class TestDenotation:
    def test_reaches_gold_answer(self, kb):
        grounded = _grounding(_language_graph(), kb)
        assert denotation(grounded, kb) == {"CzechLanguage"}

    def test_all_null_is_unbound(self, kb):
        grounded = _grounding(_language_graph(), kb, relation=None, type_choice=None)
        with pytest.raises(UnboundTarget):
            denotation(grounded, kb)

    def test_unsatisfiable_conjunction_is_empty(self, kb):
        grounded = _grounding(
            _language_graph(), kb, relation="celebrated_on",
            type_choice="language.human_language",
        )
        assert denotation(grounded, kb) == frozenset()

    def test_monotone_under_constraint_removal(self, kb):
        graph = _language_graph()
        full = _grounding(graph, kb)
        edge_nulled = _grounding(graph, kb, relation=None)
        assert denotation(full, kb) <= denotation(edge_nulled, kb)


class TestF1Loss:
    def test_exact_match(self):
        assert f1_loss({"A"}, {"A"}) == 0.0

    def test_partial_overlap(self):
        assert f1_loss({"A", "B"}, {"A"}) == pytest.approx(1 / 3)

    def test_disjoint(self):
        assert f1_loss({"B"}, {"A"}) == 1.0

    def test_empty_prediction(self):
        assert f1_loss(frozenset(), {"A"}) == 1.0

    def test_empty_gold(self):
        with pytest.raises(EmptyGold):
            f1_loss({"A"}, set())


class TestEntityResolution:
    def test_exact_and_prefix_matches(self, kb):
        cands = entity_candidates(("czech", "republic"), kb)
        assert cands[0] == ("CzechRepublic", 2, 0)
        prefix = entity_candidates(("czech",), kb)
        assert [c[0] for c in prefix] == ["CzechRepublic", "CzechLanguage"]

    def test_no_candidates_raises_in_grounding(self, kb):
        with pytest.raises(NoEntityCandidates):
            ground(_people_graph(), kb)


class TestGround:
    def test_beam_default_is_100(self):
        assert inspect.signature(ground).parameters["beam"].default == 100

    def test_matches_exhaustive_enumeration(self, kb):
        graph = _language_graph()
        expected = exhaustive_groundings(graph, kb)
        got = ground(graph, kb, None, beam=10000)
        assert {g.key() for g, _, _ in got} == {g.key() for g in expected}

    def test_top1_matches_exhaustive_argmax(self, kb):
        graph = _language_graph()
        weights = {"stem_overlap": 1.0, "null_edges": -0.5, "lattice_score": 0.1}
        got = ground(graph, kb, weights, beam=100)
        best_key = got[0][0].key()
        exhaustive = [
            (dot_score(weights, tuple_features(g)), g.key()) for g in
            exhaustive_groundings(graph, kb)
        ]
        exhaustive.sort(key=lambda item: (-item[0], item[1]))
        assert best_key == exhaustive[0][1]

    def test_zero_weights_lexicographic_top1(self, kb):
        graph = _language_graph()
        got = ground(graph, kb, None, beam=100)
        keys = [g.key() for g, _, _ in got]
        assert keys[0] == min(keys)

    def test_scores_are_dot_products(self, kb):
        weights = {"classifier_score": 2.0}
        got = ground(_language_graph(score=0.75), kb, weights, beam=10)
        for _, score, feats in got:
            assert score == pytest.approx(dot_score(weights, feats))
            assert feats["classifier_score"] == 0.75


class TestOracleSet:
    def test_perfect_grounding_found(self, kb):
        oracle = oracle_set([_language_graph()], kb, frozenset({"CzechLanguage"}))
        assert oracle
        assert oracle[0].loss == 0.0
        keys = {t.grounding.key() for t in oracle}
        assert any("official_language" in k for k in keys)

    def test_nothing_grounds_yields_empty(self, kb):
        oracle = oracle_set([_people_graph()], kb, frozenset({"CzechLanguage"}))
        assert oracle == []

    def test_ties_all_returned(self, kb):
        # Both the typed and untyped official_language groundings reach gold.
        oracle = oracle_set([_language_graph()], kb, frozenset({"CzechLanguage"}))
        assert len(oracle) >= 2

    def test_paraphrase_recovers_unreachable_question(self, kb):
        gold = frozenset({"CzechLanguage"})
        assert oracle_best_f1([_people_graph()], kb, gold) == 0.0
        assert oracle_best_f1([_people_graph(), _language_graph()], kb, gold) == 1.0

    def test_empty_gold(self, kb):
        with pytest.raises(EmptyGold):
            oracle_set([_language_graph()], kb, frozenset())


class TestPerceptron:
    def test_zero_update_when_prediction_is_oracle(self, kb):
        example = QAExample(
            question=tuple("what is czech republic 's language".split()),
            graphs=(_language_graph(),),
            gold=frozenset({"CzechLanguage"}),
        )
        model = perceptron_train([example], kb, epochs=3, beam=100)
        final_predict = evaluate([example], kb, model.averaged(), beam=100)
        assert final_predict.avg_f1 == 1.0

    def test_classifier_score_feature_present(self, kb):
        feats = tuple_features(_grounding(_language_graph(score=0.5), kb))
        assert feats["classifier_score"] == 0.5

    def test_averaged_equals_mean_of_snapshots(self, kb):
        model = PerceptronModel()
        snapshots = []
        for i in range(5):
            model.weights[f"f{i}"] = float(i)
            model.snapshot()
            snapshots.append(dict(model.weights))
        averaged = model.averaged()
        for name in averaged:
            expected = sum(s.get(name, 0.0) for s in snapshots) / len(snapshots)
            assert averaged[name] == pytest.approx(expected)

    def test_learns_separable_toy_instance(self, kb):
        # Two groundings reach different answers; only one matches gold.
        example = QAExample(
            question=tuple("what is the capital of france".split()),
            graphs=(
                UngroundedGraph(
                    name="capital",
                    target="x",
                    entity_nodes=(("e1", ("france",)),),
                    type_nodes=(),
                    events=("ev1",),
                    edges=(("ev1", "e1", "capital.of"), ("ev1", "x", "capital.arg")),
                    text=tuple("what is the capital of france".split()),
                ),
            ),
            gold=frozenset({"Paris"}),
        )
        model = perceptron_train([example], kb, epochs=5, beam=100)
        report = evaluate([example], kb, model.averaged(), beam=100)
        assert report.avg_f1 == 1.0
        assert model.skipped == 0


class TestFiles:
    def test_kb_roundtrip(self, tmp_path, kb):
        path = tmp_path / "kb.tsv"
        lines = [f"{s}\t{r}\t{o}" for s, r, o in sorted(kb.triples)]
        lines += [f"TYPE\t{e}\t{t}" for e, t in sorted(kb.type_assertions)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        loaded = load_kb(str(path))
        assert loaded.triples == kb.triples
        assert loaded.type_assertions == kb.type_assertions

    def test_graph_file_roundtrip(self, tmp_path):
        path = tmp_path / "g.graph"
        path.write_text(
            "# a paraphrase graph\n"
            "TEXT what is czech republic 's language\n"
            "SCORE 0.9\n"
            "TARGET x\n"
            "ENTITY e1 czech republic\n"
            "TYPE t1 language target\n"
            "EVENT ev1\n"
            "EDGE ev1 e1 language.poss\n"
            "EDGE ev1 x language.arg\n",
            encoding="utf-8",
        )
        graph = load_ungrounded(str(path), name="g.graph")
        assert graph.target == "x"
        assert graph.classifier_score == 0.9
        assert graph.entity_edges() == (
            ("ev1", "e1", "x", "language.poss|language.arg"),
        )

    def test_graph_file_requires_target(self, tmp_path):
        path = tmp_path / "bad.graph"
        path.write_text("ENTITY e1 czech\n", encoding="utf-8")
        with pytest.raises(SemparseError):
            load_ungrounded(str(path))

    def test_perceptron_file_roundtrip(self, tmp_path, kb):
        example = QAExample(
            question=tuple("what is czech republic 's language".split()),
            graphs=(_language_graph(),),
            gold=frozenset({"CzechLanguage"}),
        )
        model = perceptron_train([example], kb, epochs=2, beam=50)
        path = tmp_path / "model.tsv"
        save_perceptron(model, str(path))
        weights = load_perceptron_weights(str(path))
        averaged = model.averaged()
        for name, value in weights.items():
            assert value == pytest.approx(averaged[name])
