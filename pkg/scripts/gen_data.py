#!/usr/bin/env python3
"""Generate the bundled desk-scale corpus under src/paralat/data/.

Deterministic: running it twice produces byte-identical files.  The
mini-treebank is built from question templates organized in paraphrase
clusters (same family + same slot filler); alignments pair questions
within a cluster; 50 template instances are held out as raw questions.
"""

from __future__ import annotations

import random
from pathlib import Path

SEED = 20160612
DATA = Path(__file__).resolve().parent.parent / "src" / "paralat" / "data"

HOLIDAYS = (
    "nochebuena christmas hanukkah easter halloween thanksgiving diwali "
    "carnival hogmanay ramadan epiphany midsummer passover purim holi pentecost"
).split()
COUNTRIES = [
    ("czech", "republic"), ("france",), ("spain",), ("germany",), ("japan",),
    ("italy",), ("portugal",), ("scotland",), ("norway",), ("poland",),
    ("austria",), ("greece",), ("finland",), ("denmark",), ("ireland",),
    ("hungary",),
]
CITIES = (
    "prague paris madrid berlin tokyo rome lisbon edinburgh oslo warsaw "
    "vienna athens helsinki copenhagen dublin budapest"
).split()
PERSONS = (
    "bell galileo nobel fleming edison marconi pasteur curie tesla darwin "
    "newton volta faraday kepler hubble watt"
).split()
THINGS = (
    "telephone telescope dynamite penicillin phonograph radio vaccine battery "
    "telegraph microscope barometer thermometer stethoscope engine camera clock"
).split()
BOOKS = (
    "hamlet faust dracula frankenstein ulysses beowulf candide emma ivanhoe "
    "lolita macbeth othello persuasion middlemarch dubliners walden"
).split()
FILMS = (
    "psycho vertigo jaws alien amadeus casablanca metropolis nosferatu rocky "
    "titanic gladiator chinatown fargo heat rebecca notorious"
).split()
MOUNTAINS = (
    "everest fuji kilimanjaro denali elbrus aconcagua olympus etna vesuvius "
    "matterhorn eiger annapurna makalu fitzroy whitney rainier"
).split()


def np_proper(tokens):
    inner = " ".join(f"(NNP {t})" for t in tokens)
    return f"(NP {inner})"


def poss_np(tokens, head):
    inner = " ".join(f"(NNP {t})" for t in tokens)
    return f"(NP (NP {inner} (POS 's)) (NN {head}))"


def the_x_of(head, np, extra_adj=None):
    adj = f"(JJ {extra_adj}) " if extra_adj else ""
    return f"(NP (NP (DT the) {adj}(NN {head})) (PP (IN of) {np}))"


# Template families; members of one family (per filler) are paraphrases.
FAMILIES = {
    "day": (HOLIDAYS, [
        lambda h: f"(SBARQ (WHNP (WP what) (NN day)) (SQ (AUX is) (NN {h})))",
        lambda h: f"(SBARQ (WRB when) (SQ (AUX is) (NN {h})))",
        lambda h: f"(SBARQ (WRB when) (SQ (SQ (AUX is) (NN {h})) (JJ celebrated)))",
        lambda h: f"(SBARQ (WHNP (WP what) (NN date)) (SQ (AUX is) (NN {h})))",
        lambda h: f"(SBARQ (WHNP (WP what) (NN day)) (SQ (SQ (AUX is) (NN {h})) (JJ celebrated)))",
    ]),
    "lang": (COUNTRIES, [
        lambda c: (
            "(SBARQ (WHNP (WP what) (NN language)) (SQ (AUX do) "
            f"(NP (NNS people) (PP (IN in) {np_proper(c)})) (VP (VB speak))))"
        ),
        lambda c: f"(SBARQ (WHNP (WP what)) (SQ (AUX is) {poss_np(c, 'language')}))",
        lambda c: (
            "(SBARQ (WHNP (WP what) (NN language)) (SQ (AUX is) "
            f"(VP (VBN spoken) (PP (IN in) {np_proper(c)}))))"
        ),
        lambda c: (
            "(SBARQ (WHNP (WP what)) (SQ (AUX do) "
            f"(NP (NNS people) (PP (IN in) {np_proper(c)})) (VP (VB speak))))"
        ),
        lambda c: (
            "(SBARQ (WHNP (WP what)) (SQ (AUX is) "
            f"{the_x_of('language', np_proper(c), extra_adj='official')}))"
        ),
    ]),
    "capital": (COUNTRIES, [
        lambda c: f"(SBARQ (WHNP (WP what)) (SQ (AUX is) {the_x_of('capital', np_proper(c))}))",
        lambda c: f"(SBARQ (WHNP (WP what) (NN city)) (SQ (AUX is) {the_x_of('capital', np_proper(c))}))",
        lambda c: f"(SBARQ (WHNP (WP what)) (SQ (AUX is) {poss_np(c, 'capital')}))",
    ]),
    "currency": (COUNTRIES, [
        lambda c: (
            "(SBARQ (WHNP (WP what) (NN currency)) "
            f"(SQ (AUX does) {np_proper(c)} (VP (VB use))))"
        ),
        lambda c: (
            "(SBARQ (WHNP (WP what) (NN money)) (SQ (AUX do) "
            f"(NP (NNS people) (PP (IN in) {np_proper(c)})) (VP (VB use))))"
        ),
        lambda c: f"(SBARQ (WHNP (WP what)) (SQ (AUX is) {the_x_of('currency', np_proper(c))}))",
        lambda c: (
            "(SBARQ (WHNP (WP what) (NN currency)) (SQ (AUX is) "
            f"(VP (VBN used) (PP (IN in) {np_proper(c)}))))"
        ),
    ]),
    "population": (COUNTRIES, [
        lambda c: (
            "(SBARQ (WHADJP (WRB how) (JJ many)) (SQ (NP (NNS people)) "
            f"(VP (VB live) (PP (IN in) {np_proper(c)}))))"
        ),
        lambda c: f"(SBARQ (WHNP (WP what)) (SQ (AUX is) {the_x_of('population', np_proper(c))}))",
    ]),
    "city": (CITIES, [
        lambda t: f"(SBARQ (WRB where) (SQ (AUX is) (NP (NNP {t}))))",
        lambda t: (
            "(SBARQ (WHNP (WP what) (NN country)) "
            f"(SQ (AUX is) (NP (NNP {t})) (PP (IN in))))"
        ),
    ]),
    "born": (PERSONS, [
        lambda p: f"(SBARQ (WRB where) (SQ (AUX was) (NP (NNP {p})) (VP (VBN born))))",
        lambda p: (
            "(SBARQ (WHNP (WP what) (NN country)) "
            f"(SQ (AUX was) (NP (NNP {p})) (VP (VBN born) (PP (IN in)))))"
        ),
    ]),
    "birthyear": (PERSONS, [
        lambda p: f"(SBARQ (WRB when) (SQ (AUX was) (NP (NNP {p})) (VP (VBN born))))",
        lambda p: (
            "(SBARQ (WHNP (WP what) (NN year)) "
            f"(SQ (AUX was) (NP (NNP {p})) (VP (VBN born))))"
        ),
    ]),
    "invention": (THINGS, [
        lambda g: f"(SBARQ (WHNP (WP who)) (SQ (VP (VBD invented) (NP (DT the) (NN {g})))))",
        lambda g: f"(SBARQ (WHNP (WP who)) (SQ (VP (VBD created) (NP (DT the) (NN {g})))))",
        lambda g: (
            "(SBARQ (WHNP (WP who)) (SQ (AUX was) "
            f"{the_x_of('inventor', f'(NP (DT the) (NN {g}))')}))"
        ),
    ]),
    "inventby": (PERSONS, [
        lambda p: f"(SBARQ (WHNP (WP what)) (SQ (AUX did) (NP (NNP {p})) (VP (VB invent))))",
    ]),
    "author": (BOOKS, [
        lambda k: f"(SBARQ (WHNP (WP who)) (SQ (VP (VBD wrote) (NP (NNP {k})))))",
        lambda k: f"(SBARQ (WHNP (WP who)) (SQ (AUX is) {the_x_of('author', f'(NP (NNP {k}))')}))",
    ]),
    "director": (FILMS, [
        lambda f: f"(SBARQ (WHNP (WP who)) (SQ (VP (VBD directed) (NP (NNP {f})))))",
    ]),
    "release": (FILMS, [
        lambda f: (
            "(SBARQ (WHNP (WP what) (NN year)) "
            f"(SQ (AUX was) (NP (NNP {f})) (VP (VBN released))))"
        ),
    ]),
    "height": (MOUNTAINS, [
        lambda m: f"(SBARQ (WHADJP (WRB how) (JJ tall)) (SQ (AUX is) (NP (NNP {m}))))",
        lambda m: f"(SBARQ (WHADJP (WRB how) (JJ high)) (SQ (AUX is) (NP (NNP {m}))))",
    ]),
}

TREEBANK_SIZE = 500
HELDOUT_SIZE = 50


def instantiate():
    """Every (family, filler, template) instance with its cluster key."""
    from paralat.treebank import parse_tree, tree_yield

    instances = []
    for family, (fillers, templates) in FAMILIES.items():
        for filler in fillers:
            arg = filler if isinstance(filler, tuple) else filler
            arg = " ".join(arg) if isinstance(arg, tuple) else arg
            for t_idx, template in enumerate(templates):
                # Multi-token fillers go through the NP helpers as tuples.
                raw = template(filler if isinstance(filler, tuple) else arg)
                question = " ".join(tree_yield(parse_tree(raw)))
                cluster = (family, arg)
                instances.append((cluster, t_idx, question, raw))
    return instances


def write_treebank_and_alignments(rng):
    instances = instantiate()
    assert len(instances) == 560, len(instances)
    order = list(range(len(instances)))
    rng.shuffle(order)
    heldout_ids = order[:HELDOUT_SIZE]
    train_ids = order[HELDOUT_SIZE:HELDOUT_SIZE + TREEBANK_SIZE]
    assert len(train_ids) == TREEBANK_SIZE

    train = [instances[i] for i in sorted(train_ids)]
    heldout = [instances[i] for i in sorted(heldout_ids)]

    lines = [inst[3] for inst in train]
    (DATA / "minitreebank.trees").write_text(
        "# mini question treebank: one bracketed tree per line\n"
        + "\n".join(lines) + "\n",
        encoding="utf-8",
    )
    (DATA / "heldout_questions.txt").write_text(
        "\n".join(inst[2] for inst in heldout) + "\n", encoding="utf-8"
    )

    # Alignments: exact-token matches between cluster members.  Tree ids
    # refer to (non-comment) line positions in minitreebank.trees.
    by_cluster = {}
    for tid, (cluster, _t_idx, question, _raw) in enumerate(train):
        by_cluster.setdefault(cluster, []).append((tid, question.split()))
    records = []
    for cluster in sorted(by_cluster):
        members = by_cluster[cluster]
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                tid_a, toks_a = members[a]
                tid_b, toks_b = members[b]
                pairs = [
                    f"{i}-{j}"
                    for i, ta in enumerate(toks_a)
                    for j, tb in enumerate(toks_b)
                    if ta == tb
                ]
                if pairs:
                    records.append(f"{tid_a}\t{tid_b}\t{','.join(pairs)}")
    (DATA / "alignments.tsv").write_text("\n".join(records) + "\n", encoding="utf-8")
    return train, heldout


CURATED_RULES = [
    # In-vocabulary rewrites: these open real alternative derivations.
    ("day", "date", 4.8), ("date", "day", 4.8),
    ("what day", "when", 4.5), ("when", "what day", 4.5),
    ("what date", "when", 4.4), ("when", "what date", 4.4),
    ("currency", "money", 4.6), ("money", "currency", 4.6),
    ("what currency", "what money", 4.2), ("what money", "what currency", 4.2),
    ("tall", "high", 4.7), ("high", "tall", 4.7),
    ("invented", "created", 4.3), ("created", "invented", 4.3),
    ("who invented", "who created", 4.1), ("who created", "who invented", 4.1),
    ("capital", "capital city", 4.0),
    ("the capital of", "the capital city of", 3.9),
    ("the official language of", "the language of", 4.4),
    ("the language of", "the official language of", 3.8),
    ("language", "official language", 3.6),
    ("how many people live in", "what is the population of", 4.0),
    ("what is the population of", "how many people live in", 4.0),
    ("the population of", "the number of people in", 3.2),
    ("what year", "when", 4.2), ("when", "what year", 3.3),
    ("where", "what country", 3.0),
    ("what country", "where", 3.0),
    # PPDB-style rewrites whose targets fall outside the treebank; they
    # widen the lattice but only consume rules the grammar knows.
    ("people", "citizens", 4.9),
    ("people", "the population", 3.4),
    ("people", "people 's", 2.1),
    ("people", "human beings", 2.8),
    ("people", "members of the public", 2.2),
    ("speak", "talk", 4.0),
    ("speak", "is speaking", 2.4),
    ("live", "reside", 3.7),
    ("wrote", "authored", 4.1),
    ("author", "writer", 4.5),
    ("directed", "made", 3.1),
    ("inventor", "creator", 4.2),
]

ALIASES = {
    "prague": "praha", "paris": "lutetia", "madrid": "los madriles",
    "berlin": "berlino", "tokyo": "edo", "rome": "roma", "lisbon": "lisboa",
    "edinburgh": "auld reekie", "oslo": "christiania", "warsaw": "warszawa",
    "vienna": "wien", "athens": "athina", "helsinki": "helsingfors",
    "copenhagen": "kobenhavn", "dublin": "baile atha cliath",
    "budapest": "pest buda", "france": "the french republic",
    "spain": "espana", "germany": "deutschland", "japan": "nippon",
    "italy": "italia", "portugal": "portuguese republic",
    "scotland": "caledonia", "norway": "norge", "poland": "polska",
    "austria": "osterreich", "greece": "hellas", "finland": "suomi",
    "denmark": "danmark", "ireland": "eire", "hungary": "magyarorszag",
    "czech republic": "czechia",
}


def write_rules():
    rules = [(s, t, sc) for s, t, sc in CURATED_RULES]
    for source in sorted(ALIASES):
        rules.append((source, ALIASES[source], 3.5))
        rules.append((ALIASES[source], source, 3.5))
    for holiday in HOLIDAYS:
        rules.append((holiday, f"the {holiday} holiday", 1.5))
    for person in PERSONS:
        rules.append((f"was {person} born", f"did {person} come into the world", 1.2))
    for thing in THINGS:
        rules.append((f"the {thing}", f"this {thing}", 1.1))
    for mountain in MOUNTAINS:
        rules.append((f"how tall is {mountain}", f"what is the height of {mountain}", 2.7))
    for book in BOOKS:
        rules.append((f"wrote {book}", f"penned {book}", 1.8))
    for film in FILMS:
        rules.append((f"directed {film}", f"was the director of {film}", 1.6))
    assert len(rules) == 200, len(rules)
    lines = [f"{s}\t{t}\t{sc:.1f}" for s, t, sc in rules]
    (DATA / "rewrite_rules.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_gazetteer():
    surfaces = []
    surfaces.extend(" ".join(c) for c in COUNTRIES)
    surfaces.extend(CITIES)
    surfaces.extend(PERSONS)
    surfaces.extend(HOLIDAYS)
    surfaces.extend(THINGS)
    surfaces.extend(BOOKS)
    surfaces.extend(FILMS)
    surfaces.extend(MOUNTAINS)
    (DATA / "gazetteer.txt").write_text("\n".join(surfaces) + "\n", encoding="utf-8")


def write_classifier_pairs(rng, train):
    by_cluster = {}
    for cluster, _t, question, _raw in train:
        by_cluster.setdefault(cluster, []).append(question)
    clusters = [c for c in sorted(by_cluster) if len(by_cluster[c]) >= 2]
    questions = [q for _, _, q, _ in train]

    pairs = []
    while len(pairs) < 154:
        cluster = rng.choice(clusters)
        a, b = rng.sample(by_cluster[cluster], 2)
        pairs.append((a, b, 1))

    cluster_of = {q: cluster for cluster, _t, q, _raw in train}
    negatives = []
    while len(negatives) < 796:
        a, b = rng.sample(questions, 2)
        if cluster_of[a] != cluster_of[b]:
            negatives.append((a, b, 0))
    # Hard negatives: same words, garbled order.
    while len(negatives) < 846:
        q = rng.choice(questions)
        tokens = q.split()
        shuffled = tokens[:]
        rng.shuffle(shuffled)
        if shuffled != tokens:
            negatives.append((q, " ".join(shuffled), 0))
    pairs.extend(negatives)
    rng.shuffle(pairs)
    assert len(pairs) == 1000
    assert sum(label for _, _, label in pairs) == 154
    lines = [f"{a}\t{b}\t{label}" for a, b, label in pairs]
    (DATA / "classifier_pairs.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


KB_LINES = """\
CzechRepublic\tofficial_language\tCzech
France\tofficial_language\tFrench
Spain\tofficial_language\tSpanish
Germany\tofficial_language\tGerman
Japan\tofficial_language\tJapanese
CzechRepublic\tcapital\tPrague
France\tcapital\tParis
Spain\tcapital\tMadrid
Germany\tcapital\tBerlin
Japan\tcapital\tTokyo
CzechRepublic\tuses_currency\tKoruna
France\tuses_currency\tEuro
Spain\tuses_currency\tEuro
Germany\tuses_currency\tEuro
Japan\tuses_currency\tYen
Nochebuena\tcelebrated_on\tDecember24
Christmas\tcelebrated_on\tDecember25
Hogmanay\tcelebrated_on\tDecember31
Bell\tinvented\tTelephone
Nobel\tinvented\tDynamite
Fleming\tinvented\tPenicillin
Marconi\tinvented\tRadio
Bell\tborn_in\tScotland
Nobel\tborn_in\tSweden
Fleming\tborn_in\tScotland
Marconi\tborn_in\tItaly
Prague\tlocated_in\tCzechRepublic
Paris\tlocated_in\tFrance
TYPE\tCzech\tlanguage.human_language
TYPE\tFrench\tlanguage.human_language
TYPE\tSpanish\tlanguage.human_language
TYPE\tGerman\tlanguage.human_language
TYPE\tJapanese\tlanguage.human_language
TYPE\tPrague\tlocation.city
TYPE\tParis\tlocation.city
TYPE\tMadrid\tlocation.city
TYPE\tBerlin\tlocation.city
TYPE\tTokyo\tlocation.city
TYPE\tCzechRepublic\tlocation.country
TYPE\tFrance\tlocation.country
TYPE\tSpain\tlocation.country
TYPE\tGermany\tlocation.country
TYPE\tJapan\tlocation.country
TYPE\tKoruna\tfinance.currency
TYPE\tEuro\tfinance.currency
TYPE\tYen\tfinance.currency
TYPE\tDecember24\ttime.date
TYPE\tDecember25\ttime.date
TYPE\tDecember31\ttime.date
TYPE\tBell\tpeople.person
TYPE\tNobel\tpeople.person
TYPE\tFleming\tpeople.person
TYPE\tMarconi\tpeople.person
TYPE\tTelephone\tinvention.device
TYPE\tDynamite\tinvention.device
TYPE\tPenicillin\tinvention.device
TYPE\tRadio\tinvention.device
"""

# (name, text, score, target-bound structure)
GRAPHS = {
    # --- training questions ---
    "q01_orig": {
        "text": "what is the capital of france",
        "score": 1.0,
        "entities": {"e1": "france"},
        "types": {"t1": ("city", "target")},
        "events": {"ev1": [("e1", "capital.of"), ("x", "capital.arg")]},
    },
    "q02_orig": {
        "text": "what is the capital of spain",
        "score": 1.0,
        "entities": {"e1": "spain"},
        "types": {"t1": ("city", "target")},
        "events": {"ev1": [("e1", "capital.of"), ("x", "capital.arg")]},
    },
    "q03_orig": {
        "text": "what language do people in france speak",
        "score": 1.0,
        "entities": {"e1": "france", "e2": "people"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e2", "speak.arg1"), ("x", "speak.arg2"),
                           ("e1", "speak.in")]},
    },
    "q03_para": {
        "text": "what is france 's language",
        "score": 0.92,
        "entities": {"e1": "france"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e1", "language.poss"), ("x", "language.arg")]},
    },
    "q04_orig": {
        "text": "what currency does germany use",
        "score": 1.0,
        "entities": {"e1": "germany"},
        "types": {"t1": ("currency", "target")},
        "events": {"ev1": [("e1", "use.subj"), ("x", "use.obj")]},
    },
    "q05_orig": {
        "text": "what day is christmas",
        "score": 1.0,
        "entities": {"e1": "christmas"},
        "types": {"t1": ("day", "target")},
        "events": {"ev1": [("e1", "be.arg1"), ("x", "be.arg2")]},
    },
    "q06_orig": {
        "text": "who invented the telephone",
        "score": 1.0,
        "entities": {"e1": "telephone"},
        "types": {},
        "events": {"ev1": [("x", "invented.arg1"), ("e1", "invented.arg2")]},
    },
    "q07_orig": {
        "text": "where was bell born",
        "score": 1.0,
        "entities": {"e1": "bell"},
        "types": {},
        "events": {"ev1": [("e1", "born.arg1"), ("x", "born.in")]},
    },
    "q08_orig": {
        "text": "when is hogmanay",
        "score": 1.0,
        "entities": {"e1": "hogmanay"},
        "types": {},
        "events": {"ev1": [("e1", "be.arg1"), ("x", "be.arg2")]},
    },
    "q15_orig": {
        # "czech republic" also prefix-matches the language entity, so this
        # question trains the entity-lattice-score feature.
        "text": "what is the capital of czech republic",
        "score": 1.0,
        "entities": {"e1": "czech republic"},
        "types": {"t1": ("city", "target")},
        "events": {"ev1": [("e1", "capital.of"), ("x", "capital.arg")]},
    },
    "q16_orig": {
        # Ambiguous mention plus a relation that holds in both directions
        # around it; forces updates on the direction-sensitive alignment
        # and lattice-score features.
        "text": "what is czech republic 's language",
        "score": 1.0,
        "entities": {"e1": "czech republic"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e1", "language.poss"), ("x", "language.arg")]},
    },
    # --- evaluation questions ---
    "q09_orig": {
        "text": "what language do people in czech republic speak",
        "score": 1.0,
        "entities": {"e1": "czech republic", "e2": "people"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e2", "speak.arg1"), ("x", "speak.arg2"),
                           ("e1", "speak.in")]},
    },
    "q09_para1": {
        "text": "what is czech republic 's language",
        "score": 0.93,
        "entities": {"e1": "czech republic"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e1", "language.poss"), ("x", "language.arg")]},
    },
    "q09_para2": {
        "text": "what language is spoken in czech republic",
        "score": 0.88,
        "entities": {"e1": "czech republic"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("x", "spoken.lang"), ("e1", "spoken.in")]},
    },
    "q10_orig": {
        "text": "what money do people in japan use",
        "score": 1.0,
        "entities": {"e1": "japan", "e2": "people"},
        "types": {},
        "events": {"ev1": [("e2", "use.arg1"), ("x", "use.obj"),
                           ("e1", "use.in")]},
    },
    "q10_para": {
        "text": "what is the currency of japan",
        "score": 0.9,
        "entities": {"e1": "japan"},
        "types": {"t1": ("currency", "target")},
        "events": {"ev1": [("e1", "currency.of"), ("x", "currency.arg")]},
    },
    "q11_orig": {
        "text": "what is the capital of germany",
        "score": 1.0,
        "entities": {"e1": "germany"},
        "types": {"t1": ("city", "target")},
        "events": {"ev1": [("e1", "capital.of"), ("x", "capital.arg")]},
    },
    "q12_orig": {
        "text": "when is nochebuena",
        "score": 1.0,
        "entities": {"e1": "nochebuena"},
        "types": {},
        "events": {"ev1": [("e1", "be.arg1"), ("x", "be.arg2")]},
    },
    "q13_orig": {
        "text": "what language do people in spain speak",
        "score": 1.0,
        "entities": {"e1": "spain", "e2": "people"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e2", "speak.arg1"), ("x", "speak.arg2"),
                           ("e1", "speak.in")]},
    },
    "q13_para": {
        "text": "what is spain 's language",
        "score": 0.91,
        "entities": {"e1": "spain"},
        "types": {"t1": ("language", "target")},
        "events": {"ev1": [("e1", "language.poss"), ("x", "language.arg")]},
    },
    "q14_orig": {
        "text": "who invented the radio",
        "score": 1.0,
        "entities": {"e1": "radio"},
        "types": {},
        "events": {"ev1": [("x", "invented.arg1"), ("e1", "invented.arg2")]},
    },
}

QA_TRAIN = [
    ("what is the capital of france", ["q01_orig"], ["Paris"]),
    ("what is the capital of spain", ["q02_orig"], ["Madrid"]),
    ("what language do people in france speak", ["q03_orig", "q03_para"], ["French"]),
    ("what currency does germany use", ["q04_orig"], ["Euro"]),
    ("what day is christmas", ["q05_orig"], ["December25"]),
    ("who invented the telephone", ["q06_orig"], ["Bell"]),
    ("where was bell born", ["q07_orig"], ["Scotland"]),
    ("when is hogmanay", ["q08_orig"], ["December31"]),
    ("what is the capital of czech republic", ["q15_orig"], ["Prague"]),
    ("what is czech republic 's language", ["q16_orig"], ["Czech"]),
]

QA_EVAL = [
    ("what language do people in czech republic speak",
     ["q09_orig", "q09_para1", "q09_para2"], ["Czech"]),
    ("what money do people in japan use", ["q10_orig", "q10_para"], ["Yen"]),
    ("what is the capital of germany", ["q11_orig"], ["Berlin"]),
    ("when is nochebuena", ["q12_orig"], ["December24"]),
    ("what language do people in spain speak",
     ["q13_orig", "q13_para"], ["Spanish"]),
    ("who invented the radio", ["q14_orig"], ["Marconi"]),
]


def write_kb_and_graphs():
    (DATA / "kb.tsv").write_text(KB_LINES, encoding="utf-8")
    graphs_dir = DATA / "graphs"
    graphs_dir.mkdir(exist_ok=True)
    for name, spec in GRAPHS.items():
        lines = [f"TEXT {spec['text']}", f"SCORE {spec['score']}", "TARGET x"]
        for nid in sorted(spec["entities"]):
            lines.append(f"ENTITY {nid} {spec['entities'][nid]}")
        for nid in sorted(spec["types"]):
            label, constrains = spec["types"][nid]
            lines.append(f"TYPE {nid} {label} {constrains}")
        for event in sorted(spec["events"]):
            lines.append(f"EVENT {event}")
        for event in sorted(spec["events"]):
            for node, label in spec["events"][event]:
                lines.append(f"EDGE {event} {node} {label}")
        (graphs_dir / f"{name}.graph").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )

    def qa_lines(rows):
        return "\n".join(
            f"{q}\t{','.join(g + '.graph' for g in graphs)}\t{'|'.join(answers)}"
            for q, graphs, answers in rows
        ) + "\n"

    (DATA / "qa_train.tsv").write_text(qa_lines(QA_TRAIN), encoding="utf-8")
    (DATA / "qa_eval.tsv").write_text(qa_lines(QA_EVAL), encoding="utf-8")


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    train, _heldout = write_treebank_and_alignments(rng)
    write_rules()
    write_gazetteer()
    write_classifier_pairs(rng, train)
    write_kb_and_graphs()
    print(f"wrote data files to {DATA}")


if __name__ == "__main__":
    main()
