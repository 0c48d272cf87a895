from __future__ import annotations

import random

import pytest

from tourkg.query import (
    Filter,
    PatternQuery,
    QueryError,
    TriplePattern,
    Var,
    evaluate,
    parse_query,
    rows_to_plain,
)
from tourkg.rdf import RDF_TYPE, Quad, QuadStore, Term, iri, literal

EX = "https://example.org/"
SCHEMA = "https://schema.org/"
G1, G2 = iri("urn:g:1"), iri("urn:g:2")


def t(name):
    return iri(EX + name)


def fixture_store() -> QuadStore:
    store = QuadStore()
    rdf_type = iri(RDF_TYPE)
    hotel = iri(SCHEMA + "Hotel")
    locality = iri(SCHEMA + "addressLocality")
    store.add_quads(
        [
            Quad(t("h1"), rdf_type, hotel, G1),
            Quad(t("h1"), locality, literal("Seefeld"), G1),
            Quad(t("h2"), rdf_type, hotel, G1),
            Quad(t("h2"), locality, literal("Mayrhofen"), G1),
            Quad(t("r1"), rdf_type, iri(SCHEMA + "Restaurant"), G1),
        ]
    )
    return store


# -- the nested-loop oracle -------------------------------------------------------


def oracle_evaluate(store: QuadStore, query: PatternQuery) -> list[dict]:
    """Independent nested-loop join: scan all quads per pattern, no indexes."""
    all_quads = list(store)
    rows = [{}]
    for pattern in query.patterns:
        extended = []
        for row in rows:
            for q in all_quads:
                candidate = dict(row)
                pairs = [
                    (pattern.subject, q.subject),
                    (pattern.predicate, q.predicate),
                    (pattern.object, q.object),
                ]
                if pattern.graph is not None:
                    pairs.append((pattern.graph, q.graph))
                ok = True
                for pos, got in pairs:
                    if isinstance(pos, Var):
                        if pos.name in candidate and candidate[pos.name] != got:
                            ok = False
                            break
                        candidate[pos.name] = got
                    elif pos != got:
                        ok = False
                        break
                if ok:
                    extended.append(candidate)
        rows = extended
    out = []
    for row in rows:
        keep = True
        for f in query.filters:
            term = row[f.variable]
            if isinstance(f.value, (int, float)):
                try:
                    lhs = float(term.value)
                except ValueError:
                    keep = False
                    break
                rhs = float(f.value)
            else:
                if not isinstance(term, Term):
                    keep = False
                    break
                lhs, rhs = term.value, f.value
            op = f.op
            result = {
                "<": lhs < rhs,
                "<=": lhs <= rhs,
                ">": lhs > rhs,
                ">=": lhs >= rhs,
                "=": lhs == rhs,
                "!=": lhs != rhs,
            }[op]
            if not result:
                keep = False
                break
        if keep:
            out.append({v: row[v] for v in query.projection})
    return out


def as_bag(rows):
    return sorted(
        tuple(sorted((k, repr(v)) for k, v in row.items())) for row in rows
    )


# -- parsing ----------------------------------------------------------------------


def test_parse_minimal_query():
    q = parse_query("SELECT ?h\nPATTERN ?h rdf:type schema:Hotel")
    assert q.projection == ["h"]
    assert q.patterns[0].predicate == iri(RDF_TYPE)


def test_parse_graph_position_and_filter():
    q = parse_query(
        "SELECT ?h ?g\nPATTERN ?h schema:price ?p ?g\nFILTER ?p < 100"
    )
    assert isinstance(q.patterns[0].graph, Var)
    assert q.filters == [Filter("p", "<", 100)]


def test_parse_rejects_unknown_clause():
    with pytest.raises(QueryError, match="unknown clause"):
        parse_query("SELECT ?x\nWHERE ?x ?y ?z")


def test_unbound_projection_rejected_before_evaluation():
    with pytest.raises(QueryError, match=r"\?nope"):
        parse_query("SELECT ?nope\nPATTERN ?h rdf:type schema:Hotel")


def test_unbound_filter_rejected():
    query = PatternQuery(
        patterns=[TriplePattern(Var("h"), iri(RDF_TYPE), iri(SCHEMA + "Hotel"))],
        filters=[Filter("price", "<", 10)],
        projection=["h"],
    )
    with pytest.raises(QueryError):
        evaluate(QuadStore(), query)


# -- evaluation -------------------------------------------------------------------


def test_fully_bound_pattern_yields_one_empty_row():
    store = fixture_store()
    query = PatternQuery(
        patterns=[TriplePattern(t("h1"), iri(RDF_TYPE), iri(SCHEMA + "Hotel"))],
        projection=[],
    )
    # projection must be non-empty per contract; use a variable over the graph
    query = parse_query(f"SELECT ?g\nPATTERN <{EX}h1> rdf:type schema:Hotel ?g")
    rows = evaluate(store, query)
    assert rows == [{"g": G1}]


def test_two_pattern_join_matches_hand_join():
    store = fixture_store()
    query = parse_query(
        "SELECT ?h ?where\nPATTERN ?h rdf:type schema:Hotel\nPATTERN ?h schema:addressLocality ?where"
    )
    rows = evaluate(store, query)
    # hand-joined over the 5 fixture quads:
    assert as_bag(rows) == as_bag(
        [
            {"h": t("h1"), "where": literal("Seefeld")},
            {"h": t("h2"), "where": literal("Mayrhofen")},
        ]
    )


def test_numeric_filter():
    store = QuadStore()
    price = iri(SCHEMA + "price")
    store.add_quads(
        [
            Quad(t("o1"), price, literal("80"), G1),
            Quad(t("o2"), price, literal("100"), G1),
            Quad(t("o3"), price, literal("120"), G1),
        ]
    )
    query = parse_query("SELECT ?o\nPATTERN ?o schema:price ?p\nFILTER ?p < 100")
    assert evaluate(store, query) == [{"o": t("o1")}]


def test_bag_semantics_preserves_duplicates():
    store = QuadStore()
    store.add_quads(
        [
            Quad(t("a"), t("p"), t("x"), G1),
            Quad(t("a"), t("p"), t("x"), G2),  # same triple, second graph
        ]
    )
    query = parse_query(f"SELECT ?s\nPATTERN ?s <{EX}p> <{EX}x>")
    rows = evaluate(store, query)
    assert rows == [{"s": t("a")}, {"s": t("a")}]


def test_same_variable_twice_in_one_pattern():
    store = QuadStore()
    store.add_quads(
        [Quad(t("n"), t("p"), t("n"), G1), Quad(t("n"), t("p"), t("m"), G1)]
    )
    query = parse_query(f"SELECT ?x\nPATTERN ?x <{EX}p> ?x")
    assert evaluate(store, query) == [{"x": t("n")}]


def test_deterministic_row_order():
    store = fixture_store()
    query = parse_query("SELECT ?h\nPATTERN ?h rdf:type schema:Hotel")
    assert evaluate(store, query) == evaluate(store, query)


def test_rows_to_plain():
    rows = [{"h": t("h1"), "n": literal("Alpenhof")}]
    assert rows_to_plain(rows) == [{"h": EX + "h1", "n": "Alpenhof"}]


# -- random queries vs. oracle -----------------------------------------------------


def random_store(rng: random.Random, size: int) -> QuadStore:
    store = QuadStore()
    nodes = [t(f"n{i}") for i in range(rng.randint(3, 12))]
    preds = [t(f"p{i}") for i in range(rng.randint(1, 4))]
    graphs = [G1, G2]
    quads = []
    for _ in range(size):
        obj = rng.choice(nodes) if rng.random() < 0.7 else literal(str(rng.randint(0, 50)))
        quads.append(Quad(rng.choice(nodes), rng.choice(preds), obj, rng.choice(graphs)))
    store.add_quads(quads)
    return store


def random_query(rng: random.Random, store: QuadStore) -> PatternQuery:
    """Patterns anchored on existing quads, variables threaded for joins."""
    quads = list(store)
    patterns = []
    var_count = 0
    shared: list[Var] = []
    for _ in range(rng.randint(1, 3)):
        anchor = rng.choice(quads)
        positions = []
        for value in (anchor.subject, anchor.predicate, anchor.object):
            roll = rng.random()
            if roll < 0.45:
                positions.append(value)
            elif roll < 0.75 or not shared:
                var = Var(f"v{var_count}")
                var_count += 1
                shared.append(var)
                positions.append(var)
            else:
                positions.append(rng.choice(shared))
        graph = None
        if rng.random() < 0.3:
            graph = anchor.graph
        elif rng.random() < 0.2:
            var = Var(f"v{var_count}")
            var_count += 1
            shared.append(var)
            graph = var
        patterns.append(TriplePattern(positions[0], positions[1], positions[2], graph))
    bound = set()
    for p in patterns:
        bound |= p.variables()
    bound = sorted(bound)
    projection = rng.sample(bound, rng.randint(1, len(bound))) if bound else []
    filters = []
    if bound and rng.random() < 0.4:
        filters.append(
            Filter(rng.choice(bound), rng.choice(["<", "<=", ">", ">=", "=", "!="]), rng.randint(0, 50))
        )
    if not projection:
        return None
    return PatternQuery(patterns=patterns, filters=filters, projection=projection)


def test_random_queries_match_nested_loop_oracle():
    rng = random.Random(20180301)
    checked = 0
    while checked < 60:
        store = random_store(rng, rng.randint(5, 120))
        query = random_query(rng, store)
        if query is None:
            continue
        assert as_bag(evaluate(store, query)) == as_bag(oracle_evaluate(store, query))
        checked += 1
