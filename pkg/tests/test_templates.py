import pytest

from kbqa.errors import ArityMismatch, ParseError
from kbqa.graph import QueryTemplate, TemplateLibrary, parse_cql, placeholder_numbers

WANKE_TEMPLATE = 'MATCH (c:Company {name:XX1})-[:located]->(x) RETURN x'


def test_fill_single_placeholder():
    t = QueryTemplate("hq_location", WANKE_TEMPLATE, 1)
    assert t.fill(["wanke"]) == 'MATCH (c:Company {name:"wanke"})-[:located]->(x) RETURN x'


def test_bare_xx_is_alias_for_xx1():
    t = QueryTemplate("hq_location", 'MATCH (c {name:XX})-[:located]->(x) RETURN x', 1)
    assert t.fill(["wanke"]) == 'MATCH (c {name:"wanke"})-[:located]->(x) RETURN x'


def test_arity_mismatch_reports_counts():
    t = QueryTemplate(
        "shared", 'MATCH (a {name:XX1})-[:r]->(v)<-[:r]-(b {name:XX2}) RETURN v', 2)
    with pytest.raises(ArityMismatch) as err:
        t.fill(["only one"])
    assert (err.value.expected, err.value.got) == (2, 1)


def test_too_many_entities_rejected():
    t = QueryTemplate("hq_location", WANKE_TEMPLATE, 1)
    with pytest.raises(ArityMismatch):
        t.fill(["a", "b"])


def test_quote_escaping_round_trips():
    t = QueryTemplate("hq_location", WANKE_TEMPLATE, 1)
    text = t.fill(['entity "with" quotes\\'])
    q = parse_cql(text)
    assert q.patterns[0].head.props == (("name", 'entity "with" quotes\\'),)


def test_arity_zero_template():
    t = QueryTemplate("top", "MATCH (a)-[:r]->(b) RETURN a", 0)
    assert t.fill([]) == "MATCH (a)-[:r]->(b) RETURN a"


def test_declared_arity_must_match_placeholders():
    with pytest.raises(ValueError, match="arity"):
        QueryTemplate("bad", WANKE_TEMPLATE, 2)


def test_non_contiguous_placeholders_rejected():
    with pytest.raises(ValueError):
        QueryTemplate("bad", 'MATCH (c {name:XX2})-[:r]->(x) RETURN x', 1)


def test_unparseable_template_rejected():
    with pytest.raises(ParseError):
        QueryTemplate("bad", 'MATCH (c {name:XX1} RETURN x', 1)


def test_placeholder_numbers():
    assert placeholder_numbers("XX and XX2 and XX10") == {1, 2, 10}
    assert placeholder_numbers("XXL is not a placeholder") == set()


def test_library_last_wins():
    lib = TemplateLibrary()
    first = QueryTemplate("hq_location", WANKE_TEMPLATE, 1)
    second = QueryTemplate("hq_location", 'MATCH (c {name:XX1})-[:based_in]->(x) RETURN x', 1)
    assert lib.register(first) is False
    assert lib.register(second) is True
    assert lib.get("hq_location") is second
    assert len(lib) == 1


def test_library_get_unknown():
    assert TemplateLibrary().get("nope") is None
