import json

import pytest

from kbqa.errors import FileUnreadable, UnknownFormat
from kbqa.graph import TemplateLibrary, TripleStore
from kbqa.ingest import load_intent_seeds, load_rules, load_templates, load_triples
from kbqa.intent import IntentBase, IntentRule
from kbqa.providers import MockEmbedder


# ---------------------------------------------------------------------------
# Triples


def test_csv_row_loads(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("wanke,located,Shenzhen,string\n", encoding="utf-8")
    store = TripleStore()
    report = load_triples(p, store)
    assert (report.loaded, report.rejected) == (1, 0)
    assert store.has("wanke", "located", "Shenzhen")


def test_empty_file(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("", encoding="utf-8")
    report = load_triples(p, TripleStore())
    assert (report.loaded, report.rejected, report.errors) == (0, 0, [])


def test_unknown_object_type_rejected_others_kept(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text(
        "wanke,located,Shenzhen,string\n"
        "wanke,price,18.6,float\n"
        "wanke,employees,140000,number\n",
        encoding="utf-8",
    )
    store = TripleStore()
    report = load_triples(p, store)
    assert (report.loaded, report.rejected) == (2, 1)
    assert report.errors[0][0] == 2
    assert "object_type" in report.errors[0][1]
    assert len(store) == 2


def test_jsonl_triples(tmp_path):
    p = tmp_path / "t.jsonl"
    p.write_text(
        '{"s": "wanke", "p": "employees", "o": 140000, "t": "number"}\n'
        '{"s": "wanke", "p": "invested_by", "o": "skylark fund", "t": "entity"}\n'
        "not json\n",
        encoding="utf-8",
    )
    store = TripleStore()
    report = load_triples(p, store)
    assert (report.loaded, report.rejected) == (2, 1)
    assert store.has("wanke", "employees", 140000.0)


def test_unknown_extension(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("x", encoding="utf-8")
    with pytest.raises(UnknownFormat):
        load_triples(p, TripleStore())


def test_missing_file(tmp_path):
    with pytest.raises(FileUnreadable):
        load_triples(tmp_path / "none.csv", TripleStore())


def test_reload_is_idempotent(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("wanke,located,Shenzhen,string\nwanke,employees,9,number\n",
                 encoding="utf-8")
    store = TripleStore()
    load_triples(p, store)
    first_hash = store.content_hash()
    report = load_triples(p, store)
    assert report.loaded == 2
    assert store.content_hash() == first_hash


def test_accounting_balances(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,c,string\nbroken row\n,empty,subject,string\nd,e,1,number\n",
                 encoding="utf-8")
    report = load_triples(p, TripleStore())
    assert report.loaded + report.rejected == 4


# ---------------------------------------------------------------------------
# Seeds


def seed_file(tmp_path, lines):
    p = tmp_path / "seeds.jsonl"
    p.write_text("\n".join(json.dumps(line) for line in lines) + "\n", encoding="utf-8")
    return p


def test_seed_with_two_examples_adds_two_records(tmp_path):
    p = seed_file(tmp_path, [{"label": "hq_location",
                              "examples": ["where is wanke", "wanke location"]}])
    base = IntentBase(64)
    report = load_intent_seeds(p, base, MockEmbedder(dim=64))
    assert report.loaded == 1  # records count seed lines
    assert len(base) == 2


def test_seed_reload_idempotent(tmp_path):
    p = seed_file(tmp_path, [{"label": "a", "examples": ["x", "y"]}])
    base = IntentBase(64)
    embedder = MockEmbedder(dim=64)
    load_intent_seeds(p, base, embedder)
    fingerprint = base.fingerprint()
    load_intent_seeds(p, base, embedder)
    assert base.fingerprint() == fingerprint


def test_seed_empty_examples_rejected(tmp_path):
    p = seed_file(tmp_path, [{"label": "a", "examples": []},
                             {"label": "b", "examples": ["ok"]}])
    base = IntentBase(64)
    report = load_intent_seeds(p, base, MockEmbedder(dim=64))
    assert (report.loaded, report.rejected) == (1, 1)
    assert len(base) == 1


# ---------------------------------------------------------------------------
# Templates


def template_file(tmp_path, lines):
    p = tmp_path / "templates.jsonl"
    p.write_text("\n".join(json.dumps(line) for line in lines) + "\n", encoding="utf-8")
    return p


def test_valid_template_registers(tmp_path):
    p = template_file(tmp_path, [{
        "intent": "hq_location",
        "cql": 'MATCH (c {name:XX1})-[:located]->(x) RETURN x',
        "arity": 1,
    }])
    lib = TemplateLibrary()
    report = load_templates(p, lib)
    assert report.loaded == 1
    assert lib.get("hq_location") is not None


def test_arity_declaration_mismatch(tmp_path):
    p = template_file(tmp_path, [{
        "intent": "bad",
        "cql": 'MATCH (c {name:XX1})-[:r]->(x) RETURN x',
        "arity": 2,
    }])
    report = load_templates(p, TemplateLibrary())
    assert report.rejected == 1
    assert "arity declaration mismatch" in report.errors[0][1]


def test_unparseable_template_rejected(tmp_path):
    p = template_file(tmp_path, [{"intent": "bad", "cql": "MATCH (c RETURN", "arity": 0}])
    report = load_templates(p, TemplateLibrary())
    assert report.rejected == 1
    assert "parse" in report.errors[0][1]


def test_override_is_noted(tmp_path):
    p = template_file(tmp_path, [
        {"intent": "hq", "cql": "MATCH (c {name:XX1})-[:a]->(x) RETURN x", "arity": 1},
        {"intent": "hq", "cql": "MATCH (c {name:XX1})-[:b]->(x) RETURN x", "arity": 1},
    ])
    lib = TemplateLibrary()
    report = load_templates(p, lib)
    assert report.loaded == 2
    assert report.notes == [(2, "replaced earlier template for intent 'hq'")]
    assert ":b]" in lib.get("hq").cql_text


# ---------------------------------------------------------------------------
# Rules


def rule_file(tmp_path, lines):
    p = tmp_path / "rules.jsonl"
    p.write_text("\n".join(json.dumps(line) for line in lines) + "\n", encoding="utf-8")
    return p


def test_rules_load_in_file_order(tmp_path):
    p = rule_file(tmp_path, [
        {"label": "first", "keyword_groups": [["a"]], "pattern": None},
        {"label": "second", "keyword_groups": [["b"]], "pattern": "b$"},
        {"label": "third", "keyword_groups": [["c"]], "pattern": None},
    ])
    rules: list[IntentRule] = []
    report = load_rules(p, rules)
    assert report.loaded == 3
    assert [r.label for r in rules] == ["first", "second", "third"]


def test_invalid_regex_rejected(tmp_path):
    p = rule_file(tmp_path, [
        {"label": "bad", "keyword_groups": [["a"]], "pattern": "("},
        {"label": "good", "keyword_groups": [["b"]], "pattern": None},
    ])
    rules: list[IntentRule] = []
    report = load_rules(p, rules)
    assert (report.loaded, report.rejected) == (1, 1)
    assert [r.label for r in rules] == ["good"]


def test_rule_without_groups_or_pattern_rejected(tmp_path):
    p = rule_file(tmp_path, [{"label": "bad", "keyword_groups": [], "pattern": None}])
    report = load_rules(p, [])
    assert report.rejected == 1
