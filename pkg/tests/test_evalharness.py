import json

import pytest

from kbqa.config import ServiceConfig
from kbqa.errors import DatasetInvalid
from kbqa.evalharness import (
    EvalCase,
    ablation_grid,
    grid_to_json,
    load_dataset,
    render_grid_table,
    run_eval,
)


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


def case(question, intent, entities, values, kind="simple", id_=None):
    return {
        "id": id_ or question[:18],
        "question": question,
        "gold_intent": intent,
        "gold_entities": entities,
        "gold_answer_values": values,
        "kind": kind,
    }


@pytest.fixture
def tiny_dataset(tmp_path):
    return write_jsonl(tmp_path / "cases.jsonl", [
        case("Where is the headquarters of Wanke company located?",
             "hq_location", ["wanke"], ["Shenzhen"]),
        case("Please name the five most popular investment companies.",
             "top_invested", [],
             ["harbor dynamics", "quartz logistics", "crimson energy",
              "azure telecom", "emerald retail"], kind="complex"),
        # Wrong-seed collision that only the feedback dialogue can repair.
        case("What peers operate in the cedar pharma industry?",
             "industry_peers", ["cedar pharma"],
             ["beacon pharma", "cedar pharma"], kind="complex"),
    ])


def test_load_dataset_roundtrip(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    assert len(cases) == 3
    assert cases[0].gold_answer_values == frozenset({"Shenzhen"})
    assert cases[1].kind == "complex"


def test_empty_dataset_invalid(tmp_path):
    p = tmp_path / "cases.jsonl"
    p.write_text("", encoding="utf-8")
    with pytest.raises(DatasetInvalid):
        load_dataset(p)


def test_bad_kind_invalid(tmp_path):
    p = write_jsonl(tmp_path / "cases.jsonl",
                    [case("q", "i", [], ["v"], kind="medium")])
    with pytest.raises(DatasetInvalid):
        load_dataset(p)


def test_empty_gold_values_invalid(tmp_path):
    p = write_jsonl(tmp_path / "cases.jsonl", [case("q", "i", [], [])])
    with pytest.raises(DatasetInvalid):
        load_dataset(p)


def test_missing_gold_entity_rejected(tmp_path):
    p = write_jsonl(tmp_path / "cases.jsonl",
                    [case("q", "hq_location", ["atlantis corp"], ["x"])])
    with pytest.raises(DatasetInvalid, match="atlantis corp"):
        run_eval(load_dataset(p), ServiceConfig())


def test_run_eval_counts_and_credit(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    result = run_eval(cases, ServiceConfig())
    assert result.accuracy == 1.0
    by_id = {c.case_id: c for c in result.per_case}
    assert by_id[cases[0].id].method == "rule"
    assert by_id[cases[0].id].corrected_by_adapt is False
    assert by_id[cases[2].id].corrected_by_adapt is True
    assert by_id[cases[2].id].method == "embedding"  # the repaired re-ask


def test_adapt_disabled_blocks_credit(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    result = run_eval(cases, ServiceConfig(disable_adapt=True))
    by_id = {c.case_id: c for c in result.per_case}
    assert by_id[cases[2].id].correct is False
    assert by_id[cases[2].id].corrected_by_adapt is False
    assert result.accuracy == pytest.approx(2 / 3)


def test_disabled_embedding_makes_no_embed_calls(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    result = run_eval(cases, ServiceConfig(disable_embedding=True))
    assert result.provider_calls["embed"] == 0


def test_grid_reproducible_and_isolated(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    config = ServiceConfig()
    first = ablation_grid(cases, config)
    second = ablation_grid(cases, config)
    assert grid_to_json(first) == grid_to_json(second)
    assert render_grid_table(first) == render_grid_table(second)
    fingerprints = {r.initial_base_fingerprint for r in first.values()}
    assert len(fingerprints) == 1  # every setting starts from identical state


def test_grid_table_shape(tiny_dataset):
    cases = load_dataset(tiny_dataset)
    table = render_grid_table(ablation_grid(cases, ServiceConfig()))
    lines = table.splitlines()
    assert lines[0].startswith("setting")
    assert [l.split("  ")[0].strip() for l in lines[1:]] == [
        "all", "w/o rule", "w/o embedding", "w/o llm", "w/o adapt"]
