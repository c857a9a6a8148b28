import json
import math
import re

import pytest
from hypothesis import given, settings, strategies as st

from kbqa.errors import DimensionMismatch, ProviderUnavailable, UnresolvedIntent
from kbqa.intent import (
    CascadeConfig,
    IntentBase,
    IntentRule,
    cosine,
    match_rules,
    nearest_intent,
    recognize,
)
from kbqa.preprocess import CleanQuestion, RawQuestion, clean
from kbqa.providers import EmbeddingVector, MockEmbedder, ScriptedLlm

from oracles import brute_force_cosine, brute_force_nearest

EMBEDDER = MockEmbedder(dim=64)


def cq(text: str) -> CleanQuestion:
    return clean(RawQuestion(text), frozenset())


def unit(values) -> EmbeddingVector:
    return EmbeddingVector.from_raw(values)


# ---------------------------------------------------------------------------
# Rules


def test_rule_matches_all_groups():
    rule = IntentRule("hq_location",
                      (frozenset({"headquarters"}), frozenset({"located", "location"})))
    assert match_rules(cq("headquarters wanke located"), [rule]) == "hq_location"


def test_rule_fails_when_group_missing():
    rule = IntentRule("hq_location",
                      (frozenset({"headquarters"}), frozenset({"located"})))
    assert match_rules(cq("headquarters wanke"), [rule]) is None


def test_empty_rule_list():
    assert match_rules(cq("anything"), []) is None


def test_first_matching_rule_wins():
    rules = [
        IntentRule("first", (frozenset({"stock"}),)),
        IntentRule("second", (frozenset({"stock"}),)),
    ]
    assert match_rules(cq("stock price"), rules) == "first"


def test_rule_pattern_must_also_match():
    rule = IntentRule("r", (frozenset({"stock"}),), re.compile(r"price$"))
    assert match_rules(cq("stock price"), [rule]) == "r"
    assert match_rules(cq("stock price today"), [rule]) is None


def test_rule_requires_group_or_pattern():
    with pytest.raises(ValueError):
        IntentRule("empty")


# ---------------------------------------------------------------------------
# Cosine


def test_cosine_identity_and_antipodal():
    v = unit([1.0, 2.0, 2.0])
    anti = EmbeddingVector(tuple(-x for x in v.values))
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)
    assert cosine(v, anti) == pytest.approx(-1.0, abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine(unit([1.0, 0.0]), unit([1.0, 0.0, 0.0]))


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
       st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_cosine_equals_summation_oracle(a, b):
    try:
        va, vb = unit(a), unit(b)
    except ValueError:
        return
    assert cosine(va, vb) == pytest.approx(brute_force_cosine(va, vb), abs=1e-12)
    assert -1.0 <= cosine(va, vb) <= 1.0


# ---------------------------------------------------------------------------
# Intent base and nearest


def seeded_base(texts_by_label: dict[str, list[str]], dim: int = 64) -> IntentBase:
    base = IntentBase(dim)
    embedder = MockEmbedder(dim=dim)
    for label, texts in texts_by_label.items():
        for text in texts:
            base.upsert(label, text, embedder.embed(text))
    return base


def test_upsert_and_exact_retrieval():
    base = seeded_base({"hq": ["wanke headquarters location"]})
    vec = MockEmbedder(dim=64).embed("wanke headquarters location")
    record, sim = nearest_intent(vec, base)
    assert record.label == "hq"
    assert sim == pytest.approx(1.0, abs=1e-9)


def test_nearest_on_empty_base():
    assert nearest_intent(unit([1.0] * 64), IntentBase(64)) is None


def test_upsert_duplicate_is_noop():
    base = IntentBase(4)
    base.upsert("a", "q", unit([1, 0, 0, 0]))
    base.upsert("a", "q", unit([1, 0, 0, 0]))
    assert len(base) == 1


def test_upsert_same_text_different_label_adds():
    base = IntentBase(4)
    base.upsert("a", "q", unit([1, 0, 0, 0]))
    base.upsert("b", "q", unit([1, 0, 0, 0]))
    assert len(base) == 2


def test_upsert_dimension_checked():
    base = IntentBase(4)
    with pytest.raises(DimensionMismatch):
        base.upsert("a", "q", unit([1, 0, 0]))


def test_nearest_tie_breaks_label_then_insertion():
    base = IntentBase(4)
    v = unit([1, 0, 0, 0])
    base.upsert("zeta", "q1", v)
    base.upsert("alpha", "q2", v)
    base.upsert("alpha", "q3", v)
    record, sim = nearest_intent(v, base)
    assert (record.label, record.example_text) == ("alpha", "q2")
    assert sim == pytest.approx(1.0)


@settings(max_examples=40)
@given(st.lists(st.tuples(st.sampled_from("abcd"), st.text("xyzw", min_size=1, max_size=6)),
                min_size=1, max_size=12),
       st.text("xyzw", min_size=1, max_size=6))
def test_nearest_matches_exhaustive_oracle(records, query):
    base = IntentBase(64)
    embedder = MockEmbedder(dim=64)
    for label, text in records:
        base.upsert(label, text, embedder.embed(text))
    vec = embedder.embed(query)
    got = nearest_intent(vec, base)
    expected = brute_force_nearest(vec, base)
    assert (got[0], pytest.approx(got[1], abs=1e-12)) == (expected[0], expected[1])


def test_argmax_scale_invariance():
    base = seeded_base({"a": ["alpha beta"], "b": ["gamma delta"]})
    vec = MockEmbedder(dim=64).embed("alpha beta gamma")
    scaled = EmbeddingVector.from_raw([17.0 * v for v in vec.values])
    assert nearest_intent(vec, base)[0] == nearest_intent(scaled, base)[0]


def test_persistence_round_trip(tmp_path):
    base = seeded_base({"hq": ["wanke headquarters"], "price": ["wanke stock price"]})
    path = tmp_path / "base.jsonl"
    base.save_jsonl(path)
    loaded = IntentBase.load_jsonl(path)
    assert loaded.fingerprint() == base.fingerprint()
    assert loaded.dim == base.dim


def test_load_rejects_mixed_dimensions(tmp_path):
    path = tmp_path / "base.jsonl"
    path.write_text(
        json.dumps({"label": "a", "example": "x", "vector": [1.0, 0.0]}) + "\n"
        + json.dumps({"label": "b", "example": "y", "vector": [1.0, 0.0, 0.0]}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(DimensionMismatch):
        IntentBase.load_jsonl(path)


def test_load_renormalizes(tmp_path):
    path = tmp_path / "base.jsonl"
    path.write_text(json.dumps({"label": "a", "example": "x", "vector": [3.0, 4.0]}) + "\n",
                    encoding="utf-8")
    loaded = IntentBase.load_jsonl(path)
    assert loaded.snapshot()[0].vector.values == (0.6, 0.8)


# ---------------------------------------------------------------------------
# The cascade


RULES = [IntentRule("hq_location", (frozenset({"headquarters"}),))]


def scripted(reply: str | None) -> ScriptedLlm:
    llm = ScriptedLlm()
    if reply is not None:
        llm.register_default("intent_fallback", reply)
    return llm


def test_rule_tier_short_circuits():
    base = seeded_base({"hq_location": ["wanke headquarters"]})
    embedder = MockEmbedder(dim=64)
    llm = scripted("intent: anything")
    result, vector = recognize(cq("wanke headquarters location"), RULES, base,
                               CascadeConfig(), embedder, llm)
    assert (result.method, result.label, result.score) == ("rule", "hq_location", 1.0)
    assert embedder.calls == 0 and llm.calls == 0
    assert vector is None


def test_embedding_tier_exact_hit():
    base = seeded_base({"stock_price": ["wanke stock price"]})
    llm = scripted(None)
    result, vector = recognize(cq("wanke stock price"), RULES, base,
                               CascadeConfig(), MockEmbedder(dim=64), llm)
    assert result.method == "embedding"
    assert result.label == "stock_price"
    assert result.score >= 1.0 - 1e-9
    assert result.matched_record is not None
    assert vector is not None and llm.calls == 0


def test_llm_tier_writes_back():
    base = IntentBase(64)
    llm = scripted("intent: hq_location")
    result, _ = recognize(cq("novel phrasing entirely"), RULES, base,
                          CascadeConfig(), MockEmbedder(dim=64), llm)
    assert (result.method, result.label) == ("llm", "hq_location")
    assert result.is_new_intent is False  # label known from the rules
    assert len(base) == 1  # written back
    again, _ = recognize(cq("novel phrasing entirely"), RULES, base,
                         CascadeConfig(), MockEmbedder(dim=64), scripted(None))
    assert again.method == "embedding" and again.score >= 1.0 - 1e-9


def test_llm_new_label_flagged():
    base = IntentBase(64)
    result, _ = recognize(cq("pay out dividends when"), [], base, CascadeConfig(),
                          MockEmbedder(dim=64), scripted("intent: Dividend Policy"))
    assert result.is_new_intent is True
    assert result.label == "dividend_policy"


def test_llm_new_label_disallowed():
    base = IntentBase(64)
    with pytest.raises(UnresolvedIntent):
        recognize(cq("pay out dividends when"), [], base,
                  CascadeConfig(allow_new_labels=False),
                  MockEmbedder(dim=64), scripted("intent: Dividend Policy"))


def test_llm_unavailable_is_outage():
    class DownLlm(ScriptedLlm):
        def complete(self, request):
            self.calls += 1
            raise ProviderUnavailable("down")

    with pytest.raises(UnresolvedIntent) as err:
        recognize(cq("novel"), [], IntentBase(64), CascadeConfig(),
                  MockEmbedder(dim=64), DownLlm())
    assert err.value.caused_by_outage is True


def test_unparseable_reply_is_not_outage():
    with pytest.raises(UnresolvedIntent) as err:
        recognize(cq("novel"), [], IntentBase(64), CascadeConfig(),
                  MockEmbedder(dim=64), scripted("no label in here"))
    assert err.value.caused_by_outage is False


def test_no_tiers_available():
    with pytest.raises(UnresolvedIntent):
        recognize(cq("anything"), [], IntentBase(64), CascadeConfig(), None, None)


def test_embedding_outage_falls_through_to_llm():
    class DownEmbedder(MockEmbedder):
        def embed(self, text):
            raise ProviderUnavailable("down")

    base = seeded_base({"stock_price": ["wanke stock price"]})
    result, vector = recognize(cq("wanke stock price"), [], base, CascadeConfig(),
                               DownEmbedder(dim=64), scripted("intent: stock_price"))
    assert result.method == "llm"
    assert vector is None
    assert len(base) == 1  # no write-back without a vector


def test_threshold_monotonicity():
    base = seeded_base({
        "a": ["alpha beta gamma delta"],
        "b": ["epsilon zeta eta theta"],
    })
    questions = [
        "alpha beta gamma delta",
        "alpha beta gamma other",
        "alpha beta other other",
        "completely unrelated words",
    ]
    taus = [0.0, 0.5, 0.8, 0.95, 1.0]
    resolved: dict[float, set[str]] = {}
    for tau in taus:
        hit = set()
        for q in questions:
            try:
                result, _ = recognize(cq(q), [], base, CascadeConfig(tau=tau),
                                      MockEmbedder(dim=64), None)
                if result.method == "embedding":
                    hit.add(q)
            except UnresolvedIntent:
                pass
        resolved[tau] = hit
    for low, high in zip(taus, taus[1:]):
        assert resolved[high] <= resolved[low]


def test_self_retrieval_property():
    base = IntentBase(64)
    embedder = MockEmbedder(dim=64)
    question = "what dividend does wanke pay"
    base.upsert("dividend_policy", cq(question).text, embedder.embed(cq(question).text))
    for tau in (0.0, 0.5, 0.8, 1.0):
        result, _ = recognize(cq(question), [], base, CascadeConfig(tau=tau),
                              embedder, None)
        assert result.method == "embedding"
        assert result.label == "dividend_policy"
        assert result.score >= 1.0 - 1e-9
