import pytest

from kbqa.adapt import (
    CLOSING_ACK,
    DialogueSession,
    SessionState,
    SessionStore,
    feedback,
    open_session,
    provide_cause,
    provide_intent,
)
from kbqa.errors import InvalidLabel, InvalidRequest, WrongState
from kbqa.intent import CascadeConfig, IntentBase, RecognitionResult, recognize
from kbqa.preprocess import RawQuestion, clean
from kbqa.providers import MockEmbedder, ScriptedLlm


def cq(text):
    return clean(RawQuestion(text), frozenset())


def make_session(question="what dividend does wanke pay", with_vector=True):
    embedder = MockEmbedder(dim=64)
    clean_q = cq(question)
    vector = embedder.embed(clean_q.text) if with_vector else None
    recognition = RecognitionResult("stock_price", "embedding", 0.83)
    return open_session(clean_q, vector, recognition)


def test_open_session_state_and_transcript():
    session = make_session()
    assert session.state is SessionState.ANSWER_DELIVERED
    assert len(session.transcript) >= 1


def test_sessions_have_distinct_ids():
    assert make_session().id != make_session().id


def test_session_keeps_recognition():
    session = make_session()
    assert session.last_recognition.label == "stock_price"


def test_satisfied_closes():
    session = make_session()
    prompt, session = feedback(session, satisfied=True)
    assert session.state is SessionState.CLOSED
    assert prompt == CLOSING_ACK


def test_dissatisfied_mentions_recognized_intent():
    session = make_session()
    prompt, session = feedback(session, satisfied=False)
    assert session.state is SessionState.CLARIFY_CAUSE
    assert "stock_price" in prompt


def test_feedback_on_closed_session_is_wrong_state():
    session = make_session()
    feedback(session, satisfied=True)
    before = list(session.transcript)
    with pytest.raises(WrongState):
        feedback(session, satisfied=False)
    assert session.transcript == before
    assert session.state is SessionState.CLOSED


def test_cause_other_closes_without_mutation():
    base = IntentBase(64)
    session = make_session()
    feedback(session, satisfied=False)
    prompt, session = provide_cause(session, "other")
    assert session.state is SessionState.CLOSED
    assert len(base) == 0


def test_cause_intent_advances():
    session = make_session()
    feedback(session, satisfied=False)
    _, session = provide_cause(session, "intent")
    assert session.state is SessionState.ELICIT_INTENT


def test_cause_requires_clarify_state():
    session = make_session()
    with pytest.raises(WrongState):
        provide_cause(session, "intent")


def test_cause_value_validated():
    session = make_session()
    feedback(session, satisfied=False)
    with pytest.raises(InvalidRequest):
        provide_cause(session, "maybe")


def test_full_correction_stores_and_closes():
    base = IntentBase(64)
    session = make_session()
    feedback(session, satisfied=False)
    provide_cause(session, "intent")
    confirmation, session = provide_intent(session, "Dividend Policy", base)
    assert session.state is SessionState.CLOSED
    assert "dividend_policy" in confirmation
    assert len(base) == 1
    record = base.snapshot()[0]
    assert record.label == "dividend_policy"
    assert record.example_text == session.last_question.text


def test_learning_efficacy_end_to_end():
    base = IntentBase(64)
    embedder = MockEmbedder(dim=64)
    llm = ScriptedLlm()  # no defaults: any LLM call would raise
    session = make_session()
    feedback(session, satisfied=False, llm=llm)
    provide_cause(session, "intent", llm=llm)
    provide_intent(session, "dividend_policy", base)
    calls_before = llm.calls
    result, _ = recognize(cq(session.last_question.text), [], base, CascadeConfig(),
                          embedder, llm)
    assert result.method == "embedding"
    assert result.label == "dividend_policy"
    assert result.score >= 1.0 - 1e-9
    assert llm.calls == calls_before


def test_empty_label_rejected():
    base = IntentBase(64)
    session = make_session()
    feedback(session, satisfied=False)
    provide_cause(session, "intent")
    with pytest.raises(InvalidLabel):
        provide_intent(session, "   ", base)
    assert session.state is SessionState.ELICIT_INTENT


def test_second_provide_intent_is_wrong_state():
    base = IntentBase(64)
    session = make_session()
    feedback(session, satisfied=False)
    provide_cause(session, "intent")
    provide_intent(session, "a", base)
    with pytest.raises(WrongState):
        provide_intent(session, "b", base)
    assert len(base) == 1


def test_missing_vector_closes_without_mutation():
    base = IntentBase(64)
    session = make_session(with_vector=False)
    feedback(session, satisfied=False)
    provide_cause(session, "intent")
    confirmation, session = provide_intent(session, "dividend_policy", base)
    assert session.state is SessionState.CLOSED
    assert len(base) == 0
    assert "could not be stored" in confirmation


def test_canned_prompts_with_offline_provider():
    class Down(ScriptedLlm):
        def complete(self, request):
            from kbqa.errors import ProviderUnavailable
            raise ProviderUnavailable("down")

    session = make_session()
    prompt, _ = feedback(session, satisfied=False, llm=Down())
    assert "stock_price" in prompt  # canned fallback still names the intent
    prompt, _ = provide_cause(session, "intent", llm=Down())
    assert prompt


# ---------------------------------------------------------------------------
# SessionStore


def test_store_open_get_roundtrip():
    store = SessionStore()
    session = store.open(cq("q"), None, None)
    assert store.get(session.id) is session


def test_store_unknown_id():
    assert SessionStore().get("nope") is None


def test_store_expiry():
    now = [0.0]
    store = SessionStore(idle_timeout=10.0, clock=lambda: now[0])
    session = store.open(cq("q"), None, None)
    now[0] = 5.0
    assert store.get(session.id) is session
    store.touch(session)
    now[0] = 14.0
    assert store.get(session.id) is session  # touched at 5, 9 elapsed
    now[0] = 20.0
    assert store.get(session.id) is None
    assert session.state is SessionState.CLOSED


def test_store_reset_rearms_session():
    store = SessionStore()
    session = store.open(cq("first"), None, None)
    feedback(session, satisfied=True)
    store.reset(session, cq("second"), None, RecognitionResult("x", "rule", 1.0))
    assert session.state is SessionState.ANSWER_DELIVERED
    assert session.last_question.text == "second"
