"""Feedback dialogue: learn the correct intent from a dissatisfied user.

One session per delivered answer, driven through a fixed state machine:

    answer_delivered --satisfied--> closed
    answer_delivered --not satisfied--> clarify_cause
    clarify_cause --cause=other--> closed          (nothing is changed)
    clarify_cause --cause=intent--> elicit_intent
    elicit_intent --corrected label--> closed      (label + vector stored)

Storing the (label, question, vector) record is the only mutation this
module ever performs. The generator is used to phrase the questions; every
prompt has a canned fallback so the flow completes with providers offline.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import InvalidLabel, InvalidRequest, ProviderUnavailable, WrongState
from .intent import IntentBase, RecognitionResult
from .preprocess import CleanQuestion
from .providers import EmbeddingVector, LlmProvider, PromptRequest, slugify

DEFAULT_IDLE_TIMEOUT = 900.0  # seconds

CLOSING_ACK = "Glad that helped. Feel free to ask another question."
OTHER_CAUSE_ACK = (
    "Thanks for telling me. Only intent mistakes can be repaired from "
    "feedback, so nothing was changed."
)
CLARIFY_FALLBACK = (
    'Sorry about that. I read your question as intent "{intent}". '
    "Did I misunderstand what you were asking for, or was something else wrong?"
)
ELICIT_FALLBACK = "Understood. What should the correct intent be for this question?"
CONFIRMATION = 'Learned it: this question is now linked to intent "{label}".'
NO_VECTOR_NOTE = (
    "Noted, but no question vector is available right now, so the "
    "correction could not be stored."
)


class SessionState(str, Enum):
    ANSWER_DELIVERED = "answer_delivered"
    CLARIFY_CAUSE = "clarify_cause"
    ELICIT_INTENT = "elicit_intent"
    CLOSED = "closed"


@dataclass
class DialogueSession:
    id: str
    state: SessionState
    last_question: CleanQuestion
    last_vector: EmbeddingVector | None
    last_recognition: RecognitionResult | None
    transcript: list[tuple[str, str]] = field(default_factory=list)
    last_touched: float = 0.0

    def _require(self, state: SessionState) -> None:
        if self.state is not state:
            raise WrongState(
                f"operation requires state {state.value!r}, session is {self.state.value!r}"
            )

    def say(self, speaker: str, text: str) -> None:
        self.transcript.append((speaker, text))


def open_session(
    question: CleanQuestion,
    vector: EmbeddingVector | None,
    recognition: RecognitionResult | None,
) -> DialogueSession:
    session = DialogueSession(
        id=uuid.uuid4().hex,
        state=SessionState.ANSWER_DELIVERED,
        last_question=question,
        last_vector=vector,
        last_recognition=recognition,
    )
    session.say("user", question.text)
    return session


def _phrase(
    llm: LlmProvider | None, template_id: str, variables: dict[str, str], fallback: str
) -> str:
    if llm is None:
        return fallback
    try:
        return llm.complete(PromptRequest(template_id, variables)).text
    except ProviderUnavailable:
        return fallback


def feedback(
    session: DialogueSession, satisfied: bool, llm: LlmProvider | None = None
) -> tuple[str, DialogueSession]:
    """Record the user's verdict on the delivered answer."""
    session._require(SessionState.ANSWER_DELIVERED)
    if satisfied:
        session.say("user", "satisfied")
        session.state = SessionState.CLOSED
        prompt = CLOSING_ACK
    else:
        session.say("user", "not satisfied")
        session.state = SessionState.CLARIFY_CAUSE
        label = session.last_recognition.label if session.last_recognition else "unknown"
        prompt = _phrase(
            llm,
            "clarify_cause",
            {"question": session.last_question.text, "intent": label},
            CLARIFY_FALLBACK.format(intent=label),
        )
    session.say("system", prompt)
    return prompt, session


def provide_cause(
    session: DialogueSession, cause: str, llm: LlmProvider | None = None
) -> tuple[str, DialogueSession]:
    """The user says whether the problem was the recognized intent."""
    session._require(SessionState.CLARIFY_CAUSE)
    if cause not in ("intent", "other"):
        raise InvalidRequest(f"cause must be 'intent' or 'other', got {cause!r}")
    session.say("user", cause)
    if cause == "other":
        session.state = SessionState.CLOSED
        prompt = OTHER_CAUSE_ACK
    else:
        session.state = SessionState.ELICIT_INTENT
        prompt = _phrase(
            llm,
            "elicit_intent",
            {"question": session.last_question.text},
            ELICIT_FALLBACK,
        )
    session.say("system", prompt)
    return prompt, session


def provide_intent(
    session: DialogueSession, label: str, intent_base: IntentBase
) -> tuple[str, DialogueSession]:
    """Store the corrected intent with the remembered question vector."""
    session._require(SessionState.ELICIT_INTENT)
    slug = slugify(label)
    if not slug:
        raise InvalidLabel(f"intent label {label!r} is empty after slugification")
    session.say("user", label)
    if session.last_vector is None:
        confirmation = NO_VECTOR_NOTE
    else:
        intent_base.upsert(slug, session.last_question.text, session.last_vector)
        confirmation = CONFIRMATION.format(label=slug)
    session.state = SessionState.CLOSED
    session.say("system", confirmation)
    return confirmation, session


class SessionStore:
    """Holds live sessions; idle sessions expire to closed and are dropped
    on next access."""

    def __init__(
        self,
        idle_timeout: float = DEFAULT_IDLE_TIMEOUT,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.idle_timeout = idle_timeout
        self._clock = clock
        self._sessions: dict[str, DialogueSession] = {}
        self._lock = threading.Lock()

    def open(
        self,
        question: CleanQuestion,
        vector: EmbeddingVector | None,
        recognition: RecognitionResult | None,
    ) -> DialogueSession:
        session = open_session(question, vector, recognition)
        session.last_touched = self._clock()
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> DialogueSession | None:
        """Returns the live session, or None when unknown or expired."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if self._clock() - session.last_touched > self.idle_timeout:
                session.state = SessionState.CLOSED
                del self._sessions[session_id]
                return None
            return session

    def touch(self, session: DialogueSession) -> None:
        session.last_touched = self._clock()

    def reset(
        self,
        session: DialogueSession,
        question: CleanQuestion,
        vector: EmbeddingVector | None,
        recognition: RecognitionResult | None,
    ) -> DialogueSession:
        """A fresh answer was delivered on an existing session: rearm it."""
        session.last_question = question
        session.last_vector = vector
        session.last_recognition = recognition
        session.state = SessionState.ANSWER_DELIVERED
        session.say("user", question.text)
        self.touch(session)
        return session
