"""The assembled system: data files loaded, providers wired, pipeline and
feedback dialogue exposed as plain methods.

The HTTP layer, the CLI, and the evaluation harness are all thin clients
of this class. Ablation switches take effect here: a disabled tier is
simply never handed to the cascade, so its provider counters stay at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import adapt, ingest
from .adapt import DialogueSession, SessionStore
from .config import ServiceConfig
from .errors import InvalidRequest, NoTemplateForIntent, UnknownSession, WrongState
from .graph import TemplateLibrary, TripleStore
from .intent import CascadeConfig, IntentBase, IntentRule
from .preprocess import MAX_QUESTION_CODEPOINTS, RawQuestion, load_stoplist
from .providers import (
    MockEmbedder,
    PromptLibrary,
    RemoteEmbedder,
    RemoteLlm,
    ScriptedLlm,
)
from .respond import AnswerPayload, PipelineDeps, answer, build_lexicon


@dataclass
class AskResult:
    payload: AnswerPayload
    session: DialogueSession


class Engine:
    def __init__(self, config: ServiceConfig):
        config.validate()
        self.config = config
        self.reports: dict[str, ingest.IngestReport] = {}

        self.stoplist = load_stoplist(config.stoplist_path)
        self.store = TripleStore()
        self.reports["triples"] = ingest.load_triples(config.triples_path, self.store)
        self.lexicon = build_lexicon(self.store)

        self.prompts = PromptLibrary.from_dir(config.prompt_dir)
        if config.embedding_provider == "remote":
            self.embedder = RemoteEmbedder(config.embedding_url, config.provider_timeout)
        else:
            self.embedder = MockEmbedder(
                dim=config.embedding_dim,
                stoplist=self.stoplist,
                lexicon=self.lexicon.surfaces(),
                lang=config.lang,
            )
        if config.llm_provider == "scripted":
            self.llm = ScriptedLlm.from_jsonl(config.llm_script)
        elif config.llm_provider == "remote":
            self.llm = RemoteLlm(config.llm_url, self.prompts, config.provider_timeout)
        else:
            self.llm = None

        self.rules: list[IntentRule] = []
        self.reports["rules"] = ingest.load_rules(config.rules_path, self.rules)

        dim = self.embedder.dim or config.embedding_dim
        self.base = IntentBase(dim)
        self.reports["seeds"] = ingest.load_intent_seeds(
            config.seeds_path, self.base, self.embedder
        )

        self.templates = TemplateLibrary()
        self.reports["templates"] = ingest.load_templates(
            config.templates_path, self.templates
        )

        self.cascade = CascadeConfig(tau=config.tau, allow_new_labels=config.allow_new_labels)
        self.sessions = SessionStore(idle_timeout=config.session_timeout)

    # ------------------------------------------------------------------
    # pipeline

    def deps(self) -> PipelineDeps:
        cfg = self.config
        return PipelineDeps(
            stoplist=self.stoplist,
            rules=() if cfg.disable_rule else tuple(self.rules),
            base=self.base,
            cascade=self.cascade,
            embedder=None if cfg.disable_embedding else self.embedder,
            llm=None if cfg.disable_llm else self.llm,
            templates=self.templates,
            store=self.store,
            lexicon=self.lexicon,
        )

    def ask(
        self, question: str, lang: str | None = None, session_id: str | None = None
    ) -> AskResult:
        """Run the pipeline and seat (or rearm) the feedback session.

        An intent without a template still seats a session before the
        error propagates, so the clarification flow can repair it.
        """
        if len(question) > MAX_QUESTION_CODEPOINTS:
            raise InvalidRequest(
                f"question exceeds {MAX_QUESTION_CODEPOINTS} code points"
            )
        raw = RawQuestion(text=question, lang=lang or self.config.lang)
        try:
            payload, clean_q, vector = answer(raw, self.deps())
        except NoTemplateForIntent as exc:
            session = self._seat_session(
                session_id, exc.clean_question, exc.vector, exc.recognition
            )
            exc.session_id = session.id
            raise
        session = self._seat_session(session_id, clean_q, vector, payload.recognition)
        return AskResult(payload=payload, session=session)

    def _seat_session(self, session_id, clean_q, vector, recognition) -> DialogueSession:
        existing = self.sessions.get(session_id) if session_id else None
        if existing is not None:
            return self.sessions.reset(existing, clean_q, vector, recognition)
        return self.sessions.open(clean_q, vector, recognition)

    # ------------------------------------------------------------------
    # feedback dialogue

    def feedback_step(self, session_id: str, step: str, value) -> tuple[str, str]:
        """Dispatch one /feedback step; returns (reply text, new state)."""
        if self.config.disable_adapt:
            raise WrongState("adaptive learning is disabled")
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no live session {session_id!r}")
        llm = None if self.config.disable_llm else self.llm
        if step == "satisfied":
            text, _ = adapt.feedback(session, self._as_bool(value), llm)
        elif step == "cause":
            text, _ = adapt.provide_cause(session, str(value), llm)
        elif step == "intent":
            text, _ = adapt.provide_intent(session, str(value), self.base)
        else:
            raise InvalidRequest(f"unknown feedback step {step!r}")
        self.sessions.touch(session)
        return text, session.state.value

    @staticmethod
    def _as_bool(value) -> bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("true", "1", "yes"):
            return True
        if text in ("false", "0", "no"):
            return False
        raise InvalidRequest(f"satisfied wants a boolean, got {value!r}")

    # ------------------------------------------------------------------
    # ingestion and views

    def ingest_file(self, kind: str, path: str) -> ingest.IngestReport:
        if kind == "triples":
            report = ingest.load_triples(path, self.store)
            self.refresh_lexicon()
        elif kind == "seeds":
            report = ingest.load_intent_seeds(path, self.base, self.embedder)
        elif kind == "templates":
            report = ingest.load_templates(path, self.templates)
        elif kind == "rules":
            report = ingest.load_rules(path, self.rules)
        else:
            raise InvalidRequest(f"unknown ingest kind {kind!r}")
        return report

    def refresh_lexicon(self) -> None:
        self.lexicon = build_lexicon(self.store)
        if isinstance(self.embedder, MockEmbedder):
            self.embedder._lexicon = self.lexicon.surfaces()

    def intents_view(self) -> list[dict]:
        return [
            {"label": label, "example_count": count}
            for label, count in sorted(self.base.label_counts().items())
        ]

    def health(self, budget: float = 1.0) -> dict:
        providers: dict[str, str] = {}
        degraded = False

        if isinstance(self.embedder, RemoteEmbedder):
            ok = self.embedder.probe(budget)
            providers["embedding"] = "reachable" if ok else "unreachable"
            degraded = degraded or not ok
        else:
            providers["embedding"] = "mock"

        if self.llm is None:
            providers["llm"] = "disabled"
        elif isinstance(self.llm, RemoteLlm):
            ok = self.llm.probe(budget)
            providers["llm"] = "reachable" if ok else "unreachable"
            degraded = degraded or not ok
        else:
            providers["llm"] = "scripted"

        return {"status": "degraded" if degraded else "ok", "providers": providers}

    # ------------------------------------------------------------------
    # counters (used by tests and the eval harness)

    @property
    def embed_calls(self) -> int:
        return self.embedder.calls

    @property
    def llm_calls(self) -> int:
        return self.llm.calls if self.llm is not None else 0

    @property
    def cascade_llm_calls(self) -> int:
        """Generator calls made by the recognition cascade specifically
        (answer rendering and dialogue phrasing are counted separately)."""
        if self.llm is None:
            return 0
        return self.llm.calls_by_template.get("intent_fallback", 0)
