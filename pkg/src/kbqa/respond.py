"""Answer production: entity recognition, template filling, query
execution, and rendering.

Rendering prefers the generator (question + matched knowledge go into the
``answer_render`` prompt); when no generator is available the fallback
renders the rows verbatim, so every value in the answer text comes from
the store.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NoTemplateForIntent, ProviderUnavailable
from .graph import BindingRow, TemplateLibrary, TripleStore, Value, execute, parse_cql
from .intent import CascadeConfig, IntentBase, IntentRule, RecognitionResult, recognize
from .preprocess import CleanQuestion, RawQuestion, StopwordList, clean
from .providers import (
    EmbeddingProvider,
    EmbeddingVector,
    LlmProvider,
    PromptRequest,
)

NO_KNOWLEDGE_TEXT = "No matching knowledge was found for your question."
FALLBACK_HEADER = "Here is what the knowledge graph holds for your question:"


@dataclass(frozen=True)
class EntityLexicon:
    """Surface form (lowercase) -> entity id, built from entity ids and
    their ``name``/``alias`` property triples."""

    entries: dict[str, str]

    def __len__(self) -> int:
        return len(self.entries)

    def surfaces(self) -> tuple[str, ...]:
        return tuple(self.entries)

    @property
    def max_surface_tokens(self) -> int:
        return max((s.count(" ") + 1 for s in self.entries), default=1)


def build_lexicon(store: TripleStore) -> EntityLexicon:
    """Every subject maps to itself; name/alias objects map to their
    subject. On surface collisions the first-inserted entity wins."""
    entries: dict[str, str] = {}
    for subject in store.subjects():
        entries.setdefault(subject.lower(), subject)
        for predicate in ("name", "alias"):
            for obj in store.objects_of(subject, predicate):
                if isinstance(obj, str) and obj:
                    entries.setdefault(obj.lower(), subject)
    return EntityLexicon(entries)


def extract_entities(clean_q: CleanQuestion, lex: EntityLexicon) -> list[str]:
    """Greedy leftmost-longest scan of the token sequence against lexicon
    surfaces (multi-token surfaces join with single spaces). Matches come
    back in question order; duplicates are kept."""
    tokens = clean_q.tokens
    found: list[str] = []
    i = 0
    while i < len(tokens):
        matched_len = 0
        for k in range(min(lex.max_surface_tokens, len(tokens) - i), 0, -1):
            surface = " ".join(tokens[i : i + k])
            if surface in lex.entries:
                found.append(lex.entries[surface])
                matched_len = k
                break
        i += matched_len if matched_len else 1
    return found


@dataclass(frozen=True)
class TraceStep:
    stage: str
    detail: str


@dataclass(frozen=True)
class AnswerPayload:
    answer_text: str
    rows: tuple[BindingRow, ...]
    recognition: RecognitionResult
    cql: str
    render_method: str  # llm | template_fallback
    trace: tuple[TraceStep, ...]


@dataclass
class PipelineDeps:
    """Everything answer() needs, bundled so callers assemble it once."""

    stoplist: StopwordList
    rules: Sequence[IntentRule]
    base: IntentBase
    cascade: CascadeConfig
    embedder: EmbeddingProvider | None
    llm: LlmProvider | None
    templates: TemplateLibrary
    store: TripleStore
    lexicon: EntityLexicon


def format_value(v: Value) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def serialize_rows(rows: Sequence[BindingRow]) -> str:
    """Knowledge serialization for the answer prompt: one line per row,
    ``col=value`` pairs joined by "; ". Kept bit-stable so scripted replies
    can be keyed on it."""
    return "\n".join(
        "; ".join(f"{col}={format_value(v)}" for col, v in row.values) for row in rows
    )


def _render_fallback(rows: Sequence[BindingRow]) -> str:
    lines = [FALLBACK_HEADER]
    for row in rows:
        lines.append("; ".join(f"{col} = {format_value(v)}" for col, v in row.values))
    return "\n".join(lines)


def answer(
    raw: RawQuestion, deps: PipelineDeps
) -> tuple[AnswerPayload, CleanQuestion, EmbeddingVector | None]:
    """Full pipeline: clean, recognize, slot-fill, execute, render.

    Also returns the cleaned question and the question vector (when one was
    computed) so the caller can seat a feedback session. An intent without
    a registered template raises NoTemplateForIntent carrying the
    recognition result and vector for the same purpose.
    """
    trace: list[TraceStep] = []
    clean_q = clean(raw, deps.stoplist, deps.lexicon.surfaces())
    trace.append(TraceStep("clean", f"{len(clean_q.tokens)} tokens: {clean_q.text}"))

    recognition, vector = recognize(
        clean_q, deps.rules, deps.base, deps.cascade, deps.embedder, deps.llm
    )
    trace.append(
        TraceStep(
            "recognize",
            f"{recognition.method}:{recognition.label} score={recognition.score:.4f}",
        )
    )

    template = deps.templates.get(recognition.label)
    if template is None:
        exc = NoTemplateForIntent(recognition.label)
        exc.recognition = recognition  # the service seats a clarification
        exc.vector = vector  # session from these
        exc.clean_question = clean_q
        raise exc

    entities = extract_entities(clean_q, deps.lexicon)
    trace.append(TraceStep("ner", "entities: " + (", ".join(entities) or "(none)")))

    cql_text = template.fill(entities)
    trace.append(TraceStep("fill", cql_text))

    rows = tuple(execute(parse_cql(cql_text), deps.store))
    trace.append(TraceStep("execute", f"{len(rows)} rows"))

    if not rows:
        answer_text = NO_KNOWLEDGE_TEXT
        render_method = "template_fallback"
        trace.append(TraceStep("render", "no knowledge"))
    else:
        answer_text = ""
        render_method = "template_fallback"
        if deps.llm is not None:
            request = PromptRequest(
                template_id="answer_render",
                variables={
                    "question": clean_q.text,
                    "knowledge": serialize_rows(rows),
                },
            )
            try:
                answer_text = deps.llm.complete(request).text
                render_method = "llm"
            except ProviderUnavailable:
                answer_text = ""
        if not answer_text:
            answer_text = _render_fallback(rows)
        trace.append(TraceStep("render", render_method))

    payload = AnswerPayload(
        answer_text=answer_text,
        rows=rows,
        recognition=recognition,
        cql=cql_text,
        render_method=render_method,
        trace=tuple(trace),
    )
    return payload, clean_q, vector
