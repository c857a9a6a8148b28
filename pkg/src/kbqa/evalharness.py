"""Accuracy evaluation over a labeled question corpus, with the ablation
grid (full system, then each tier removed in turn).

A case is correct when its gold answer values are all present in the
returned rows. When the first attempt is wrong, a session exists, and the
feedback dialogue is enabled, a simulated user runs the clarification flow
with the gold intent and the question is re-asked once; success then
counts as correct with ``corrected_by_adapt`` set. Every setting starts
from a freshly loaded engine, so settings cannot contaminate each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import ServiceConfig
from .engine import Engine
from .errors import (
    ArityMismatch,
    DatasetInvalid,
    EmptyInput,
    FileUnreadable,
    NoTemplateForIntent,
    UnresolvedIntent,
)

GRID_SETTINGS = (
    ("all", {}),
    ("w/o rule", {"disable_rule": True}),
    ("w/o embedding", {"disable_embedding": True}),
    ("w/o llm", {"disable_llm": True}),
    ("w/o adapt", {"disable_adapt": True}),
)


@dataclass(frozen=True)
class EvalCase:
    id: str
    question: str
    gold_intent: str
    gold_entities: tuple[str, ...]
    gold_answer_values: frozenset
    kind: str  # simple | complex


@dataclass
class CaseOutcome:
    case_id: str
    correct: bool
    method: str  # rule | embedding | llm | no_template | unresolved
    corrected_by_adapt: bool = False


@dataclass
class EvalResult:
    accuracy: float
    per_case: list[CaseOutcome]
    tier_counts: dict[str, int]
    provider_calls: dict[str, int]
    initial_base_fingerprint: str

    @property
    def corrected_count(self) -> int:
        return sum(1 for c in self.per_case if c.corrected_by_adapt)


def _normalize(value) -> object:
    if isinstance(value, bool):
        raise DatasetInvalid("gold answer values cannot be booleans")
    if isinstance(value, (int, float)):
        return float(value)
    return str(value)


def load_dataset(path: str | Path) -> list[EvalCase]:
    p = Path(path)
    try:
        text = p.read_text("utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read dataset {p}: {exc}") from exc
    cases: list[EvalCase] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            case = EvalCase(
                id=str(obj.get("id", f"case{lineno}")),
                question=str(obj["question"]),
                gold_intent=str(obj["gold_intent"]),
                gold_entities=tuple(str(e) for e in obj.get("gold_entities", [])),
                gold_answer_values=frozenset(
                    _normalize(v) for v in obj["gold_answer_values"]
                ),
                kind=str(obj["kind"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DatasetInvalid(f"{p}:{lineno}: {exc}") from exc
        if case.kind not in ("simple", "complex"):
            raise DatasetInvalid(f"{p}:{lineno}: kind must be simple or complex")
        if not case.question or not case.gold_intent:
            raise DatasetInvalid(f"{p}:{lineno}: question and gold_intent are required")
        if not case.gold_answer_values:
            raise DatasetInvalid(f"{p}:{lineno}: gold_answer_values is empty")
        cases.append(case)
    if not cases:
        raise DatasetInvalid(f"dataset {p} has no cases")
    return cases


def _validate_against_store(cases: Sequence[EvalCase], engine: Engine) -> None:
    subjects = set(engine.store.subjects())
    for case in cases:
        missing = [e for e in case.gold_entities if e not in subjects]
        if missing:
            raise DatasetInvalid(
                f"case {case.id}: gold entities missing from the graph: {missing}"
            )


def _attempt(engine: Engine, case: EvalCase, session_id: str | None = None):
    """One /ask pass. Returns (correct, method, session_id|None)."""
    try:
        result = engine.ask(case.question, session_id=session_id)
    except NoTemplateForIntent as exc:
        return False, "no_template", exc.session_id
    except (UnresolvedIntent, ArityMismatch, EmptyInput):
        return False, "unresolved", session_id
    values = {
        _normalize(v) for row in result.payload.rows for _, v in row.values
    }
    correct = case.gold_answer_values <= values
    return correct, result.payload.recognition.method, result.session.id


def run_eval(
    cases: Sequence[EvalCase],
    config: ServiceConfig,
    engine_factory=None,
) -> EvalResult:
    """Evaluate one setting from a fresh engine.

    ``engine_factory`` (config -> Engine) lets callers swap in engines with
    differently staged state, e.g. double-loaded data files.
    """
    engine = engine_factory(config) if engine_factory is not None else Engine(config)
    _validate_against_store(cases, engine)
    initial_fp = engine.base.fingerprint()
    # Loading the seed file embeds examples; count only request-time calls.
    embed_base, llm_base = engine.embed_calls, engine.llm_calls

    per_case: list[CaseOutcome] = []
    tier_counts: dict[str, int] = {}
    for case in cases:
        correct, method, session_id = _attempt(engine, case)
        corrected = False
        if not correct and not config.disable_adapt and session_id:
            engine.feedback_step(session_id, "satisfied", False)
            engine.feedback_step(session_id, "cause", "intent")
            engine.feedback_step(session_id, "intent", case.gold_intent)
            retry_ok, retry_method, _ = _attempt(engine, case, session_id)
            if retry_ok:
                correct, method, corrected = True, retry_method, True
        per_case.append(CaseOutcome(case.id, correct, method, corrected))
        tier_counts[method] = tier_counts.get(method, 0) + 1

    accuracy = sum(1 for c in per_case if c.correct) / len(per_case)
    return EvalResult(
        accuracy=accuracy,
        per_case=per_case,
        tier_counts=dict(sorted(tier_counts.items())),
        provider_calls={
            "embed": engine.embed_calls - embed_base,
            "llm": engine.llm_calls - llm_base,
        },
        initial_base_fingerprint=initial_fp,
    )


def ablation_grid(
    cases: Sequence[EvalCase],
    config: ServiceConfig,
    engine_factory=None,
) -> dict[str, EvalResult]:
    """run_eval per grid setting, each from identical initial state."""
    grid: dict[str, EvalResult] = {}
    for name, switches in GRID_SETTINGS:
        grid[name] = run_eval(cases, config.with_ablation(**switches), engine_factory)
    return grid


def render_grid_table(grid: dict[str, EvalResult]) -> str:
    width = max(len(name) for name in grid) + 2
    lines = [f"{'setting'.ljust(width)}accuracy  corrected_by_adapt"]
    for name, result in grid.items():
        lines.append(
            f"{name.ljust(width)}{result.accuracy:<10.2f}{result.corrected_count}"
        )
    return "\n".join(lines)


def grid_to_json(grid: dict[str, EvalResult]) -> str:
    payload = [
        {
            "setting": name,
            "accuracy": result.accuracy,
            "tier_counts": result.tier_counts,
            "corrected_by_adapt": result.corrected_count,
            "cases": [
                {
                    "id": c.case_id,
                    "correct": c.correct,
                    "method": c.method,
                    "corrected_by_adapt": c.corrected_by_adapt,
                }
                for c in result.per_case
            ],
        }
        for name, result in grid.items()
    ]
    return json.dumps({"grid": payload}, indent=2, ensure_ascii=False)
