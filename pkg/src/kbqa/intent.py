"""Three-tier intent recognition.

Order is fixed: rules first (authoritative when they hit), then cosine
similarity against the stored question-vector base with a threshold, then
the generative fallback, whose labels are written back into the base so the
same phrasing resolves at the similarity tier next time.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Pattern, Sequence

from .errors import DimensionMismatch, FileUnreadable, ProviderUnavailable, UnresolvedIntent
from .preprocess import CleanQuestion
from .providers import (
    EmbeddingProvider,
    EmbeddingVector,
    LlmProvider,
    PromptRequest,
    parse_intent_reply,
)


@dataclass(frozen=True)
class IntentRule:
    """Keyword/regex rule: matches when every keyword group contributes at
    least one token and the optional pattern is found in the cleaned text."""

    label: str
    keyword_groups: tuple[frozenset[str], ...] = ()
    pattern: Pattern[str] | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("rule label is empty")
        if not self.keyword_groups and self.pattern is None:
            raise ValueError(f"rule {self.label!r} has no keyword groups and no pattern")
        if any(not g for g in self.keyword_groups):
            raise ValueError(f"rule {self.label!r} has an empty keyword group")

    @classmethod
    def from_json(cls, obj: dict) -> "IntentRule":
        groups = tuple(
            frozenset(str(w).lower() for w in group) for group in obj.get("keyword_groups") or []
        )
        pattern = obj.get("pattern")
        compiled = re.compile(pattern) if pattern else None
        return cls(label=str(obj["label"]), keyword_groups=groups, pattern=compiled)


@dataclass(frozen=True)
class IntentRecord:
    label: str
    example_text: str
    vector: EmbeddingVector
    inserted_at: int


@dataclass(frozen=True)
class CascadeConfig:
    tau: float = 0.80
    allow_new_labels: bool = True

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")


@dataclass(frozen=True)
class RecognitionResult:
    label: str
    method: str  # rule | embedding | llm
    score: float
    is_new_intent: bool = False
    matched_record: IntentRecord | None = None


class IntentBase:
    """The stored (label, example question, vector) records searched by
    cosine similarity.

    Writes are serialized behind a lock and append-only; readers work on
    snapshots, so a recognition running concurrently with an upsert may see
    the pre-update records.
    """

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self._records: list[IntentRecord] = []
        self._keys: set[tuple[str, str]] = set()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def snapshot(self) -> tuple[IntentRecord, ...]:
        with self._lock:
            return tuple(self._records)

    def upsert(self, label: str, example_text: str, vector: EmbeddingVector) -> IntentRecord:
        """Append a record; an exact (label, example) duplicate is a no-op
        returning the existing record."""
        if not label:
            raise ValueError("intent label is empty")
        if vector.dim != self.dim:
            raise DimensionMismatch(
                f"vector has dim {vector.dim}, base expects {self.dim}"
            )
        with self._lock:
            key = (label, example_text)
            if key in self._keys:
                return next(
                    r for r in self._records if (r.label, r.example_text) == key
                )
            record = IntentRecord(label, example_text, vector, inserted_at=len(self._records))
            self._records.append(record)
            self._keys.add(key)
            return record

    def labels(self) -> list[str]:
        return sorted({r.label for r in self.snapshot()})

    def label_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.snapshot():
            counts[r.label] = counts.get(r.label, 0) + 1
        return counts

    def fingerprint(self) -> str:
        # 12 significant digits: stable across a save/load round-trip even
        # if re-normalization nudges the last ulp.
        payload = [
            (r.label, r.example_text, [f"{v:.12e}" for v in r.vector.values])
            for r in self.snapshot()
        ]
        canon = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def save_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for r in self.snapshot():
                fh.write(
                    json.dumps(
                        {"label": r.label, "example": r.example_text, "vector": list(r.vector.values)},
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    @classmethod
    def load_jsonl(cls, path: str | Path, dim: int | None = None) -> "IntentBase":
        """Load persisted records; vectors are re-normalized and must all
        share one dimensionality."""
        p = Path(path)
        try:
            lines = p.read_text("utf-8").splitlines()
        except OSError as exc:
            raise FileUnreadable(f"cannot read intent base {p}: {exc}") from exc
        base: IntentBase | None = None if dim is None else cls(dim)
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            vector = EmbeddingVector.from_raw([float(v) for v in obj["vector"]])
            if base is None:
                base = cls(vector.dim)
            if vector.dim != base.dim:
                raise DimensionMismatch(
                    f"{p}:{lineno}: vector dim {vector.dim} in a base of dim {base.dim}"
                )
            base.upsert(str(obj["label"]), str(obj["example"]), vector)
        if base is None:
            raise DimensionMismatch(f"{p} is empty and no dimension was given")
        return base


def match_rules(clean: CleanQuestion, rules: Sequence[IntentRule]) -> str | None:
    """First rule (in load order) whose keyword groups are all represented
    in the tokens and whose pattern, if any, is found in the cleaned text."""
    tokens = set(clean.tokens)
    for rule in rules:
        if all(group & tokens for group in rule.keyword_groups):
            if rule.pattern is None or rule.pattern.search(clean.text):
                return rule.label
    return None


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Dot product of two unit vectors, clamped into [-1, 1].

    Dots within the vectors' own normalization tolerance (1e-9) of an
    endpoint snap to it, so identical stored questions score exactly 1.0
    and self-retrieval works even with tau = 1.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"cosine over dims {a.dim} and {b.dim}")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    if dot >= 1.0 - 1e-9:
        return 1.0
    if dot <= -1.0 + 1e-9:
        return -1.0
    return dot


def nearest_intent(
    v: EmbeddingVector, base: IntentBase
) -> tuple[IntentRecord, float] | None:
    """Linear scan for the record maximizing cosine similarity; ties broken
    by smallest label, then earliest insertion. None on an empty base."""
    if v.dim != base.dim:
        raise DimensionMismatch(f"query dim {v.dim}, base dim {base.dim}")
    best: IntentRecord | None = None
    best_sim = -2.0
    for record in base.snapshot():
        sim = cosine(v, record.vector)
        if (
            best is None
            or sim > best_sim
            or (sim == best_sim and (record.label, record.inserted_at) < (best.label, best.inserted_at))
        ):
            best, best_sim = record, sim
    if best is None:
        return None
    return best, best_sim


def _intent_inventory(rules: Sequence[IntentRule], base: IntentBase) -> list[str]:
    return sorted({r.label for r in rules} | set(base.labels()))


def recognize(
    clean: CleanQuestion,
    rules: Sequence[IntentRule],
    base: IntentBase,
    config: CascadeConfig,
    embedder: EmbeddingProvider | None,
    llm: LlmProvider | None,
) -> tuple[RecognitionResult, EmbeddingVector | None]:
    """Run the cascade. Returns the result plus the question vector when one
    was computed (the caller keeps it for feedback-driven write-back).

    Passing ``embedder=None`` or ``llm=None`` makes that tier decline
    without being invoked, which is how ablation switches are wired in.
    """
    label = match_rules(clean, rules)
    if label is not None:
        return RecognitionResult(label=label, method="rule", score=1.0), None

    vector: EmbeddingVector | None = None
    if embedder is not None:
        try:
            vector = embedder.embed(clean.text)
        except ProviderUnavailable:
            vector = None  # embedding tier unusable; fall through
        if vector is not None:
            found = nearest_intent(vector, base)
            if found is not None:
                record, sim = found
                if sim >= config.tau:
                    result = RecognitionResult(
                        label=record.label,
                        method="embedding",
                        score=sim,
                        matched_record=record,
                    )
                    return result, vector

    if llm is None:
        raise UnresolvedIntent("no tier could resolve the question")
    inventory = _intent_inventory(rules, base)
    request = PromptRequest(
        template_id="intent_fallback",
        variables={"question": clean.text, "intents": ", ".join(inventory)},
    )
    try:
        reply = llm.complete(request)
    except ProviderUnavailable as exc:
        raise UnresolvedIntent(str(exc), caused_by_outage=True) from exc
    parsed = parse_intent_reply(reply.text, inventory)
    if parsed is None:
        raise UnresolvedIntent("generator reply contained no usable intent label")
    label, is_new = parsed
    if is_new and not config.allow_new_labels:
        raise UnresolvedIntent(f"new intent label {label!r} is not allowed")
    if vector is not None:
        base.upsert(label, clean.text, vector)
    return RecognitionResult(label=label, method="llm", score=1.0, is_new_intent=is_new), vector
