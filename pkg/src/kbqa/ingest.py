"""Batch loading of triples, intent seeds, rules, and query templates.

Every loader is partial-success: a bad line is reported with its number and
never aborts the batch, so operators can iterate on data files. Re-loading
is idempotent for triples and seeds (set/upsert semantics) and last-wins
for templates.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    FileUnreadable,
    InvalidTriple,
    ParseError,
    ProviderUnavailable,
    UnknownFormat,
)
from .graph import (
    QueryTemplate,
    TemplateLibrary,
    Triple,
    TripleStore,
    placeholder_numbers,
)
from .intent import IntentBase, IntentRule
from .providers import EmbeddingProvider

OBJECT_TYPES = ("entity", "string", "number")


@dataclass
class IngestReport:
    loaded: int = 0
    rejected: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)
    notes: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, lineno: int, reason: str) -> None:
        self.rejected += 1
        self.errors.append((lineno, reason))

    def as_dict(self) -> dict:
        return {
            "loaded": self.loaded,
            "rejected": self.rejected,
            "errors": [{"line": n, "reason": r} for n, r in self.errors],
            "notes": [{"line": n, "note": r} for n, r in self.notes],
        }


def _read_text(path: str | Path) -> str:
    p = Path(path)
    try:
        return p.read_text("utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {p}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise FileUnreadable(f"{p} is not valid UTF-8: {exc}") from exc


def _iter_jsonl(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, line


def _coerce_object(raw: object, object_type: str):
    if object_type == "number":
        try:
            return float(raw)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise ValueError(f"object {raw!r} is not numeric")
    value = str(raw)
    if object_type == "entity" and not value:
        raise ValueError("entity object must be a non-empty id")
    return value


def load_triples(path: str | Path, store: TripleStore) -> IngestReport:
    """Load SPO rows from .csv (subject,predicate,object,object_type) or
    .jsonl ({"s","p","o","t"}); object_type one of entity|string|number."""
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix not in (".csv", ".jsonl"):
        raise UnknownFormat(f"unsupported triple file extension {suffix!r} (want .csv or .jsonl)")
    text = _read_text(p)
    report = IngestReport()

    def add(lineno: int, s: object, pred: object, obj: object, t: object) -> None:
        if t not in OBJECT_TYPES:
            report.reject(lineno, f"unknown object_type {t!r}")
            return
        try:
            triple = Triple(str(s), str(pred), _coerce_object(obj, str(t)))
        except (InvalidTriple, ValueError) as exc:
            report.reject(lineno, str(exc))
            return
        store.insert(triple)
        report.loaded += 1

    if suffix == ".csv":
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                report.reject(lineno, f"expected 4 columns, got {len(row)}")
                continue
            add(lineno, row[0], row[1], row[2], row[3])
    else:
        for lineno, line in _iter_jsonl(text):
            try:
                obj = json.loads(line)
                add(lineno, obj["s"], obj["p"], obj["o"], obj["t"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                report.reject(lineno, f"bad record: {exc}")
    return report


def load_intent_seeds(
    path: str | Path, base: IntentBase, embedder: EmbeddingProvider
) -> IngestReport:
    """Seed the vector base: one record per (label, example question).
    Counts are per seed line, not per example."""
    text = _read_text(path)
    report = IngestReport()
    for lineno, line in _iter_jsonl(text):
        try:
            obj = json.loads(line)
            label = str(obj["label"])
            examples = obj["examples"]
            if not label:
                raise ValueError("label is empty")
            if not isinstance(examples, list) or not examples:
                raise ValueError("examples must be a non-empty list")
            vectors = [embedder.embed(str(e)) for e in examples]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            report.reject(lineno, f"bad seed: {exc}")
            continue
        except ProviderUnavailable as exc:
            report.reject(lineno, f"embedding unavailable: {exc}")
            continue
        for example, vector in zip(examples, vectors):
            base.upsert(label, str(example), vector)
        report.loaded += 1
    return report


def load_templates(path: str | Path, library: TemplateLibrary) -> IngestReport:
    """Register query templates; a second template for the same intent
    replaces the first, noted in the report."""
    text = _read_text(path)
    report = IngestReport()
    for lineno, line in _iter_jsonl(text):
        try:
            obj = json.loads(line)
            intent, cql, arity = str(obj["intent"]), str(obj["cql"]), int(obj["arity"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            report.reject(lineno, f"bad template: {exc}")
            continue
        numbers = placeholder_numbers(cql)
        if numbers != set(range(1, arity + 1)):
            report.reject(
                lineno,
                f"arity declaration mismatch: declared {arity}, "
                f"placeholders {sorted(numbers)}",
            )
            continue
        try:
            template = QueryTemplate(intent_label=intent, cql_text=cql, arity=arity)
        except ParseError as exc:
            report.reject(lineno, f"template does not parse: {exc}")
            continue
        except ValueError as exc:
            report.reject(lineno, f"bad template: {exc}")
            continue
        if library.register(template):
            report.notes.append(
                (lineno, f"replaced earlier template for intent {template.intent_label!r}")
            )
        report.loaded += 1
    return report


def load_rules(path: str | Path, rules: list[IntentRule]) -> IngestReport:
    """Append rules in file order; order defines match precedence."""
    text = _read_text(path)
    report = IngestReport()
    for lineno, line in _iter_jsonl(text):
        try:
            obj = json.loads(line)
            rule = IntentRule.from_json(obj)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            report.reject(lineno, f"bad rule: {exc}")
            continue
        except Exception as exc:  # re.error from a bad pattern
            report.reject(lineno, f"bad rule pattern: {exc}")
            continue
        rules.append(rule)
        report.loaded += 1
    return report
