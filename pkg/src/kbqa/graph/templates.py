"""Intent-keyed query templates with numbered entity placeholders.

A template is query text containing ``XX1`` ... ``XXn`` (bare ``XX`` is an
alias for ``XX1``). Filling replaces each placeholder with the positional
entity id as a quoted, escaped string literal, so the result always
re-parses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ArityMismatch
from .cql import CqlQuery, parse_cql

PLACEHOLDER_RE = re.compile(r"\bXX(\d+)?\b")


def placeholder_numbers(cql_text: str) -> set[int]:
    return {int(m.group(1)) if m.group(1) else 1 for m in PLACEHOLDER_RE.finditer(cql_text)}


def _quote(entity: str) -> str:
    return '"' + entity.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class QueryTemplate:
    intent_label: str
    cql_text: str
    arity: int

    def __post_init__(self):
        if not self.intent_label:
            raise ValueError("template intent label is empty")
        numbers = placeholder_numbers(self.cql_text)
        if numbers != set(range(1, self.arity + 1)):
            raise ValueError(
                f"template for {self.intent_label!r} declares arity {self.arity} "
                f"but uses placeholders {sorted(numbers)}"
            )
        # Placeholders filled with probe entities must leave valid query
        # text; a template that cannot parse is rejected up front.
        self.fill([f"probe{i}" for i in range(self.arity)], parse=True)

    def fill(self, entities: list[str], parse: bool = False) -> str:
        """Substitute the i-th entity for XXi. Raises ArityMismatch when the
        entity list length differs from the template arity."""
        if len(entities) != self.arity:
            raise ArityMismatch(expected=self.arity, got=len(entities))

        def replace(m: re.Match) -> str:
            number = int(m.group(1)) if m.group(1) else 1
            return _quote(entities[number - 1])

        text = PLACEHOLDER_RE.sub(replace, self.cql_text)
        if parse:
            parse_cql(text)
        return text


class TemplateLibrary:
    """intent label -> template registry; re-registering replaces."""

    def __init__(self):
        self._templates: dict[str, QueryTemplate] = {}

    def __len__(self) -> int:
        return len(self._templates)

    def register(self, template: QueryTemplate) -> bool:
        """Returns True when an existing template was replaced."""
        replaced = template.intent_label in self._templates
        self._templates[template.intent_label] = template
        return replaced

    def get(self, intent_label: str) -> QueryTemplate | None:
        return self._templates.get(intent_label)

    def labels(self) -> list[str]:
        return sorted(self._templates)
