"""In-memory SPO triple store with exact-match indexes.

Values share one namespace: entity ids and string literals are plain
strings, numeric literals are ints/floats (compared numerically, so 3 and
3.0 are the same object value). Node labels and properties are ordinary
triples; the executor treats the predicate ``label`` as the node-label
predicate.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from typing import Iterable, Union

from ..errors import InvalidTriple

Value = Union[str, int, float]

LABEL_PREDICATE = "label"


def _validate_value(v: Value) -> None:
    if isinstance(v, str):
        return
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidTriple(f"object must be a string or a number, got {type(v).__name__}")
    if v != v or v in (float("inf"), float("-inf")):
        raise InvalidTriple("numeric object must be finite")


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: Value

    def __post_init__(self):
        if not isinstance(self.subject, str) or not self.subject:
            raise InvalidTriple("subject must be a non-empty string")
        if not isinstance(self.predicate, str) or not self.predicate:
            raise InvalidTriple("predicate must be a non-empty string")
        _validate_value(self.object)


def _value_sort_key(v: Value) -> tuple:
    if isinstance(v, str):
        return (1, v)
    return (0, float(v))


class TripleStore:
    """Set of triples plus subject/predicate/object indexes.

    Mutations are serialized behind a lock; the executor holds the same
    lock for the duration of a query so it never sees indexes and triple
    set out of step. Iteration order is insertion order, which keeps query
    results deterministic for identically built stores.
    """

    def __init__(self, triples: Iterable[Triple] = ()):
        self.lock = threading.RLock()
        self._triples: dict[Triple, None] = {}
        self._by_subject: dict[str, list[Triple]] = {}
        self._by_predicate: dict[str, list[Triple]] = {}
        self._by_object: dict[Value, list[Triple]] = {}
        self._terms: dict[Value, None] = {}
        for t in triples:
            self.insert(t)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def insert(self, t: Triple) -> bool:
        """Add a triple; returns False when it was already present."""
        with self.lock:
            if t in self._triples:
                return False
            self._triples[t] = None
            self._by_subject.setdefault(t.subject, []).append(t)
            self._by_predicate.setdefault(t.predicate, []).append(t)
            self._by_object.setdefault(t.object, []).append(t)
            self._terms.setdefault(t.subject, None)
            self._terms.setdefault(t.object, None)
            return True

    def triples(self) -> tuple[Triple, ...]:
        with self.lock:
            return tuple(self._triples)

    def by_subject(self, subject: str) -> tuple[Triple, ...]:
        with self.lock:
            return tuple(self._by_subject.get(subject, ()))

    def by_predicate(self, predicate: str) -> tuple[Triple, ...]:
        with self.lock:
            return tuple(self._by_predicate.get(predicate, ()))

    def by_object(self, obj: Value) -> tuple[Triple, ...]:
        with self.lock:
            return tuple(self._by_object.get(obj, ()))

    def has(self, subject: str, predicate: str, obj: Value) -> bool:
        return Triple(subject, predicate, obj) in self._triples

    def terms(self) -> tuple[Value, ...]:
        """Every subject and object seen so far, in first-seen order."""
        with self.lock:
            return tuple(self._terms)

    def subjects(self) -> tuple[str, ...]:
        with self.lock:
            return tuple(self._by_subject)

    def objects_of(self, subject: str, predicate: str) -> tuple[Value, ...]:
        return tuple(t.object for t in self.by_subject(subject) if t.predicate == predicate)

    def content_hash(self) -> str:
        """Order-independent digest of the triple set."""
        keys = sorted(
            (t.subject, t.predicate) + _value_sort_key(t.object) for t in self.triples()
        )
        canon = "\n".join(repr(k) for k in keys)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()
