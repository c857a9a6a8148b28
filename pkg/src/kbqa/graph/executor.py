"""Query execution: backtracking join over the triple indexes.

Semantics, stated once so the tests' independent enumerator can implement
them from the same sentence:

* Every node slot (named variables shared across patterns, anonymous nodes
  each their own slot) ranges over store terms. A full assignment is valid
  when every edge pattern maps to an existing triple with matching
  direction and relation, every node property ``p: v`` has a backing
  triple ``<node, p, v>``, and every node label ``L`` has ``<node, label,
  L>``.
* ``a.prop`` in RETURN acts as an implicit edge ``<a, prop, value>`` with
  its own slot: assignments without the property produce no row, multiple
  values produce multiple rows.
* Rows are the projections of all valid assignments (a multiset). With a
  COUNT item, rows are grouped by the non-COUNT items and the count is the
  number of distinct values the counted variable takes per group; no
  assignments means no groups, hence no rows.
* ORDER BY sorts numbers numerically and strings lexicographically, with
  numbers before strings when a column mixes them; ties are broken by the
  full row, ascending, so results are deterministic. LIMIT truncates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cql import CountItem, CqlQuery, PropItem, ReturnItem, OUT
from .store import LABEL_PREDICATE, Triple, TripleStore, Value


@dataclass(frozen=True)
class BindingRow:
    """One result row: (column, value) pairs in return-item order."""

    values: tuple[tuple[str, Value], ...]

    def as_dict(self) -> dict[str, Value]:
        return dict(self.values)

    def __getitem__(self, column: str) -> Value:
        for k, v in self.values:
            if k == column:
                return v
        raise KeyError(column)


def column_name(item: ReturnItem) -> str:
    if isinstance(item, CountItem):
        return f"COUNT({item.var})"
    if isinstance(item, PropItem):
        return f"{item.var}.{item.prop}"
    return item.var


def value_sort_key(v: Value) -> tuple:
    """Numbers before strings; numbers numerically, strings naturally."""
    if isinstance(v, str):
        return (1, v)
    return (0, float(v))


@dataclass(frozen=True)
class _Edge:
    src: str  # slot of the triple's subject side
    relation: str | None
    dst: str  # slot of the triple's object side


class _Plan:
    """Flattened query: slots, edge constraints, per-slot node constraints."""

    def __init__(self, q: CqlQuery):
        self.edges: list[_Edge] = []
        self.labels: dict[str, list[str]] = {}
        self.props: dict[str, list[tuple[str, Value]]] = {}
        self.slots: list[str] = []
        self._anon = 0

        def slot_of(node) -> str:
            name = node.var if node.var is not None else self._fresh()
            if name not in self.slots:
                self.slots.append(name)
            if node.label is not None:
                self.labels.setdefault(name, []).append(node.label)
            for k, v in node.props:
                self.props.setdefault(name, []).append((k, v))
            return name

        for pattern in q.patterns:
            prev = slot_of(pattern.head)
            for hop in pattern.hops:
                nxt = slot_of(hop.node)
                if hop.direction == OUT:
                    self.edges.append(_Edge(prev, hop.relation, nxt))
                else:
                    self.edges.append(_Edge(nxt, hop.relation, prev))
                prev = nxt

        # Implicit property edges for a.prop return items (shared per
        # distinct (var, prop), so ORDER BY on the same item reuses a slot).
        self.item_slots: dict[ReturnItem, str] = {}
        for item in q.items:
            if item in self.item_slots:
                continue
            if isinstance(item, PropItem):
                extra = self._fresh()
                self.slots.append(extra)
                self.edges.append(_Edge(item.var, item.prop, extra))
                self.item_slots[item] = extra
            else:
                self.item_slots[item] = item.var

    def _fresh(self) -> str:
        self._anon += 1
        return f" _{self._anon}"  # leading space: cannot collide with IDENT


def _node_ok(store: TripleStore, plan: _Plan, slot: str, term: Value) -> bool:
    for label in plan.labels.get(slot, ()):
        if not isinstance(term, str) or not store.has(term, LABEL_PREDICATE, label):
            return False
    for key, value in plan.props.get(slot, ()):
        if not isinstance(term, str) or not store.has(term, key, value):
            return False
    return True


def execute(q: CqlQuery, store: TripleStore) -> list[BindingRow]:
    """Evaluate a query against the store. Read-only; deterministic for an
    identically built (same insertion order) store."""
    q.validate()
    plan = _Plan(q)
    with store.lock:
        assignments = _solve(plan, store)
        return _project(q, plan, assignments)


def _solve(plan: _Plan, store: TripleStore) -> list[dict[str, Value]]:
    results: list[dict[str, Value]] = []

    def bind(env: dict[str, Value], slot: str, term: Value) -> dict[str, Value] | None:
        bound = env.get(slot)
        if bound is not None:
            return env if bound == term else None
        if not _node_ok(store, plan, slot, term):
            return None
        child = dict(env)
        child[slot] = term
        return child

    def candidates(env: dict[str, Value], edge: _Edge) -> tuple[Triple, ...]:
        src, dst = env.get(edge.src), env.get(edge.dst)
        if src is not None:
            if not isinstance(src, str):
                return ()
            pool = store.by_subject(src)
        elif dst is not None:
            pool = store.by_object(dst)
        elif edge.relation is not None:
            pool = store.by_predicate(edge.relation)
        else:
            pool = store.triples()
        return tuple(
            t
            for t in pool
            if (edge.relation is None or t.predicate == edge.relation)
            and (src is None or t.subject == src)
            and (dst is None or t.object == dst)
        )

    def recurse(env: dict[str, Value], edge_idx: int) -> None:
        if edge_idx == len(plan.edges):
            # Slots untouched by any edge (node-only patterns) range over
            # every term in the store.
            free = [s for s in plan.slots if s not in env]
            if not free:
                results.append(env)
                return
            slot = free[0]
            for term in store.terms():
                child = bind(env, slot, term)
                if child is not None:
                    recurse(child, edge_idx)
            return
        edge = plan.edges[edge_idx]
        # Two triples with equal endpoints (possible when the relation is
        # anonymous) induce the same assignment; rows count assignments,
        # not triple derivations.
        seen: set[tuple[Value, Value]] = set()
        for t in candidates(env, edge):
            endpoints = (t.subject, t.object)
            if endpoints in seen:
                continue
            seen.add(endpoints)
            child = bind(env, edge.src, t.subject)
            if child is None:
                continue
            child = bind(child, edge.dst, t.object)
            if child is None:
                continue
            recurse(child, edge_idx + 1)

    recurse({}, 0)
    return results


def _project(
    q: CqlQuery, plan: _Plan, assignments: list[dict[str, Value]]
) -> list[BindingRow]:
    columns = [column_name(i) for i in q.items]
    count_items = [i for i in q.items if isinstance(i, CountItem)]

    if count_items:
        count_item = count_items[0]
        plain = [i for i in q.items if not isinstance(i, CountItem)]
        groups: dict[tuple, set] = {}
        for env in assignments:
            key = tuple(env[plan.item_slots[i]] for i in plain)
            groups.setdefault(key, set()).add(env[count_item.var])
        rows = []
        for key, counted in groups.items():
            by_item = dict(zip(plain, key))
            row_vals = tuple(
                (col, len(counted) if isinstance(item, CountItem) else by_item[item])
                for col, item in zip(columns, q.items)
            )
            rows.append(BindingRow(row_vals))
    else:
        rows = [
            BindingRow(
                tuple(
                    (col, env[plan.item_slots[item]])
                    for col, item in zip(columns, q.items)
                )
            )
            for env in assignments
        ]

    if q.order_by is not None:
        order_col = column_name(q.order_by.item)
        rows.sort(key=lambda r: tuple(value_sort_key(v) for _, v in r.values))
        rows.sort(key=lambda r: value_sort_key(r[order_col]), reverse=q.order_by.descending)
    if q.limit is not None:
        rows = rows[: q.limit]
    return rows
