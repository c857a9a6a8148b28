"""Knowledge substrate: triple store, query language, templates."""

from .cql import (
    CountItem,
    CqlQuery,
    Hop,
    NodePattern,
    OrderBy,
    PathPattern,
    PropItem,
    ReturnItem,
    VarItem,
    IN,
    OUT,
    parse_cql,
    print_cql,
)
from .executor import BindingRow, column_name, execute, value_sort_key
from .store import LABEL_PREDICATE, Triple, TripleStore, Value
from .templates import PLACEHOLDER_RE, QueryTemplate, TemplateLibrary, placeholder_numbers

__all__ = [
    "BindingRow",
    "CountItem",
    "CqlQuery",
    "Hop",
    "IN",
    "LABEL_PREDICATE",
    "NodePattern",
    "OUT",
    "OrderBy",
    "PLACEHOLDER_RE",
    "PathPattern",
    "PropItem",
    "QueryTemplate",
    "ReturnItem",
    "TemplateLibrary",
    "Triple",
    "TripleStore",
    "Value",
    "VarItem",
    "column_name",
    "execute",
    "parse_cql",
    "placeholder_numbers",
    "print_cql",
    "value_sort_key",
]
