"""The query language: AST, parser, and canonical printer.

Grammar (authoritative):

    query    := "MATCH" pattern ("," pattern)* "RETURN" item ("," item)*
                order? limit?
    pattern  := node (edge node)*
    node     := "(" IDENT? (":" IDENT)? props? ")"
    edge     := "-[" (":" IDENT)? "]->" | "<-[" (":" IDENT)? "]-"
    props    := "{" IDENT ":" literal ("," IDENT ":" literal)* "}"
    item     := IDENT | IDENT "." IDENT | "COUNT(" IDENT ")"
    order    := "ORDER BY" item ("ASC"|"DESC")?
    limit    := "LIMIT" POSINT
    literal  := quoted string | number

Keywords are uppercase and reserved. The parser is a hand-rolled recursive
descent over a small tokenizer; every rejection carries the line/column it
happened at and what was expected there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..errors import ParseError, UnboundVariable
from .store import Value

KEYWORDS = {"MATCH", "RETURN", "ORDER", "BY", "ASC", "DESC", "LIMIT", "COUNT"}

OUT = "out"  # -[:r]->  : (src, r, dst)
IN = "in"  # <-[:r]-  : (dst, r, src)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class NodePattern:
    var: str | None = None
    label: str | None = None
    props: tuple[tuple[str, Value], ...] = ()


@dataclass(frozen=True)
class Hop:
    relation: str | None
    direction: str  # OUT or IN
    node: NodePattern


@dataclass(frozen=True)
class PathPattern:
    head: NodePattern
    hops: tuple[Hop, ...] = ()

    def nodes(self) -> tuple[NodePattern, ...]:
        return (self.head,) + tuple(h.node for h in self.hops)


@dataclass(frozen=True)
class VarItem:
    var: str


@dataclass(frozen=True)
class PropItem:
    var: str
    prop: str


@dataclass(frozen=True)
class CountItem:
    var: str


ReturnItem = Union[VarItem, PropItem, CountItem]


@dataclass(frozen=True)
class OrderBy:
    item: ReturnItem
    descending: bool = False


@dataclass(frozen=True)
class CqlQuery:
    patterns: tuple[PathPattern, ...]
    items: tuple[ReturnItem, ...]
    order_by: OrderBy | None = None
    limit: int | None = None

    def declared_vars(self) -> set[str]:
        return {
            n.var for p in self.patterns for n in p.nodes() if n.var is not None
        }

    def validate(self) -> None:
        """Structural checks for programmatically built queries; the parser
        enforces the same rules with source positions."""
        if not self.patterns:
            raise ValueError("query has no patterns")
        if not self.items:
            raise ValueError("query has no return items")
        declared = self.declared_vars()
        for item in self.items:
            if item.var not in declared:
                raise UnboundVariable(f"return references unbound variable {item.var!r}")
        if sum(1 for i in self.items if isinstance(i, CountItem)) > 1:
            raise ValueError("at most one COUNT item is allowed")
        if self.order_by is not None and self.order_by.item not in self.items:
            raise ValueError("ORDER BY item must be one of the return items")
        if self.limit is not None and self.limit <= 0:
            raise ValueError("LIMIT must be positive")


# ---------------------------------------------------------------------------
# Tokenizer

_PUNCT = {"(": "LPAREN", ")": "RPAREN", "{": "LBRACE", "}": "RBRACE",
          ":": "COLON", ",": "COMMA", ".": "DOT"}


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT KEYWORD STRING NUMBER punct-kinds EDGE_* EOF
    value: object
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        return repr(str(self.value))


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def err(expected: str, found: str = "") -> ParseError:
        return ParseError(line, col, expected, found)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        start_line, start_col = line, col
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = "KEYWORD" if word in KEYWORDS else "IDENT"
            tokens.append(_Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    if j + 1 >= n or text[j + 1] not in ('"', "\\"):
                        raise ParseError(line, col, 'escape \\" or \\\\')
                    out.append(text[j + 1])
                    j += 2
                elif text[j] == "\n":
                    raise ParseError(line, col, "closing quote before end of line")
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise err("closing quote")
            tokens.append(_Token("STRING", "".join(out), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1 if ch == "-" else i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            value: Value = float(word) if is_float else int(word)
            tokens.append(_Token("NUMBER", value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-":
            if text.startswith("-[", i):
                tokens.append(_Token("EDGE_OUT_START", "-[", start_line, start_col))
                i += 2
                col += 2
                continue
            raise err("edge '-[' or a number", "-")
        if ch == "<":
            if text.startswith("<-[", i):
                tokens.append(_Token("EDGE_IN_START", "<-[", start_line, start_col))
                i += 3
                col += 3
                continue
            raise err("edge '<-['", "<")
        if ch == "]":
            if text.startswith("]->", i):
                tokens.append(_Token("EDGE_OUT_END", "]->", start_line, start_col))
                i += 3
                col += 3
                continue
            if text.startswith("]-", i):
                tokens.append(_Token("EDGE_IN_END", "]-", start_line, start_col))
                i += 2
                col += 2
                continue
            raise err("edge ']->' or ']-'", "]")
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise err("a query token", ch)
    tokens.append(_Token("EOF", None, line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def fail(self, expected: str) -> ParseError:
        tok = self.cur
        return ParseError(tok.line, tok.column, expected, tok.describe())

    def expect(self, kind: str, expected: str) -> _Token:
        if self.cur.kind != kind:
            raise self.fail(expected)
        return self.advance()

    def keyword(self, word: str) -> _Token:
        if self.cur.kind != "KEYWORD" or self.cur.value != word:
            raise self.fail(f"keyword {word}")
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        return self.cur.kind == "KEYWORD" and self.cur.value == word

    def ident(self, what: str) -> str:
        return str(self.expect("IDENT", what).value)

    # grammar rules ---------------------------------------------------------

    def query(self) -> CqlQuery:
        self.keyword("MATCH")
        patterns = [self.pattern()]
        while self.cur.kind == "COMMA":
            self.advance()
            patterns.append(self.pattern())
        self.keyword("RETURN")
        item_tokens = [self.cur]
        items = [self.item()]
        while self.cur.kind == "COMMA":
            self.advance()
            item_tokens.append(self.cur)
            items.append(self.item())

        order_by = None
        if self.at_keyword("ORDER"):
            self.advance()
            self.keyword("BY")
            order_token = self.cur
            order_item = self.item()
            descending = False
            if self.at_keyword("ASC"):
                self.advance()
            elif self.at_keyword("DESC"):
                self.advance()
                descending = True
            if order_item not in items:
                raise ParseError(
                    order_token.line, order_token.column, "one of the RETURN items"
                )
            order_by = OrderBy(order_item, descending)

        limit = None
        if self.at_keyword("LIMIT"):
            self.advance()
            tok = self.cur
            if tok.kind != "NUMBER" or not isinstance(tok.value, int) or tok.value <= 0:
                raise self.fail("a positive integer")
            self.advance()
            limit = tok.value

        self.expect("EOF", "end of query")

        query = CqlQuery(tuple(patterns), tuple(items), order_by, limit)
        declared = query.declared_vars()
        count_seen = False
        for tok, item in zip(item_tokens, items):
            if item.var not in declared:
                raise ParseError(
                    tok.line, tok.column, f"a variable bound in MATCH (unknown {item.var!r})"
                )
            if isinstance(item, CountItem):
                if count_seen:
                    raise ParseError(tok.line, tok.column, "at most one COUNT item")
                count_seen = True
        return query

    def pattern(self) -> PathPattern:
        head = self.node()
        hops = []
        while self.cur.kind in ("EDGE_OUT_START", "EDGE_IN_START"):
            hops.append(self.hop())
        return PathPattern(head, tuple(hops))

    def hop(self) -> Hop:
        if self.cur.kind == "EDGE_OUT_START":
            self.advance()
            relation = None
            if self.cur.kind == "COLON":
                self.advance()
                relation = self.ident("a relation name")
            self.expect("EDGE_OUT_END", "']->'")
            return Hop(relation, OUT, self.node())
        self.expect("EDGE_IN_START", "'<-['")
        relation = None
        if self.cur.kind == "COLON":
            self.advance()
            relation = self.ident("a relation name")
        self.expect("EDGE_IN_END", "']-'")
        return Hop(relation, IN, self.node())

    def node(self) -> NodePattern:
        self.expect("LPAREN", "'(' opening a node")
        var = None
        if self.cur.kind == "IDENT":
            var = str(self.advance().value)
        label = None
        if self.cur.kind == "COLON":
            self.advance()
            label = self.ident("a node label")
        props: tuple[tuple[str, Value], ...] = ()
        if self.cur.kind == "LBRACE":
            props = self.props()
        self.expect("RPAREN", "')' closing the node")
        return NodePattern(var, label, props)

    def props(self) -> tuple[tuple[str, Value], ...]:
        self.expect("LBRACE", "'{'")
        pairs = [self.prop_pair()]
        while self.cur.kind == "COMMA":
            self.advance()
            pairs.append(self.prop_pair())
        self.expect("RBRACE", "'}' closing the property map")
        return tuple(pairs)

    def prop_pair(self) -> tuple[str, Value]:
        key = self.ident("a property name")
        self.expect("COLON", "':' after the property name")
        tok = self.cur
        if tok.kind not in ("STRING", "NUMBER"):
            raise self.fail("a quoted string or number literal")
        self.advance()
        return key, tok.value  # type: ignore[return-value]

    def item(self) -> ReturnItem:
        if self.at_keyword("COUNT"):
            self.advance()
            self.expect("LPAREN", "'(' after COUNT")
            var = self.ident("a variable name")
            self.expect("RPAREN", "')' after the COUNT variable")
            return CountItem(var)
        var = self.ident("a return item (variable, property, or COUNT)")
        if self.cur.kind == "DOT":
            self.advance()
            return PropItem(var, self.ident("a property name"))
        return VarItem(var)


def parse_cql(text: str) -> CqlQuery:
    """Parse query text into an AST; everything outside the grammar is
    rejected with a position-annotated ParseError."""
    if not text.strip():
        raise ParseError(1, 1, "a MATCH query", "empty input")
    return _Parser(_tokenize(text)).query()


# ---------------------------------------------------------------------------
# Printer


def _format_value(v: Value) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _format_node(n: NodePattern) -> str:
    out = n.var or ""
    if n.label is not None:
        out += f":{n.label}"
    if n.props:
        inner = ", ".join(f"{k}:{_format_value(v)}" for k, v in n.props)
        out += ("" if not out else " ") + "{" + inner + "}"
    return f"({out})"


def _format_item(item: ReturnItem) -> str:
    if isinstance(item, CountItem):
        return f"COUNT({item.var})"
    if isinstance(item, PropItem):
        return f"{item.var}.{item.prop}"
    return item.var


def print_cql(q: CqlQuery) -> str:
    """Canonical single-line text: parse(print(q)) is structurally q."""
    parts = []
    for p in q.patterns:
        text = _format_node(p.head)
        for hop in p.hops:
            rel = f":{hop.relation}" if hop.relation is not None else ""
            arrow = f"-[{rel}]->" if hop.direction == OUT else f"<-[{rel}]-"
            text += arrow + _format_node(hop.node)
        parts.append(text)
    out = "MATCH " + ", ".join(parts)
    out += " RETURN " + ", ".join(_format_item(i) for i in q.items)
    if q.order_by is not None:
        out += " ORDER BY " + _format_item(q.order_by.item)
        out += " DESC" if q.order_by.descending else " ASC"
    if q.limit is not None:
        out += f" LIMIT {q.limit}"
    return out
