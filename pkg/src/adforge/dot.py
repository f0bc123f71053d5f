"""DOT-subset parser and emitter for attack-defense trees.

Supported: `digraph`, node and edge statements, attribute lists, quoted
strings, `//` and `/* */` comments, and `graph`/`node`/`edge` default
attribute statements. Subgraphs, undirected graphs, ports, and HTML
strings are rejected. See docs/dot-subset.md for the grammar and the
reserved node attributes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, StructureError
from .model import (
    ADNode,
    ADTree,
    LIST_SEPARATOR,
    NodeKind,
    RESERVED_ATTRS,
    STYLE_ATTRS,
    StyleSheet,
)

# Fill colors that identify node kinds in raw LLM output (case-insensitive).
SERVICE_FILLS = {
    "darkblue", "navy", "navyblue", "midnightblue",
    "#00008b", "#000080", "#191970", "#003366",
}
ATTACK_FILLS = {
    "lightblue", "skyblue", "lightskyblue", "powderblue",
    "#add8e6", "#87ceeb", "#87cefa", "#b0e0e6",
}

_BARE_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_NUMBER_RE = re.compile(r"^-?(\.\d+|\d+(\.\d*)?)$")

_KEYWORDS = {"digraph", "graph", "subgraph", "node", "edge", "strict"}


@dataclass
class _Token:
    kind: str  # 'id', 'quoted', punctuation literal, 'eof'
    value: str
    line: int
    column: int


class _Tokenizer:
    _PUNCT = {"{", "}", "[", "]", ";", ",", "="}

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def _error(self, message: str) -> ParseError:
        return ParseError(self.line, self.column, message)

    def _skip_trivia(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif self.text.startswith("//", self.pos):
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif self.text.startswith("/*", self.pos):
                start_line, start_col = self.line, self.column
                self._advance(2)
                while self.pos < len(self.text) and not self.text.startswith("*/", self.pos):
                    self._advance()
                if self.pos >= len(self.text):
                    raise ParseError(start_line, start_col, "unterminated /* comment")
                self._advance(2)
            else:
                return

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        while True:
            self._skip_trivia()
            if self.pos >= len(self.text):
                out.append(_Token("eof", "", self.line, self.column))
                return out
            line, column = self.line, self.column
            ch = self.text[self.pos]
            if ch in self._PUNCT:
                self._advance()
                out.append(_Token(ch, ch, line, column))
            elif self.text.startswith("->", self.pos):
                self._advance(2)
                out.append(_Token("->", "->", line, column))
            elif self.text.startswith("--", self.pos):
                raise ParseError(line, column, "undirected edges are not supported")
            elif ch == '"':
                out.append(self._quoted(line, column))
            elif ch == "<":
                raise ParseError(line, column, "HTML strings are not supported")
            elif _BARE_ID_RE.match(ch) or ch.isdigit() or ch in "-.":
                out.append(self._bare(line, column))
            else:
                raise self._error(f"unexpected character {ch!r}")

    def _quoted(self, line: int, column: int) -> _Token:
        self._advance()  # opening quote
        parts: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError(line, column, "unterminated quoted string")
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                nxt = self.text[self.pos + 1]
                if nxt in ('"', "\\"):
                    parts.append(nxt)
                    self._advance(2)
                    continue
                parts.append(ch)
                self._advance()
            elif ch == '"':
                self._advance()
                return _Token("quoted", "".join(parts), line, column)
            else:
                parts.append(ch)
                self._advance()

    def _bare(self, line: int, column: int) -> _Token:
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if (ch in " \t\r\n" or ch in self._PUNCT or ch == '"'
                    or self.text.startswith("->", self.pos)
                    or self.text.startswith("--", self.pos)
                    or self.text.startswith("//", self.pos)
                    or self.text.startswith("/*", self.pos)):
                break
            self._advance()
        value = self.text[start:self.pos]
        if not (_BARE_ID_RE.match(value) or _NUMBER_RE.match(value)):
            raise ParseError(line, column, f"invalid identifier {value!r}")
        return _Token("id", value, line, column)


class _Parser:
    """Recursive descent over the token stream; yields raw statements."""

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.graph_name: str | None = None
        self.graph_attrs: dict[str, str] = {}
        # id -> ordered attr dict; creation order preserved for defaults
        self.node_attrs: dict[str, dict[str, str]] = {}
        self.edges: list[tuple[str, str]] = []
        self.node_defaults: dict[str, str] = {}

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _error(self, tok: _Token, message: str) -> ParseError:
        return ParseError(tok.line, tok.column, message)

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._next()
        if tok.kind != kind:
            raise self._error(tok, f"expected {what}, found {tok.value!r}" if tok.value else f"expected {what}")
        return tok

    def parse(self) -> None:
        tok = self._next()
        if tok.kind == "id" and tok.value.lower() == "strict":
            raise self._error(tok, "'strict' graphs are not supported")
        if not (tok.kind == "id" and tok.value.lower() == "digraph"):
            raise self._error(tok, "expected 'digraph'")
        tok = self._peek()
        if tok.kind == "quoted" or (tok.kind == "id" and tok.value.lower() not in _KEYWORDS):
            self.graph_name = self._next().value
        self._expect("{", "'{'")
        while True:
            tok = self._peek()
            if tok.kind == "}":
                self._next()
                break
            if tok.kind == "eof":
                raise self._error(tok, "unexpected end of input, missing '}'")
            if tok.kind == ";":
                self._next()
                continue
            self._statement()
        tok = self._next()
        if tok.kind != "eof":
            raise self._error(tok, f"trailing input after '}}': {tok.value!r}")

    def _statement(self) -> None:
        tok = self._next()
        if tok.kind == "{":
            raise self._error(tok, "anonymous subgraphs are not supported")
        if tok.kind not in ("id", "quoted"):
            raise self._error(tok, f"expected a statement, found {tok.value!r}")
        word = tok.value.lower() if tok.kind == "id" else ""
        if word == "subgraph":
            raise self._error(tok, "subgraphs/clusters are not supported")
        if word in ("graph", "node", "edge") and self._peek().kind == "[":
            attrs = self._attr_lists()
            if word == "graph":
                self.graph_attrs.update(attrs)
            elif word == "node":
                self.node_defaults.update(attrs)
            # edge defaults carry no meaning for the tree model; accepted, dropped
            return
        # graph-level attribute: ID '=' value
        if self._peek().kind == "=":
            self._next()
            value = self._value()
            self.graph_attrs[tok.value] = value
            return
        # node or edge statement
        if tok.kind == "id" and word in _KEYWORDS:
            raise self._error(tok, f"keyword {tok.value!r} cannot name a node")
        head = tok.value
        if self._peek().kind == "->":
            chain = [head]
            while self._peek().kind == "->":
                self._next()
                nxt = self._next()
                if nxt.kind == "id" and nxt.value.lower() in _KEYWORDS:
                    raise self._error(nxt, f"keyword {nxt.value!r} cannot name a node")
                if nxt.kind not in ("id", "quoted"):
                    raise self._error(nxt, f"expected a node id after '->', found {nxt.value!r}")
                chain.append(nxt.value)
            if self._peek().kind == "[":
                self._attr_lists()  # edge attributes: accepted, dropped
            for node_id in chain:
                self._declare(node_id)
            self.edges.extend(zip(chain, chain[1:]))
            return
        attrs = self._attr_lists() if self._peek().kind == "[" else {}
        self._declare(head, attrs)

    def _declare(self, node_id: str, attrs: dict[str, str] | None = None) -> None:
        if node_id not in self.node_attrs:
            self.node_attrs[node_id] = dict(self.node_defaults)
        if attrs:
            self.node_attrs[node_id].update(attrs)

    def _attr_lists(self) -> dict[str, str]:
        attrs: dict[str, str] = {}
        while self._peek().kind == "[":
            self._next()
            while True:
                tok = self._peek()
                if tok.kind == "]":
                    self._next()
                    break
                if tok.kind in (",", ";"):
                    self._next()
                    continue
                name = self._next()
                if name.kind not in ("id", "quoted"):
                    raise self._error(name, f"expected attribute name, found {name.value!r}")
                self._expect("=", "'=' in attribute")
                attrs[name.value] = self._value()
        return attrs

    def _value(self) -> str:
        tok = self._next()
        if tok.kind not in ("id", "quoted"):
            raise self._error(tok, f"expected attribute value, found {tok.value!r}")
        return tok.value


def _split_list(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(LIST_SEPARATOR) if part.strip()]


def _infer_kind(attrs: dict[str, str], indegree: int, outdegree: int) -> NodeKind:
    fill = attrs.get("fillcolor", "").lower()
    if indegree == 0:
        return NodeKind.ROOT
    if outdegree == 0 and indegree >= 2:
        return NodeKind.GOAL
    if fill in SERVICE_FILLS:
        return NodeKind.SERVICE
    if fill in ATTACK_FILLS:
        return NodeKind.ATTACK
    return NodeKind.ATTACK


def _build_node(node_id: str, attrs: dict[str, str], indegree: int, outdegree: int,
                style: StyleSheet | None) -> ADNode:
    if "adtkind" in attrs:
        try:
            kind = NodeKind(attrs["adtkind"].lower())
        except ValueError:
            raise StructureError(f"node '{node_id}': unknown adtkind '{attrs['adtkind']}'") from None
    else:
        kind = _infer_kind(attrs, indegree, outdegree)

    mitre_ok: bool | None = None
    if "mitre_ok" in attrs:
        raw = attrs["mitre_ok"].lower()
        if raw not in ("true", "false"):
            raise StructureError(f"node '{node_id}': mitre_ok must be true or false, got '{attrs['mitre_ok']}'")
        mitre_ok = raw == "true"

    step: int | None = None
    if "step" in attrs:
        try:
            step = int(attrs["step"])
        except ValueError:
            raise StructureError(f"node '{node_id}': step must be an integer, got '{attrs['step']}'") from None

    extras = {k: v for k, v in attrs.items() if k not in RESERVED_ATTRS}
    kind_style = style.for_kind(kind) if style else {}
    for attr in STYLE_ATTRS:
        if attr in attrs and attrs[attr] != kind_style.get(attr):
            extras[attr] = attrs[attr]

    return ADNode(
        id=node_id,
        kind=kind,
        label=attrs.get("label", ""),
        mitre_id=attrs.get("mitre") or None,
        mitre_appropriate=mitre_ok,
        commands=_split_list(attrs.get("cmd", "")),
        inputs=_split_list(attrs.get("inputs", "")),
        expected_results=attrs.get("expect") or None,
        step_index=step,
        extras=extras,
    )


def parse_dot(text: str) -> ADTree:
    """Parse DOT source into a validated attack-defense tree."""
    parser = _Parser(_Tokenizer(text).tokens())
    parser.parse()

    indeg: dict[str, int] = {nid: 0 for nid in parser.node_attrs}
    outdeg: dict[str, int] = {nid: 0 for nid in parser.node_attrs}
    for p, c in parser.edges:
        outdeg[p] += 1
        indeg[c] += 1

    graph_attrs = dict(parser.graph_attrs)
    style = StyleSheet.from_attr(graph_attrs.pop("adtstyle")) if "adtstyle" in graph_attrs else None

    nodes = {
        nid: _build_node(nid, attrs, indeg[nid], outdeg[nid], style)
        for nid, attrs in parser.node_attrs.items()
    }

    roots = sorted(nid for nid, n in nodes.items() if n.kind == NodeKind.ROOT)
    if len(roots) != 1:
        raise StructureError(
            f"expected exactly one root node, found {len(roots)}"
            + (f": {', '.join(roots)}" if roots else "")
        )

    tree = ADTree(
        nodes=nodes,
        edges=list(parser.edges),
        root=roots[0],
        style=style,
        name=parser.graph_name or "adtree",
        graph_attrs=graph_attrs,
    )
    tree.validate()
    return tree


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render_id(value: str) -> str:
    if _BARE_ID_RE.match(value) and value.lower() not in _KEYWORDS:
        return value
    return _quote(value)


def _node_attr_pairs(node: ADNode, style: StyleSheet | None) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    if node.label:
        pairs.append(("label", node.label))
    pairs.append(("adtkind", node.kind.value))
    if node.mitre_id is not None:
        pairs.append(("mitre", node.mitre_id))
    if node.mitre_appropriate is not None:
        pairs.append(("mitre_ok", "true" if node.mitre_appropriate else "false"))
    if node.step_index is not None:
        pairs.append(("step", str(node.step_index)))
    if node.commands:
        pairs.append(("cmd", LIST_SEPARATOR.join(node.commands)))
    if node.inputs:
        pairs.append(("inputs", LIST_SEPARATOR.join(node.inputs)))
    if node.expected_results:
        pairs.append(("expect", node.expected_results))
    kind_style = style.for_kind(node.kind) if style else {}
    for attr in STYLE_ATTRS:
        value = node.extras.get(attr, kind_style.get(attr))
        if value is not None:
            pairs.append((attr, value))
    for key in sorted(node.extras):
        if key not in STYLE_ATTRS:
            pairs.append((key, node.extras[key]))
    return pairs


def emit_dot(tree: ADTree) -> str:
    """Serialize a tree to DOT; deterministic, nodes and edges sorted."""
    lines = [f"digraph {_render_id(tree.name)} {{"]
    graph_attrs = dict(tree.graph_attrs)
    if tree.style is not None:
        graph_attrs["adtstyle"] = tree.style.to_attr()
    for key in sorted(graph_attrs):
        lines.append(f"  {_render_id(key)}={_quote(graph_attrs[key])};")
    for nid in sorted(tree.nodes):
        node = tree.nodes[nid]
        attrs = ", ".join(f"{name}={_quote(value)}" for name, value in _node_attr_pairs(node, tree.style))
        lines.append(f"  {_render_id(nid)} [{attrs}];")
    for p, c in sorted(tree.edges):
        lines.append(f"  {_render_id(p)} -> {_render_id(c)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
