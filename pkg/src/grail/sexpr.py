"""A small s-expression reader that keeps line/column positions."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError


class Sym(str):
    """An atom; a str that remembers where it was read."""

    line: int | None = None
    col: int | None = None

    def __new__(cls, text, line=None, col=None):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


@dataclass
class SList:
    items: list = field(default_factory=list)
    line: int | None = None
    col: int | None = None

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self):
        if self.items and isinstance(self.items[0], Sym):
            return str(self.items[0])
        return None


def _tokens(text: str):
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
        elif c.isspace():
            col, i = col + 1, i + 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            col, i = col + 1, i + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col, i = col + (j - i), j


def read_all(text: str) -> list:
    stack = [SList(line=1, col=1)]
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(SList(line=line, col=col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        else:
            stack[-1].items.append(Sym(tok, line, col))
    if len(stack) != 1:
        top = stack[-1]
        raise ParseError("unclosed '('", top.line, top.col)
    return stack[0].items


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one s-expression, found {len(items)}", 1, 1)
    return items[0]


def pos(node):
    return getattr(node, "line", None), getattr(node, "col", None)


def fail(node, message):
    line, col = pos(node)
    raise ParseError(message, line, col)


def expect_list(node, head=None, what="form") -> SList:
    if not isinstance(node, SList):
        fail(node, f"expected a {what}, found atom {node!s}")
    if head is not None and node.head != head:
        fail(node, f"expected ({head} ...), found ({node.head or ''} ...)")
    return node


def expect_sym(node, what="symbol") -> Sym:
    if not isinstance(node, Sym):
        fail(node, f"expected a {what}, found a list")
    return node


def dump(node) -> str:
    if isinstance(node, SList):
        return "(" + " ".join(dump(x) for x in node.items) + ")"
    return str(node)
