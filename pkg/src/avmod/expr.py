"""Tiny parser for the call-style expression languages used on the command line.

Grammar::

    expr   := NAME [ '(' [ arg (',' arg)* ] ')' ]
    arg    := expr | number | '[' [ number (',' number)* ] ']'
    number := ['-'] INT [ '/' INT ]

Examples: ``hwc(tensor(ext(1,2),ext(1,2)),[2,0])``, ``charged(laurent(t),1/2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass
class Call:
    name: str
    args: list = field(default_factory=list)
    pos: int = 0
    bare: bool = False   # written without parentheses

    def to_text(self) -> str:
        if self.bare:
            return self.name
        return f"{self.name}({','.join(_arg_text(a) for a in self.args)})"


def _arg_text(a) -> str:
    if isinstance(a, Call):
        return a.to_text()
    if isinstance(a, list):
        return "[" + ",".join(str(x) for x in a) + "]"
    return str(a)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9\-]*)|(?P<sym>[(),\[\]/\-]))")


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        start = m.start(m.lastgroup)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self) -> Call:
        _, name, pos = self.take("name")
        if self.peek()[1] != "(":
            return Call(name, [], pos, bare=True)
        self.take("sym", "(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.arg())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.arg())
        self.take("sym", ")")
        return Call(name, args, pos)

    def number(self) -> Fraction:
        neg = False
        if self.peek()[1] == "-":
            self.take()
            neg = True
        _, a, _ = self.take("num")
        val = Fraction(int(a))
        if self.peek()[1] == "/":
            self.take()
            _, b, pos = self.take("num")
            if int(b) == 0:
                raise ParseError("zero denominator", self.text, pos)
            val = Fraction(int(a), int(b))
        return -val if neg else val

    def arg(self):
        kind, val, _ = self.peek()
        if kind == "name":
            return self.expr()
        if val == "[":
            self.take()
            items = []
            if self.peek()[1] != "]":
                items.append(self.number())
                while self.peek()[1] == ",":
                    self.take()
                    items.append(self.number())
            self.take("sym", "]")
            return items
        return self.number()


def parse(text: str) -> Call:
    p = _Parser(text)
    out = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"trailing input {tok[1]!r}", text, tok[2])
    return out


def need(call: Call, text: str, count: int | tuple):
    counts = (count,) if isinstance(count, int) else count
    if len(call.args) not in counts:
        raise ParseError(f"{call.name} takes {' or '.join(map(str, counts))} arguments", text, call.pos)


def as_int(x, call: Call, text: str) -> int:
    if not isinstance(x, Fraction) or x.denominator != 1:
        raise ParseError(f"{call.name} needs an integer argument", text, call.pos)
    return int(x)
