"""The ``.gman`` model format.

A file is a sequence of ``;``-terminated statements::

    # comments run to the end of the line
    coord x:0; coord p:1;
    let S:2 = 1/2*x*p*p;           # optional degree annotation is checked
    form omega = d(p)*d(x);        # d(x) (or D[x]) is the form generator of x
    field Q { x = p; }             # a graded vector field, one row per component
    lie { [e1,e2] = e3; }          # structure tables
    algebroid { rho[a,x] = 1; [a,b] = x*c; }
    courant { g[v,t] = 1; rho[v,x] = 1; f[a,b,c] = 1; }
    poisson { [x1,x2] = x3; }
    check master S omega;          # directives are recorded for the CLI

Identifiers must be declared coordinates or earlier bindings.  Every
diagnostic carries a line and column.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    ZERO,
    GradedError,
    GradingContext,
    Polynomial,
    degree_of,
    multiply,
)
from .derivations import GradedVectorField
from .forms import DoubledContext, as_form, doubled, to_base
from .structures import (
    AlgebroidStructure,
    Bivector,
    CourantStructure,
    LieStructure,
    StructureError,
)
from .symplectic import SymplecticForm, check_symplectic

__all__ = ["ParseError", "Model", "parse_source", "parse_expression"]


class ParseError(GradedError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<number>\d+)|(?P<ident>[^\W\d]\w*)"
    r"|(?P<punct>[;:=+\-*/^()\[\]{},])"
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


@dataclass
class Model:
    """Parsed declarations: the chart, named values, structures and directives."""

    context: GradingContext
    bindings: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)
    structures: dict = field(default_factory=dict)
    directives: list = field(default_factory=list)
    spans: dict = field(default_factory=dict)
    written_degrees: dict = field(default_factory=dict)

    @property
    def ctx(self) -> GradingContext:
        return self.context

    def get(self, name: str):
        if name not in self.bindings:
            raise KeyError(f"no binding named {name!r}")
        return self.bindings[name]

    def polynomial(self, name: str) -> Polynomial:
        value = self.get(name)
        if not isinstance(value, Polynomial):
            raise TypeError(f"{name!r} is not a polynomial")
        return value

    def symplectic(self, name: str) -> SymplecticForm:
        return check_symplectic(self.polynomial(name))

    def degree(self, name: str):
        """Degree of a binding; a value that normalizes to zero reports the
        degree its terms had as written, when that is unambiguous."""
        deg = degree_of(self.get(name))
        written = self.written_degrees.get(name, frozenset())
        if deg == ZERO and len(written) == 1:
            return next(iter(written))
        return deg

    def names_of_kind(self, kind: str) -> list[str]:
        return [n for n, k in self.kinds.items() if k == kind]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.model: Model
        self.declared: dict[str, int] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.kind in ("punct", "ident") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "number":
            self.error("expected an integer")
        return sign * int(self.advance().text)

    # driver

    def parse(self) -> Model:
        coords = self._prescan()
        self.chart = GradingContext(coords)
        self.D = doubled(self.chart)
        self.model = Model(self.chart)
        while self.tok.kind != "eof":
            self.statement()
        return self.model

    def _prescan(self) -> list:
        """Collect coordinate declarations so the chart is known up front."""
        coords, seen = [], {}
        i, toks = 0, self.tokens
        while i < len(toks):
            t = toks[i]
            at_start = i == 0 or toks[i - 1].text in (";", "}")
            if t.kind == "ident" and t.text == "coord" and at_start:
                j = i + 1
                while True:
                    if j + 2 >= len(toks) or toks[j].kind != "ident" or toks[j + 1].text != ":":
                        break
                    name = toks[j]
                    k = j + 2
                    sign = 1
                    if toks[k].text == "-":
                        sign, k = -1, k + 1
                    if toks[k].kind != "number":
                        break
                    if name.text in seen:
                        raise ParseError(f"coordinate {name.text!r} declared twice", name.line, name.column)
                    seen[name.text] = len(coords)
                    self.declared[name.text] = j
                    coords.append((name.text, sign * int(toks[k].text)))
                    j = k + 1
                    if toks[j].text != ",":
                        break
                    j += 1
                i = j
            else:
                i += 1
        return coords

    def statement(self):
        tok = self.tok
        if tok.kind != "ident":
            self.error(f"expected a statement, found {tok.text!r}")
        handler = {
            "coord": self.coord_stmt,
            "let": self.let_stmt,
            "form": self.form_stmt,
            "field": self.field_stmt,
            "lie": self.lie_stmt,
            "algebroid": self.algebroid_stmt,
            "courant": self.courant_stmt,
            "poisson": self.poisson_stmt,
            "check": self.check_stmt,
        }.get(tok.text)
        if handler is None:
            self.error(f"unknown statement {tok.text!r}")
        self.advance()
        handler(tok)

    # statements

    def coord_stmt(self, kw: Token):
        while True:
            self.ident()
            self.expect(":")
            self.integer()
            if not self.accept(","):
                break
        self.expect(";")

    def _new_name(self, tok: Token):
        if tok.text in self.chart or tok.text in self.model.bindings:
            self.error(f"{tok.text!r} is already declared", tok)

    def _bind(self, tok: Token, value, kind: str):
        self.model.bindings[tok.text] = value
        self.model.kinds[tok.text] = kind
        self.model.spans[tok.text] = (tok.line, tok.column)

    def let_stmt(self, kw: Token):
        name = self.ident()
        self._new_name(name)
        annotated = None
        if self.accept(":"):
            ann_tok = self.tok
            annotated = (self.integer(), ann_tok)
        self.expect("=")
        value = self._base_or_form(self.expr())
        written = self.last_degrees
        self.expect(";")
        if annotated is not None:
            deg = degree_of(value)
            if deg == ZERO and len(written) == 1:
                deg = next(iter(written))
            if deg != ZERO and deg != annotated[0]:
                self.error(f"{name.text!r} is annotated with degree {annotated[0]} but has degree {deg}", annotated[1])
        self._bind(name, value, "form" if isinstance(value.ctx, DoubledContext) else "polynomial")
        self.model.written_degrees[name.text] = written

    def form_stmt(self, kw: Token):
        name = self.ident()
        self._new_name(name)
        self.expect("=")
        value = self.expr()
        self.expect(";")
        self._bind(name, value, "form")
        self.model.written_degrees[name.text] = self.last_degrees

    def field_stmt(self, kw: Token):
        name = self.ident()
        self._new_name(name)
        self.expect("{")
        comps = {}
        while not self.accept("}"):
            coord = self.ident()
            self._coordinate(coord)
            if coord.text in comps:
                self.error(f"component {coord.text!r} given twice", coord)
            self.expect("=")
            comps[coord.text] = self._base(self.expr(), coord)
            self.expect(";")
        self.accept(";")
        try:
            X = GradedVectorField(self.chart, comps)
        except (GradedError, ValueError) as exc:
            self.error(str(exc), name)
        self._bind(name, X, "field")

    def check_stmt(self, kw: Token):
        words = []
        while not self.accept(";"):
            if self.tok.kind == "eof":
                self.error("expected ';'")
            words.append(self.advance().text)
        if not words:
            self.error("empty check directive", kw)
        self.model.directives.append((words[0], tuple(words[1:]), (kw.line, kw.column)))

    # structure tables

    def _rows(self):
        """``head? [a, b, ...] = expr;`` rows up to the closing brace."""
        self.expect("{")
        rows = []
        while not self.accept("}"):
            head = None
            if self.tok.kind == "ident":
                head = self.advance()
            open_tok = self.expect("[")
            args = [self.ident()]
            while self.accept(","):
                args.append(self.ident())
            self.expect("]")
            self.expect("=")
            value = self._base(self.expr(), open_tok)
            self.expect(";")
            rows.append((head, open_tok, args, value))
        self.accept(";")
        return rows

    def _coordinate(self, tok: Token):
        if tok.text not in self.chart or self.declared[tok.text] > self._index_of(tok):
            self.error(f"unknown identifier {tok.text!r}", tok)

    def _index_of(self, tok: Token) -> int:
        return self.tokens.index(tok)

    def _arity(self, head: Optional[Token], open_tok: Token, args, expected: int, what: str):
        if len(args) != expected:
            self.error(f"{what} takes {expected} arguments, got {len(args)}", open_tok)
        for a in args:
            self._coordinate(a)

    def _degree_is(self, tok: Token, deg: int, what: str):
        if self.chart.degree(tok.text) != deg:
            self.error(f"{what} {tok.text!r} must have degree {deg}", tok)

    def _on(self, value: Polynomial, names, tok: Token, what: str):
        if not value.variables() <= set(names):
            self.error(f"{what} may only involve {', '.join(names) or 'constants'}", tok)

    def _linear(self, value: Polynomial, basis: list[str], tok: Token, coeff_names=()):
        """Split ``sum c_b(x) b`` into ``{b: c_b}``; anything else is an error."""
        out = {}
        idx = [self.chart.index(b) for b in basis]
        for mono, c in value._terms.items():
            hits = [i for i in idx if mono[i]]
            if len(hits) != 1 or mono[hits[0]] != 1:
                self.error("bracket values must be linear in the fibre coordinates", tok)
            rest = tuple(0 if i == hits[0] else e for i, e in enumerate(mono))
            coeff = Polynomial(self.chart, {rest: c})
            self._on(coeff, coeff_names, tok, "bracket coefficients")
            name = self.chart.names[hits[0]]
            out[name] = out.get(name, self.chart.zero()) + coeff
        return out

    def _by_degree(self, deg: int) -> list[str]:
        return [n for n, d in self.chart.coords if d == deg]

    def lie_stmt(self, kw: Token):
        basis = self._by_degree(1)
        brackets = {}
        for head, open_tok, args, value in self._rows():
            if head is not None:
                self.error(f"unexpected {head.text!r} in a lie table", head)
            self._arity(head, open_tok, args, 2, "a Lie bracket")
            for a in args:
                self._degree_is(a, 1, "Lie algebra basis element")
            rhs = self._linear(value, basis, open_tok)
            key = (basis.index(args[0].text), basis.index(args[1].text))
            brackets[key] = {basis.index(b): c.constant_term() for b, c in rhs.items()}
        try:
            L = LieStructure.from_brackets(len(basis), brackets, tuple(basis))
        except StructureError as exc:
            self.error(str(exc), kw)
        self._structure(kw, "lie", L)

    def algebroid_stmt(self, kw: Token):
        base, fibers = self._by_degree(0), self._by_degree(1)
        base_ctx = GradingContext((n, 0) for n in base)
        anchor, bracket = {}, {}
        for head, open_tok, args, value in self._rows():
            if head is not None and head.text == "rho":
                self._arity(head, open_tok, args, 2, "rho")
                self._degree_is(args[0], 1, "anchor input")
                self._degree_is(args[1], 0, "anchor output")
                self._on(value, base, open_tok, "anchor entries")
                anchor[(fibers.index(args[0].text), base.index(args[1].text))] = value.transfer(base_ctx)
            elif head is None:
                self._arity(head, open_tok, args, 2, "an algebroid bracket")
                for a in args:
                    self._degree_is(a, 1, "fibre coordinate")
                rhs = self._linear(value, fibers, open_tok, base)
                a, b = (fibers.index(t.text) for t in args)
                for c, coeff in rhs.items():
                    v = coeff.transfer(base_ctx)
                    bracket[(a, b, fibers.index(c))] = v
                    bracket[(b, a, fibers.index(c))] = -v
            else:
                self.error(f"unexpected {head.text!r} in an algebroid table", head)
        try:
            A = AlgebroidStructure(tuple(base), tuple(fibers), anchor, bracket)
        except StructureError as exc:
            self.error(str(exc), kw)
        self._structure(kw, "algebroid", A)

    def courant_stmt(self, kw: Token):
        base, fibers, momenta = self._by_degree(0), self._by_degree(1), self._by_degree(2)
        if len(momenta) != len(base):
            self.error("a Courant chart pairs the i-th degree 2 coordinate with the i-th degree 0 one", kw)
        base_ctx = GradingContext((n, 0) for n in base)
        pairing, anchor, f = {}, {}, {}
        for head, open_tok, args, value in self._rows():
            label = head.text if head is not None else None
            self._on(value, base, open_tok, "Courant data")
            v = value.transfer(base_ctx)
            if label == "g":
                self._arity(head, open_tok, args, 2, "g")
                for a in args:
                    self._degree_is(a, 1, "pairing argument")
                pairing[tuple(fibers.index(a.text) for a in args)] = v
            elif label == "rho":
                self._arity(head, open_tok, args, 2, "rho")
                self._degree_is(args[0], 1, "anchor input")
                self._degree_is(args[1], 0, "anchor output")
                anchor[(fibers.index(args[0].text), base.index(args[1].text))] = v
            elif label == "f":
                self._arity(head, open_tok, args, 3, "f")
                for a in args:
                    self._degree_is(a, 1, "f argument")
                f[tuple(fibers.index(a.text) for a in args)] = v
            else:
                self.error("Courant rows are g[..], rho[..] or f[..]", head or open_tok)
        try:
            C = CourantStructure(tuple(base), tuple(fibers), pairing, anchor, f, tuple(momenta))
        except StructureError as exc:
            self.error(str(exc), kw)
        self._structure(kw, "courant", C)

    def poisson_stmt(self, kw: Token):
        base = self._by_degree(0)
        base_ctx = GradingContext((n, 0) for n in base)
        entries = {}
        for head, open_tok, args, value in self._rows():
            if head is not None and head.text != "pi":
                self.error(f"unexpected {head.text!r} in a poisson table", head)
            self._arity(head, open_tok, args, 2, "a bivector entry")
            for a in args:
                self._degree_is(a, 0, "bivector argument")
            self._on(value, base, open_tok, "bivector entries")
            entries[(args[0].text, args[1].text)] = value.transfer(base_ctx)
        try:
            pi = Bivector(base_ctx, entries)
        except StructureError as exc:
            self.error(str(exc), kw)
        self._structure(kw, "poisson", pi)

    def _structure(self, kw: Token, kind: str, value):
        if kind in self.model.structures:
            self.error(f"a second {kind} table", kw)
        self.model.structures[kind] = value
        self.model.spans[kind] = (kw.line, kw.column)

    # expressions, evaluated on the doubled chart

    def _base_or_form(self, value: Polynomial) -> Polynomial:
        try:
            return to_base(value)
        except GradedError:
            return value

    def _base(self, value: Polynomial, tok: Token) -> Polynomial:
        try:
            return to_base(value)
        except GradedError:
            self.error("a function is expected here, not a form", tok)

    def expr(self) -> Polynomial:
        value, degs = self.expr_with_degrees()
        self.last_degrees = degs
        return value

    def expr_with_degrees(self):
        """Value and the set of degrees of the terms as written."""
        value, degs = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "punct":
            op = self.advance().text
            rhs, rdegs = self.term()
            value = value + rhs if op == "+" else value - rhs
            degs = degs | rdegs
        return value, degs

    def term(self):
        value, degs = self.unary()
        while self.tok.kind == "punct" and self.tok.text in ("*", "/"):
            op = self.advance()
            rhs, rdegs = self.unary()
            if op.text == "*":
                value = multiply(value, rhs)
                degs = frozenset(a + b for a in degs for b in rdegs)
            else:
                if not rhs.is_constant() or not rhs:
                    self.error("division is only by nonzero rational constants", op)
                value = value.scale(1 / rhs.constant_term())
        return value, degs

    def unary(self):
        if self.accept("-"):
            value, degs = self.unary()
            return -value, degs
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base, degs = self.atom()
        if self.accept("^"):
            if self.tok.kind != "number":
                self.error("exponents are non-negative integers")
            e = int(self.advance().text)
            base = base ** e
            degs = frozenset(d * e for d in degs)
        return base, degs

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return self.D.const(int(tok.text)), frozenset({0})
        if self.accept("("):
            value, degs = self.expr_with_degrees()
            self.expect(")")
            return value, degs
        if tok.kind == "ident":
            self.advance()
            if tok.text == "d" and self.accept("("):
                target = self.ident()
                self.expect(")")
                return self._d_of(target), frozenset({self.chart.degree(target.text) + 1})
            if tok.text == "D" and self.accept("["):
                target = self.ident()
                self.expect("]")
                return self._d_of(target), frozenset({self.chart.degree(target.text) + 1})
            return self._lookup(tok)
        self.error(f"unexpected {tok.text or 'end of input'!r} in an expression")

    def _d_of(self, tok: Token) -> Polynomial:
        self._coordinate(tok)
        return self.D.d_gen(tok.text)

    def _lookup(self, tok: Token):
        if tok.text in self.model.bindings:
            value = self.model.bindings[tok.text]
            if not isinstance(value, Polynomial):
                self.error(f"{tok.text!r} is not a polynomial", tok)
            return as_form(value), self.model.written_degrees.get(tok.text, frozenset())
        self._coordinate(tok)
        return self.D.gen(tok.text), frozenset({self.chart.degree(tok.text)})


def parse_source(text: str) -> Model:
    return _Parser(text).parse()


def parse_expression(text: str, ctx: GradingContext) -> Polynomial:
    """Parse one expression over an existing chart (or its doubled chart)."""
    base = ctx.base if isinstance(ctx, DoubledContext) else ctx
    decl = "".join(f"coord {n}:{d};" for n, d in base.coords)
    model = parse_source(f"{decl} let __value = {text};")
    value = model.bindings["__value"]
    if isinstance(ctx, DoubledContext):
        return as_form(value)
    if isinstance(value.ctx, DoubledContext):
        raise ParseError("expected a function, found a form", 1, 1)
    return value
