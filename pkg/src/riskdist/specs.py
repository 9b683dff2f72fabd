"""Parsers for distribution and distortion spec strings.

    normal(mu,sigma)  lognormal(mu,sigma)  student(nu)  laplace(loc,scale)
    logistic(loc,scale)  uniform(a,b)  empirical(@path.csv)

    identity  var(p)  tvar(p)  wang(p)  dual(<g>)  mix(c1,<g1>,c2,<g2>)
    pwl(q1:v1,q2:v2,...)

Numeric arguments accept small expressions: 2^0.5, -1/3, sqrt(2), ln(2), exp(1), pi.
"""

from __future__ import annotations

import math
import re

from .distortion import (IDENTITY, Distortion, Mixture, PiecewiseLinear, TVaRCap, VaRIndicator, WangTransform,
                         dual)
from .distributions import (Distribution, Laplace, Logistic, LogNormal, Normal, StudentT, Uniform,
                            load_empirical_csv)
from .errors import SpecParseError

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<path>@[^)]*)
    | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
    | (?P<op>[-+*/^(),:])
    )""", re.VERBOSE)

_FUNCS = {"sqrt": math.sqrt, "ln": math.log, "log": math.log, "exp": math.exp}
_CONSTS = {"pi": math.pi}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecParseError("unexpected character", text[pos:pos + 1])
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "<end>")

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            raise SpecParseError(f"expected {want!r} in {self.text!r}", tok[1])
        self.i += 1
        return tok

    def done(self):
        if self.i != len(self.tokens):
            raise SpecParseError(f"trailing input in {self.text!r}", self.peek()[1])

    # arithmetic ------------------------------------------------------------
    def number(self) -> float:
        value = self.expr()
        if not math.isfinite(value):
            raise SpecParseError("number is not finite", repr(value))
        return value

    def expr(self) -> float:
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.factor()
            if op == "/" and rhs == 0.0:
                raise SpecParseError("division by zero", "/")
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> float:
        base = self.unary()
        if self.peek()[1] == "^":
            self.take("^")
            return base ** self.factor()
        return base

    def unary(self) -> float:
        if self.peek()[1] in ("-", "+"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
            return sign * self.unary()
        return self.primary()

    def primary(self) -> float:
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return float(value)
        if value == "(":
            self.take("(")
            out = self.expr()
            self.take(")")
            return out
        if kind == "name" and value in _CONSTS:
            self.take()
            return _CONSTS[value]
        if kind == "name" and value in _FUNCS:
            self.take()
            self.take("(")
            arg = self.expr()
            self.take(")")
            try:
                return _FUNCS[value](arg)
            except ValueError:
                raise SpecParseError(f"{value} undefined at {arg!r}", value) from None
        raise SpecParseError(f"expected a number in {self.text!r}", value)

    def args(self, count: int) -> list[float]:
        self.take("(")
        out = [self.number()]
        for _ in range(count - 1):
            self.take(",")
            out.append(self.number())
        self.take(")")
        return out

    # distributions -----------------------------------------------------------
    def distribution(self) -> Distribution:
        _, name = self.take(kind="name")
        key = name.lower()
        families = {"normal": (Normal, 2), "lognormal": (LogNormal, 2), "student": (StudentT, 1),
                    "laplace": (Laplace, 2), "logistic": (Logistic, 2), "uniform": (Uniform, 2)}
        if key == "empirical":
            self.take("(")
            _, path = self.take(kind="path")
            self.take(")")
            path = path[1:].strip()
            if not path:
                raise SpecParseError("empty path", "@")
            try:
                return load_empirical_csv(path)
            except OSError as exc:
                raise SpecParseError(f"cannot read empirical file ({exc.strerror})", path) from None
        if key not in families:
            raise SpecParseError("unknown distribution", name)
        cls, count = families[key]
        values = self.args(count)
        try:
            return cls(*values)
        except ValueError as exc:
            raise SpecParseError(f"invalid parameters for {key}: {exc}", name) from None

    # distortions ---------------------------------------------------------------
    def distortion(self) -> Distortion:
        _, name = self.take(kind="name")
        key = name.lower()
        try:
            if key == "identity":
                return IDENTITY
            if key in ("var", "tvar", "wang"):
                (p,) = self.args(1)
                return {"var": VaRIndicator, "tvar": TVaRCap, "wang": WangTransform}[key](p)
            if key == "dual":
                self.take("(")
                inner = self.distortion()
                self.take(")")
                return dual(inner)
            if key == "mix":
                self.take("(")
                c1 = self.number()
                self.take(",")
                g1 = self.distortion()
                self.take(",")
                c2 = self.number()
                self.take(",")
                g2 = self.distortion()
                self.take(")")
                return Mixture(c1, g1, c2, g2)
            if key == "pwl":
                return self.pwl()
        except ValueError as exc:
            if isinstance(exc, SpecParseError):
                raise
            raise SpecParseError(f"invalid {key} distortion: {exc}", name) from None
        raise SpecParseError("unknown distortion", name)

    def pwl(self) -> PiecewiseLinear:
        self.take("(")
        knots = []
        while True:
            q = self.number()
            self.take(":")
            v = self.number()
            knots.append((q, v))
            if self.peek()[1] == ")":
                break
            self.take(",")
        self.take(")")
        if knots[0] != (0.0, 0.0):
            knots.insert(0, (0.0, 0.0))
        if knots[-1] != (1.0, 1.0):
            knots.append((1.0, 1.0))
        return PiecewiseLinear(tuple(knots))


def parse_distribution(text: str) -> Distribution:
    p = _Parser(text)
    out = p.distribution()
    p.done()
    return out


def parse_distortion(text: str) -> Distortion:
    p = _Parser(text)
    out = p.distortion()
    p.done()
    return out
