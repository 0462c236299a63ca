"""Recursive-descent parser for the expression DSL.

Grammar::

    expr     := factor { factor }
    factor   := prob | sum | frac | "1" | "(" expr ")"
    sum      := "sum_{" ident {"," ident} "}" "[" expr "]"
    frac     := "frac[" expr "][" expr "]"
    prob     := "P" ["^" domain] ["[" ref {"," ref} "]"] "(" ev {"," ev} ["|" ev {"," ev}] ")"
    domain   := label | "{" label "}"          label := ident ["*"]
    ev       := ref ["@" (ref | "(" ref {"," ref} ")")]
    ref      := ["~"] ident
"""

from __future__ import annotations

import re

from .nodes import ONE, Expression, Fraction, Probability, Product, Sum, Variable

__all__ = ["parse", "ExpressionSyntaxError", "ExpressionSemanticError"]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_FACTOR_START = frozenset({"P", "sum_{", "frac[", "1", "("})


class ExpressionSyntaxError(ValueError):
    def __init__(self, text: str, position: int, expected: frozenset[str]):
        self.offset = len(text[:position].encode("utf-8"))
        self.expected = expected
        found = repr(text[position]) if position < len(text) else "end of input"
        choices = ", ".join(repr(e) for e in sorted(expected))
        super().__init__(f"at offset {self.offset}: expected one of {choices}, found {found}")


class ExpressionSemanticError(ValueError):
    def __init__(self, text: str, position: int, message: str):
        self.offset = len(text[:position].encode("utf-8"))
        super().__init__(f"at offset {self.offset}: {message}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            self.fail({token})

    def fail(self, expected) -> None:
        raise ExpressionSyntaxError(self.text, self.pos, frozenset(expected))

    def ident(self) -> str:
        self.skip()
        match = _IDENT.match(self.text, self.pos)
        if match is None:
            self.fail({"identifier"})
        self.pos = match.end()
        return match.group()

    def at_factor(self) -> bool:
        self.skip()
        rest = self.text[self.pos :]
        if rest.startswith(("sum_{", "frac[", "1", "(")):
            return True
        if rest.startswith("P"):
            return rest[1:].lstrip()[:1] in ("^", "[", "(")
        return False

    # grammar rules

    def expr(self) -> Expression:
        factors = [self.factor()]
        while self.at_factor():
            factors.append(self.factor())
        flat: list[Expression] = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        return flat[0] if len(flat) == 1 else Product(tuple(flat))

    def factor(self) -> Expression:
        self.skip()
        start = self.pos
        if self.accept("sum_{"):
            ranges = [self.ident()]
            while self.accept(","):
                ranges.append(self.ident())
            self.expect("}")
            self.expect("[")
            body = self.expr()
            self.expect("]")
            return self.build(start, Sum, tuple(ranges), body)
        if self.accept("frac["):
            numerator = self.expr()
            self.expect("]")
            self.expect("[")
            denominator = self.expr()
            self.expect("]")
            return Fraction(numerator, denominator)
        if self.accept("1"):
            return ONE
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at_factor():
            return self.prob()
        self.fail(_FACTOR_START)

    def prob(self) -> Probability:
        start = self.pos
        self.expect("P")
        domain = None
        if self.accept("^"):
            braced = self.accept("{")
            domain = self.ident()
            if self.text.startswith("*", self.pos):
                self.pos += 1
                domain += "*"
            if braced:
                self.expect("}")
        do: list[Variable] = []
        if self.accept("["):
            do.append(self.ref())
            while self.accept(","):
                do.append(self.ref())
            self.expect("]")
        self.expect("(")
        outcomes = [self.event()]
        while self.accept(","):
            outcomes.append(self.event())
        conditions: list[Variable] = []
        if self.accept("|"):
            conditions.append(self.event())
            while self.accept(","):
                conditions.append(self.event())
        if not self.peek(")"):
            self.fail({",", "|", ")"} if not conditions else {",", ")"})
        self.pos += 1
        return self.build(start, Probability, tuple(outcomes), tuple(conditions), tuple(do), domain)

    def event(self) -> Variable:
        base = self.ref()
        if not self.accept("@"):
            return base
        if self.accept("("):
            interventions = [self.ref()]
            while self.accept(","):
                interventions.append(self.ref())
            self.expect(")")
        else:
            interventions = [self.ref()]
        return Variable(base.name, base.star, tuple(interventions))

    def ref(self) -> Variable:
        star = self.accept("~")
        return Variable(self.ident(), star)

    def build(self, start: int, cls, *args):
        try:
            return cls(*args)
        except ValueError as exc:
            raise ExpressionSemanticError(self.text, start, str(exc)) from None


def parse(text: str) -> Expression:
    """Parse DSL text such as ``P(Y | ~X)`` into an expression tree."""
    parser = _Parser(text)
    result = parser.expr()
    parser.skip()
    if parser.pos != len(text):
        parser.fail(_FACTOR_START | {"end of input"})
    return result
