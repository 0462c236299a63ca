"""Canonical text and LaTeX renderings of expressions."""

from __future__ import annotations

import re
from functools import singledispatch

from .nodes import Expression, Fraction, One, Probability, Product, Sum, Variable

__all__ = ["render_text", "render_latex"]

_GREEK = (
    "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu nu xi "
    "pi rho sigma tau upsilon phi chi psi omega"
).split()
_GREEK_LABEL = re.compile(rf"({'|'.join(_GREEK)})_?(\d*)(\*?)\Z", re.IGNORECASE)


def _ref_text(v: Variable) -> str:
    return ("~" if v.star else "") + v.name


def _event_text(v: Variable) -> str:
    text = _ref_text(v)
    if not v.interventions:
        return text
    if len(v.interventions) == 1:
        return f"{text} @ {_ref_text(v.interventions[0])}"
    return f"{text} @ ({', '.join(_ref_text(i) for i in v.interventions)})"


@singledispatch
def render_text(e: Expression) -> str:
    """Render ``e`` in the DSL's canonical text form (inverse of :func:`parse`)."""
    raise TypeError(f"can not render {type(e).__name__}")


@render_text.register
def _(e: Probability) -> str:
    head = "P"
    if e.domain is not None:
        head += "^{" + e.domain + "}"
    if e.do:
        head += "[" + ", ".join(_ref_text(v) for v in e.do) + "]"
    body = ", ".join(_event_text(v) for v in e.outcomes)
    if e.conditions:
        body += " | " + ", ".join(_event_text(v) for v in e.conditions)
    return f"{head}({body})"


@render_text.register
def _(e: Sum) -> str:
    return f"sum_{{{','.join(e.ranges)}}} [ {render_text(e.body)} ]"


@render_text.register
def _(e: Product) -> str:
    return " ".join(render_text(f) for f in e.factors)


@render_text.register
def _(e: Fraction) -> str:
    return f"frac[ {render_text(e.numerator)} ][ {render_text(e.denominator)} ]"


@render_text.register
def _(e: One) -> str:
    return "1"


def _domain_latex(label: str) -> str:
    match = _GREEK_LABEL.match(label)
    if match is None:
        return r"\text{" + label.replace("_", r"\_") + "}"
    letter, digits, star = match.groups()
    out = "\\" + letter.lower()
    if digits:
        out += "_{" + digits + "}"
    if star:
        out += "^{*}"
    return out


def _value_latex(v: Variable) -> str:
    return f"{v.name}={v.name.lower()}^*"


def _interventions_latex(vs: tuple[Variable, ...]) -> str:
    if any(v.star for v in vs):
        return "do(" + ", ".join(_value_latex(v) if v.star else v.name for v in vs) + ")"
    return ", ".join(v.name for v in vs)


def _event_latex(v: Variable) -> str:
    text = v.name
    if v.interventions:
        text += "_{" + _interventions_latex(v.interventions) + "}"
    if v.star:
        text += f"={v.name.lower()}^*"
    return text


@singledispatch
def render_latex(e: Expression) -> str:
    """Render ``e`` as a math-mode LaTeX string."""
    raise TypeError(f"can not render {type(e).__name__}")


@render_latex.register
def _(e: Probability) -> str:
    head = "P"
    if e.domain is not None:
        head += "^{" + _domain_latex(e.domain) + "}"
    if e.do:
        head += "_{" + _interventions_latex(e.do) + "}"
    body = ", ".join(_event_latex(v) for v in e.outcomes)
    if e.conditions:
        body += r" \mid " + ", ".join(_event_latex(v) for v in e.conditions)
    return f"{head}({body})"


@render_latex.register
def _(e: Sum) -> str:
    return r"\sum_{" + ", ".join(e.ranges) + "} " + render_latex(e.body)


@render_latex.register
def _(e: Product) -> str:
    parts = []
    for f in e.factors:
        text = render_latex(f)
        # a bare sum would swallow the factors to its right
        parts.append(rf"\left({text}\right)" if isinstance(f, Sum) else text)
    return " ".join(parts)


@render_latex.register
def _(e: Fraction) -> str:
    return r"\frac{" + render_latex(e.numerator) + "}{" + render_latex(e.denominator) + "}"


@render_latex.register
def _(e: One) -> str:
    return "1"
