import pytest
from hypothesis import given

from causalid.expr import (
    ONE,
    ExpressionSemanticError,
    ExpressionSyntaxError,
    Fraction,
    P,
    Probability,
    Product,
    Sum,
    Variable,
    parse,
    render_text,
)
from conftest import expressions


def test_starred_condition():
    e = parse("P(Y | ~X)")
    assert e == Probability((Variable("Y"),), (Variable("X", star=True),))


def test_counterfactual_outcome():
    e = parse("P(~Y @ ~X | X, Y)")
    y = Variable("Y", True, (Variable("X", True),))
    assert e == Probability((y,), (Variable("X"), Variable("Y")))


def test_one():
    assert parse("1") is ONE or parse("1") == ONE


def test_do_and_domain():
    e = parse("P^{pi1}[Smoking](Tar)")
    assert e == P("Tar", do=["Smoking"], domain="pi1")
    assert parse("P^pi1[Smoking](Tar)") == e
    assert parse("P^{pi*}(Tar)").domain == "pi*"


def test_juxtaposition_is_product():
    e = parse("P(A) P(B | A)")
    assert e == Product((P("A"), P("B", given=["A"])))


def test_nested_products_flatten():
    e = parse("P(A) (P(B) P(C))")
    assert isinstance(e, Product) and len(e.factors) == 3


def test_sum_and_fraction():
    e = parse("sum_{T} [ P(C | S, T) P(T | S) ]")
    assert isinstance(e, Sum) and e.ranges == ("T",)
    f = parse("frac[ P(Y, X) ][ P(X) ]")
    assert f == Fraction(P("Y", "X"), P("X"))


def test_multiple_interventions():
    e = parse("P(Y @ (X, ~Z))")
    assert e.outcomes[0].interventions == (Variable("X"), Variable("Z", True))


def test_whitespace_insignificant():
    assert parse("  P (  Y|X ) ") == parse("P(Y | X)")


@pytest.mark.parametrize(
    "text, offset",
    [("P(Y", 3), ("P(Y |)", 5), ("Q(Y)", 0), ("", 0), ("P(Y) )", 5), ("sum_{}[P(Y)]", 5)],
)
def test_syntax_error_offset(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_syntax_error_expected_set_at_factor():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("")
    assert {"P", "1", "("} <= set(info.value.expected)


def test_offset_is_in_bytes():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("P(\u00a0Y")  # a two-byte space before the failure point
    assert info.value.offset == 5


@pytest.mark.parametrize("text", ["P(Y, Y)", "P(Y | Y)", "P(Y | X, X)", "P[X, X](Y)"])
def test_semantic_duplicates(text):
    with pytest.raises(ExpressionSemanticError):
        parse(text)


def test_sum_over_unbound_name_rejected():
    with pytest.raises(ExpressionSemanticError):
        parse("sum_{Q} [ P(Y) ]")


@given(expressions)
def test_round_trip(e):
    assert parse(render_text(e)) == e
