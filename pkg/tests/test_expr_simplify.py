import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalid.expr import (
    ONE,
    Fraction,
    P,
    Product,
    canonicalize,
    equal_modulo_commutativity,
    evaluate,
    free_variables,
    parse,
    simplify,
)
from reference import NAMES, random_expression, random_tables


def test_drop_one():
    assert simplify(Product((P("Y"), ONE))) == P("Y")


def test_identical_fraction():
    assert simplify(Fraction(P("Y", "X"), P("Y", "X"))) == ONE


def test_cancel_common_factor():
    e = Fraction(Product((P("Y", given=["X"]), P("X"))), P("X"))
    assert simplify(e) == P("Y", given=["X"])


@pytest.mark.parametrize("seed", range(100))
def test_cancel_preserves_value(seed):
    e = Fraction(Product((P("Y", given=["X"]), P("X"))), P("X"))
    table = random_tables(np.random.default_rng(seed), ["X", "Y"], {"X": 3, "Y": 2})
    a, b = evaluate(e, table), evaluate(simplify(e), table)
    assert np.allclose(a.aligned(["X", "Y"]), b.aligned(["X", "Y"]), atol=1e-12, rtol=0)


def test_free_variables():
    assert free_variables(P("Y", given=["X"])) == {"X", "Y"}
    assert free_variables(parse("sum_{T} [ P(C | S, T) P(T | S) ]")) == {"C", "S"}
    assert free_variables(ONE) == frozenset()


def test_bound_variable_not_cancelled_away():
    e = parse("sum_{X} [ frac[ P(Y | X) P(X) ][ P(X) ] ]")
    s = simplify(e)
    assert free_variables(s) <= free_variables(e)


def test_modulo_commutativity():
    a = parse("sum_{Tar} [ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]")
    b = parse("sum_{Tar} [ P(Tar | Smoking) P(Cancer | Tar, Smoking) ]")
    assert a != b
    assert equal_modulo_commutativity(a, b)
    assert not equal_modulo_commutativity(a, parse("sum_{Tar} [ P(Cancer | Smoking) P(Tar | Smoking) ]"))
    assert canonicalize(a) == canonicalize(b)


@given(st.randoms(use_true_random=False), st.integers(0, 2**31))
def test_simplify_preserves_semantics(r, seed):
    e = random_expression(r, 4, plain=True)
    table = random_tables(np.random.default_rng(seed), NAMES)
    before, after = evaluate(e, table), evaluate(simplify(e), table)
    names = sorted(set(before.variables) | set(after.variables))
    cards = {n: 2 for n in names}
    assert np.allclose(
        before.expand(names, cards).aligned(names), after.expand(names, cards).aligned(names), atol=1e-12, rtol=1e-12
    )
    assert free_variables(simplify(e)) <= free_variables(e)


def test_simplify_idempotent_on_samples():
    rng = random.Random(4)
    for _ in range(200):
        e = random_expression(rng, 5)
        once = simplify(e)
        assert simplify(once) == once
