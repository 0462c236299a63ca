from causalid.expr import ONE, P, Probability, Product, Sum, Variable, parse, render_latex, render_text

SMOKING_ESTIMAND = Sum(("Tar",), Product((P("Cancer", given=["Smoking", "Tar"]), P("Tar", given=["Smoking"]))))


def test_text_do_star():
    e = Probability((Variable("Y"), Variable("Z")), do=(Variable("X", True),))
    assert render_text(e) == "P[~X](Y, Z)"


def test_text_one():
    assert render_text(ONE) == "1"


def test_text_smoking_estimand():
    assert render_text(SMOKING_ESTIMAND) == "sum_{Tar} [ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]"


def test_text_fraction_and_domain():
    e = P("Y", do=["X"], domain="pi1") / P("X")
    assert render_text(e) == "frac[ P^{pi1}[X](Y) ][ P(X) ]"


def test_text_counterfactual():
    assert render_text(parse("P(~Y @ ~X | X, Y)")) == "P(~Y @ ~X | X, Y)"
    assert render_text(parse("P(Y @ (X, ~Z))")) == "P(Y @ (X, ~Z))"


def test_text_preserves_insertion_order():
    assert render_text(P("B", "A", given=["D", "C"])) == "P(B, A | D, C)"


def test_latex_do_star():
    e = Probability((Variable("Y"), Variable("Z")), do=(Variable("X", True),))
    assert render_latex(e) == "P_{do(X=x^*)}(Y, Z)"


def test_latex_one():
    assert render_latex(ONE) == "1"


def test_latex_two_source_estimand():
    e = parse("sum_{Tar} [ P^{pi*}(Cancer | Smoking, Tar) P^{pi1}[Smoking](Tar) ]")
    assert render_latex(e) == r"\sum_{Tar} P^{\pi^{*}}(Cancer \mid Smoking, Tar) P^{\pi_{1}}_{Smoking}(Tar)"


def test_latex_fraction_and_sum_factor():
    e = parse("frac[ P(Y, X) ][ sum_{Y} [ P(Y, X) ] ]")
    assert render_latex(e) == r"\frac{P(Y, X)}{\sum_{Y} P(Y, X)}"
    wrapped = parse("P(A) sum_{B} [ P(B, A) ]")
    assert render_latex(wrapped) == r"P(A) \left(\sum_{B} P(B, A)\right)"


def test_latex_braces_balance():
    e = parse("sum_{A,B} [ P^{target}[~X](A, B @ ~X | C) frac[ P(C) ][ P(D | C) ] ]")
    text = render_latex(e)
    assert text.count("{") == text.count("}")
    assert text.count("(") == text.count(")")
