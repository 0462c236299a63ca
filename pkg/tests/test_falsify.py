import numpy as np
import pytest
from scipy import stats

from causalid.falsify import (
    Column,
    DataError,
    Dataset,
    adjust_pvalues,
    falsify_report,
    load_csv,
    test_independence as run_test,
)
from causalid.graph import parse_graph
from causalid.oracle import sample
from causalid.separation import CiStatement
from reference import chain_scm


def continuous(**columns):
    names = list(columns)
    rows = list(zip(*(np.asarray(columns[n], dtype=float).tolist() for n in names)))
    return Dataset(tuple(Column(n, "continuous") for n in names), rows)


def categorical(**columns):
    names = list(columns)
    rows = list(zip(*(list(map(str, columns[n])) for n in names)))
    return Dataset(tuple(Column(n, "categorical") for n in names), rows)


def ci(x, y, *given):
    return CiStatement({x}, {y}, set(given))


class TestLoadCsv:
    def test_numeric_columns(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("A,B,C\n1,2.5,3\n4,5,-6e-1\n")
        d = load_csv(path)
        assert [c.kind for c in d.columns] == ["continuous"] * 3
        assert d.rows[1] == (4.0, 5.0, -0.6)

    def test_strings_are_categorical(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text('A,B\n1,"x, quoted"\n2,y\n')
        d = load_csv(path)
        assert d.kind("A") == "continuous" and d.kind("B") == "categorical"
        assert d.rows[0][1] == "x, quoted"

    def test_override(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("A,B\n0,1\n1,0\n")
        d = load_csv(path, {"A": "categorical"})
        assert d.kind("A") == "categorical" and d.rows[0][0] == "0"
        with pytest.raises(DataError, match="unknown"):
            load_csv(path, {"Q": "categorical"})

    def test_header_only(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("A,B\n")
        with pytest.raises(DataError, match="no data rows"):
            load_csv(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(DataError, match="empty"):
            load_csv(path)

    def test_ragged_row_reported(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("A,B\n1,2\n3\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(path)

    def test_round_trip(self, tmp_path):
        d = categorical(A=["a", "b"], B=["1", "2"])
        d.to_csv(tmp_path / "out.csv")
        assert load_csv(tmp_path / "out.csv", {"B": "categorical"}) == d


def _reference_fisher(data, x, y, given):
    cols = [x, y, *given]
    precision = np.linalg.inv(np.cov(np.column_stack([data[c] for c in cols]), rowvar=False))
    r = -precision[0, 1] / np.sqrt(precision[0, 0] * precision[1, 1])
    n = len(data[x])
    z = np.sqrt(n - len(given) - 3) * np.arctanh(r)
    return 2 * stats.norm.sf(abs(z))


@pytest.mark.parametrize("seed", range(10))
def test_fisher_z_matches_precision_matrix(seed):
    rng = np.random.default_rng(seed)
    n = 300
    z1, z2 = rng.normal(size=n), rng.normal(size=n)
    x = z1 + rng.normal(size=n)
    y = 0.2 * x + z1 - z2 + rng.normal(size=n)
    data = {"X": x, "Y": y, "Z1": z1, "Z2": z2}
    d = continuous(**data)
    for given in [(), ("Z1",), ("Z1", "Z2")]:
        got = run_test(d, ci("X", "Y", *given), "fisher_z").p_value
        assert got == pytest.approx(_reference_fisher(data, "X", "Y", given), abs=1e-6)


def _reference_g(x, y, z):
    g, dof = 0.0, 0
    for stratum in np.unique(z) if z is not None else [None]:
        mask = np.ones(len(x), bool) if stratum is None else z == stratum
        table = np.zeros((x.max() + 1, y.max() + 1))
        np.add.at(table, (x[mask], y[mask]), 1)
        stat, _, d, _ = stats.chi2_contingency(table, correction=False, lambda_="log-likelihood")
        g += stat
        dof += d
    return g, dof, stats.chi2.sf(g, dof)


@pytest.mark.parametrize("seed", range(10))
def test_g_test_matches_contingency(seed):
    rng = np.random.default_rng(seed)
    n = 2000
    z = rng.integers(0, 2, n)
    x = (rng.random(n) < 0.3 + 0.4 * z).astype(int) + rng.integers(0, 2, n)
    y = (rng.random(n) < 0.5 + 0.2 * z).astype(int)
    d = categorical(X=x, Y=y, Z=z)
    result = run_test(d, ci("X", "Y"), "g_test")
    g, dof, p = _reference_g(x, y, None)
    assert result.statistic == pytest.approx(g, rel=1e-9) and result.dof == dof
    assert result.p_value == pytest.approx(p, abs=1e-6)
    conditional = run_test(d, ci("X", "Y", "Z"), "g_test")
    g, dof, p = _reference_g(x, y, z)
    assert conditional.statistic == pytest.approx(g, rel=1e-9) and conditional.dof == dof
    assert conditional.p_value == pytest.approx(p, abs=1e-6)


def test_perfect_dependence():
    x = np.random.default_rng(0).normal(size=200)
    result = run_test(continuous(X=x, Y=x), ci("X", "Y"))
    assert result.p_value < 1e-6


def test_calibration_under_independence():
    alpha, sims = 0.05, 200
    rejections = 0
    for seed in range(sims):
        rng = np.random.default_rng(seed)
        d = continuous(X=rng.normal(size=5000), Y=rng.normal(size=5000))
        rejections += run_test(d, ci("X", "Y")).p_value < alpha
    band = 3 * np.sqrt(alpha * (1 - alpha) / sims)
    assert abs(rejections / sims - alpha) <= band


def test_conditioning_on_a_copy():
    not_rejected = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=500)
        z = x + rng.normal(size=500)
        d = continuous(X=x, Y=z.copy(), Z=z)
        not_rejected += run_test(d, ci("X", "Y", "Z")).p_value >= 0.05
    assert not_rejected >= 45


def test_symmetry():
    rng = np.random.default_rng(3)
    x = rng.normal(size=400)
    d = continuous(X=x, Y=x + rng.normal(size=400), Z=rng.normal(size=400))
    assert run_test(d, ci("X", "Y", "Z")).p_value == pytest.approx(run_test(d, ci("Y", "X", "Z")).p_value)
    c = categorical(X=rng.integers(0, 3, 400), Y=rng.integers(0, 2, 400))
    assert run_test(c, ci("X", "Y")).p_value == pytest.approx(run_test(c, ci("Y", "X")).p_value)


def test_errors():
    rng = np.random.default_rng(0)
    d = continuous(X=rng.normal(size=4), Y=rng.normal(size=4), Z=rng.normal(size=4))
    with pytest.raises(DataError, match="rows"):
        run_test(d, ci("X", "Y", "Z"))
    flat = continuous(X=np.ones(20), Y=rng.normal(size=20))
    with pytest.raises(DataError, match="variance"):
        run_test(flat, ci("X", "Y"))
    mixed = Dataset((Column("X", "continuous"), Column("Y", "categorical")), [(1.0, "a"), (2.0, "b")])
    with pytest.raises(DataError, match="mixes"):
        run_test(mixed, ci("X", "Y"))
    with pytest.raises(DataError):
        run_test(categorical(X=[0, 1], Y=[1, 0]), ci("X", "Y"), "fisher_z")
    with pytest.raises(DataError):
        Dataset((Column("X", "continuous"),), [])
    with pytest.raises(DataError):
        Dataset((Column("X", "continuous"),), [(1.0, 2.0)])


def test_adjustments():
    p = [0.01, 0.04, 0.03, 0.2]
    bonferroni = adjust_pvalues(p, "bonferroni")
    assert bonferroni == pytest.approx([min(1, 4 * q) for q in p])
    holm = adjust_pvalues(p, "holm")
    ranked = sorted(range(len(p)), key=p.__getitem__)
    assert [holm[i] for i in ranked] == sorted(holm[i] for i in ranked)
    assert all(a >= q for a, q in zip(holm, p))
    assert adjust_pvalues(p, "none") == p
    with pytest.raises(ValueError):
        adjust_pvalues(p, "fdr")


def _chain_data(seed, n=1000):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    z = x + rng.normal(size=n)
    y = z + rng.normal(size=n)
    return continuous(X=x, Z=z, Y=y)


def test_report_chain():
    d = _chain_data(0)
    report = falsify_report(parse_graph("X -> Z\nZ -> Y"), d)
    assert report.n_tests == 1 and report.verdict == "CONSISTENT"
    r = report.results[0]
    assert r.adjusted_p >= r.p_value and r.rejected == (r.adjusted_p < 0.05)
    wrong = falsify_report(parse_graph("X\nY\nZ"), d, correction="bonferroni")
    assert wrong.verdict == "FALSIFIED"
    data = wrong.to_json()
    assert data["n_tests"] == 3 and data["verdict"] == "FALSIFIED" and not data["vacuous"]
    assert "verdict: FALSIFIED" in wrong.to_text()


def test_report_vacuous():
    report = falsify_report(parse_graph("X -> Z\nZ -> Y\nX -> Y"), _chain_data(1))
    assert report.verdict == "CONSISTENT" and report.to_json()["vacuous"]
    assert "vacuously consistent" in report.to_text()


def test_report_errors():
    with pytest.raises(DataError, match="missing"):
        falsify_report(parse_graph("X -> Q"), _chain_data(2))
    with pytest.raises(ValueError):
        falsify_report(parse_graph("X -> Z"), _chain_data(2), alpha=1.5)


def test_chain_report_calibration():
    # rejection frequency of the single implied test on the true chain
    alpha, sims = 0.05, 200
    m, graph = chain_scm(), parse_graph("X -> Z\nZ -> Y")
    rejected = sum(falsify_report(graph, sample(m, 5000, seed), alpha).falsified for seed in range(sims))
    assert abs(rejected / sims - alpha) <= 3 * np.sqrt(alpha * (1 - alpha) / sims)
