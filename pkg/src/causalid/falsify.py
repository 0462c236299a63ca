"""Test a graph's implied conditional independencies against tabular data."""

from __future__ import annotations

import csv
import enum
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .graph import Admg
from .separation import CiStatement, implied_independencies

__all__ = [
    "Column",
    "Dataset",
    "DataError",
    "CiTestResult",
    "FalsificationReport",
    "load_csv",
    "test_independence",
    "falsify_report",
    "adjust_pvalues",
]

KINDS = ("categorical", "continuous")


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Column:
    name: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.rows:
            raise DataError("dataset has no rows")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column name")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise DataError(f"row {i} has {len(row)} values, expected {len(self.columns)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def __len__(self) -> int:
        return len(self.rows)

    def kind(self, name: str) -> str:
        return self.columns[self._index(name)].kind

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        i = self._index(name)
        values = [row[i] for row in self.rows]
        if self.columns[i].kind == "continuous":
            return np.asarray(values, dtype=float)
        return np.asarray(values, dtype=object)

    def codes(self, name: str) -> tuple[np.ndarray, int]:
        """Integer codes of a categorical column and its alphabet size."""
        _, codes = np.unique(self.column(name).astype(str), return_inverse=True)
        return codes.ravel(), int(codes.max()) + 1

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(self.names)
            writer.writerows(self.rows)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, kind_overrides: Mapping[str, str] | None = None) -> Dataset:
    """Read a header-row CSV, inferring all-numeric columns as continuous."""
    kind_overrides = dict(kind_overrides or {})
    with open(path, encoding="utf-8", newline="") as handle:
        records = list(csv.reader(handle))
    records = [r for r in records if r]
    if not records:
        raise DataError("empty file")
    header, body = records[0], records[1:]
    if not body:
        raise DataError("no data rows")
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"row {lineno} has {len(row)} fields, expected {len(header)}")
    unknown = set(kind_overrides) - set(header)
    if unknown:
        raise DataError(f"override for unknown column(s) {', '.join(sorted(unknown))}")
    columns = []
    for i, name in enumerate(header):
        kind = kind_overrides.get(name)
        if kind is None:
            kind = "continuous" if all(_is_number(r[i]) for r in body) else "categorical"
        columns.append(Column(name, kind))
    rows = [
        tuple(float(v) if c.kind == "continuous" else v for v, c in zip(r, columns)) for r in body
    ]
    return Dataset(tuple(columns), tuple(rows))


class Method(str, enum.Enum):
    FISHER_Z = "fisher_z"
    G_TEST = "g_test"


@dataclass(frozen=True)
class CiTestResult:
    statement: CiStatement
    method: str
    statistic: float
    p_value: float
    adjusted_p: float
    rejected: bool
    dof: float | None = None

    def to_json(self) -> dict:
        return {
            "statement": str(self.statement),
            "method": self.method,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "adjusted_p": self.adjusted_p,
            "rejected": self.rejected,
        }


def _singletons(s: CiStatement) -> tuple[str, str, list[str]]:
    if len(s.left) != 1 or len(s.right) != 1:
        raise DataError("independence tests need single variables on both sides")
    return next(iter(s.left)), next(iter(s.right)), sorted(s.given)


def _residual(v: np.ndarray, design: np.ndarray) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    return v - design @ coef


def _fisher_z(d: Dataset, x: str, y: str, given: list[str]) -> tuple[float, float]:
    n = len(d)
    if n <= len(given) + 3:
        raise DataError(f"fisher_z needs more than {len(given) + 3} rows, got {n}")
    data = {v: d.column(v) for v in (x, y, *given)}
    for v, values in data.items():
        if np.var(values) == 0:
            raise DataError(f"column {v!r} has zero variance")
    design = np.column_stack([np.ones(n)] + [data[v] for v in given])
    rx = _residual(data[x], design)
    ry = _residual(data[y], design)
    # a variable determined by the conditioning set is trivially independent given it
    if any(np.var(r) <= 1e-12 * np.var(data[v]) for r, v in ((rx, x), (ry, y))):
        return 0.0, 1.0
    r = float(np.corrcoef(rx, ry)[0, 1])
    if abs(r) >= 1.0:
        return math.inf, 0.0
    z = math.sqrt(n - len(given) - 3) * math.atanh(r)
    return z, float(min(1.0, 2 * stats.norm.sf(abs(z))))


def _g_test(d: Dataset, x: str, y: str, given: list[str]) -> tuple[float, float, float]:
    cx, kx = d.codes(x)
    cy, ky = d.codes(y)
    strata = np.zeros(len(d), dtype=np.int64)
    dof = (kx - 1) * (ky - 1)
    for v in given:
        codes, k = d.codes(v)
        strata = strata * k + codes
        dof *= k
    counts = np.zeros((int(strata.max()) + 1, kx, ky))
    np.add.at(counts, (strata, cx, cy), 1)
    total = counts.sum(axis=(1, 2), keepdims=True)
    expected = counts.sum(axis=2, keepdims=True) * counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = np.where(total > 0, expected / total, 0.0)
        terms = np.where(counts > 0, counts * np.log(counts / expected), 0.0)
    g = float(2 * terms.sum())
    if dof == 0:
        return g, 1.0, dof
    return g, float(stats.chi2.sf(g, dof)), dof


def test_independence(d: Dataset, s: CiStatement, method: str | None = None) -> CiTestResult:
    """Test one independence statement; the method defaults to the column kinds.

    ``fisher_z`` needs continuous columns, ``g_test`` categorical ones.
    """
    x, y, given = _singletons(s)
    kinds = {d.kind(v) for v in (x, y, *given)}
    if len(kinds) > 1:
        raise DataError(f"statement {s} mixes categorical and continuous columns")
    if method is None:
        method = Method.FISHER_Z if kinds == {"continuous"} else Method.G_TEST
    method = Method(method)
    if method is Method.FISHER_Z:
        if kinds != {"continuous"}:
            raise DataError("fisher_z needs continuous columns")
        statistic, p = _fisher_z(d, x, y, given)
        dof = None
    else:
        if kinds != {"categorical"}:
            raise DataError("g_test needs categorical columns")
        statistic, p, dof = _g_test(d, x, y, given)
    return CiTestResult(s, method.value, statistic, p, p, False, dof)


test_independence.__test__ = False  # not a pytest test despite the name


def adjust_pvalues(pvalues: Sequence[float], correction: str = "holm") -> list[float]:
    """Family-wise adjusted p-values (``holm``, ``bonferroni`` or ``none``)."""
    if correction == "none" or not pvalues:
        return list(pvalues)
    if correction not in ("holm", "bonferroni"):
        raise ValueError(f"unknown correction {correction!r}")
    from statsmodels.stats.multitest import multipletests

    _, adjusted, _, _ = multipletests(list(pvalues), method=correction)
    return [max(float(a), p) for a, p in zip(adjusted, pvalues)]


@dataclass(frozen=True)
class FalsificationReport:
    results: tuple[CiTestResult, ...]
    alpha: float
    correction: str

    @property
    def n_tests(self) -> int:
        return len(self.results)

    @property
    def falsified(self) -> bool:
        return any(r.rejected for r in self.results)

    @property
    def verdict(self) -> str:
        if self.falsified:
            return "FALSIFIED"
        return "CONSISTENT"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "alpha": self.alpha,
            "correction": self.correction,
            "n_tests": self.n_tests,
            "vacuous": not self.results,
            "results": [r.to_json() for r in self.results],
        }

    def to_text(self) -> str:
        if not self.results:
            return "no implied independencies: vacuously consistent\nverdict: CONSISTENT\n"
        header = f"{'statement':<32} {'method':<9} {'statistic':>11} {'p':>10} {'adj. p':>10}  reject"
        lines = [header, "-" * len(header)]
        for r in self.results:
            lines.append(
                f"{str(r.statement):<32} {r.method:<9} {r.statistic:>11.4g} {r.p_value:>10.4g} "
                f"{r.adjusted_p:>10.4g}  {'yes' if r.rejected else 'no'}"
            )
        lines.append(f"verdict: {self.verdict} (alpha={self.alpha}, correction={self.correction}, tests={self.n_tests})")
        return "\n".join(lines) + "\n"


def falsify_report(
    g: Admg,
    d: Dataset,
    alpha: float = 0.05,
    max_given: int = 3,
    correction: str = "holm",
    method: str | None = None,
) -> FalsificationReport:
    """Test every implied independence of ``g`` and correct for multiple testing."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    missing = [v for v in g.nodes if v not in d.names]
    if missing:
        raise DataError(f"graph node(s) missing from data: {', '.join(missing)}")
    raw = [test_independence(d, s, method) for s in implied_independencies(g, max_given)]
    adjusted = adjust_pvalues([r.p_value for r in raw], correction)
    results = tuple(
        CiTestResult(r.statement, r.method, r.statistic, r.p_value, a, a < alpha, r.dof)
        for r, a in zip(raw, adjusted)
    )
    return FalsificationReport(results, alpha, correction)


def dumps(report: FalsificationReport) -> str:
    return json.dumps(report.to_json(), indent=2)
