"""Torus weights of the tangent space at a fixed point.

The tangent space of X^[v] at the fixed point labelled by eta is a
representation of the two-dimensional torus with characters lambda and mu.
Its class is a Laurent polynomial in (lambda, mu) with non-negative
coefficients summing to d(v), and the weights of positive pairing with a
generic cocharacter span the tangent space of the cell.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from .cells import CellLabel, cell_dimension, enumerate_labels, psi
from .errors import (
    CocharacterError,
    ContractViolation,
    NotAdmissibleError,
    ParahilbError,
    WindowError,
)
from .lattice import IndexVector, Window, admissible_in_window, degree, is_admissible
from .report import Report
from .workers import run_partitioned

logger = logging.getLogger(__name__)

# Extra index range used to confirm that the sums have stopped contributing.
WIDENING = 2


class LaurentPair:
    """Integer Laurent polynomial in lambda and mu, keyed by (i, j) exponents."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[tuple[int, int], int]] = None) -> None:
        self._terms = {k: c for k, c in (terms or {}).items() if c != 0}

    @classmethod
    def monomial(cls, i: int, j: int, c: int = 1) -> "LaurentPair":
        return cls({(i, j): c})

    def items(self) -> list[tuple[tuple[int, int], int]]:
        return sorted(self._terms.items())

    def support(self) -> set[tuple[int, int]]:
        return set(self._terms)

    def __getitem__(self, exponent: tuple[int, int]) -> int:
        return self._terms.get(exponent, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPair):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other: "LaurentPair") -> "LaurentPair":
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return LaurentPair(terms)

    def __neg__(self) -> "LaurentPair":
        return LaurentPair({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "LaurentPair") -> "LaurentPair":
        return self + (-other)

    def __mul__(self, other: "LaurentPair") -> "LaurentPair":
        terms: dict[tuple[int, int], int] = defaultdict(int)
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                terms[(i1 + i2, j1 + j2)] += c1 * c2
        return LaurentPair(terms)

    def total(self) -> int:
        """Sum of coefficients, i.e. the dimension of the representation."""
        return sum(self._terms.values())

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def to_json(self) -> list[list[int]]:
        return [[i, j, c] for (i, j), c in self.items()]

    def __repr__(self) -> str:
        return f"LaurentPair({self.to_json()})"


@dataclass(frozen=True)
class Staircase:
    """The b-sequence and the h-bar table of a label.

    b[i] counts the parts with m >= i + 1. hbar(alpha, i) counts the parts
    (beta, i) with beta >= alpha.
    """

    b: tuple[int, ...]
    eta: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def b_at(self, i: int) -> int:
        return self.b[i] if 0 <= i < len(self.b) else 0

    def eta_at(self, level: int, m: int) -> int:
        return self.eta.get((level, m), 0)

    def hbar(self, level: int, m: int) -> int:
        return sum(mult for (lvl, mm), mult in self.eta.items() if mm == m and lvl >= level)

    def hbar_table(self) -> dict[tuple[int, int], int]:
        """h-bar over the levels and indices where the label lives."""
        levels = sorted({lvl for lvl, _ in self.eta}) or [0]
        size = len(self.b) + 1
        return {
            (level, i): self.hbar(level, i)
            for level in range(levels[0], levels[-1] + 1)
            for i in range(size)
        }


def staircase(label: CellLabel) -> Staircase:
    """Column heights b and part multiplicities of the monomial ideal of a label."""
    top = label.max_m()
    b = tuple(
        sum(mult for _, m, mult in label.parts if m >= i + 1) for i in range(top)
    )
    return Staircase(b=b, eta={(lvl, m): mult for lvl, m, mult in label.parts})


def _in_correction_range(level: int, i: int, j: int, alpha_minus: int) -> bool:
    if level >= alpha_minus and i >= 1 and j >= 1:
        return True
    if level > 0 and i >= 1 and j == 0:
        return True
    return level > 1 and i == 0 and j >= 0


def _weights(st: Staircase, alpha_minus: int, top_index: int, top_level: int) -> LaurentPair:
    w: dict[tuple[int, int], int] = defaultdict(int)
    b, h = st.b_at, st.hbar
    indices = range(top_index + 1)

    # Ellingsrud-Stromme part of the plain Hilbert scheme.
    for j in range(1, top_index + 1):
        for i in range(1, j + 1):
            for s in range(b(j), b(j - 1)):
                w[(i - j - 1, b(i - 1) - s - 1)] += 1
                w[(j - i, s - b(i - 1))] += 1

    for level in range(alpha_minus, top_level + 1):
        for i in indices:
            for j in indices:
                if not _in_correction_range(level, i, j, alpha_minus):
                    continue
                base = b(j) - b(i)
                for a in range(h(level, j)):
                    w[(j - i, base - h(level, i) + a)] += 1
                    w[(j - i, base - h(level - 1, i) + a)] -= 1

    for level in range(alpha_minus, 1):
        for i in range(1, top_index + 1):
            below = level - 1
            for a in range(st.eta_at(below, i)):
                w[(-i, b(0) - b(i) + a - h(below, i))] -= 1

    for j in indices:
        for a in range(h(1, j)):
            w[(j, b(j) - b(0) - h(1, 0) + a)] += 1

    return LaurentPair(w)


def tangent_weights(label: CellLabel, alpha_minus: int) -> LaurentPair:
    """Class of the tangent space at the fixed point of the label.

    All sums are finite once the label is fixed. The result is recomputed with
    every upper index range widened by WIDENING and must not change; a negative
    coefficient after cancellation is a ContractViolation.
    """
    v = psi(label)
    if any(lvl < alpha_minus for lvl in v.support()):
        raise WindowError(f"{v} has support below alpha_minus={alpha_minus}")
    st = staircase(label)
    top_index = label.max_m() + 1
    top_level = max([1, *label.levels()]) + 1

    weights = _weights(st, alpha_minus, top_index, top_level)
    widened = _weights(st, alpha_minus, top_index + WIDENING, top_level + WIDENING)
    if widened != weights:
        raise ContractViolation(f"tangent weights of {label.to_json()} depend on index ranges")
    if not weights.is_nonnegative():
        raise ContractViolation(f"negative tangent weight for {label.to_json()}: {weights}")
    return weights


def generic_cocharacter(
    support: Iterable[tuple[int, int]], limit: int = 10_000
) -> tuple[int, int]:
    """Weights (w1, w2) with i*w2 + j*w1 > 0 exactly when i > 0 on the support."""
    support = set(support)
    if any(i == 0 and j > 0 for i, j in support):
        raise CocharacterError("support contains (0, j) with j > 0")
    for w2 in range(1, limit + 1):
        if all((i * w2 + j > 0) == (i > 0) for i, j in support):
            return 1, w2
    raise CocharacterError(f"no cocharacter with w2 <= {limit}")


def positive_weight_count(label: CellLabel, alpha_minus: Optional[int] = None) -> int:
    """Number of tangent weights, with multiplicity, that pair positively."""
    if alpha_minus is None:
        alpha_minus = min([-1, *label.levels()])
    weights = tangent_weights(label, alpha_minus)
    w1, w2 = generic_cocharacter(weights.support())
    return sum(c for (i, j), c in weights.items() if i * w2 + j * w1 > 0)


def describe(v: IndexVector, alpha_minus: Optional[int] = None) -> list[dict[str, Any]]:
    """Tangent weights of every fixed point over v, as JSON."""
    if not is_admissible(v):
        raise NotAdmissibleError(f"{v} is not admissible")
    if alpha_minus is None:
        alpha_minus = min([-1, *v.support()])
    rows = []
    for label in enumerate_labels(v):
        weights = tangent_weights(label, alpha_minus)
        rows.append(
            {
                "label": label.to_json(),
                "weights": weights.to_json(),
                "total": weights.total(),
                "positive": positive_weight_count(label, alpha_minus),
                "cell_dimension": cell_dimension(label),
            }
        )
    return rows


def _weights_chunk(args: tuple[IndexVector, int]) -> Report:
    v, alpha_minus = args
    report = Report(suite="weights")
    d = degree(v)
    for label in enumerate_labels(v):
        report.bump("labels_checked")
        try:
            weights = tangent_weights(label, alpha_minus)
            w1, w2 = generic_cocharacter(weights.support())
        except ParahilbError as e:
            report.add_violation(label=label.to_json(), error=str(e))
            continue
        positive = sum(c for (i, j), c in weights.items() if i * w2 + j * w1 > 0)
        if weights.total() != d or positive != cell_dimension(label):
            report.add_violation(
                label=label.to_json(),
                total=weights.total(),
                degree=d,
                positive=positive,
                cell_dimension=cell_dimension(label),
            )
    return report


def verify_tangent_weights(
    window: Window, max_n: int, cap: int = 1, jobs: Optional[int] = 1
) -> Report:
    """Check non-negativity, total d(v) and positive count = cell dimension."""
    vectors = list(admissible_in_window(window, max_n, cap))
    report = run_partitioned(
        "weights", _weights_chunk, ((v, window.lo) for v in vectors), jobs
    )
    report.bump("vectors_checked", len(vectors))
    report.details["alpha_minus"] = window.lo
    logger.info(
        "Tangent weights: %d labels over %d vectors, %d violations",
        report.counts.get("labels_checked", 0),
        len(vectors),
        report.violation_count,
    )
    return report
