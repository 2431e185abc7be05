"""Generating functions of parabolic Hilbert schemes.

The Poincare series of all X^[v] is a product of a surface factor in (z, x_0)
and one divisor factor per level alpha of the window. Substituting point
classes gives the generating function of the punctual schemes as polynomials
in the Lefschetz class L, which is compared with the cell enumeration.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Optional

from sympy import Poly

from .cells import punctual_motive
from .errors import ContractViolation, WindowError
from .lattice import (
    IndexVector,
    ShiftConvention,
    Window,
    admissible_in_window,
    degree,
    shift_index,
)
from .report import Report
from .series import (
    L,
    Z,
    MultiDegree,
    MultiSeries,
    TruncationOrder,
    expand_factor,
    format_poly,
    product,
)
from .workers import resolve_jobs, run_partitioned

logger = logging.getLogger(__name__)

# Factors beyond the cut are recomputed with this many extra indices when checked.
CUT_SLACK = 2

# (sign c, z-degree, x_0-degree, level or None, exponent e) describing (1 + c z^. x^.)^e
FactorSpec = tuple[int, int, int, Optional[int], int]


@dataclass(frozen=True)
class BettiData:
    """Betti numbers of the surface X and of the divisor D."""

    surface: tuple[int, int, int, int, int] = (1, 0, 1, 0, 1)
    divisor: tuple[int, int, int] = (1, 0, 1)

    def __post_init__(self) -> None:
        if len(self.surface) != 5 or len(self.divisor) != 3:
            raise ValueError("need five Betti numbers for X and three for D")
        if any(b < 0 for b in (*self.surface, *self.divisor)):
            raise ValueError("Betti numbers must be non-negative")
        object.__setattr__(self, "surface", tuple(int(b) for b in self.surface))
        object.__setattr__(self, "divisor", tuple(int(b) for b in self.divisor))

    @classmethod
    def parse(cls, tokens: Iterable[str]) -> "BettiData":
        """Parse ["X=1,0,1,0,1", "D=1,0,1"]."""
        values: dict[str, tuple[int, ...]] = {}
        for token in tokens:
            name, _, numbers = token.partition("=")
            if name not in ("X", "D") or not numbers:
                raise ValueError(f"expected X=b0,...,b4 or D=b0,b1,b2, got {token!r}")
            values[name] = tuple(int(n) for n in numbers.split(","))
        if set(values) != {"X", "D"}:
            raise ValueError("both X=... and D=... are required")
        return cls(values["X"], values["D"])

    @classmethod
    def from_json(cls, data: dict[str, list[int]]) -> "BettiData":
        return cls(tuple(data["X"]), tuple(data["D"]))

    def to_json(self) -> dict[str, list[int]]:
        return {"X": list(self.surface), "D": list(self.divisor)}


def _surface_specs(surface: tuple[int, ...], cut: int) -> list[FactorSpec]:
    b0, b1, b2, b3, b4 = surface
    specs = []
    for m in range(1, cut + 1):
        specs += [
            (1, 2 * m - 1, m, None, b1),
            (1, 2 * m + 1, m, None, b3),
            (-1, 2 * m - 2, m, None, -b0),
            (-1, 2 * m, m, None, -b2),
            (-1, 2 * m + 2, m, None, -b4),
        ]
    return specs


def _divisor_specs(divisor: tuple[int, ...], level: int, cut: int) -> list[FactorSpec]:
    b0, b1, b2 = divisor
    shift = 1 if level < 0 else 0
    specs = []
    for m in range(shift, cut + 1):
        z = 2 * (m - shift)
        specs += [(1, z + 1, m, level, b1), (-1, z, m, level, -b0), (-1, z + 2, m, level, -b2)]
    return specs


def _local_specs(levels: Iterable[int], cut: int) -> list[FactorSpec]:
    specs = [(-1, i - 1, i, None, -1) for i in range(1, cut + 1)]
    for level in levels:
        if level < 0:
            specs += [(-1, i - 1, i, level, -1) for i in range(1, cut + 1)]
        else:
            specs += [(-1, i, i, level, -1) for i in range(0, cut + 1)]
    return specs


def _expand(specs: list[FactorSpec], order: TruncationOrder) -> MultiSeries:
    factors = []
    for c, z, x0, level, e in specs:
        if e == 0:
            continue
        x = {level: 1} if level is not None else None
        factors.append(expand_factor(c, MultiDegree.of(z, x0, x), e, order))
    return product(factors, order)


def _cut_product(
    build: Callable[[int], list[FactorSpec]], order: TruncationOrder, verify_cut: bool
) -> MultiSeries:
    result = _expand(build(order.n0), order)
    if verify_cut and _expand(build(order.n0 + CUT_SLACK), order) != result:
        raise ContractViolation("product changed when the factor cut was widened")
    return result


def _check_levels(window: Window, order: TruncationOrder) -> None:
    if not (order.window.lo <= window.lo and window.hi <= order.window.hi):
        raise WindowError(
            f"window {window.to_json()} is not inside the order window {order.window.to_json()}"
        )


def goettsche_series(
    surface: tuple[int, ...], order: TruncationOrder, verify_cut: bool = False
) -> MultiSeries:
    """Generating function of the Poincare polynomials of the Hilbert schemes X^[n]."""
    return _cut_product(lambda cut: _surface_specs(surface, cut), order, verify_cut)


def parabolic_poincare_series(
    betti: BettiData, window: Window, order: TruncationOrder, verify_cut: bool = False
) -> MultiSeries:
    """Poincare series: the coefficient of x^v is P(X^[v], z)."""
    _check_levels(window, order)

    def build(cut: int) -> list[FactorSpec]:
        specs = _surface_specs(betti.surface, cut)
        for level in window.levels():
            specs += _divisor_specs(betti.divisor, level, cut)
        return specs

    return _cut_product(build, order, verify_cut)


def local_punctual_series(
    window: Window, order: TruncationOrder, verify_cut: bool = False
) -> MultiSeries:
    """Punctual schemes as polynomials in L; the z slot of the series carries L."""
    _check_levels(window, order)
    return _cut_product(lambda cut: _local_specs(window.levels(), cut), order, verify_cut)


@lru_cache(maxsize=4096)
def poincare_polynomial(betti: BettiData, v: IndexVector) -> Poly:
    """P(X^[v], z) from the product truncated tightly around v."""
    order = TruncationOrder.around(v)
    return parabolic_poincare_series(betti, order.window, order).coefficient(v, Z)


def local_motive(v: IndexVector) -> Poly:
    """Class of the punctual scheme over v from the local product."""
    order = TruncationOrder.around(v)
    return local_punctual_series(order.window, order).coefficient(v, L)


def _cell_chunk(args: tuple[MultiSeries, list[IndexVector]]) -> Report:
    series, vectors = args
    report = Report(suite="cells-vs-product")
    for v in vectors:
        report.bump("vectors_checked")
        from_cells = punctual_motive(v)
        from_product = series.coefficient(v, L)
        if from_cells != from_product:
            report.add_violation(
                v=v.to_json(),
                cells=format_poly(from_cells),
                product=format_poly(from_product),
            )
    return report


def _chunks(vectors: list[IndexVector], count: int) -> list[list[IndexVector]]:
    count = max(1, min(count, len(vectors)))
    return [vectors[k::count] for k in range(count)]


def verify_cell_vs_product(
    window: Window, max_n: int, cap: int = 2, jobs: Optional[int] = 1
) -> Report:
    """Compare the cell enumeration with the local product coefficient by coefficient."""
    order = TruncationOrder.uniform(max_n, window, cap)
    series = local_punctual_series(window, order, verify_cut=True)
    vectors = list(admissible_in_window(window, max_n, cap))
    chunks = _chunks(vectors, resolve_jobs(jobs))
    report = run_partitioned("cells-vs-product", _cell_chunk, ((series, c) for c in chunks), jobs)
    report.details["order"] = order.to_json()
    logger.info(
        "Cells vs product: %d vectors, %d mismatches", len(vectors), report.violation_count
    )
    return report


def _shift_chunk(args: tuple[BettiData, Window, list[IndexVector]]) -> Report:
    betti, window, vectors = args
    report = Report(suite="shift")
    for v in vectors:
        poly = poincare_polynomial(betti, v)
        report.bump("vectors_checked")
        if poly.eval(0) != 1 or any(c < 0 for c in poly.all_coeffs()):
            report.add_violation(v=v.to_json(), poincare=format_poly(poly))
        for beta in window.levels():
            report.bump("shifts_checked")
            image, _ = shift_index(v, beta, window, ShiftConvention.D_PRESERVING)
            shifted = poincare_polynomial(betti, image)
            if degree(image) != degree(v) or shifted != poly:
                report.add_violation(
                    v=v.to_json(),
                    beta=beta,
                    image=image.to_json(),
                    poincare=format_poly(poly),
                    shifted=format_poly(shifted),
                )
    return report


def verify_shift_invariance(
    betti: BettiData, window: Window, max_n: int, cap: int = 1, jobs: Optional[int] = 1
) -> Report:
    """Poincare polynomials agree at v and at every d-preserving shift of v."""
    vectors = list(admissible_in_window(window, max_n, cap))
    chunks = _chunks(vectors, resolve_jobs(jobs))
    report = run_partitioned("shift", _shift_chunk, ((betti, window, c) for c in chunks), jobs)
    logger.info(
        "Shift invariance: %d vectors, %d violations", len(vectors), report.violation_count
    )
    return report


def series_json(series: MultiSeries, var: str = "z") -> dict[str, Any]:
    data = series.to_json()
    data["variable"] = var
    return data
