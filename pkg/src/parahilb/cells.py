"""Torus-fixed points of punctual parabolic Hilbert schemes and their cells."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Union

from sympy import Poly
from sympy.utilities.iterables import partitions

from .errors import ContractViolation, NotAdmissibleError
from .lattice import IndexVector, generator, is_admissible, punctual_dimension
from .series import L, Z, format_poly, poly_from_coeffs

logger = logging.getLogger(__name__)

Part = tuple[int, int]


def _valid_part(level: int, m: int) -> bool:
    return m >= 0 if level > 0 else m >= 1


@dataclass(frozen=True)
class CellLabel:
    """Multiset of generators m*e_0 + e_alpha, stored as (alpha, m, multiplicity)."""

    parts: tuple[tuple[int, int, int], ...] = ()

    def __init__(self, parts: Union[Mapping[Part, int], Iterable[Part]] = ()) -> None:
        counts: dict[Part, int] = {}
        if isinstance(parts, Mapping):
            for (level, m), mult in parts.items():
                counts[(level, m)] = counts.get((level, m), 0) + mult
        else:
            for level, m in parts:
                counts[(level, m)] = counts.get((level, m), 0) + 1
        for (level, m), mult in counts.items():
            if not _valid_part(level, m) or mult < 0:
                raise ValueError(f"invalid part (alpha={level}, m={m}) x{mult}")
        normal = tuple(sorted((lvl, m, mult) for (lvl, m), mult in counts.items() if mult))
        object.__setattr__(self, "parts", normal)

    @classmethod
    def from_json(cls, data: list[list[int]]) -> "CellLabel":
        return cls({(level, m): mult for level, m, mult in data})

    def to_json(self) -> list[list[int]]:
        return [list(part) for part in self.parts]

    def multiplicity(self, level: int, m: int) -> int:
        for lvl, mm, mult in self.parts:
            if (lvl, mm) == (level, m):
                return mult
        return 0

    def levels(self) -> tuple[int, ...]:
        return tuple(sorted({lvl for lvl, _, _ in self.parts}))

    def max_m(self) -> int:
        return max((m for _, m, _ in self.parts), default=0)

    def __len__(self) -> int:
        return sum(mult for _, _, mult in self.parts)


def psi(label: CellLabel) -> IndexVector:
    """Sum of the generators of the label, with multiplicity."""
    total: dict[int, int] = {}
    for level, m, mult in label.parts:
        for lvl, val in generator(m, level).entries:
            total[lvl] = total.get(lvl, 0) + val * mult
    return IndexVector(total)


def seminorm(label: CellLabel) -> int:
    """Number of parts at levels alpha <= 0."""
    return sum(mult for level, _, mult in label.parts if level <= 0)


def cell_dimension(label: CellLabel) -> int:
    """Dimension rho_0(psi(label)) - ||label|| of the attracting cell."""
    return psi(label).rho0 - seminorm(label)


def _jump_choices(
    count: int, smallest: int, budget: int
) -> Iterator[tuple[int, dict[int, int]]]:
    """Multisets of `count` integers >= smallest with sum <= budget, as (sum, {m: mult})."""
    for extra in range(budget - smallest * count + 1):
        for p in partitions(extra, m=count):
            parts = {smallest + size: mult for size, mult in p.items()}
            padding = count - sum(p.values())
            if padding:
                parts[smallest] = parts.get(smallest, 0) + padding
            yield smallest * count + extra, parts


def enumerate_labels(v: IndexVector) -> list[CellLabel]:
    """All labels eta with psi(eta) = v, in canonical order."""
    if not is_admissible(v):
        return []
    jumps = [(lvl, val) for lvl, val in v.entries if lvl != 0]

    @lru_cache(maxsize=None)
    def fill(index: int, budget: int) -> tuple[tuple[tuple[Part, int], ...], ...]:
        if index == len(jumps):
            return tuple(
                tuple(((0, size), mult) for size, mult in p.items())
                for p in partitions(budget)
            )
        level, count = jumps[index]
        smallest = 0 if level > 0 else 1
        found = []
        for used, parts in _jump_choices(count, smallest, budget):
            head = tuple(((level, m), mult) for m, mult in parts.items())
            for tail in fill(index + 1, budget - used):
                found.append(head + tail)
        return tuple(found)

    labels = sorted(
        (CellLabel(dict(choice)) for choice in fill(0, v.rho0)), key=lambda c: c.parts
    )
    logger.debug("%d labels over %s", len(labels), v)
    return labels


def _require_admissible(v: IndexVector) -> None:
    if not is_admissible(v):
        raise NotAdmissibleError(f"{v} is not admissible")


def punctual_poincare(v: IndexVector) -> Poly:
    """Poincare polynomial of the punctual scheme: sum of z^(2 dim) over cells."""
    _require_admissible(v)
    coeffs: dict[int, int] = {}
    for label in enumerate_labels(v):
        deg = 2 * cell_dimension(label)
        coeffs[deg] = coeffs.get(deg, 0) + 1
    return poly_from_coeffs(coeffs, Z)


def punctual_motive(v: IndexVector) -> Poly:
    """Class of the punctual scheme as a polynomial in the Lefschetz class L."""
    _require_admissible(v)
    coeffs: dict[int, int] = {}
    for label in enumerate_labels(v):
        deg = cell_dimension(label)
        coeffs[deg] = coeffs.get(deg, 0) + 1
    return poly_from_coeffs(coeffs, L)


def top_cells(v: IndexVector) -> tuple[int, list[CellLabel]]:
    """Maximal cell dimension and the labels attaining it, for rho_-(v) = 0.

    The result is checked against the closed form: with a positive jump the top
    cells are exactly the labels without level-0 parts, otherwise the top cell
    is the single part n*e_0.
    """
    if not is_admissible(v) or v.rho_minus():
        raise NotAdmissibleError(f"{v} must be admissible with rho_-(v) = 0")
    labels = enumerate_labels(v)
    top = max(cell_dimension(label) for label in labels)
    winners = [label for label in labels if cell_dimension(label) == top]

    if top != punctual_dimension(v):
        raise ContractViolation(f"top dimension {top} of {v}, expected {punctual_dimension(v)}")
    if v.rho_plus():
        expected = [label for label in labels if 0 not in label.levels()]
    elif v:
        expected = [CellLabel({(0, v.rho0): 1})]
    else:
        expected = [CellLabel()]
    if winners != expected:
        raise ContractViolation(f"top cells of {v} disagree with the closed form")
    return top, winners


def describe(v: IndexVector) -> dict[str, Any]:
    """Labels, dimensions and punctual polynomials of v, as JSON."""
    labels = enumerate_labels(v)
    data: dict[str, Any] = {
        "v": v.to_json(),
        "labels": [label.to_json() for label in labels],
        "dimensions": [cell_dimension(label) for label in labels],
        "poincare": format_poly(punctual_poincare(v)),
        "motive": format_poly(punctual_motive(v)),
    }
    if not v.rho_minus():
        top, winners = top_cells(v)
        data["top_dimension"] = top
        data["top_cells"] = [label.to_json() for label in winners]
    return data
