"""Truncated formal power series in z, x_0 and x_alpha.

A MultiSeries always carries its TruncationOrder. Terms whose x-degree
leaves the order are discarded on construction and on multiplication; the z
direction is never truncated. Coefficients are Python ints, so there is no
overflow.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Optional, Union

import sympy
from sympy import Poly

from .errors import OrderMismatchError, TruncationError
from .lattice import IndexVector, Window

logger = logging.getLogger(__name__)

Z = sympy.Symbol("z")
L = sympy.Symbol("L")

# Internal term key: (z degree, x_0 degree, x_alpha degrees aligned with order.levels).
Key = tuple[int, int, tuple[int, ...]]


@dataclass(frozen=True)
class MultiDegree:
    """Exponent vector of a monomial z^z x_0^x0 prod x_alpha^x[alpha]."""

    z: int = 0
    x0: int = 0
    x: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        normal = tuple(sorted((lvl, deg) for lvl, deg in dict(self.x).items() if deg != 0))
        if self.z < 0 or self.x0 < 0 or any(deg < 0 for _, deg in normal):
            raise TruncationError(f"negative exponent in {self}")
        if any(lvl == 0 for lvl, _ in normal):
            raise TruncationError("level 0 belongs to x0, not to x")
        object.__setattr__(self, "x", normal)

    @classmethod
    def of(cls, z: int = 0, x0: int = 0, x: Optional[Mapping[int, int]] = None) -> "MultiDegree":
        return cls(z, x0, tuple((x or {}).items()))

    @classmethod
    def from_vector(cls, v: IndexVector, z: int = 0) -> "MultiDegree":
        """The monomial z^z x^v."""
        return cls(z, v.rho0, v.rho().entries)

    def has_x_part(self) -> bool:
        return self.x0 > 0 or bool(self.x)

    def scaled(self, k: int) -> "MultiDegree":
        return MultiDegree(self.z * k, self.x0 * k, tuple((lvl, deg * k) for lvl, deg in self.x))


@dataclass(frozen=True)
class TruncationOrder:
    """Bounds x_0 <= n0 and x_alpha <= cap(alpha) for alpha in the window."""

    n0: int
    window: Window
    caps: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.n0 < 0:
            raise TruncationError(f"n0 must be non-negative, got {self.n0}")
        caps = dict(self.caps)
        if set(caps) != set(self.window.levels()):
            raise TruncationError("caps must be given for exactly the window levels")
        if any(cap < 0 for cap in caps.values()):
            raise TruncationError("caps must be non-negative")
        object.__setattr__(self, "caps", tuple(sorted(caps.items())))

    @classmethod
    def uniform(cls, n0: int, window: Window, cap: int = 2) -> "TruncationOrder":
        return cls(n0, window, tuple((lvl, cap) for lvl in window.levels()))

    @classmethod
    def around(cls, v: IndexVector) -> "TruncationOrder":
        """Smallest order whose range contains x^v."""
        window = Window.around(v)
        return cls(v.rho0, window, tuple((lvl, max(v[lvl], 0)) for lvl in window.levels()))

    @property
    def levels(self) -> tuple[int, ...]:
        return self.window.levels()

    def cap_vector(self) -> tuple[int, ...]:
        return tuple(cap for _, cap in self.caps)

    def key(self, degree: MultiDegree) -> Optional[Key]:
        """Internal key of a degree, or None if it is outside the order."""
        if degree.x0 > self.n0:
            return None
        x = dict(degree.x)
        if any(not self.window.contains(lvl) for lvl in x):
            return None
        xs = tuple(x.get(lvl, 0) for lvl in self.levels)
        if any(deg > cap for deg, cap in zip(xs, self.cap_vector())):
            return None
        return degree.z, degree.x0, xs

    def degree(self, key: Key) -> MultiDegree:
        z, x0, xs = key
        return MultiDegree(z, x0, tuple(zip(self.levels, xs)))

    def to_json(self) -> dict[str, Any]:
        return {
            "n0": self.n0,
            "window": self.window.to_json(),
            "caps": {str(lvl): cap for lvl, cap in self.caps},
        }


class MultiSeries:
    """Truncated power series with exact integer coefficients."""

    __slots__ = ("order", "_terms")

    def __init__(self, order: TruncationOrder, terms: Optional[Mapping[Key, int]] = None) -> None:
        self.order = order
        self._terms: dict[Key, int] = {k: c for k, c in (terms or {}).items() if c != 0}

    @classmethod
    def one(cls, order: TruncationOrder) -> "MultiSeries":
        return cls(order, {(0, 0, (0,) * len(order.levels)): 1})

    @classmethod
    def monomial(cls, c: int, degree: MultiDegree, order: TruncationOrder) -> "MultiSeries":
        """The single-term series c * x^degree."""
        key = order.key(degree)
        if key is None:
            raise TruncationError(f"{degree} is outside the truncation order")
        return cls(order, {key: c})

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> Iterator[tuple[MultiDegree, int]]:
        """Nonzero terms in canonical order."""
        for key in sorted(self._terms):
            yield self.order.degree(key), self._terms[key]

    def _check(self, other: "MultiSeries") -> None:
        if self.order != other.order:
            raise OrderMismatchError(
                f"orders differ: {self.order.to_json()} vs {other.order.to_json()}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __neg__(self) -> "MultiSeries":
        return MultiSeries(self.order, {k: -c for k, c in self._terms.items()})

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        self._check(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms.get(key, 0) + c
        return MultiSeries(self.order, terms)

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        return mul(self, other)

    def coefficient(self, v: IndexVector, var: sympy.Symbol = Z) -> Poly:
        """Coefficient of x^v as a polynomial in the remaining variable."""
        if any(val < 0 for _, val in v.entries):
            raise TruncationError(f"{v} has negative entries")
        probe = self.order.key(MultiDegree.from_vector(v))
        if probe is None:
            raise TruncationError(f"{v} is outside the truncation order")
        _, x0, xs = probe
        coeffs = {z: c for (z, a, b), c in self._terms.items() if a == x0 and b == xs}
        return poly_from_coeffs(coeffs, var)

    def specialize_zero(self) -> "MultiSeries":
        """Set every x_alpha to 0."""
        return MultiSeries(
            self.order, {k: c for k, c in self._terms.items() if not any(k[2])}
        )

    def to_json(self) -> dict[str, Any]:
        terms = []
        for degree, c in self.terms():
            terms.append([degree.z, degree.x0, {str(lvl): d for lvl, d in degree.x}, str(c)])
        return {"order": self.order.to_json(), "terms": terms}

    def __repr__(self) -> str:
        return f"MultiSeries(n0={self.order.n0}, terms={len(self._terms)})"


def mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    """Truncated Cauchy product."""
    a._check(b)
    n0 = a.order.n0
    caps = a.order.cap_vector()
    right = sorted(b._terms.items(), key=lambda item: item[0][1])
    out: dict[Key, int] = defaultdict(int)
    for (z1, x1, xs1), c1 in a._terms.items():
        room = n0 - x1
        for (z2, x2, xs2), c2 in right:
            if x2 > room:
                break
            xs = tuple(p + q for p, q in zip(xs1, xs2))
            if any(deg > cap for deg, cap in zip(xs, caps)):
                continue
            out[(z1 + z2, x1 + x2, xs)] += c1 * c2
    return MultiSeries(a.order, out)


def product(factors: list[MultiSeries], order: TruncationOrder) -> MultiSeries:
    """Multiply a list of series; the empty product is 1."""
    result = MultiSeries.one(order)
    for factor in factors:
        result = mul(result, factor)
    return result


def expand_factor(c: int, d: MultiDegree, e: int, order: TruncationOrder) -> MultiSeries:
    """(1 + c x^d)^e expanded by the binomial series up to the order."""
    if not d.has_x_part():
        raise TruncationError("factor degree needs a positive x-part to truncate")
    terms: dict[Key, int] = {}
    k = 0
    while e < 0 or k <= e:
        key = order.key(d.scaled(k))
        if key is None:
            break
        terms[key] = int(sympy.binomial(e, k)) * c**k
        k += 1
    return MultiSeries(order, terms)


def poly_from_coeffs(coeffs: Mapping[int, int], var: sympy.Symbol = Z) -> Poly:
    """Integer polynomial from a degree -> coefficient map."""
    coeffs = {deg: c for deg, c in coeffs.items() if c != 0}
    if not coeffs:
        return Poly(0, var, domain="ZZ")
    return Poly.from_dict({(deg,): c for deg, c in coeffs.items()}, var, domain="ZZ")


def format_poly(poly: Union[Poly, int]) -> str:
    """Render in ascending powers, e.g. 1+2z^2+z^4."""
    if not isinstance(poly, Poly):
        return str(int(poly))
    name = str(poly.gen)
    pieces: list[str] = []
    for (deg,), coeff in sorted(poly.terms()):
        coeff = int(coeff)
        if coeff == 0:
            continue
        size = abs(coeff)
        if deg == 0:
            body = str(size)
        else:
            mono = name if deg == 1 else f"{name}^{deg}"
            body = mono if size == 1 else f"{size}{mono}"
        if pieces:
            pieces.append(("+" if coeff > 0 else "-") + body)
        else:
            pieces.append(body if coeff > 0 else "-" + body)
    return "".join(pieces) or "0"
