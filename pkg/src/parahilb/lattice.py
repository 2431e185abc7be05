"""Index vectors, generators and dimension arithmetic.

An index vector v is a finitely supported integer function on the levels
alpha of Z. Level 0 carries the number of points, the other levels carry the
jumps of the parabolic structure along the divisor.
"""

import itertools
import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

from .errors import NotAdmissibleError, NotGeneratorError, WindowError
from .report import Report
from .workers import run_partitioned

logger = logging.getLogger(__name__)

# Levels enumerated by verify_dimension_lemmas.
LEMMA_LEVELS = (-2, -1, 0, 1, 2)


def _parity_sign(n: int) -> int:
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class IndexVector:
    """Finitely supported integer vector indexed by levels.

    Stored as a sorted tuple of (level, value) pairs with zero values removed,
    so equality and hashing ignore absent levels.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __init__(
        self, entries: Union[Mapping[int, int], Iterable[tuple[int, int]], None] = None
    ) -> None:
        totals: dict[int, int] = {}
        items = entries.items() if isinstance(entries, Mapping) else (entries or ())
        for level, value in items:
            totals[int(level)] = totals.get(int(level), 0) + int(value)
        normal = tuple(sorted((lvl, val) for lvl, val in totals.items() if val != 0))
        object.__setattr__(self, "entries", normal)

    @classmethod
    def unit(cls, level: int) -> "IndexVector":
        """The basis vector e_level."""
        return cls({level: 1})

    @classmethod
    def from_json(cls, data: Union[str, Mapping[str, Any]]) -> "IndexVector":
        """Parse {"0": 2, "1": 1}; zero entries are accepted and dropped."""
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, Mapping):
            raise ValueError(f"index vector must be a JSON object, got {data!r}")
        parsed = {}
        for key, value in data.items():
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"level {key!r} has non-integer value {value!r}")
            parsed[int(key)] = value
        return cls(parsed)

    def to_json(self) -> dict[str, int]:
        return {str(level): value for level, value in self.entries}

    def __str__(self) -> str:
        return json.dumps(self.to_json())

    def __getitem__(self, level: int) -> int:
        for lvl, value in self.entries:
            if lvl == level:
                return value
        return 0

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __add__(self, other: "IndexVector") -> "IndexVector":
        return IndexVector(self.entries + other.entries)

    def __neg__(self) -> "IndexVector":
        return IndexVector((lvl, -val) for lvl, val in self.entries)

    def __sub__(self, other: "IndexVector") -> "IndexVector":
        return self + (-other)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def rho0(self) -> int:
        return self[0]

    def support(self) -> tuple[int, ...]:
        return tuple(lvl for lvl, _ in self.entries)

    def rho_plus(self) -> "IndexVector":
        """Projection onto the levels alpha > 0."""
        return IndexVector((lvl, val) for lvl, val in self.entries if lvl > 0)

    def rho_minus(self) -> "IndexVector":
        """Projection onto the levels alpha < 0."""
        return IndexVector((lvl, val) for lvl, val in self.entries if lvl < 0)

    def rho(self) -> "IndexVector":
        """Everything except level 0."""
        return IndexVector((lvl, val) for lvl, val in self.entries if lvl != 0)

    def within(self, window: "Window") -> bool:
        """True if every nonzero level other than 0 lies in the window."""
        return all(window.contains(lvl) for lvl in self.support() if lvl != 0)


@dataclass(frozen=True)
class Window:
    """Half-open range [lo, hi) of parabolic levels, lo < 0 < hi."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not self.lo < 0 < self.hi:
            raise WindowError(f"window needs lo < 0 < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse "lo:hi"."""
        try:
            lo, hi = (int(part) for part in text.split(":"))
        except ValueError as e:
            raise WindowError(f"window must look like lo:hi, got {text!r}") from e
        return cls(lo, hi)

    def contains(self, level: int) -> bool:
        return self.lo <= level < self.hi

    def levels(self) -> tuple[int, ...]:
        """Nonzero levels of the window in increasing order."""
        return tuple(lvl for lvl in range(self.lo, self.hi) if lvl != 0)

    def hull(self, other: "Window") -> "Window":
        return Window(min(self.lo, other.lo), max(self.hi, other.hi))

    @classmethod
    def around(cls, v: IndexVector) -> "Window":
        """Smallest window containing the support of v."""
        levels = [lvl for lvl in v.support() if lvl != 0]
        return cls(min([-1, *levels]), max([1, *(lvl + 1 for lvl in levels)]))

    def to_json(self) -> list[int]:
        return [self.lo, self.hi]


class GeneratorKind(Enum):
    """Membership of an index vector in C, -C or neither."""

    POS = "C"
    NEG = "-C"
    NONE = "none"


@dataclass(frozen=True)
class GeneratorClass:
    """Result of classify_generator."""

    kind: GeneratorKind
    level: Optional[int] = None

    @property
    def is_generator(self) -> bool:
        return self.kind is not GeneratorKind.NONE

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "level": self.level}


class ShiftConvention(Enum):
    """Boundary convention of shift_index for beta < 0."""

    LITERAL = "literal"
    D_PRESERVING = "d-preserving"


def norms(v: IndexVector) -> tuple[int, int, int]:
    """Return (|v|, |v|_+, |v|_-)."""
    total = sum(abs(val) for _, val in v.entries)
    plus = sum(abs(val) for lvl, val in v.entries if lvl > 0)
    minus = sum(abs(val) for lvl, val in v.entries if lvl < 0)
    return total, plus, minus


def degree(v: IndexVector) -> int:
    """d(v) = 2 rho_0(v) + |v|_+ - |v|_-, the dimension of X^[v]."""
    _, plus, minus = norms(v)
    return 2 * v.rho0 + plus - minus


def is_admissible(v: IndexVector) -> bool:
    """Membership in the admissible set."""
    if any(val < 0 for _, val in v.entries):
        return False
    return v.rho0 - norms(v)[2] >= 0


def epsilon(v: IndexVector) -> int:
    """1 if v is zero, else 0."""
    return 0 if v else 1


def _in_positive_cone(m: int, level: int) -> bool:
    if level > 0:
        return m >= 0
    return m >= 1


def classify_generator(u: IndexVector) -> GeneratorClass:
    """Decide whether u lies in C_alpha, in -C_alpha, or in neither."""
    jumps = [(lvl, val) for lvl, val in u.entries if lvl != 0]
    m = u.rho0
    if not jumps:
        if m >= 1:
            return GeneratorClass(GeneratorKind.POS, 0)
        if m <= -1:
            return GeneratorClass(GeneratorKind.NEG, 0)
        return GeneratorClass(GeneratorKind.NONE)
    if len(jumps) == 1:
        level, val = jumps[0]
        if val == 1 and _in_positive_cone(m, level):
            return GeneratorClass(GeneratorKind.POS, level)
        if val == -1 and _in_positive_cone(-m, level):
            return GeneratorClass(GeneratorKind.NEG, level)
    return GeneratorClass(GeneratorKind.NONE)


def _require_generator(u: IndexVector) -> GeneratorClass:
    cls = classify_generator(u)
    if not cls.is_generator:
        raise NotGeneratorError(f"{u} is not in C or -C")
    return cls


def generator(m: int, level: int) -> IndexVector:
    """The element m*e_0 + e_level of C_level (m*e_0 for level 0)."""
    u = IndexVector({0: m}) if level == 0 else IndexVector({0: m, level: 1})
    cls = classify_generator(u)
    if cls.kind is not GeneratorKind.POS or cls.level != level:
        raise NotGeneratorError(f"m={m} is out of range for C_{level}")
    return u


def generators(levels: Iterable[int], max_m: int) -> list[IndexVector]:
    """All u in C over the given levels (0 included if listed) with rho_0(u) <= max_m."""
    found = []
    for level in sorted(set(levels)):
        start = 0 if level > 0 else 1
        found.extend(generator(m, level) for m in range(start, max_m + 1))
    return found


def sign(u: IndexVector) -> int:
    """sgn(u): +1 on C, -1 on -C."""
    cls = _require_generator(u)
    return 1 if cls.kind is GeneratorKind.POS else -1


def g_value(u: IndexVector) -> int:
    """-1 on -C_+ and on C_-, else 0."""
    cls = _require_generator(u)
    if cls.kind is GeneratorKind.NEG and cls.level > 0:
        return -1
    if cls.kind is GeneratorKind.POS and cls.level < 0:
        return -1
    return 0


def mu(u: IndexVector) -> int:
    """Commutator constant of the Heisenberg relation for q_u and q_{-u}."""
    sgn = sign(u)
    minus = norms(u)[2]
    base = -abs(u.rho0) + minus
    power = base if epsilon(u.rho()) else 1
    return sgn * power * _parity_sign(u.rho0 - minus)


def shift_index(
    v: IndexVector,
    beta: int,
    window: Window,
    convention: ShiftConvention = ShiftConvention.D_PRESERVING,
) -> tuple[IndexVector, Window]:
    """Index map v -> v'(beta) between parabolic Hilbert schemes of two windows.

    For beta > 0 the levels alpha >= beta are folded below the window and their
    mass is added to rho_0. For beta < 0 the levels alpha <= beta are moved above
    the window and their mass is removed from rho_0; the literal convention moves
    only alpha < beta, which drops rho_beta from the degree.

    Returns the image and a window containing its support.
    """
    if beta == 0 or not window.contains(beta):
        raise WindowError(f"beta={beta} must be nonzero and inside {window.to_json()}")
    if not is_admissible(v):
        raise NotAdmissibleError(f"{v} is not admissible")
    if not v.within(window):
        raise WindowError(f"support of {v} is not inside {window.to_json()}")

    width = window.hi - window.lo
    shifted: dict[int, int] = {}
    if beta > 0:
        moved = [(lvl, val) for lvl, val in v.entries if lvl >= beta]
        shifted[0] = v.rho0 + sum(val for _, val in moved)
        for lvl, val in v.entries:
            if lvl < 0 or 0 < lvl < beta:
                shifted[lvl] = val
        for lvl, val in moved:
            shifted[lvl - width] = val
        label = (window.lo - window.hi + beta, beta)
    else:
        inclusive = convention is ShiftConvention.D_PRESERVING
        shifted[0] = v.rho0 - sum(val for lvl, val in v.entries if lvl <= beta)
        for lvl, val in v.entries:
            if beta < lvl < 0 or lvl > 0:
                shifted[lvl] = val
            elif lvl < beta or (inclusive and lvl == beta):
                shifted[lvl + width] = val
        label = (beta + 1, beta + width + (1 if inclusive else 0))

    image = IndexVector(shifted)
    new_window = Window(min(label[0], -1), max(label[1], 1))
    logger.debug("shift %s by %d (%s) -> %s in %s", v, beta, convention.value, image, label)
    return image, new_window


def dim_incidence(v: IndexVector, u: IndexVector) -> Optional[int]:
    """Dimension of the incidence variety Z(v, u), or None when it is empty."""
    g = g_value(u)
    if not (is_admissible(v) and is_admissible(v + u)):
        return None
    return degree(v) + u.rho0 + 1 + g


def dim_composition(v: IndexVector, u1: IndexVector, u2: IndexVector) -> int:
    """Expected dimension of the composition variety for q_{u1} q_{u2}."""
    g1, g2 = g_value(u1), g_value(u2)
    return degree(v) + (u1 + u2).rho0 + 2 + g1 + g2


def punctual_dimension(v: IndexVector) -> int:
    """Dimension of the punctual parabolic Hilbert scheme, for rho_-(v) = 0."""
    if not is_admissible(v) or v.rho_minus():
        raise NotAdmissibleError(f"{v} must be admissible with rho_-(v) = 0")
    return v.rho0 - epsilon(v.rho_plus()) + epsilon(v)


def _in_half_lattice(v: IndexVector) -> bool:
    """Admissible with no negative-level support."""
    return all(lvl >= 0 and val >= 0 for lvl, val in v.entries)


def _is_half_generator(u: IndexVector) -> bool:
    cls = classify_generator(u)
    return cls.kind is GeneratorKind.POS and cls.level >= 0


def incidence_stratum_excess(u: IndexVector, a: IndexVector) -> int:
    """Dimension of the stratum of Z(v, u) labelled by a, minus d(v) + rho_0(u) + 1."""
    if not _is_half_generator(u):
        raise NotGeneratorError(f"{u} must lie in C_alpha with alpha >= 0")
    b = a + u
    eps_a, eps_b = epsilon(a.rho_plus()), epsilon(b.rho_plus())
    return -norms(a)[1] - eps_a + epsilon(a) - eps_b + eps_a * eps_b


def pair_lemma_lhs(u: IndexVector, a: IndexVector) -> int:
    """Left side of the dimension estimate for one incidence factor (bounded by g(u))."""
    b = a + u
    return (
        -norms(a)[1]
        - epsilon(a.rho_plus())
        + epsilon(a)
        - epsilon(b.rho_plus())
        + epsilon(b)
        + epsilon(u.rho_plus()) * epsilon(a.rho()) * epsilon(b.rho_plus())
    )


def triple_lemma_lhs(u1: IndexVector, u2: IndexVector, a: IndexVector) -> int:
    """Left side of the estimate for a composition (bounded by g(u1) + g(u2))."""
    c = a + u1 + u2
    return (
        -norms(a)[1]
        - 1
        - epsilon(a.rho_plus())
        + epsilon(a)
        - epsilon(c.rho_plus())
        + epsilon(c)
        + epsilon(u1.rho_plus()) * epsilon(u2.rho_plus()) * epsilon(a.rho_plus())
    )


def _box_vectors(levels: Iterable[int], bound: int) -> list[IndexVector]:
    """Admissible vectors over the levels with every entry in [0, bound]."""
    levels = tuple(levels)
    found = []
    for values in itertools.product(range(bound + 1), repeat=len(levels)):
        v = IndexVector(zip(levels, values))
        if is_admissible(v):
            found.append(v)
    return found


def _signed_generators(levels: Iterable[int], bound: int) -> list[IndexVector]:
    positive = generators(levels, bound)
    return positive + [-u for u in positive]


def _lemma_chunk(args: tuple[int, IndexVector]) -> Report:
    """Check every case whose first generator is u1."""
    bound, u1 = args
    report = Report(suite="lemmas")
    half_levels = [lvl for lvl in LEMMA_LEVELS if lvl >= 0]
    gens = _signed_generators(half_levels, bound)
    vectors = _box_vectors(half_levels, bound)
    g1 = g_value(u1)

    for a in vectors:
        b = a + u1
        if not _in_half_lattice(b):
            report.bump("skipped", 1 + len(gens))
            continue
        report.bump("pair_cases")
        lhs = pair_lemma_lhs(u1, a)
        expect_equal = not a or not b
        if lhs == g1:
            report.bump("pair_equalities")
        if lhs > g1 or (lhs == g1) != expect_equal:
            report.add_violation(family="pair", u=u1.to_json(), a=a.to_json(), lhs=lhs, g=g1)

        if _is_half_generator(u1):
            report.bump("incidence_cases")
            excess = incidence_stratum_excess(u1, a)
            if excess > 0 or (excess == 0) == bool(a):
                report.add_violation(
                    family="incidence", u=u1.to_json(), a=a.to_json(), excess=excess
                )

        for u2 in gens:
            if not _in_half_lattice(b + u2):
                report.bump("skipped")
                continue
            report.bump("triple_cases")
            rhs = g1 + g_value(u2)
            lhs = triple_lemma_lhs(u1, u2, a)
            expect_equal = _is_half_generator(u1) and not (u1 + u2) and not a
            if lhs == rhs:
                report.bump("triple_equalities")
            if lhs > rhs or (lhs == rhs) != expect_equal:
                report.add_violation(
                    family="triple",
                    u1=u1.to_json(),
                    u2=u2.to_json(),
                    a=a.to_json(),
                    lhs=lhs,
                    g=rhs,
                )
    return report


def verify_dimension_lemmas(bound: int, jobs: Optional[int] = 1) -> Report:
    """Exhaustively check the dimension estimates for incidence and composition varieties.

    Generators u and vectors a range over the levels -2..2 with entries and
    rho_0(u) bounded by `bound`. The estimates concern the half lattice without
    negative levels, so cases touching a negative level, or whose sums a + u1
    and a + u1 + u2 leave the half lattice, are counted as skipped.
    """
    if bound < 1:
        return Report(suite="lemmas", counts={"pair_cases": 0, "triple_cases": 0})

    half_levels = [lvl for lvl in LEMMA_LEVELS if lvl >= 0]
    all_gens = len(_signed_generators(LEMMA_LEVELS, bound))
    all_vectors = len(_box_vectors(LEMMA_LEVELS, bound))
    half_gens = _signed_generators(half_levels, bound)
    half_vectors = len(_box_vectors(half_levels, bound))

    report = run_partitioned("lemmas", _lemma_chunk, ((bound, u) for u in half_gens), jobs)
    # Cases outside the half lattice; the chunks count the ones whose sums leave it.
    report.bump(
        "skipped",
        all_gens * all_vectors
        - len(half_gens) * half_vectors
        + all_gens**2 * all_vectors
        - len(half_gens) ** 2 * half_vectors,
    )
    report.details["enumerated"] = all_gens * all_vectors + all_gens**2 * all_vectors
    report.details["levels"] = list(LEMMA_LEVELS)
    report.details["bound"] = bound
    logger.info(
        "Dimension lemmas: %d pair, %d triple, %d incidence cases, %d violations",
        report.counts.get("pair_cases", 0),
        report.counts.get("triple_cases", 0),
        report.counts.get("incidence_cases", 0),
        report.violation_count,
    )
    return report


def admissible_in_window(window: Window, max_n: int, cap: int) -> Iterator[IndexVector]:
    """Admissible v with support in the window, rho_0 <= max_n and jumps <= cap."""
    levels = window.levels()
    for jumps in itertools.product(range(cap + 1), repeat=len(levels)):
        minus = sum(val for lvl, val in zip(levels, jumps) if lvl < 0)
        for n in range(minus, max_n + 1):
            yield IndexVector({0: n, **dict(zip(levels, jumps))})
