"""Truncated Fock model of the Heisenberg algebra.

The model is the graded symmetric algebra on the creation generators
(u, a) with u in C and a a basis class of Y_u, where Y_u is X when u has no
jump and D otherwise. Classes of odd degree anticommute. q_u(a) acts by
multiplication for u in C and by the super-derivation induced by the pairing
for u in -C.
"""

import logging
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Mapping, Optional

from sympy import Matrix

from .errors import NotGeneratorError, SpaceMismatchError
from .genfun import BettiData, parabolic_poincare_series
from .lattice import (
    GeneratorKind,
    IndexVector,
    classify_generator,
    g_value,
    generators,
    mu,
)
from .report import Report
from .series import MultiDegree, MultiSeries, TruncationOrder
from .workers import resolve_jobs, run_partitioned

logger = logging.getLogger(__name__)

Pairing = dict[tuple[int, int], int]
Vector = dict["FockState", int]
# Linear combinations keyed by factor tuples, and (x_0, x_alpha) degrees.
Terms = dict[tuple[int, ...], int]
XDegree = tuple[int, tuple[int, ...]]
PairChunk = tuple[BettiData, TruncationOrder, tuple[tuple[int, int], ...]]


class Space(Enum):
    """The two spaces carrying cohomology classes."""

    X = 4
    D = 2

    @property
    def dim(self) -> int:
        """Real dimension."""
        return self.value


def space_of(u: IndexVector) -> Space:
    return Space.X if not u.rho() else Space.D


def _hyperbolic_pairing(degrees: tuple[int, ...], dim: int) -> Pairing:
    """Antidiagonal pairing between complementary degrees, skew on odd middle degree."""
    by_degree: dict[int, list[int]] = defaultdict(list)
    for index, deg in enumerate(degrees):
        by_degree[deg].append(index)
    pairing: Pairing = {}
    for deg, classes in by_degree.items():
        dual = by_degree.get(dim - deg, [])
        if len(dual) != len(classes):
            raise SpaceMismatchError(f"degrees {deg} and {dim - deg} have different ranks")
        size = len(classes)
        if deg * 2 < dim:
            for k, i in enumerate(classes):
                j = dual[size - 1 - k]
                pairing[(i, j)] = 1
                pairing[(j, i)] = -1 if deg * (dim - deg) % 2 else 1
        elif deg * 2 == dim:
            if deg % 2 and size % 2:
                raise SpaceMismatchError(f"odd middle degree {deg} needs even rank")
            for k, i in enumerate(classes):
                j = classes[size - 1 - k]
                pairing[(i, j)] = -1 if deg % 2 and k >= size / 2 else 1
    return pairing


class CohModel:
    """Basis classes of H*(X) and H*(D) with their intersection pairings."""

    def __init__(
        self,
        degrees: Mapping[Space, tuple[int, ...]],
        pairings: Optional[Mapping[Space, Pairing]] = None,
        check: bool = True,
    ) -> None:
        self.degrees = {space: tuple(degrees.get(space, ())) for space in Space}
        if pairings is None and check:
            pairings = {
                space: _hyperbolic_pairing(self.degrees[space], space.dim) for space in Space
            }
        self.pairings = {space: dict((pairings or {}).get(space, {})) for space in Space}
        if check:
            self.validate()

    @classmethod
    def from_betti(cls, betti: BettiData, check: bool = True) -> "CohModel":
        """Classes ordered by degree; check=False skips building the pairing."""
        degrees = {
            Space.X: tuple(deg for deg, b in enumerate(betti.surface) for _ in range(b)),
            Space.D: tuple(deg for deg, b in enumerate(betti.divisor) for _ in range(b)),
        }
        return cls(degrees, check=check)

    def validate(self) -> None:
        """Check degree support, graded symmetry and non-degeneracy."""
        for space in Space:
            degrees, pairing = self.degrees[space], self.pairings[space]
            size = len(degrees)
            for (i, j), value in pairing.items():
                if not (0 <= i < size and 0 <= j < size):
                    raise SpaceMismatchError(f"pairing index ({i}, {j}) outside {space.name}")
                if value and degrees[i] + degrees[j] != space.dim:
                    raise SpaceMismatchError(
                        f"pairing of non-complementary classes on {space.name}"
                    )
                swapped = pairing.get((j, i), 0)
                if swapped != (-1) ** (degrees[i] * degrees[j]) * value:
                    raise SpaceMismatchError(f"pairing on {space.name} is not graded symmetric")
            if size:
                matrix = Matrix(size, size, lambda i, j: pairing.get((i, j), 0))
                if matrix.det() == 0:
                    raise SpaceMismatchError(f"pairing on {space.name} is degenerate")

    def class_count(self, space: Space) -> int:
        return len(self.degrees[space])

    def degree(self, space: Space, index: int) -> int:
        self._check_index(space, index)
        return self.degrees[space][index]

    def integral(self, space: Space, i: int, j: int) -> int:
        """The integral of a_i * a_j over the space."""
        self._check_index(space, i)
        self._check_index(space, j)
        return self.pairings[space].get((i, j), 0)

    def _check_index(self, space: Space, index: int) -> None:
        if not 0 <= index < len(self.degrees[space]):
            raise SpaceMismatchError(f"class {index} does not exist on {space.name}")


def pairing(model: CohModel, u: IndexVector, a: int, a2: int) -> int:
    """mu(u) times the integral of a * a2 over Y_u."""
    return mu(u) * model.integral(space_of(u), a, a2)


@dataclass(frozen=True, order=True)
class FockState:
    """Monomial in the creation generators, as sorted generator indices."""

    factors: tuple[int, ...] = ()


@dataclass(frozen=True)
class Operator:
    """q_u(a) resolved against the generators of one FockSpace.

    A creation operator carries the index of its generator (None when the
    generator leaves the order); an annihilation operator carries the pairing
    value with every generator it removes.
    """

    u: IndexVector
    a: int
    kind: GeneratorKind
    parity: int
    creates: Optional[int] = None
    targets: Mapping[int, int] = field(default_factory=dict)

    @property
    def is_creation(self) -> bool:
        return self.kind is GeneratorKind.POS


class FockSpace:
    """Fock model truncated to the x-degrees admitted by an order."""

    def __init__(self, model: CohModel, order: TruncationOrder) -> None:
        self.model = model
        self.order = order
        levels = (0, *order.levels)
        self.generators: list[tuple[IndexVector, int]] = [
            (u, a)
            for u in generators(levels, order.n0)
            for a in range(model.class_count(space_of(u)))
            if order.key(MultiDegree.from_vector(u)) is not None
        ]
        self._index = {gen: k for k, gen in enumerate(self.generators)}
        self._parity = [model.degree(space_of(u), a) % 2 for u, a in self.generators]
        self._keys = [order.key(self.generator_degree(u, a)) for u, a in self.generators]
        self._states: Optional[list[FockState]] = None
        self._state_x: list[XDegree] = []
        # Keyed by signed generator or by generator vector.
        self._operators: dict[tuple[IndexVector, int], Operator] = {}
        self._containing: Optional[dict[IndexVector, frozenset[int]]] = None
        self._fitting: dict[IndexVector, frozenset[int]] = {}

    def generator_degree(self, u: IndexVector, a: int) -> MultiDegree:
        """Bidegree of q_u(a): (deg a + 2(rho_0(u) - 1 - g(-u)), u)."""
        z = self.model.degree(space_of(u), a) + 2 * (u.rho0 - 1 - g_value(-u))
        return MultiDegree.from_vector(u, z)

    def state_degree(self, state: FockState) -> MultiDegree:
        z, x0, xs = 0, 0, [0] * len(self.order.levels)
        for g in state.factors:
            gz, gx0, gxs = self._keys[g]
            z, x0 = z + gz, x0 + gx0
            xs = [p + q for p, q in zip(xs, gxs)]
        return self.order.degree((z, x0, tuple(xs)))

    def _x_degree(self, factors: tuple[int, ...]) -> XDegree:
        x: XDegree = (0, (0,) * len(self.order.levels))
        for g in factors:
            _, gx0, gxs = self._keys[g]
            x = _add_x(x, (gx0, gxs))
        return x

    def _fits(self, x0: int, xs: tuple[int, ...]) -> bool:
        return x0 <= self.order.n0 and all(
            deg <= cap for deg, cap in zip(xs, self.order.cap_vector())
        )

    def states(self) -> list[FockState]:
        """All basis states whose x-degree lies in the order, the vacuum first."""
        if self._states is None:
            found: list[tuple[tuple[int, ...], XDegree]] = []

            def extend(start: int, factors: tuple[int, ...], x: XDegree) -> None:
                found.append((factors, x))
                for g in range(start, len(self.generators)):
                    _, gx0, gxs = self._keys[g]
                    nx = _add_x(x, (gx0, gxs))
                    if not self._fits(*nx):
                        continue
                    extend(g + self._parity[g], factors + (g,), nx)

            extend(0, (), (0, (0,) * len(self.order.levels)))
            found.sort()
            self._states = [FockState(factors) for factors, _ in found]
            self._state_x = [x for _, x in found]
            logger.debug("Fock model has %d states", len(self._states))
        return self._states

    def operator(self, u: IndexVector, a: int) -> Operator:
        """Resolve q_u(a), validating u and the class a."""
        key = (u, a)
        op = self._operators.get(key)
        if op is not None:
            return op
        cls = classify_generator(u)
        if not cls.is_generator:
            raise NotGeneratorError(f"{u} is not in C or -C")
        parity = self.model.degree(space_of(u), a) % 2
        if cls.kind is GeneratorKind.POS:
            op = Operator(u, a, cls.kind, parity, creates=self._index.get((u, a)))
        else:
            targets = {}
            for f, (fu, fa) in enumerate(self.generators):
                if fu == -u:
                    value = pairing(self.model, u, a, fa)
                    if value:
                        targets[f] = value
            op = Operator(u, a, cls.kind, parity, targets=targets)
        self._operators[key] = op
        return op

    def _create(self, op: Operator, factors: tuple[int, ...]) -> tuple[Terms, bool]:
        g = op.creates
        if g is None:
            return {}, True
        if op.parity and g in factors:
            return {}, False
        pos = bisect_left(factors, g)
        created = factors[:pos] + (g,) + factors[pos:]
        if not self._fits(*self._x_degree(created)):
            return {}, True
        passed = sum(self._parity[f] for f in factors[:pos])
        sign = -1 if op.parity * passed % 2 else 1
        return {created: sign}, False

    def _annihilate(self, op: Operator, factors: tuple[int, ...]) -> Terms:
        out: Terms = defaultdict(int)
        passed = 0
        for pos, f in enumerate(factors):
            value = op.targets.get(f)
            if value:
                sign = -1 if op.parity * passed % 2 else 1
                out[factors[:pos] + factors[pos + 1 :]] += sign * value
            passed += self._parity[f]
        return {s: c for s, c in out.items() if c}

    def _act(self, op: Operator, factors: tuple[int, ...]) -> tuple[Terms, bool]:
        if op.is_creation:
            return self._create(op, factors)
        return self._annihilate(op, factors), False

    def _act_terms(self, op: Operator, terms: Terms) -> tuple[Terms, bool]:
        out: Terms = defaultdict(int)
        truncated = False
        for factors, coeff in terms.items():
            image, dropped = self._act(op, factors)
            truncated = truncated or dropped
            for target, c in image.items():
                out[target] += coeff * c
        return {s: c for s, c in out.items() if c}, truncated

    def apply_q(self, u: IndexVector, a: int, state: FockState) -> tuple[Vector, bool]:
        """Apply q_u(a) to a basis state.

        Returns the resulting combination and whether a term was dropped by the
        truncation.
        """
        image, truncated = self._act(self.operator(u, a), state.factors)
        return {FockState(f): c for f, c in image.items()}, truncated

    def apply_to_vector(self, u: IndexVector, a: int, vector: Vector) -> tuple[Vector, bool]:
        terms = {state.factors: c for state, c in vector.items()}
        image, truncated = self._act_terms(self.operator(u, a), terms)
        return {FockState(f): c for f, c in image.items()}, truncated

    def _states_containing(self, u: IndexVector) -> frozenset[int]:
        """Indices of states with a factor of vector u."""
        if self._containing is None:
            found: dict[IndexVector, set[int]] = defaultdict(set)
            for i, state in enumerate(self.states()):
                for f in state.factors:
                    found[self.generators[f][0]].add(i)
            self._containing = {u: frozenset(indices) for u, indices in found.items()}
        return self._containing.get(u, frozenset())

    def _states_fitting(self, u: IndexVector) -> frozenset[int]:
        """Indices of states that stay in the order after one more factor of vector u."""
        if u not in self._fitting:
            _, dx0, dxs = self.order.key(MultiDegree.from_vector(u))
            self.states()
            self._fitting[u] = frozenset(
                i for i, x in enumerate(self._state_x) if self._fits(*_add_x(x, (dx0, dxs)))
            )
        return self._fitting[u]

    def relevant_states(self, op1: Operator, op2: Operator) -> tuple[list[int], int, int]:
        """States on which the commutator of op1 and op2 has to be evaluated.

        For u1 + u2 != 0 a state is visited only if it holds a factor for every
        annihilator of the pair, since both products vanish otherwise. The
        vacuum is always visited. States whose creation images leave the order
        are dropped. Returns (indices, trivial, skipped).
        """
        total = len(self.states())
        creators = [op for op in (op1, op2) if op.is_creation]
        if any(op.creates is None for op in creators):
            return [], 0, total
        if op1.u + op2.u:
            wanted = [self._states_containing(-op.u) for op in (op1, op2) if not op.is_creation]
            relevant = frozenset.intersection(*wanted) if wanted else frozenset()
            relevant |= {0}
        else:
            relevant = frozenset(range(total))
        fitting = relevant
        for op in creators:
            fitting &= self._states_fitting(op.u)
        return sorted(fitting), total - len(relevant), len(relevant) - len(fitting)

    def commutator_check(
        self, u1: IndexVector, a1: int, u2: IndexVector, a2: int, both_orders: bool = False
    ) -> Report:
        """Compare [q_{u1}(a1), q_{u2}(a2)] with its scalar value on every state in range.

        States where both products vanish identically are counted as trivial.
        With both_orders the reversed commutator is checked from the same
        products.
        """
        op1, op2 = self.operator(u1, a1), self.operator(u2, a2)
        orders = [(op1, op2), (op2, op1)] if both_orders else [(op1, op2)]
        swap = -1 if op1.parity * op2.parity else 1
        scalars = [
            0 if first.u + second.u else pairing(self.model, first.u, first.a, second.a)
            for first, second in orders
        ]
        visit, trivial, skipped = self.relevant_states(op1, op2)
        report = Report(suite="fock")
        report.bump("pairs_checked", len(orders))
        report.bump("states_trivial", trivial * len(orders))

        states = self.states()
        checked = 0
        for i in visit:
            factors = states[i].factors
            inner, cut_a = self._act(op2, factors)
            forward, cut_b = self._act_terms(op1, inner)
            inner, cut_c = self._act(op1, factors)
            backward, cut_d = self._act_terms(op2, inner)
            if cut_a or cut_b or cut_c or cut_d:
                skipped += 1
                continue
            checked += 1
            products = [(forward, backward), (backward, forward)]
            for (first, second), scalar, (ab, ba) in zip(orders, scalars, products):
                residual: Terms = defaultdict(int, ab)
                for s, c in ba.items():
                    residual[s] -= swap * c
                residual[factors] -= scalar
                nonzero = sum(1 for c in residual.values() if c)
                if nonzero:
                    report.add_violation(
                        u1=first.u.to_json(),
                        a1=first.a,
                        u2=second.u.to_json(),
                        a2=second.a,
                        state=self.state_json(states[i]),
                        residual=nonzero,
                    )
        report.bump("states_checked", checked * len(orders))
        report.bump("states_skipped", skipped * len(orders))
        return report

    def character(self) -> MultiSeries:
        """Count basis states by bidegree."""
        counts: dict[Any, int] = defaultdict(int)
        for state in self.states():
            counts[self.order.key(self.state_degree(state))] += 1
        return MultiSeries(self.order, counts)

    def signed_generators(self) -> list[tuple[IndexVector, int]]:
        """(u, a) for every creation generator, then the matching annihilators."""
        return [*self.generators, *((-u, a) for u, a in self.generators)]

    def state_json(self, state: FockState) -> list[list[Any]]:
        return [[self.generators[f][0].to_json(), self.generators[f][1]] for f in state.factors]


def _add_x(x: XDegree, y: XDegree) -> XDegree:
    return x[0] + y[0], tuple(p + q for p, q in zip(x[1], y[1]))


@lru_cache(maxsize=2)
def fock_space(betti: BettiData, order: TruncationOrder) -> FockSpace:
    """Shared model per process, so workers build it once."""
    return FockSpace(CohModel.from_betti(betti), order)


def fock_character(order: TruncationOrder, betti: BettiData) -> MultiSeries:
    """Character of the truncated Fock model; no pairing is needed to count states."""
    return FockSpace(CohModel.from_betti(betti, check=False), order).character()


def _heisenberg_chunk(args: PairChunk) -> Report:
    """Check the pairs (i, j) with i <= j, in both orders when i < j."""
    betti, order, pairs = args
    space = fock_space(betti, order)
    signed = space.signed_generators()
    report = Report(suite="fock")
    for i, j in pairs:
        u1, a1 = signed[i]
        u2, a2 = signed[j]
        report = report.merge(space.commutator_check(u1, a1, u2, a2, both_orders=i != j))
    return report


def verify_heisenberg(
    betti: BettiData, order: TruncationOrder, jobs: Optional[int] = 1
) -> Report:
    """Heisenberg relations for all generator pairs, and the character identity."""
    space = fock_space(betti, order)
    states = len(space.states())
    count = len(space.signed_generators())
    pairs = [(i, j) for i in range(count) for j in range(i, count)]
    chunks = resolve_jobs(jobs) * 4
    report = run_partitioned(
        "fock",
        _heisenberg_chunk,
        ((betti, order, tuple(pairs[k::chunks])) for k in range(chunks)),
        jobs,
    )

    expected = parabolic_poincare_series(betti, order.window, order)
    if space.character() != expected:
        report.add_violation(check="character")
    report.bump("characters_checked")
    report.details["states"] = states
    report.details["order"] = order.to_json()
    logger.info(
        "Heisenberg check: %d pairs, %d states, %d violations",
        report.counts.get("pairs_checked", 0),
        states,
        report.violation_count,
    )
    return report
