"""
Floer Complex Module
Holonomy-weighted Floer complexes of a Lagrangian pair: coboundary matrices over the Laurent ring,
the curvature identity d^2 = (W_L - W_K) Id, exact ranks at holonomy points and mutated local systems
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

import settings
from algebra import (
    LaurentPolynomial,
    MutationRule,
    RationalFunction,
    Scalar,
    apply_mutation,
    eval_at,
    gaussian,
    mutate_local_system,
    qq_to_fraction,
    random_laurent,
)
from errors import GenerationError, InconsistencyError, StructuralError

logger = logging.getLogger(__name__)


# -----------------------------
# Complexes
# -----------------------------
@dataclass(frozen=True)
class StripDatum:
    """Rigid strip from_point -> to_point with signed count and boundary classes on L and K"""
    from_point: str
    to_point: str
    count: int
    class_L: Tuple[int, ...]
    class_K: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_L", tuple(int(c) for c in self.class_L))
        object.__setattr__(self, "class_K", tuple(int(c) for c in self.class_K))


@dataclass(frozen=True)
class FloerComplex:
    generators: Tuple[str, ...]
    strips: Tuple[StripDatum, ...]
    variables_L: Tuple[str, ...]
    variables_K: Tuple[str, ...]
    potential_L: LaurentPolynomial
    potential_K: LaurentPolynomial

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "strips", tuple(self.strips))
        if not self.generators:
            raise StructuralError("a complex needs at least one generator")
        if len(set(self.generators)) != len(self.generators):
            raise StructuralError(f"generator labels are not unique: {self.generators}")
        if not self.variables_L or not self.variables_K:
            raise StructuralError(
                "L and K each need at least one holonomy variable; give a simply-connected side "
                "one variable with zero strip classes"
            )
        if set(self.variables_L) & set(self.variables_K):
            raise StructuralError("L and K holonomy variables must be disjoint")
        if self.potential_L.variables != tuple(self.variables_L):
            raise StructuralError(f"W_L must use the L variables {self.variables_L}")
        if self.potential_K.variables != tuple(self.variables_K):
            raise StructuralError(f"W_K must use the K variables {self.variables_K}")
        known = set(self.generators)
        for strip in self.strips:
            for label in (strip.from_point, strip.to_point):
                if label not in known:
                    raise StructuralError(f"strip refers to undeclared generator {label!r}")
            if len(strip.class_L) != self.rank_L or len(strip.class_K) != self.rank_K:
                raise StructuralError(
                    f"strip {strip.from_point}->{strip.to_point} classes must have lengths "
                    f"{self.rank_L} and {self.rank_K}"
                )

    @property
    def rank_L(self) -> int:
        return len(self.variables_L)

    @property
    def rank_K(self) -> int:
        return len(self.variables_K)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.variables_L) + tuple(self.variables_K)


@dataclass(frozen=True)
class CoboundaryMatrix:
    """Coboundary as a generator-indexed matrix of rational functions in the L then K variables"""
    generators: Tuple[str, ...]
    variables_L: Tuple[str, ...]
    variables_K: Tuple[str, ...]
    entries: Tuple[Tuple[RationalFunction, ...], ...]
    potential_L: RationalFunction
    potential_K: RationalFunction

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.variables_L) + tuple(self.variables_K)

    def entry(self, to_point: str, from_point: str) -> RationalFunction:
        return self.entries[self.generators.index(to_point)][self.generators.index(from_point)]


@dataclass
class DSquaredReport:
    ok: bool
    defect: Dict[Tuple[str, str], RationalFunction] = field(default_factory=dict)


@dataclass(frozen=True)
class RankResult:
    rank_d: int
    hf_dim: int


ComplexLike = Union[FloerComplex, CoboundaryMatrix]


# -----------------------------
# Coboundary
# -----------------------------
def coboundary_matrix(c: FloerComplex) -> CoboundaryMatrix:
    """Entry (q, p) sums count * x_K^class_K * x_L^(-class_L) over strips p -> q"""
    variables = c.variables
    size = len(c.generators)
    position = {g: i for i, g in enumerate(c.generators)}
    terms: List[List[Dict[Tuple[int, ...], int]]] = [[{} for _ in range(size)] for _ in range(size)]
    for strip in c.strips:
        exponents = tuple(-e for e in strip.class_L) + strip.class_K
        cell = terms[position[strip.to_point]][position[strip.from_point]]
        cell[exponents] = cell.get(exponents, 0) + strip.count
    entries = tuple(
        tuple(RationalFunction.from_laurent(LaurentPolynomial.from_terms(variables, cell)) for cell in row)
        for row in terms
    )
    return CoboundaryMatrix(
        generators=c.generators,
        variables_L=tuple(c.variables_L),
        variables_K=tuple(c.variables_K),
        entries=entries,
        potential_L=RationalFunction.from_laurent(c.potential_L.embed(variables)),
        potential_K=RationalFunction.from_laurent(c.potential_K.embed(variables)),
    )


def _as_matrix(c: ComplexLike) -> CoboundaryMatrix:
    return coboundary_matrix(c) if isinstance(c, FloerComplex) else c


def verify_d_squared(c: ComplexLike) -> DSquaredReport:
    """Exact check of M^2 = (W_L - W_K) Id; nonzero entries of the difference are the defect"""
    m = _as_matrix(c)
    size = len(m.generators)
    curvature = m.potential_L - m.potential_K
    defect = {}
    for i in range(size):
        for j in range(size):
            total = RationalFunction.from_laurent(LaurentPolynomial.zero(m.variables))
            for k in range(size):
                if m.entries[i][k].is_zero() or m.entries[k][j].is_zero():
                    continue
                total = total + m.entries[i][k] * m.entries[k][j]
            if i == j:
                total = total - curvature
            if not total.is_zero():
                defect[(m.generators[i], m.generators[j])] = total
    if defect:
        logger.info(f"❌ d^2 differs from (W_L - W_K) Id in {len(defect)} entries")
    return DSquaredReport(ok=not defect, defect=defect)


def _evaluated(m: CoboundaryMatrix, assign: Mapping[str, Scalar]) -> DomainMatrix:
    size = len(m.generators)
    rows = [[eval_at(entry, assign) if not entry.is_zero() else QQ_I.zero for entry in row] for row in m.entries]
    return DomainMatrix(rows, (size, size), QQ_I)


def hf_rank(c: ComplexLike, assign: Mapping[str, Scalar]) -> RankResult:
    """
    Exact rank of the coboundary at a holonomy point and hf_dim = #generators - 2 rank

    Raises:
        WallError: an entry's denominator vanishes at the point
        InconsistencyError: the evaluated coboundary does not square to zero
    """
    m = _as_matrix(c)
    matrix = _evaluated(m, assign)
    if not (matrix * matrix).is_zero_matrix:
        raise InconsistencyError("the coboundary does not square to zero at this point (W_L != W_K there)")
    rank = matrix.rank()
    return RankResult(rank_d=rank, hf_dim=len(m.generators) - 2 * rank)


# -----------------------------
# Mutation and gauge
# -----------------------------
def _rule_on_block(rule: MutationRule, m: CoboundaryMatrix) -> MutationRule:
    moved = (rule.mutated, *rule.fiber)
    outside = [v for v in moved if v not in m.variables_L]
    if outside:
        raise StructuralError(f"mutation must act on the L variables, got {outside}")
    return rule.extended_to(m.variables)


def mutate_complex(c: ComplexLike, rule: MutationRule) -> CoboundaryMatrix:
    """Forward substitution of every entry and of W_L; W_K is untouched"""
    m = _as_matrix(c)
    extended = _rule_on_block(rule, m)
    entries = tuple(
        tuple(entry if entry.is_zero() else apply_mutation(entry, extended, "forward") for entry in row)
        for row in m.entries
    )
    return CoboundaryMatrix(
        generators=m.generators,
        variables_L=m.variables_L,
        variables_K=m.variables_K,
        entries=entries,
        potential_L=apply_mutation(m.potential_L, extended, "forward"),
        potential_K=m.potential_K,
    )


def mutated_assignment(c: ComplexLike, rule: MutationRule, assign: Mapping[str, Scalar]) -> Dict[str, object]:
    """The local system rho^mu matching mutate_complex: z_n -> z_n (1 + sum fiber z_i)"""
    return mutate_local_system(assign, _rule_on_block(rule, _as_matrix(c)))


def gauge_transform(c: FloerComplex, shifts_L: Mapping[str, Sequence[int]],
                    shifts_K: Mapping[str, Sequence[int]]) -> FloerComplex:
    """Change of trivialisation at each generator; conjugates the coboundary by a diagonal monomial matrix"""
    zero_L, zero_K = (0,) * c.rank_L, (0,) * c.rank_K
    strips = []
    for strip in c.strips:
        a_p, a_q = shifts_L.get(strip.from_point, zero_L), shifts_L.get(strip.to_point, zero_L)
        b_p, b_q = shifts_K.get(strip.from_point, zero_K), shifts_K.get(strip.to_point, zero_K)
        strips.append(StripDatum(
            from_point=strip.from_point,
            to_point=strip.to_point,
            count=strip.count,
            class_L=tuple(e + q - p for e, q, p in zip(strip.class_L, a_q, a_p)),
            class_K=tuple(e + q - p for e, q, p in zip(strip.class_K, b_q, b_p)),
        ))
    return FloerComplex(c.generators, tuple(strips), c.variables_L, c.variables_K, c.potential_L, c.potential_K)


def disc_potential(variables: Sequence[str], classes: Sequence[Tuple[int, Sequence[int]]]) -> LaurentPolynomial:
    """W = sum of n_beta x^(boundary of beta) over Maslov 2 disc classes"""
    terms: Dict[Tuple[int, ...], int] = {}
    for count, boundary in classes:
        key = tuple(int(e) for e in boundary)
        terms[key] = terms.get(key, 0) + int(count)
    return LaurentPolynomial.from_terms(variables, terms)


# -----------------------------
# Fixtures
# -----------------------------
def fixture_variables(rank_L: int, rank_K: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    return tuple(f"x{i}" for i in range(1, rank_L + 1)), tuple(f"w{i}" for i in range(1, rank_K + 1))


def fixture_rule(c: ComplexLike) -> MutationRule:
    """Mutation of the last L variable with the other L variables as fiber"""
    variables_L = tuple(c.variables_L)
    return MutationRule.from_names(variables_L, variables_L[-1], variables_L[:-1])


def _random_class(rng: np.random.Generator, size: int, bound: int = 1) -> Tuple[int, ...]:
    return tuple(int(v) for v in rng.integers(-bound, bound + 1, size=size))


def _filtered_candidate(rng, generators, variables_L, variables_K) -> FloerComplex:
    labels = tuple(f"p{i}" for i in range(generators))
    low, high = labels[: max(1, generators // 2)], labels[max(1, generators // 2):]
    strips = [StripDatum(low[0], high[0], 1, (0,) * len(variables_L), (0,) * len(variables_K))]
    if generators > 2:
        for _ in range(int(rng.integers(1, 2 * generators + 1))):
            count = 0
            while count == 0:
                count = int(rng.integers(-2, 3))
            strips.append(StripDatum(
                str(rng.choice(low)), str(rng.choice(high)), count,
                _random_class(rng, len(variables_L)), _random_class(rng, len(variables_K)),
            ))
    level = int(rng.integers(1, 4))
    return FloerComplex(
        labels, tuple(strips), variables_L, variables_K,
        LaurentPolynomial.constant(variables_L, level), LaurentPolynomial.constant(variables_K, level),
    )


def _curved_candidate(rng, generators, variables_L, variables_K) -> FloerComplex:
    if generators % 2:
        raise StructuralError("curved fixtures need an even number of generators")
    w_L = random_laurent(variables_L, rng, max_terms=3, exponent_range=(-1, 1), coeff_range=(-2, 2))
    w_K = random_laurent(variables_K, rng, max_terms=2, exponent_range=(-1, 1), coeff_range=(-2, 2))
    labels = []
    strips = []
    for i in range(generators // 2):
        p, q = f"p{i}", f"q{i}"
        labels += [p, q]
        sign = int(rng.choice([-1, 1]))
        alpha = _random_class(rng, len(variables_K))
        beta = _random_class(rng, len(variables_L))
        strips.append(StripDatum(p, q, sign, beta, alpha))
        # q -> p carries (W_L - W_K) / (sign x_K^alpha x_L^-beta)
        for e, coeff in w_L.terms.items():
            strips.append(StripDatum(
                q, p, int(qq_to_fraction(coeff.x)) * sign, tuple(-(a + b) for a, b in zip(e, beta)), tuple(-a for a in alpha),
            ))
        for f, coeff in w_K.terms.items():
            strips.append(StripDatum(
                q, p, -int(qq_to_fraction(coeff.x)) * sign, tuple(-b for b in beta), tuple(a - b for a, b in zip(f, alpha)),
            ))
    return FloerComplex(tuple(labels), tuple(strips), variables_L, variables_K, w_L, w_K)


FAMILIES = {"filtered": _filtered_candidate, "curved": _curved_candidate}


def build_consistent_fixture(seed: int, generators: int = 2, rank_L: int = 2, rank_K: int = 1,
                             family: str = "filtered", max_attempts: Optional[int] = None) -> FloerComplex:
    """
    Deterministic complex satisfying d^2 = (W_L - W_K) Id, redrawn until the symbolic check passes

    Args:
        seed: random seed
        generators: number of intersection points (even for the curved family)
        rank_L, rank_K: ranks of H_1(L) and H_1(K)
        family: "filtered" (two grades, equal constant potentials) or "curved"
            (paired generators, nonconstant potentials)
        max_attempts: retry budget, FIXTURE_MAX_ATTEMPTS by default

    Returns:
        FloerComplex
    """
    if family not in FAMILIES:
        raise StructuralError(f"unknown fixture family {family!r}, expected one of {sorted(FAMILIES)}")
    if generators < 2:
        raise StructuralError("fixtures need at least two generators")
    if rank_L < 1 or rank_K < 1:
        raise StructuralError(f"fixture ranks must be positive, got {rank_L} and {rank_K}")
    variables_L, variables_K = fixture_variables(rank_L, rank_K)
    rng = np.random.default_rng(seed)
    attempts = max_attempts or settings.FIXTURE_MAX_ATTEMPTS
    for attempt in range(1, attempts + 1):
        candidate = FAMILIES[family](rng, generators, variables_L, variables_K)
        if verify_d_squared(candidate).ok:
            logger.info(f"✅ {family} fixture seed={seed} accepted after {attempt} attempt(s)")
            return candidate
        logger.warning(f"⚠️ {family} fixture seed={seed} attempt {attempt} rejected")
    raise GenerationError(f"no consistent {family} fixture for seed {seed} after {attempts} attempts")


def random_assignment(variables: Sequence[str], rng: np.random.Generator,
                      rule: Optional[MutationRule] = None, complex_values: bool = True) -> Dict[str, object]:
    """Exact Gaussian-rational point with nonzero coordinates, off the wall of the rule if given"""
    while True:
        point = {}
        for name in variables:
            value = gaussian(0)
            while not value:
                re = f"{int(rng.integers(-5, 6))}/{int(rng.integers(1, 5))}"
                im = f"{int(rng.integers(-3, 4))}/{int(rng.integers(1, 4))}" if complex_values else 0
                value = gaussian(re, im)
            point[name] = value
        if rule is None:
            return point
        wall = gaussian(1)
        for name in rule.fiber:
            wall += point[name]
        if wall:
            return point
