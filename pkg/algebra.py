"""
Exact Laurent Algebra Module
Laurent polynomials and rational functions over the Gaussian rationals,
the mutation substitution x_n -> x_n (1 + x_1 + ... + x_{n-1}) and potential invariance checks
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Symbol
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from errors import DomainError, StructuralError, WallError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction, str, complex, Tuple, "GaussianRational"]


# -----------------------------
# Coefficients
# -----------------------------
def _qq(value: Union[int, Fraction, str]):
    """Exact rational as a sympy QQ element"""
    fraction = Fraction(value)
    return QQ(fraction.numerator, fraction.denominator)


def qq_to_fraction(q) -> Fraction:
    """sympy QQ element back to a Python Fraction"""
    return Fraction(int(q.numerator), int(q.denominator))


def gaussian(value: Scalar, imag: Union[int, Fraction, str] = 0):
    """
    Build an exact Gaussian rational

    Args:
        value: int, Fraction, "p/q" string, (re, im) pair, dict with re/im,
            a complex number with exactly representable parts, or a QQ_I element
        imag: imaginary part when value is a real scalar

    Returns:
        QQ_I element
    """
    if isinstance(value, PolyElement):
        raise StructuralError("expected a scalar, got a polynomial")
    if QQ_I.of_type(value):
        return value
    if isinstance(value, dict):
        return QQ_I(_qq(value.get("re", 0)), _qq(value.get("im", 0)))
    if isinstance(value, tuple):
        re, im = value
        return QQ_I(_qq(re), _qq(im))
    if isinstance(value, complex):
        return QQ_I(_qq(Fraction(value.real)), _qq(Fraction(value.imag)))
    if isinstance(value, float):
        return QQ_I(_qq(Fraction(value)), _qq(imag))
    return QQ_I(_qq(value), _qq(imag))


def gaussian_parts(c) -> Tuple[Fraction, Fraction]:
    return qq_to_fraction(c.x), qq_to_fraction(c.y)


def gaussian_to_complex(c) -> complex:
    re, im = gaussian_parts(c)
    return complex(float(re), float(im))


@lru_cache(maxsize=None)
def polynomial_ring(variables: Tuple[str, ...], real: bool = False) -> PolyRing:
    """Graded-lex polynomial ring over QQ(i) (or QQ) in the given ordered variables"""
    if not variables:
        raise StructuralError("at least one variable is required")
    if len(set(variables)) != len(variables):
        raise StructuralError(f"duplicate variable names in {variables}")
    return PolyRing([Symbol(v) for v in variables], QQ if real else QQ_I, grlex)


def _shift_poly(ring: PolyRing, poly: PolyElement, by: Sequence[int]) -> PolyElement:
    return ring.from_dict({tuple(a + b for a, b in zip(m, by)): c for m, c in poly.items()})


def _split_content(ring: PolyRing, poly: PolyElement) -> Tuple[Exponent, PolyElement]:
    """Factor out the largest monomial dividing every term"""
    if not poly:
        return (0,) * ring.ngens, poly
    content = tuple(min(column) for column in zip(*poly.keys()))
    if not any(content):
        return content, poly
    return content, _shift_poly(ring, poly, [-e for e in content])


# -----------------------------
# Laurent polynomials
# -----------------------------
@dataclass(frozen=True)
class LaurentPolynomial:
    """
    Laurent polynomial x^shift * poly with poly free of monomial content.

    The (shift, poly) pair is canonical, so dataclass equality is value equality.
    """
    variables: Tuple[str, ...]
    shift: Exponent
    poly: PolyElement

    # Constructors
    @classmethod
    def _canonical(cls, variables: Tuple[str, ...], shift: Sequence[int], poly: PolyElement) -> "LaurentPolynomial":
        ring = polynomial_ring(variables)
        if not poly:
            return cls(variables, (0,) * len(variables), ring.zero)
        content, reduced = _split_content(ring, poly)
        return cls(variables, tuple(s + c for s, c in zip(shift, content)), reduced)

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Mapping[Sequence[int], Scalar]) -> "LaurentPolynomial":
        variables = tuple(variables)
        ring = polynomial_ring(variables)
        cleaned: Dict[Exponent, object] = {}
        for exponents, coeff in terms.items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != len(variables):
                raise StructuralError(
                    f"exponent vector {exponents} has length {len(exponents)}, expected {len(variables)}"
                )
            value = gaussian(coeff)
            cleaned[exponents] = cleaned.get(exponents, QQ_I.zero) + value
        cleaned = {e: c for e, c in cleaned.items() if c}
        if not cleaned:
            return cls.zero(variables)
        shift = tuple(min(column) for column in zip(*cleaned.keys()))
        poly = ring.from_dict({tuple(a - s for a, s in zip(e, shift)): c for e, c in cleaned.items()})
        return cls._canonical(variables, shift, poly)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "LaurentPolynomial":
        variables = tuple(variables)
        return cls(variables, (0,) * len(variables), polynomial_ring(variables).zero)

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar = 1) -> "LaurentPolynomial":
        variables = tuple(variables)
        return cls.from_terms(variables, {(0,) * len(variables): value})

    @classmethod
    def monomial(cls, variables: Sequence[str], exponents: Sequence[int], coeff: Scalar = 1) -> "LaurentPolynomial":
        return cls.from_terms(variables, {tuple(exponents): coeff})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> Tuple["LaurentPolynomial", ...]:
        """One LaurentPolynomial per variable, in order"""
        variables = tuple(variables)
        size = len(variables)
        return tuple(
            cls.monomial(variables, [1 if j == i else 0 for j in range(size)]) for i in range(size)
        )

    # Views
    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.variables)

    @property
    def terms(self) -> Dict[Exponent, object]:
        """Map from full (possibly negative) exponent vectors to nonzero coefficients"""
        return {tuple(a + s for a, s in zip(m, self.shift)): c for m, c in self.poly.items()}

    def is_zero(self) -> bool:
        return not self.poly

    def is_monomial(self) -> bool:
        return len(self.poly) == 1

    def is_real(self) -> bool:
        return all(not c.y for c in self.poly.values())

    def embed(self, variables: Sequence[str]) -> "LaurentPolynomial":
        """The same polynomial viewed in a larger ordered variable list (matched by name)"""
        variables = tuple(variables)
        missing = [v for v in self.variables if v not in variables]
        if missing:
            raise StructuralError(f"cannot embed: variables {missing} missing from {variables}")
        position = [variables.index(v) for v in self.variables]
        terms = {}
        for exponents, coeff in self.terms.items():
            full = [0] * len(variables)
            for slot, e in zip(position, exponents):
                full[slot] = e
            terms[tuple(full)] = coeff
        return LaurentPolynomial.from_terms(variables, terms)

    # Arithmetic
    def _check(self, other: "LaurentPolynomial") -> None:
        if self.variables != other.variables:
            raise StructuralError(f"variable lists differ: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            self._check(other)
            return other
        return LaurentPolynomial.constant(self.variables, other)

    def __add__(self, other) -> "LaurentPolynomial":
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        low = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        ring = self.ring
        total = _shift_poly(ring, self.poly, [a - m for a, m in zip(self.shift, low)]) + \
            _shift_poly(ring, other.poly, [b - m for b, m in zip(other.shift, low)])
        return LaurentPolynomial._canonical(self.variables, low, total)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.variables, self.shift, -self.poly)

    def __sub__(self, other) -> "LaurentPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPolynomial":
        other = self._coerce(other)
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return LaurentPolynomial._canonical(self.variables, shift, self.poly * other.poly)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LaurentPolynomial":
        if exponent < 0:
            if not self.is_monomial():
                raise StructuralError("only monomials have Laurent inverses")
            (monom, coeff), = self.terms.items()
            return LaurentPolynomial.monomial(
                self.variables, [exponent * e for e in monom], QQ_I.one / coeff ** (-exponent)
            )
        shift = tuple(exponent * s for s in self.shift)
        return LaurentPolynomial._canonical(self.variables, shift, self.poly ** exponent)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for exponents, coeff in sorted(self.terms.items(), reverse=True):
            re, im = gaussian_parts(coeff)
            scalar = f"{re}" if not im else f"({re}{im:+}*I)"
            monomial = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exponents) if e
            )
            parts.append(f"{scalar}*{monomial}" if monomial else scalar)
        return " + ".join(parts)


def laurent_arith(a: LaurentPolynomial, b: LaurentPolynomial, op: str) -> LaurentPolynomial:
    """Exact add / sub / mul of two Laurent polynomials over the same variable list"""
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise StructuralError(f"unknown operation {op!r}, expected add, sub or mul")


def laurent_embed(poly: LaurentPolynomial, variables: Sequence[str]) -> LaurentPolynomial:
    return poly.embed(variables)


# -----------------------------
# Rational functions
# -----------------------------
def _coprime(ring: PolyRing, p: PolyElement, q: PolyElement) -> Tuple[PolyElement, PolyElement]:
    """Divide p and q by their gcd; uses the QQ heuristic gcd when everything is real"""
    if all(not c.y for c in p.values()) and all(not c.y for c in q.values()):
        real_ring = polynomial_ring(tuple(str(s) for s in ring.symbols), real=True)
        _, p_real, q_real = real_ring.from_dict({m: c.x for m, c in p.items()}).cofactors(
            real_ring.from_dict({m: c.x for m, c in q.items()})
        )
        return (
            ring.from_dict({m: QQ_I(c, QQ.zero) for m, c in p_real.items()}),
            ring.from_dict({m: QQ_I(c, QQ.zero) for m, c in q_real.items()}),
        )
    _, p_red, q_red = p.cofactors(q)
    return p_red, q_red


@dataclass(frozen=True)
class RationalFunction:
    """
    Normalized quotient of Laurent polynomials.

    Numerator and denominator share no monomial factor and no polynomial factor,
    and the denominator's grlex-leading coefficient is 1.
    """
    numerator: LaurentPolynomial
    denominator: LaurentPolynomial

    @classmethod
    def normalized(cls, numerator: LaurentPolynomial, denominator: LaurentPolynomial) -> "RationalFunction":
        numerator._check(denominator)
        variables = numerator.variables
        ring = numerator.ring
        if denominator.is_zero():
            raise StructuralError("denominator is the zero polynomial")
        if numerator.is_zero():
            return cls(numerator, LaurentPolynomial.constant(variables, 1))

        shift = [a - b for a, b in zip(numerator.shift, denominator.shift)]
        p, q = numerator.poly, denominator.poly
        if q.is_ground:
            p, q = p.quo_ground(q.LC), ring.one
        else:
            quotient, remainder = p.div(q)
            if not remainder:
                p, q = quotient, ring.one
            else:
                p, q = _coprime(ring, p, q)
                lc = q.LC
                p, q = p.quo_ground(lc), q.quo_ground(lc)

        top = LaurentPolynomial._canonical(variables, [max(s, 0) for s in shift], p)
        bottom = LaurentPolynomial._canonical(variables, [max(-s, 0) for s in shift], q)
        return cls(top, bottom)

    @classmethod
    def from_laurent(cls, poly: LaurentPolynomial) -> "RationalFunction":
        return cls.normalized(poly, LaurentPolynomial.constant(poly.variables, 1))

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.numerator.variables

    @property
    def is_laurent(self) -> bool:
        return self.denominator.poly == self.denominator.ring.one

    def as_laurent(self) -> LaurentPolynomial:
        if not self.is_laurent:
            raise StructuralError("rational function is not a Laurent polynomial")
        return self.numerator * (self.denominator ** -1)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def equals(self, other: "RationalFunction") -> bool:
        """Cross-multiplied comparison a/b == c/d iff a*d == c*b"""
        if self.variables != other.variables:
            raise StructuralError(f"variable lists differ: {self.variables} vs {other.variables}")
        return (self.numerator * other.denominator - other.numerator * self.denominator).is_zero()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, LaurentPolynomial):
            return RationalFunction.from_laurent(other)
        return RationalFunction.from_laurent(LaurentPolynomial.constant(self.variables, other))

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.denominator == other.denominator:
            return RationalFunction.normalized(self.numerator + other.numerator, self.denominator)
        return RationalFunction.normalized(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction.normalized(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction.normalized(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __repr__(self) -> str:
        if self.is_laurent:
            return repr(self.as_laurent())
        return f"({self.numerator!r}) / ({self.denominator!r})"


# -----------------------------
# Mutation
# -----------------------------
@dataclass(frozen=True)
class MutationRule:
    """
    Basis data of a mutation: the mutated variable x_n, the fiber variables
    x_1..x_{n-1} and the passive variables y_1..y_l, by position
    """
    variables: Tuple[str, ...]
    n: int
    mutated_index: int
    fiber_indices: Tuple[int, ...]
    passive_indices: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError(f"n must be positive, got {self.n}")
        if len(self.fiber_indices) != self.n - 1:
            raise StructuralError(
                f"expected {self.n - 1} fiber variables, got {len(self.fiber_indices)}"
            )
        used = [self.mutated_index, *self.fiber_indices, *self.passive_indices]
        if sorted(used) != list(range(len(self.variables))):
            raise StructuralError(
                f"mutated/fiber/passive positions {used} must partition the {len(self.variables)} variables"
            )

    @classmethod
    def from_names(cls, variables: Sequence[str], mutated: str, fiber: Sequence[str],
                   passive: Sequence[str] = (), n: Optional[int] = None) -> "MutationRule":
        variables = tuple(variables)
        try:
            return cls(
                variables=variables,
                n=len(fiber) + 1 if n is None else n,
                mutated_index=variables.index(mutated),
                fiber_indices=tuple(variables.index(v) for v in fiber),
                passive_indices=tuple(variables.index(v) for v in passive),
            )
        except ValueError as e:
            raise StructuralError(f"rule refers to an unknown variable: {e}")

    @property
    def mutated(self) -> str:
        return self.variables[self.mutated_index]

    @property
    def fiber(self) -> Tuple[str, ...]:
        return tuple(self.variables[i] for i in self.fiber_indices)

    @property
    def passive(self) -> Tuple[str, ...]:
        return tuple(self.variables[i] for i in self.passive_indices)

    def extended_to(self, variables: Sequence[str]) -> "MutationRule":
        """The same rule on a larger variable list; new variables are passive"""
        variables = tuple(variables)
        extra = [v for v in variables if v not in (self.mutated, *self.fiber)]
        return MutationRule.from_names(variables, self.mutated, self.fiber, extra, n=self.n)

    def wall_factor(self) -> PolyElement:
        """1 + x_1 + ... + x_{n-1} in the rule's polynomial ring"""
        ring = polynomial_ring(self.variables)
        factor = ring.one
        for i in self.fiber_indices:
            factor += ring.gens[i]
        return factor


def _substitute(poly: LaurentPolynomial, rule: MutationRule, forward: bool) -> RationalFunction:
    """
    Substitution on one Laurent polynomial. The result's denominator is a power of the wall
    factor times a monomial; the wall factor is linear, hence irreducible, so common factors
    are stripped by exact division instead of a gcd.
    """
    if poly.is_zero():
        return RationalFunction.from_laurent(poly)
    real = poly.is_real()
    ring = polynomial_ring(poly.variables, real=real)
    wall = ring.one
    for i in rule.fiber_indices:
        wall += ring.gens[i]
    slot = rule.mutated_index
    sign = 1 if forward else -1
    powers = {m: sign * (m[slot] + poly.shift[slot]) for m in poly.poly.keys()}
    clear = max(0, -min(powers.values()))

    cache: Dict[int, PolyElement] = {}

    def wall_power(k: int) -> PolyElement:
        if k not in cache:
            cache[k] = wall ** k
        return cache[k]

    top = ring.zero
    for monom, coeff in poly.poly.items():
        top += ring({monom: coeff.x if real else coeff}) * wall_power(powers[monom] + clear)
    if wall == ring.one:
        clear = 0
    while clear:
        quotient, remainder = top.div(wall)
        if remainder:
            break
        top, clear = quotient, clear - 1

    full = poly.ring

    def back(p: PolyElement) -> PolyElement:
        return full.from_dict({m: QQ_I(c, QQ.zero) for m, c in p.items()}) if real else p

    numerator = LaurentPolynomial._canonical(poly.variables, poly.shift, back(top))
    shift = numerator.shift
    # wall powers are monic under grlex and free of monomial content
    return RationalFunction(
        LaurentPolynomial(poly.variables, tuple(max(s, 0) for s in shift), numerator.poly),
        LaurentPolynomial(poly.variables, tuple(max(-s, 0) for s in shift), back(wall_power(clear))),
    )


def apply_mutation(value: Union[LaurentPolynomial, RationalFunction], rule: MutationRule,
                   direction: str = "forward") -> RationalFunction:
    """
    Substitute x_n -> x_n (1 + sum fiber x_i) (forward) or x_n -> x_n / (1 + sum fiber x_i) (inverse)

    Args:
        value: Laurent polynomial or rational function in the rule's variables
        rule: mutation basis data
        direction: "forward" or "inverse"

    Returns:
        normalized RationalFunction
    """
    if direction not in ("forward", "inverse"):
        raise StructuralError(f"direction must be forward or inverse, got {direction!r}")
    if value.variables != rule.variables:
        raise StructuralError(f"rule variables {rule.variables} do not match {value.variables}")
    forward = direction == "forward"
    if isinstance(value, RationalFunction):
        return _substitute(value.numerator, rule, forward) / _substitute(value.denominator, rule, forward)
    return _substitute(value, rule, forward)


@dataclass(frozen=True)
class MutationResult:
    """W o mu^{-1} together with its Laurent form when it has one"""
    value: RationalFunction
    is_laurent: bool
    laurent: Optional[LaurentPolynomial] = None


def mutate_potential(potential: LaurentPolynomial, rule: MutationRule) -> MutationResult:
    value = apply_mutation(potential, rule, "inverse")
    if value.is_laurent:
        return MutationResult(value=value, is_laurent=True, laurent=value.as_laurent())
    logger.info(f"⚠️ mutated potential has a non-monomial denominator: {value.denominator!r}")
    return MutationResult(value=value, is_laurent=False)


def verify_invariance(potential: LaurentPolynomial, rule: MutationRule) -> bool:
    """True iff the forward substitution undoes mutate_potential exactly"""
    if potential.variables != rule.variables:
        raise StructuralError(f"rule variables {rule.variables} do not match {potential.variables}")
    mutated = mutate_potential(potential, rule).value
    top = _substitute(mutated.numerator, rule, True)
    bottom = _substitute(mutated.denominator, rule, True)
    # top / bottom == potential, cross-multiplied
    return (top.numerator * bottom.denominator - potential * bottom.numerator * top.denominator).is_zero()


# -----------------------------
# Evaluation
# -----------------------------
def _point_values(variables: Sequence[str], point: Mapping[str, Scalar]) -> list:
    missing = [v for v in variables if v not in point]
    if missing:
        raise StructuralError(f"point does not assign {missing}")
    values = []
    for v in variables:
        value = gaussian(point[v])
        if not value:
            raise DomainError(f"coordinate {v} is zero; holonomies live in the algebraic torus")
        values.append(value)
    return values


def _eval_laurent(poly: LaurentPolynomial, values: Sequence) -> object:
    total = QQ_I.zero
    for exponents, coeff in poly.terms.items():
        term = coeff
        for value, e in zip(values, exponents):
            if e > 0:
                term = term * value ** e
            elif e < 0:
                term = QQ_I.quo(term, value ** (-e))
        total += term
    return total


def eval_at(f: Union[RationalFunction, LaurentPolynomial], point: Mapping[str, Scalar]):
    """
    Exact value of f at a point of the algebraic torus

    Raises:
        DomainError: a coordinate is zero
        WallError: the denominator vanishes at the point
    """
    if isinstance(f, LaurentPolynomial):
        f = RationalFunction.from_laurent(f)
    values = _point_values(f.variables, point)
    bottom = _eval_laurent(f.denominator, values)
    if not bottom:
        raise WallError(f"denominator {f.denominator!r} vanishes at the point")
    return QQ_I.quo(_eval_laurent(f.numerator, values), bottom)


def mutate_local_system(point: Mapping[str, Scalar], rule: MutationRule) -> Dict[str, object]:
    """rho -> rho^mu: z_n -> z_n (1 + z_1 + ... + z_{n-1}), other holonomies unchanged"""
    values = dict(zip(rule.variables, _point_values(rule.variables, point)))
    factor = QQ_I.one
    for name in rule.fiber:
        factor += values[name]
    if not factor:
        raise WallError("1 + sum of fiber holonomies vanishes; the mutated local system is undefined")
    values[rule.mutated] = values[rule.mutated] * factor
    return values


# -----------------------------
# Random potentials
# -----------------------------
def random_laurent(variables: Sequence[str], rng: np.random.Generator, max_terms: int = 12,
                   exponent_range: Tuple[int, int] = (-5, 5),
                   coeff_range: Tuple[int, int] = (-3, 3)) -> LaurentPolynomial:
    """Integer-coefficient Laurent polynomial with up to max_terms terms"""
    variables = tuple(variables)
    low, high = exponent_range
    terms: Dict[Exponent, int] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        exponents = tuple(int(e) for e in rng.integers(low, high + 1, size=len(variables)))
        coeff = 0
        while coeff == 0:
            coeff = int(rng.integers(coeff_range[0], coeff_range[1] + 1))
        terms[exponents] = terms.get(exponents, 0) + coeff
    return LaurentPolynomial.from_terms(variables, terms)


def standard_rule(n: int, passive: int = 0) -> MutationRule:
    """Rule on variables x1..xn, y1..y_passive with x_n mutated"""
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, passive + 1)]
    return MutationRule.from_names(xs + ys, xs[-1], xs[:-1], ys, n=n)


def iter_terms(poly: LaurentPolynomial) -> Iterable[Tuple[Exponent, object]]:
    """Terms in a deterministic order (descending exponent tuples)"""
    return sorted(poly.terms.items(), key=lambda item: item[0], reverse=True)
