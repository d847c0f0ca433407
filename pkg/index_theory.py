"""
Index Bookkeeping Module
Fredholm indices of punctured discs, critical multiplicity and the vertical/horizontal split,
virtual dimensions, Sobolev weight windows and monotonicity constants
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from errors import StructuralError

logger = logging.getLogger(__name__)


# -----------------------------
# Records
# -----------------------------
@dataclass(frozen=True)
class IndexData:
    """
    Index inputs of a disc: Maslov index of the compactified projection, weighted count of
    its preimages of infinity (interior 2, boundary 1) and vanishing orders at critical touches
    """
    n: int
    maslov: int
    weighted_infinity: int = 0
    critical_touches: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise StructuralError(f"n must be at least 2, got {self.n}")
        if self.weighted_infinity < 0:
            raise StructuralError(f"weighted_infinity must be nonnegative, got {self.weighted_infinity}")
        touches = []
        for touch in self.critical_touches:
            if not 2 <= len(touch) <= self.n:
                raise StructuralError(
                    f"critical touch {list(touch)} must list between 2 and {self.n} vanishing orders"
                )
            if any(order < 1 for order in touch):
                raise StructuralError(f"vanishing orders must be positive, got {list(touch)}")
            touches.append(tuple(sorted(int(order) for order in touch)))
        object.__setattr__(self, "critical_touches", tuple(touches))


@dataclass(frozen=True)
class DiscClass:
    area: Fraction
    maslov: int
    boundary_class: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "area", Fraction(self.area))


@dataclass
class MonotonicityReport:
    mode: str
    constant: Optional[Fraction]
    consistent: bool
    violations: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class WeightWindow:
    """Open interval of admissible exponential weights"""
    lower: float
    upper: float

    def contains(self, delta: float) -> bool:
        return self.lower < delta < self.upper


# -----------------------------
# Index formulas
# -----------------------------
def critical_multiplicity(d: IndexData) -> int:
    """Sum over critical touches of every vanishing order except the largest"""
    return sum(sum(touch[:-1]) for touch in d.critical_touches)


def disc_index(d: IndexData) -> int:
    return d.n + d.maslov - d.weighted_infinity


def single_puncture_index(n: int, k: int) -> int:
    """Index of a disc with one boundary puncture at a chord of length k*pi/n"""
    if n < 2 or k < 1:
        raise StructuralError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    return n + k


def split_indices(d: IndexData) -> Tuple[int, int]:
    """(vertical, horizontal) indices; they sum to disc_index"""
    m_c = critical_multiplicity(d)
    vertical = d.n - 1 + 2 * m_c
    horizontal = 1 + d.maslov - d.weighted_infinity - 2 * m_c
    return vertical, horizontal


def critical_levels(d: IndexData) -> List[int]:
    """Number of vanishing coordinates at each critical touch"""
    return [len(touch) for touch in d.critical_touches]


def vertically_constrained_index(d: IndexData) -> int:
    return disc_index(d) - 2 * sum(critical_levels(d))


def virtual_dimension(ind: int, punctures: int, n: int, aut: int) -> int:
    """Index minus (n - 1) per puncture node minus domain automorphisms"""
    if punctures < 0 or aut < 0:
        raise StructuralError("punctures and aut must be nonnegative")
    return ind - punctures * (n - 1) - aut


# -----------------------------
# Weights
# -----------------------------
def sobolev_weight_window(n: int) -> WeightWindow:
    if n < 2:
        raise StructuralError(f"n must be at least 2, got {n}")
    return WeightWindow(0.0, math.pi / n)


def reeb_chord_eigenvalues(n: int, count: int) -> List[float]:
    """0, pi/n, 2 pi/n, ... (count values); the first positive one closes the weight window"""
    return [k * math.pi / n for k in range(count)]


# -----------------------------
# Monotonicity
# -----------------------------
def monotonicity_constant(classes: Sequence[DiscClass], mode: str = "lagrangian") -> MonotonicityReport:
    """
    Solve area = lambda * maslov ("lagrangian") or 2 * area = tau * maslov ("pair")
    from the first class with nonzero Maslov index and check every class exactly
    """
    if mode not in ("pair", "lagrangian"):
        raise StructuralError(f"mode must be pair or lagrangian, got {mode!r}")
    if not classes:
        raise StructuralError("monotonicity needs at least one disc class")
    weight = 2 if mode == "pair" else 1
    reference = next((c for c in classes if c.maslov != 0), None)
    if reference is None:
        raise StructuralError("every class has Maslov index 0; the constant is undetermined")

    constant = weight * reference.area / reference.maslov
    violations = []
    for k, c in enumerate(classes):
        if weight * c.area != constant * c.maslov:
            violations.append(f"class {k}: area {c.area} with Maslov {c.maslov} breaks the relation")
    if constant <= 0:
        violations.append(f"constant {constant} is not positive")
    if violations:
        logger.info(f"❌ not monotone ({mode}): {violations}")
        return MonotonicityReport(mode=mode, constant=None, consistent=False, violations=violations)
    return MonotonicityReport(mode=mode, constant=constant, consistent=True)


def rationalize_area(x: Union[float, Fraction], tol: float, max_denominator: int = 10 ** 6) -> Fraction:
    """Closest fraction with bounded denominator; fails when none lies within tol"""
    candidate = Fraction(x).limit_denominator(max_denominator)
    if abs(float(candidate) - float(x)) > tol:
        raise StructuralError(f"no fraction with denominator <= {max_denominator} within {tol} of {x}")
    return candidate
