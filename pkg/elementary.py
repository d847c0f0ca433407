"""
Elementary Sections Module
The classified elementary holomorphic sections over the half-planes Im z >= eps and Im z >= -eps,
their numerical verification, Reeb chord endpoints and the disc counts before and after mutation
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from errors import BranchError, DomainError, StructuralError
from index_theory import IndexData, disc_index, single_puncture_index

logger = logging.getLogger(__name__)

SIDES = ("upper", "lower")
SECTION_TOL = 1e-10


# -----------------------------
# Records
# -----------------------------
@dataclass(frozen=True)
class ElementarySection:
    """
    upper: theta . (z^{1/n}, ..., z^{1/n}) on Im z >= eps
    lower: theta . ((z+2i eps)^{1/n}, ..., z/(z+2i eps) (z+2i eps)^{1/n}, ...) on Im z >= -eps,
    the z/(z+2i eps) factor sitting in coordinate k
    """
    n: int
    eps: float
    side: str = "upper"
    k: int = 1
    theta: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise StructuralError(f"n must be at least 2, got {self.n}")
        if self.eps <= 0:
            raise StructuralError(f"eps must be positive, got {self.eps}")
        if self.side not in SIDES:
            raise StructuralError(f"side must be upper or lower, got {self.side!r}")
        if self.side == "lower" and not 1 <= self.k <= self.n:
            raise StructuralError(f"k must lie in [1, {self.n}], got {self.k}")
        theta = tuple(float(t) for t in self.theta) or (0.0,) * (self.n - 1)
        if len(theta) != self.n - 1:
            raise StructuralError(f"expected {self.n - 1} torus angles, got {len(theta)}")
        object.__setattr__(self, "theta", theta)

    @property
    def boundary_height(self) -> float:
        """Imaginary part of the boundary line"""
        return self.eps if self.side == "upper" else -self.eps


@dataclass(frozen=True)
class ReebChord:
    multiplicity: int
    start_sign: str = "+"
    start_angles: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.multiplicity < 1:
            raise StructuralError(f"chord multiplicity must be positive, got {self.multiplicity}")
        if self.start_sign not in ("+", "-"):
            raise StructuralError(f"start sign must be '+' or '-', got {self.start_sign!r}")


@dataclass(frozen=True)
class SectionGrid:
    """Rectangular sample grid with a finite-difference step"""
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int = 50
    ny: int = 50
    h: float = 1e-5

    @classmethod
    def for_section(cls, s: ElementarySection, h: float = 1e-5, size: int = 50) -> "SectionGrid":
        """x in [-1, 1], a unit-height band starting 0.25 inside the domain"""
        bottom = s.boundary_height + 0.25
        return cls(-1.0, 1.0, bottom, bottom + 1.0, size, size, h)

    def points(self) -> np.ndarray:
        xs = np.linspace(self.x0, self.x1, self.nx)
        ys = np.linspace(self.y0, self.y1, self.ny)
        return (xs[None, :] + 1j * ys[:, None]).ravel()


@dataclass
class SampleSet:
    interior: np.ndarray
    boundary: np.ndarray


@dataclass
class SectionReport:
    projection_residual: float
    modulus_spread: float
    ok: bool


@dataclass(frozen=True)
class IndexWitness:
    maslov: int
    weighted_infinity: int
    index: int
    single_puncture_index: int

    @property
    def consistent(self) -> bool:
        return self.index == self.single_puncture_index


@dataclass(frozen=True)
class ProjectionEstimate:
    maslov: int
    weighted_infinity: int
    winding: int = field(default=0)


# -----------------------------
# Evaluation
# -----------------------------
def nth_root(w: np.ndarray, n: int) -> np.ndarray:
    """Principal-like n-th root with the cut along the negative imaginary axis, arg in (-pi/2, 3pi/2]"""
    w = np.asarray(w, dtype=complex)
    on_cut = (np.abs(w.real) <= 1e-14 * np.maximum(1.0, np.abs(w))) & (w.imag <= 0)
    if np.any(on_cut):
        raise BranchError(f"n-th root evaluated on its cut at {w[on_cut].ravel()[0]}")
    arg = np.angle(w)
    arg = np.where(arg <= -math.pi / 2, arg + 2 * math.pi, arg)
    return np.abs(w) ** (1.0 / n) * np.exp(1j * arg / n)


def _phases(s: ElementarySection) -> np.ndarray:
    angles = list(s.theta) + [-sum(s.theta)]
    return np.exp(1j * np.array(angles))


def section_values(s: ElementarySection, z, check_domain: bool = True) -> np.ndarray:
    """Vectorised section: array of shape z.shape + (n,)"""
    z = np.asarray(z, dtype=complex)
    if check_domain and np.any(z.imag < s.boundary_height - SECTION_TOL):
        raise DomainError(f"points below the boundary line Im z = {s.boundary_height}")
    if s.side == "upper":
        root = nth_root(z, s.n)
        values = np.repeat(root[..., None], s.n, axis=-1)
    else:
        shifted = z + 2j * s.eps
        root = nth_root(shifted, s.n)
        values = np.repeat(root[..., None], s.n, axis=-1)
        values[..., s.k - 1] *= z / shifted
    return values * _phases(s)


def evaluate_section(s: ElementarySection, z: complex, check_domain: bool = True) -> List[complex]:
    return [complex(v) for v in section_values(s, complex(z), check_domain)]


def rotate_to_lower_half_plane(values: Sequence[complex], n: int) -> np.ndarray:
    """Multiply by exp(i pi/n); the product of coordinates changes sign"""
    return np.asarray(values, dtype=complex) * np.exp(1j * math.pi / n)


# -----------------------------
# Verification
# -----------------------------
def cr_residual_of(func: Callable[[np.ndarray], np.ndarray], grid: SectionGrid) -> float:
    """Max |du/dx + i du/dy| over the grid by central differences"""
    z = grid.points()
    h = grid.h
    du_dx = (func(z + h) - func(z - h)) / (2 * h)
    du_dy = (func(z + 1j * h) - func(z - 1j * h)) / (2 * h)
    return float(np.max(np.abs(du_dx + 1j * du_dy)))


def cr_residual(s: ElementarySection, grid: Union[SectionGrid, None] = None) -> float:
    """
    Cauchy-Riemann residual of the section on a grid

    Raises:
        BranchError: a difference stencil comes within one step of the root's cut
        DomainError: a grid point lies below the boundary line
    """
    grid = grid or SectionGrid.for_section(s)
    z = grid.points()
    h = grid.h
    stencil = np.concatenate([z + h, z - h, z + 1j * h, z - 1j * h])
    w = stencil if s.side == "upper" else stencil + 2j * s.eps
    distance = np.where(w.imag <= 0, np.abs(w.real), np.abs(w))
    if np.any(distance < h):
        raise BranchError(f"grid comes within h = {h} of the branch cut")
    if np.any(z.imag < s.boundary_height - SECTION_TOL):
        raise DomainError(f"grid reaches below the boundary line Im z = {s.boundary_height}")
    return cr_residual_of(lambda z: section_values(s, z, check_domain=False), grid)


def default_samples(s: ElementarySection, count: int = 1000, seed: int = 0) -> SampleSet:
    """Random interior points in a 4 x 2 box above the boundary line, and boundary points on it"""
    rng = np.random.default_rng(seed)
    b = s.boundary_height
    interior = rng.uniform(-2, 2, count) + 1j * (b + rng.uniform(0, 2, count))
    boundary = rng.uniform(-2, 2, count) + 1j * b
    return SampleSet(interior=interior, boundary=boundary)


def verify_section_properties(s: ElementarySection, samples: Union[SampleSet, None] = None) -> SectionReport:
    """
    Check projection * section = id on interior samples and equal coordinate moduli
    on boundary samples
    """
    samples = samples or default_samples(s)
    interior = section_values(s, samples.interior)
    projection_residual = float(np.max(np.abs(np.prod(interior, axis=-1) - samples.interior)))
    moduli = np.abs(section_values(s, samples.boundary))
    modulus_spread = float(np.max(np.max(moduli, axis=-1) - np.min(moduli, axis=-1)))
    ok = projection_residual < SECTION_TOL and modulus_spread < SECTION_TOL
    status = "✅" if ok else "❌"
    logger.info(
        f"{status} {s.side} section n={s.n} eps={s.eps}: projection {projection_residual:.2e}, "
        f"spread {modulus_spread:.2e}"
    )
    return SectionReport(projection_residual=projection_residual, modulus_spread=modulus_spread, ok=ok)


# -----------------------------
# Counts and chords
# -----------------------------
def elementary_count(side: str, mutated: bool, n: int) -> int:
    """One disc over the positive chord and n over the negative one; mutation swaps them"""
    if side not in SIDES:
        raise StructuralError(f"side must be upper or lower, got {side!r}")
    if n < 2:
        raise StructuralError(f"n must be at least 2, got {n}")
    single = (side == "upper") != mutated
    return 1 if single else n


def reeb_endpoint_sign(start_sign: str, l: int) -> str:
    if start_sign not in ("+", "-"):
        raise StructuralError(f"sign must be '+' or '-', got {start_sign!r}")
    if l < 1:
        raise StructuralError(f"chord multiplicity must be positive, got {l}")
    if l % 2 == 0:
        return start_sign
    return "-" if start_sign == "+" else "+"


def chord_start_point(chord: ReebChord, n: int) -> np.ndarray:
    """Point on S^{2n-1} with moduli 1/sqrt(n); zero angles with sign + give (1, ..., 1)/sqrt(n)"""
    angles = list(chord.start_angles) or [0.0] * (n - 1)
    if len(angles) != n - 1:
        raise StructuralError(f"expected {n - 1} start angles, got {len(angles)}")
    product_arg = 0.0 if chord.start_sign == "+" else math.pi
    return np.exp(1j * np.array(angles + [product_arg - sum(angles)])) / math.sqrt(n)


def chord_end_point(chord: ReebChord, n: int) -> np.ndarray:
    return chord_start_point(chord, n) * np.exp(1j * chord.multiplicity * math.pi / n)


# -----------------------------
# Index witness
# -----------------------------
def elementary_index_witness(n: int) -> IndexWitness:
    d = IndexData(n=n, maslov=2, weighted_infinity=1)
    return IndexWitness(
        maslov=d.maslov,
        weighted_infinity=d.weighted_infinity,
        index=disc_index(d),
        single_puncture_index=single_puncture_index(n, 1),
    )


def projection_maslov_estimate(s: ElementarySection, samples: int = 4096) -> ProjectionEstimate:
    """
    Numerical (maslov, weighted infinity) of the compactified projection of a section.

    The boundary line Im z = b is traced as z = -cot(phi/2) + ib, the projected boundary
    loop is read in the chart w = (p - a)/(p - a*) with a = i(b + 1), a* = i(b - 1);
    maslov = 2 * winding of w and every pass of p through infinity has weight 1.
    """
    b = s.boundary_height
    phi = 2 * math.pi * (np.arange(samples) + 0.5) / samples
    z = -1.0 / np.tan(phi / 2) + 1j * b
    p = np.prod(section_values(s, z), axis=-1)

    a, a_star = 1j * (b + 1), 1j * (b - 1)
    w = (p - a) / (p - a_star)
    steps = np.angle(np.roll(w, -1) / w)
    winding = int(round(float(np.sum(steps)) / (2 * math.pi)))

    far = 10.0 * (1.0 + abs(b))
    after = np.roll(p, -1)
    passes = int(np.sum((p.real > far) & (after.real < -far)) + np.sum((p.real < -far) & (after.real > far)))
    logger.info(f"🔍 projection boundary loop: winding {winding}, passes through infinity {passes}")
    return ProjectionEstimate(maslov=2 * winding, weighted_infinity=passes, winding=winding)
