"""
Torus Segment Geometry Module
Planar paths in C*, quadrature of the one-form lambda_n, admissibility / mutation-pair /
Hamiltonian isotopy tests and numerical checks on torus segments over a path
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad
from scipy.optimize import brentq

import settings
from errors import DomainError, SingularityError, StructuralError

logger = logging.getLogger(__name__)

# Consecutive pieces (and the two ends of a closed path) must meet this closely
JOIN_TOL = 1e-12


# -----------------------------
# Context
# -----------------------------
class GeometryContext(BaseModel):
    """Ambient complex dimension n and absolute numeric tolerance"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2, description="Complex dimension of the ambient C^n")
    tol: float = Field(default_factory=lambda: settings.DEFAULT_TOL, gt=0, description="Absolute tolerance")


# -----------------------------
# Segments
# -----------------------------
@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    def point(self, s):
        return self.start + (self.end - self.start) * s

    def derivative(self, s):
        return (self.end - self.start) * np.ones_like(s, dtype=complex)

    def pieces(self) -> List["LineSegment"]:
        return [self]

    def distance_to(self, c: complex) -> float:
        direction = self.end - self.start
        if abs(direction) == 0:
            return abs(self.start - c)
        s = ((c - self.start) * direction.conjugate()).real / abs(direction) ** 2
        return abs(self.point(min(max(s, 0.0), 1.0)) - c)

    def reversed(self) -> "LineSegment":
        return LineSegment(self.end, self.start)

    def scaled(self, factor: complex) -> "LineSegment":
        return LineSegment(self.start * factor, self.end * factor)

    @property
    def first(self) -> complex:
        return complex(self.start)

    @property
    def last(self) -> complex:
        return complex(self.end)


@dataclass(frozen=True)
class ArcSegment:
    """center + radius * exp(i theta) for theta running from theta0 to theta1"""
    center: complex
    radius: float
    theta0: float
    theta1: float

    def __post_init__(self):
        if self.radius <= 0:
            raise StructuralError(f"arc radius must be positive, got {self.radius}")

    def _theta(self, s):
        return self.theta0 + (self.theta1 - self.theta0) * s

    def point(self, s):
        return self.center + self.radius * np.exp(1j * self._theta(s))

    def derivative(self, s):
        return 1j * self.radius * (self.theta1 - self.theta0) * np.exp(1j * self._theta(s))

    def pieces(self) -> List["ArcSegment"]:
        return [self]

    def _sweeps(self, angle: float) -> bool:
        low, high = sorted((self.theta0, self.theta1))
        if high - low >= 2 * math.pi:
            return True
        k = math.ceil((low - angle) / (2 * math.pi))
        return angle + 2 * math.pi * k <= high

    def distance_to(self, c: complex) -> float:
        offset = c - self.center
        if abs(offset) == 0:
            return self.radius
        if self._sweeps(cmath.phase(offset)):
            return abs(abs(offset) - self.radius)
        return min(abs(self.first - c), abs(self.last - c))

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.center, self.radius, self.theta1, self.theta0)

    def scaled(self, factor: complex) -> "ArcSegment":
        turn = cmath.phase(factor)
        return ArcSegment(self.center * factor, self.radius * abs(factor), self.theta0 + turn, self.theta1 + turn)

    @property
    def first(self) -> complex:
        return complex(self.point(0.0))

    @property
    def last(self) -> complex:
        return complex(self.point(1.0))


@dataclass(frozen=True)
class PolylineSegment:
    points: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise StructuralError("a polyline needs at least two points")

    def pieces(self) -> List[LineSegment]:
        return [LineSegment(a, b) for a, b in zip(self.points[:-1], self.points[1:])]

    def reversed(self) -> "PolylineSegment":
        return PolylineSegment(tuple(reversed(self.points)))

    def scaled(self, factor: complex) -> "PolylineSegment":
        return PolylineSegment(tuple(p * factor for p in self.points))

    @property
    def first(self) -> complex:
        return complex(self.points[0])

    @property
    def last(self) -> complex:
        return complex(self.points[-1])


Segment = Union[LineSegment, ArcSegment, PolylineSegment]
Piece = Union[LineSegment, ArcSegment]


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= JOIN_TOL * max(1.0, abs(a), abs(b))


def _unit(v: complex) -> complex:
    size = abs(v)
    if size == 0:
        raise StructuralError("zero tangent vector at a path end")
    return v / size


# -----------------------------
# Paths
# -----------------------------
@dataclass(frozen=True)
class PlanarPath:
    """
    Piecewise-parametric path; the global parameter runs over [0, piece_count],
    piece k covering [k, k + 1]
    """
    segments: Tuple[Segment, ...]
    closed: bool = False
    _pieces: Tuple[Piece, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.segments:
            raise StructuralError("a path needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))
        pieces = tuple(piece for segment in self.segments for piece in segment.pieces())
        for k, (a, b) in enumerate(zip(pieces[:-1], pieces[1:])):
            if not _close(a.last, b.first):
                raise StructuralError(f"pieces {k} and {k + 1} do not meet: {a.last} vs {b.first}")
        if self.closed and not _close(pieces[-1].last, pieces[0].first):
            raise StructuralError("closed path does not end where it starts")
        object.__setattr__(self, "_pieces", pieces)

    @property
    def pieces(self) -> Tuple[Piece, ...]:
        return self._pieces

    @property
    def start(self) -> complex:
        return self._pieces[0].first

    @property
    def end(self) -> complex:
        return self._pieces[-1].last

    @property
    def start_tangent(self) -> complex:
        return _unit(complex(self._pieces[0].derivative(0.0)))

    @property
    def end_tangent(self) -> complex:
        return _unit(complex(self._pieces[-1].derivative(1.0)))

    def locate(self, tau: float) -> Tuple[Piece, float]:
        """Piece and local parameter for a global parameter"""
        count = len(self._pieces)
        if tau < 0 or tau > count:
            raise StructuralError(f"path parameter {tau} outside [0, {count}]")
        k = min(int(tau), count - 1)
        return self._pieces[k], tau - k

    def point(self, tau: float) -> complex:
        piece, s = self.locate(tau)
        return complex(piece.point(s))

    def sample(self, per_piece: int) -> Tuple[np.ndarray, np.ndarray]:
        """Global parameters and points, per_piece intervals on every piece, endpoints included"""
        taus, points = [], []
        local = np.linspace(0.0, 1.0, per_piece + 1)
        for k, piece in enumerate(self._pieces):
            keep = local if k == len(self._pieces) - 1 else local[:-1]
            taus.append(k + keep)
            points.append(np.asarray(piece.point(keep), dtype=complex))
        return np.concatenate(taus), np.concatenate(points)

    def distance_to(self, c: complex) -> float:
        return min(piece.distance_to(c) for piece in self._pieces)

    def reversed(self) -> "PlanarPath":
        return PlanarPath(tuple(s.reversed() for s in reversed(self.segments)), self.closed)

    def concat(self, other: "PlanarPath", closed: bool = False) -> "PlanarPath":
        return PlanarPath(self.segments + other.segments, closed)

    def scaled(self, factor: complex) -> "PlanarPath":
        return PlanarPath(tuple(s.scaled(factor) for s in self.segments), self.closed)


def line(start: complex, end: complex) -> PlanarPath:
    return PlanarPath((LineSegment(complex(start), complex(end)),))


def arc(center: complex, radius: float, theta0: float, theta1: float) -> PlanarPath:
    return PlanarPath((ArcSegment(complex(center), float(radius), float(theta0), float(theta1)),))


def polyline(points: Sequence[complex]) -> PlanarPath:
    return PlanarPath((PolylineSegment(tuple(complex(p) for p in points)),))


def circle(center: complex = 0j, radius: float = 1.0, counterclockwise: bool = True) -> PlanarPath:
    sweep = 2 * math.pi if counterclockwise else -2 * math.pi
    return PlanarPath((ArcSegment(complex(center), float(radius), 0.0, sweep),), closed=True)


def concat(*paths: PlanarPath, closed: bool = False) -> PlanarPath:
    return PlanarPath(tuple(s for p in paths for s in p.segments), closed)


# -----------------------------
# lambda_n quadrature
# -----------------------------
def _lambda_integrand(piece: Piece, n: int):
    power = (n - 1) / n

    def integrand(s: float) -> float:
        z = complex(piece.point(s))
        dz = complex(piece.derivative(s))
        return (z.conjugate() * dz).imag / (2.0 * abs(z) ** (2.0 * power))

    return integrand


def _check_clearance(piece: Piece, index: int) -> None:
    distance = piece.distance_to(0j)
    if distance < settings.ORIGIN_CLEARANCE:
        raise SingularityError(f"piece {index} passes within {distance:.3e} of the origin")


def _integrate_piece(piece: Piece, index: int, n: int, epsabs: float, upper: float = 1.0) -> float:
    _check_clearance(piece, index)
    value, error = quad(
        _lambda_integrand(piece, n), 0.0, upper, epsabs=epsabs, epsrel=0.0, limit=settings.QUAD_LIMIT
    )
    if error > epsabs:
        logger.warning(f"⚠️ piece {index}: quadrature error estimate {error:.3e} above {epsabs:.3e}")
    return value


def integrate_lambda_n(path: PlanarPath, ctx: GeometryContext) -> float:
    """
    Integral of lambda_n = (x dy - y dx) / (2 |z|^{2(n-1)/n}) along the path

    Args:
        path: path avoiding the origin
        ctx: dimension and tolerance; the absolute error budget is split over the pieces

    Returns:
        the integral as a float
    """
    epsabs = ctx.tol / len(path.pieces)
    values = [_integrate_piece(piece, k, ctx.n, epsabs) for k, piece in enumerate(path.pieces)]
    return math.fsum(values)


def arc_lambda_closed_form(radius: float, theta0: float, theta1: float, n: int) -> float:
    """lambda_n integral over an arc centred at the origin: r^{2/n} (theta1 - theta0) / 2"""
    return radius ** (2.0 / n) * (theta1 - theta0) / 2.0


def primitive_along_path(path: PlanarPath, ctx: GeometryContext,
                         samples: Optional[Sequence[float]] = None) -> List[Tuple[float, float]]:
    """
    Cumulative integral f(tau) of lambda_n from the start of the path

    Returns (tau, f(tau)) at every piece breakpoint and at the requested sample parameters,
    sorted by tau
    """
    count = len(path.pieces)
    epsabs = ctx.tol / count
    totals = [0.0]
    for k, piece in enumerate(path.pieces):
        totals.append(totals[-1] + _integrate_piece(piece, k, ctx.n, epsabs))
    result = {float(k): totals[k] for k in range(count + 1)}
    for tau in samples or ():
        piece, s = path.locate(tau)
        k = int(round(tau - s))
        if s == 0:
            result[float(tau)] = totals[k]
            continue
        result[float(tau)] = totals[k] + _integrate_piece(piece, k, ctx.n, epsabs, upper=s)
    return sorted(result.items())


def elementary_disc_area(n: int, delta_f: float, sign: Union[str, int], scale: float = 1.0) -> float:
    """Area scale * (pi/n + delta_f) or scale * (pi/n - delta_f) of an elementary disc component"""
    if scale <= 0:
        raise StructuralError(f"scale must be positive, got {scale}")
    if sign in ("+", 1):
        return scale * (math.pi / n + delta_f)
    if sign in ("-", -1):
        return scale * (math.pi / n - delta_f)
    raise StructuralError(f"sign must be '+' or '-', got {sign!r}")


def elementary_disc_area_for_path(path: PlanarPath, sign: Union[str, int], scale: float,
                                  ctx: GeometryContext) -> float:
    delta_f = integrate_lambda_n(path, ctx)
    return elementary_disc_area(ctx.n, delta_f, sign, scale)


# -----------------------------
# Winding and admissibility
# -----------------------------
def winding_number(path: PlanarPath, about: complex = 0j) -> int:
    """Winding of a closed path about a point, from summed argument increments"""
    if not path.closed:
        raise StructuralError("winding number needs a closed path")
    if path.distance_to(about) < settings.ORIGIN_CLEARANCE:
        raise SingularityError(f"path passes through {about}")
    _, points = path.sample(settings.WINDING_SAMPLES)
    shifted = points - about
    increments = np.angle(shifted[1:] / shifted[:-1])
    return int(round(float(np.sum(increments)) / (2 * math.pi)))


@dataclass
class AdmissibilityReport:
    ok: bool
    violations: List[str]


def is_admissible(path: PlanarPath, t: float, eps: float, ctx: GeometryContext) -> AdmissibilityReport:
    """
    Check that the path runs from -t to t along the real axis outside the window (-eps, eps),
    stays in the disc of radius t - eps where it leaves the axis, and never enters the lower half plane
    """
    violations: List[str] = []
    if not 0 < eps < t:
        violations.append(f"window: need 0 < eps < t, got eps={eps}, t={t}")
        return AdmissibilityReport(ok=False, violations=violations)
    if abs(path.start + t) > ctx.tol or abs(path.end - t) > ctx.tol:
        violations.append(f"endpoints: path must run from {-t} to {t}, got {path.start} to {path.end}")

    _, points = path.sample(settings.WINDING_SAMPLES)
    outside = np.abs(points.real) >= eps
    off_axis = np.abs(points.imag) > ctx.tol
    if np.any(outside & off_axis):
        worst = points[outside & off_axis][0]
        violations.append(f"identity outside the window: point {worst} leaves the real axis")
    if np.any(off_axis & (np.abs(points) >= t - eps + ctx.tol)):
        worst = points[off_axis & (np.abs(points) >= t - eps + ctx.tol)][0]
        violations.append(f"disc: non-real point {worst} outside the disc of radius {t - eps}")
    if np.any(points.imag < -ctx.tol):
        worst = points[points.imag < -ctx.tol][0]
        violations.append(f"upper half plane: point {worst} has negative imaginary part")

    if violations:
        logger.info(f"❌ path not admissible: {violations}")
    return AdmissibilityReport(ok=not violations, violations=violations)


# -----------------------------
# Mutation pairs and isotopies
# -----------------------------
@dataclass
class MutationPairReport:
    ok: bool
    winding: int
    area_defect: float
    tangents_agree: bool
    violations: List[str]


def is_valid_mutation_pair(c: PlanarPath, c_prime: PlanarPath, ctx: GeometryContext) -> MutationPairReport:
    """
    Check that c' replaces c: same endpoints, c followed by reversed c' winds once around 0,
    equal lambda_n integrals and matching end tangents
    """
    if c.closed or c_prime.closed:
        raise StructuralError("mutation pair paths must be open")
    if abs(c.start - c_prime.start) > ctx.tol or abs(c.end - c_prime.end) > ctx.tol:
        raise StructuralError(
            f"endpoints differ: c runs {c.start} -> {c.end}, c' runs {c_prime.start} -> {c_prime.end}"
        )
    loop = concat(c, c_prime.reversed(), closed=True)
    winding = winding_number(loop, 0j)
    area_defect = integrate_lambda_n(c_prime, ctx) - integrate_lambda_n(c, ctx)
    tangents_agree = (
        abs(c.start_tangent - c_prime.start_tangent) <= ctx.tol
        and abs(c.end_tangent - c_prime.end_tangent) <= ctx.tol
    )

    violations = []
    if abs(winding) != 1:
        violations.append(f"winding: glued curve winds {winding} times around 0")
    if abs(area_defect) >= ctx.tol:
        violations.append(f"area: lambda_n integrals differ by {area_defect:.3e}")
    if not tangents_agree:
        violations.append("smoothness: end tangents disagree")
    logger.info(f"📊 mutation pair: winding={winding}, area_defect={area_defect:.3e}, tangents={tangents_agree}")
    return MutationPairReport(
        ok=not violations, winding=winding, area_defect=area_defect,
        tangents_agree=tangents_agree, violations=violations,
    )


def hamiltonian_isotopy_test(g0: PlanarPath, g1: PlanarPath, ctx: GeometryContext) -> bool:
    """Equal ends, equal end tangents and equal lambda_n integrals"""
    if abs(g0.start - g1.start) > ctx.tol or abs(g0.end - g1.end) > ctx.tol:
        return False
    if abs(g0.start_tangent - g1.start_tangent) > ctx.tol or abs(g0.end_tangent - g1.end_tangent) > ctx.tol:
        return False
    return abs(integrate_lambda_n(g0, ctx) - integrate_lambda_n(g1, ctx)) < ctx.tol


# -----------------------------
# Torus segments
# -----------------------------
@dataclass(frozen=True)
class TorusPoint:
    base: complex
    angles: Tuple[float, ...]


def _torus_lift(bases: np.ndarray, angles: Sequence[float], n: int) -> np.ndarray:
    """Rows (z_1, ..., z_n) with equal moduli |base|^{1/n} and product base"""
    bases = np.asarray(bases, dtype=complex)
    rho = np.abs(bases) ** (1.0 / n)
    columns = [rho * np.exp(1j * a) for a in angles]
    columns.append(rho * np.exp(1j * (np.angle(bases) - sum(angles))))
    return np.stack(columns, axis=-1)


def torus_point_coordinates(p: TorusPoint, ctx: GeometryContext) -> List[complex]:
    if p.base == 0:
        raise DomainError("torus point over the origin")
    if len(p.angles) != ctx.n - 1:
        raise StructuralError(f"expected {ctx.n - 1} fiber angles, got {len(p.angles)}")
    return [complex(z) for z in _torus_lift(np.array(p.base), p.angles, ctx.n)]


def _omega(u: np.ndarray, v: np.ndarray) -> float:
    """Standard symplectic form sum dx_k ^ dy_k on C^n"""
    return float(np.sum((np.conj(u) * v).imag))


def lagrangian_residual(path: PlanarPath, t: float, angles: Sequence[float], h: float,
                        ctx: GeometryContext, include_path: bool = True) -> float:
    """
    Largest |omega(v_i, v_j)| over a central-difference tangent frame of the torus segment
    at path parameter t and the given fiber angles
    """
    if len(angles) != ctx.n - 1:
        raise StructuralError(f"expected {ctx.n - 1} fiber angles, got {len(angles)}")
    piece, s = path.locate(t)
    base = complex(piece.point(s))
    frame = []
    if include_path:
        ahead, behind = _torus_lift(piece.point(s + h), angles, ctx.n), _torus_lift(piece.point(s - h), angles, ctx.n)
        frame.append((ahead - behind) / (2 * h))
    for j in range(ctx.n - 1):
        up, down = list(angles), list(angles)
        up[j] += h
        down[j] -= h
        frame.append((_torus_lift(base, up, ctx.n) - _torus_lift(base, down, ctx.n)) / (2 * h))
    residual = 0.0
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            residual = max(residual, abs(_omega(frame[i], frame[j])))
    return residual


def _lambda_zero_along(curve, epsabs: float, delta: float = 1e-5) -> float:
    """Integral over [0, 1] of lambda_0 = sum (x dy - y dx) / 2 along a curve s -> C^n"""

    def integrand(s: float) -> float:
        z = curve(s)
        dz = (curve(s + delta) - curve(s - delta)) / (2 * delta)
        return 0.5 * _omega(z, dz)

    value, _ = quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=0.0, limit=settings.QUAD_LIMIT)
    return value


def lifted_action(path: PlanarPath, angles: Sequence[float], ctx: GeometryContext) -> float:
    """lambda_0 integrated along the lift of the path at fixed fiber angles"""
    if len(angles) != ctx.n - 1:
        raise StructuralError(f"expected {ctx.n - 1} fiber angles, got {len(angles)}")
    epsabs = max(ctx.tol, 1e-10) / len(path.pieces)
    total = []
    for k, piece in enumerate(path.pieces):
        _check_clearance(piece, k)
        total.append(_lambda_zero_along(lambda s, p=piece: _torus_lift(p.point(s), angles, ctx.n), epsabs))
    return math.fsum(total)


def fiber_loop_action(p: TorusPoint, j: int, ctx: GeometryContext) -> float:
    """lambda_0 around the j-th standard fiber loop through p"""
    if not 0 <= j < ctx.n - 1:
        raise StructuralError(f"fiber loop index must lie in [0, {ctx.n - 2}], got {j}")
    torus_point_coordinates(p, ctx)

    def loop(s: float) -> np.ndarray:
        turned = list(p.angles)
        turned[j] += 2 * math.pi * s
        return _torus_lift(np.array(p.base), turned, ctx.n)

    return _lambda_zero_along(loop, max(ctx.tol, 1e-10))


# -----------------------------
# Reference paths
# -----------------------------
def identity_path(t: float = 1.0) -> PlanarPath:
    return line(-t, t)


def admissible_reference_path() -> PlanarPath:
    """Admissible for t = 1, eps = 0.3: a flat bump of height 0.2 over the origin"""
    return polyline([-1, -0.25, -0.2 + 0.2j, 0.2 + 0.2j, 0.25, 1])


def dipping_path() -> PlanarPath:
    return polyline([-1, -0.2, -0.1j, 0.2, 1])


def balanced_mutation_pair(n: int) -> Tuple[PlanarPath, PlanarPath]:
    """
    c: over the unit semicircle from -2 to 2; c': around the origin 3/2 turns at radius
    (1/4)^{n/2} then one turn back at radius (7/8)^{n/2}. Both integrate to -pi/2.
    """
    a = 0.25 ** (n / 2)
    b = 0.875 ** (n / 2)
    c = concat(line(-2, -1), arc(0, 1, math.pi, 0), line(1, 2))
    c_prime = concat(
        line(-2, -1), line(-1, -a), arc(0, a, math.pi, 4 * math.pi),
        line(a, b), arc(0, b, 0, -2 * math.pi), line(b, 1), line(1, 2),
    )
    return c, c_prime


def semicircle_pair() -> Tuple[PlanarPath, PlanarPath]:
    """Upper and lower unit semicircles from 1 to -1"""
    return arc(0, 1, 0, math.pi), arc(0, 1, 0, -math.pi)


def matching_bump_path(target: float, ctx: GeometryContext, t: float = 1.0,
                       shoulders: Tuple[float, float] = (0.3, 0.1)) -> PlanarPath:
    """
    Flat bump -t, -a, -b + hi, b + hi, a, t with the height h chosen so that
    the lambda_n integral equals target
    """
    outer, inner = shoulders

    def bump(h: float) -> PlanarPath:
        return polyline([-t, -outer, -inner + 1j * h, inner + 1j * h, outer, t])

    def mismatch(h: float) -> float:
        return integrate_lambda_n(bump(h), ctx) - target

    height = brentq(mismatch, 1e-3, t - outer, xtol=1e-14)
    logger.info(f"🔍 bump height {height:.12f} matches lambda_n integral {target:.12f}")
    return bump(height)
