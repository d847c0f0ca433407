"""
Tests for path quadrature, admissibility, mutation pairs and torus segments
"""

import math

import numpy as np
import pytest

from errors import SingularityError, StructuralError
from geometry import (
    GeometryContext,
    TorusPoint,
    admissible_reference_path,
    arc,
    arc_lambda_closed_form,
    balanced_mutation_pair,
    circle,
    concat,
    dipping_path,
    elementary_disc_area,
    elementary_disc_area_for_path,
    fiber_loop_action,
    hamiltonian_isotopy_test,
    identity_path,
    integrate_lambda_n,
    is_admissible,
    is_valid_mutation_pair,
    lagrangian_residual,
    lifted_action,
    line,
    matching_bump_path,
    polyline,
    primitive_along_path,
    semicircle_pair,
    torus_point_coordinates,
    winding_number,
)


def ctx_for(n, tol=1e-9):
    return GeometryContext(n=n, tol=tol)


# -----------------------------
# Quadrature
# -----------------------------
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_unit_circle_integrates_to_pi(n):
    assert abs(integrate_lambda_n(circle(), ctx_for(n)) - math.pi) < 1e-8


def test_real_segment_integrates_to_zero():
    assert abs(integrate_lambda_n(line(1, 5), ctx_for(3))) < 1e-12


def test_half_circle():
    assert integrate_lambda_n(arc(0, 1, 0, math.pi), ctx_for(2)) == pytest.approx(math.pi / 2, abs=1e-9)


def test_random_arcs_match_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        radius = float(rng.uniform(0.1, 3.0))
        theta0, theta1 = (float(v) for v in rng.uniform(-2 * math.pi, 2 * math.pi, size=2))
        value = integrate_lambda_n(arc(0, radius, theta0, theta1), ctx_for(n))
        assert abs(value - arc_lambda_closed_form(radius, theta0, theta1, n)) < 1e-8


def test_reversal_is_antisymmetric():
    path = admissible_reference_path()
    ctx = ctx_for(3)
    assert integrate_lambda_n(path.reversed(), ctx) == pytest.approx(-integrate_lambda_n(path, ctx), abs=2e-9)


def test_scaling_multiplies_integral():
    path = admissible_reference_path()
    ctx = ctx_for(3)
    scaled = integrate_lambda_n(path.scaled(2.0), ctx)
    assert scaled == pytest.approx(2 ** (2 / 3) * integrate_lambda_n(path, ctx), abs=1e-8)


def test_path_through_origin_is_singular():
    with pytest.raises(SingularityError):
        integrate_lambda_n(line(-1, 1), ctx_for(2))


def test_disconnected_segments_rejected():
    with pytest.raises(StructuralError):
        concat(line(1, 2), line(3, 4))


def test_context_validation():
    with pytest.raises(ValueError):
        GeometryContext(n=1)
    with pytest.raises(ValueError):
        GeometryContext(n=2, tol=0)


# -----------------------------
# Primitive and areas
# -----------------------------
def test_primitive_on_real_segment_is_zero():
    values = primitive_along_path(line(0.5, 2), ctx_for(2), samples=[0.25, 0.75])
    assert all(abs(f) < 1e-12 for _, f in values)


def test_primitive_on_unit_arc():
    values = dict(primitive_along_path(arc(0, 1, 0, 2.0), ctx_for(4), samples=[0.5]))
    assert values[0.5] == pytest.approx(0.5, abs=1e-9)
    assert values[1.0] == pytest.approx(1.0, abs=1e-9)


def test_primitive_is_additive():
    ctx = ctx_for(3)
    a = arc(0, 1, 0, 1.0)
    b = arc(0, 1, 1.0, 2.5)
    joined = primitive_along_path(concat(a, b), ctx)
    assert joined[-1][1] == pytest.approx(
        primitive_along_path(a, ctx)[-1][1] + primitive_along_path(b, ctx)[-1][1], abs=1e-9
    )


def test_elementary_disc_area_cases():
    assert elementary_disc_area(2, 0.0, "+", 1.0) == pytest.approx(math.pi / 2)
    assert elementary_disc_area(3, 0.1, "+", 1.0) == pytest.approx(math.pi / 3 + 0.1)
    assert elementary_disc_area(4, 0.2, "-", 2.0) == pytest.approx(2 * elementary_disc_area(4, 0.2, "-", 1.0))
    with pytest.raises(StructuralError):
        elementary_disc_area(2, 0.0, "+", 0.0)


def test_elementary_disc_area_for_real_path():
    assert elementary_disc_area_for_path(line(1, 3), "+", 1.0, ctx_for(3)) == pytest.approx(math.pi / 3)


# -----------------------------
# Winding and admissibility
# -----------------------------
def test_winding_cases():
    assert winding_number(circle(), 0j) == 1
    assert winding_number(circle(counterclockwise=False), 0j) == -1
    assert winding_number(circle(center=5), 0j) == 0


def test_winding_independent_of_start_point():
    rotated = concat(arc(0, 1, 1.3, 1.3 + 2 * math.pi), closed=True)
    assert winding_number(rotated, 0j) == 1


def test_winding_needs_closed_path():
    with pytest.raises(StructuralError):
        winding_number(arc(0, 1, 0, math.pi), 0j)


def test_admissible_reference_path():
    report = is_admissible(admissible_reference_path(), 1.0, 0.3, ctx_for(2))
    assert report.ok, report.violations


def test_dipping_path_leaves_upper_half_plane():
    report = is_admissible(dipping_path(), 1.0, 0.3, ctx_for(2))
    assert not report.ok
    assert any("upper half plane" in v for v in report.violations)


def test_identity_path_is_admissible():
    assert is_admissible(identity_path(), 1.0, 0.5, ctx_for(2)).ok


def test_bump_outside_window_rejected():
    wide = polyline([-1, -0.6, -0.5 + 0.3j, 0.5 + 0.3j, 0.6, 1])
    report = is_admissible(wide, 1.0, 0.3, ctx_for(2))
    assert any("identity outside the window" in v for v in report.violations)


# -----------------------------
# Mutation pairs
# -----------------------------
@pytest.mark.parametrize("n", [2, 3, 4])
def test_balanced_pair_is_valid(n):
    c, c_prime = balanced_mutation_pair(n)
    report = is_valid_mutation_pair(c, c_prime, ctx_for(n))
    assert report.ok, report.violations
    assert abs(report.winding) == 1
    assert abs(report.area_defect) < 1e-9


def test_balanced_pair_integrals():
    c, c_prime = balanced_mutation_pair(3)
    ctx = ctx_for(3)
    assert integrate_lambda_n(c, ctx) == pytest.approx(-math.pi / 2, abs=1e-9)
    assert integrate_lambda_n(c_prime, ctx) == pytest.approx(-math.pi / 2, abs=1e-9)


@pytest.mark.parametrize("n", [2, 5])
def test_semicircle_pair_has_area_defect(n):
    c, c_prime = semicircle_pair()
    report = is_valid_mutation_pair(c, c_prime, ctx_for(n))
    assert not report.ok
    assert report.winding == 1
    assert report.area_defect == pytest.approx(-math.pi, abs=1e-8)


def test_identical_paths_do_not_wind():
    c, _ = balanced_mutation_pair(2)
    report = is_valid_mutation_pair(c, c, ctx_for(2))
    assert report.winding == 0
    assert not report.ok


def test_mismatched_endpoints_rejected():
    with pytest.raises(StructuralError):
        is_valid_mutation_pair(arc(0, 1, 0, math.pi), arc(0, 2, 0, -math.pi), ctx_for(2))


# -----------------------------
# Hamiltonian isotopy
# -----------------------------
def test_isotopy_reflexive():
    g0 = admissible_reference_path()
    assert hamiltonian_isotopy_test(g0, g0, ctx_for(2))


@pytest.mark.parametrize("n", [2, 3])
def test_isotopy_between_different_shapes(n):
    ctx = ctx_for(n, tol=1e-8)
    g0 = admissible_reference_path()
    g1 = matching_bump_path(integrate_lambda_n(g0, ctx), ctx)
    assert g1 != g0
    assert is_admissible(g1, 1.0, 0.35, ctx).ok
    assert hamiltonian_isotopy_test(g0, g1, ctx)


def test_isotopy_detects_integral_gap():
    ctx = ctx_for(2, tol=1e-8)
    g0 = admissible_reference_path()
    g1 = matching_bump_path(integrate_lambda_n(g0, ctx) - 0.1, ctx)
    assert not hamiltonian_isotopy_test(g0, g1, ctx)


# -----------------------------
# Torus segments
# -----------------------------
def test_torus_point_cases():
    assert np.allclose(torus_point_coordinates(TorusPoint(1, (0.0, 0.0)), ctx_for(3)), [1, 1, 1])
    assert np.allclose(torus_point_coordinates(TorusPoint(-1, (0.0,)), ctx_for(2)), [1, -1])
    assert np.allclose(torus_point_coordinates(TorusPoint(4, (math.pi / 2,)), ctx_for(2)), [2j, -2j])


def test_torus_point_relations():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        base = complex(*rng.uniform(-3, 3, size=2))
        angles = tuple(float(a) for a in rng.uniform(0, 2 * math.pi, size=n - 1))
        z = torus_point_coordinates(TorusPoint(base, angles), ctx_for(n))
        moduli = np.abs(z)
        assert np.ptp(moduli) < 1e-12
        assert abs(np.prod(z) - base) < 1e-9 * abs(base)


def test_lagrangian_residual_small_on_admissible_path():
    rng = np.random.default_rng(17)
    path = admissible_reference_path()
    for _ in range(20):
        n = int(rng.integers(2, 5))
        tau = float(rng.uniform(0, len(path.pieces)))
        angles = tuple(float(a) for a in rng.uniform(0, 2 * math.pi, size=n - 1))
        assert lagrangian_residual(path, tau, angles, 1e-4, ctx_for(n)) < 1e-6


def test_lagrangian_residual_converges_at_second_order():
    path = admissible_reference_path()
    ctx = ctx_for(3)
    coarse = lagrangian_residual(path, 2.3, (0.4, 1.1), 1e-3, ctx)
    fine = lagrangian_residual(path, 2.3, (0.4, 1.1), 5e-4, ctx)
    assert 3.5 <= coarse / fine <= 4.5


def test_fiber_directions_are_exactly_isotropic():
    path = admissible_reference_path()
    residual = lagrangian_residual(path, 2.5, (0.3, 2.0, 4.0), 1e-4, ctx_for(4), include_path=False)
    assert residual < 1e-12


def test_lifted_action_matches_lambda_n():
    ctx = ctx_for(3)
    path = admissible_reference_path()
    assert lifted_action(path, (0.7, 2.1), ctx) == pytest.approx(integrate_lambda_n(path, ctx), abs=1e-7)


def test_fiber_loops_are_exact():
    ctx = ctx_for(3)
    for j in range(2):
        assert abs(fiber_loop_action(TorusPoint(0.5 + 0.4j, (0.2, 1.0)), j, ctx)) < 1e-9
