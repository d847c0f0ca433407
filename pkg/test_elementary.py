"""
Tests for the elementary sections, chord combinatorics and disc counts
"""

import math

import numpy as np
import pytest

from elementary import (
    ElementarySection,
    ReebChord,
    SampleSet,
    SectionGrid,
    chord_end_point,
    chord_start_point,
    cr_residual,
    cr_residual_of,
    default_samples,
    elementary_count,
    elementary_index_witness,
    evaluate_section,
    projection_maslov_estimate,
    reeb_endpoint_sign,
    rotate_to_lower_half_plane,
    section_values,
    verify_section_properties,
)
from errors import BranchError, DomainError, StructuralError
from index_theory import IndexData, disc_index, single_puncture_index


def all_sections(n, eps):
    yield ElementarySection(n=n, eps=eps, side="upper")
    for k in range(1, n + 1):
        yield ElementarySection(n=n, eps=eps, side="lower", k=k)


# -----------------------------
# Evaluation
# -----------------------------
def test_upper_section_at_one():
    values = evaluate_section(ElementarySection(n=2, eps=0.5), 1, check_domain=False)
    assert np.allclose(values, [1, 1])


def test_lower_section_vanishes_in_marked_coordinate():
    for n in (2, 3, 5):
        eps = 0.3
        values = evaluate_section(ElementarySection(n=n, eps=eps, side="lower", k=1), 0)
        assert values[0] == 0
        expected = (2j * eps) ** (1 / n)
        assert np.allclose(values[1:], [expected] * (n - 1))


def test_phase_action_cancels_in_product():
    values = evaluate_section(ElementarySection(n=2, eps=0.5, theta=(math.pi,)), 1, check_domain=False)
    assert np.allclose(values, [-1, -1])


def test_phase_action_equivariance():
    theta = (0.3, -1.2)
    z = 0.4 + 1.1j
    for base in all_sections(3, 0.2):
        turned = ElementarySection(n=base.n, eps=base.eps, side=base.side, k=base.k, theta=theta)
        phases = np.exp(1j * np.array([0.3, -1.2, 0.9]))
        assert np.allclose(section_values(turned, z), section_values(base, z) * phases, atol=1e-15)


def test_domain_is_checked():
    with pytest.raises(DomainError):
        evaluate_section(ElementarySection(n=3, eps=0.5), 0.2j)
    with pytest.raises(DomainError):
        evaluate_section(ElementarySection(n=3, eps=0.5, side="lower", k=2), -0.7j)


def test_section_validation():
    with pytest.raises(StructuralError):
        ElementarySection(n=3, eps=0.5, side="lower", k=4)
    with pytest.raises(StructuralError):
        ElementarySection(n=3, eps=-0.1)
    with pytest.raises(StructuralError):
        ElementarySection(n=3, eps=0.1, theta=(0.0,))


def test_rotation_flips_projection():
    z = 0.5 + 0.9j
    values = section_values(ElementarySection(n=4, eps=0.2), z)
    assert np.prod(rotate_to_lower_half_plane(values, 4)) == pytest.approx(-z)


# -----------------------------
# Holomorphicity
# -----------------------------
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_cr_residual_small(n, eps):
    for s in all_sections(n, eps):
        assert cr_residual(s, SectionGrid.for_section(s, h=1e-5, size=50)) < 1e-8


def test_cr_residual_converges_at_second_order():
    s = ElementarySection(n=3, eps=0.1, side="lower", k=2)
    coarse = cr_residual(s, SectionGrid.for_section(s, h=1e-2))
    fine = cr_residual(s, SectionGrid.for_section(s, h=5e-3))
    assert 3.5 <= coarse / fine <= 4.5


def test_conjugated_section_is_not_holomorphic():
    s = ElementarySection(n=3, eps=0.5)
    grid = SectionGrid.for_section(s)
    assert cr_residual_of(lambda z: np.conj(section_values(s, z, check_domain=False)), grid) > 0.1
    assert cr_residual_of(lambda z: np.conj(z) ** 2, grid) > 1.0


def test_grid_on_branch_cut():
    s = ElementarySection(n=2, eps=0.5)
    with pytest.raises(BranchError):
        cr_residual(s, SectionGrid(-1.0, 1.0, -1.0, -0.1, nx=51, ny=10))


@pytest.mark.parametrize("side", ["upper", "lower"])
def test_grid_within_one_step_of_the_cut(side):
    s = ElementarySection(n=2, eps=0.5, side=side)
    # columns at +-1e-6 straddle the cut in the x difference
    low = -1.0 if side == "upper" else -2.0
    with pytest.raises(BranchError):
        cr_residual(s, SectionGrid(-1e-6, 1e-6, low, low + 0.5, nx=2, ny=5, h=1e-5))


def test_grid_below_the_boundary_line():
    s = ElementarySection(n=2, eps=0.5)
    with pytest.raises(DomainError):
        cr_residual(s, SectionGrid(0.5, 1.0, -2.0, -1.0, nx=5, ny=5))


# -----------------------------
# Defining properties
# -----------------------------
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_section_properties(n, eps):
    for s in all_sections(n, eps):
        report = verify_section_properties(s, default_samples(s, count=1000, seed=n))
        assert report.ok
        assert report.projection_residual < 1e-10
        assert report.modulus_spread < 1e-10


def test_boundary_samples_on_wrong_line_break_equal_moduli():
    s = ElementarySection(n=4, eps=0.5, side="lower", k=2)
    good = default_samples(s)
    tampered = SampleSet(interior=good.interior, boundary=good.boundary.real - 1j * 0.25)
    report = verify_section_properties(s, tampered)
    assert not report.ok
    assert report.modulus_spread > 1e-3


# -----------------------------
# Counts, chords and index
# -----------------------------
@pytest.mark.parametrize("n", range(2, 9))
def test_count_table(n):
    assert elementary_count("upper", False, n) == 1
    assert elementary_count("lower", False, n) == n
    assert elementary_count("upper", True, n) == n
    assert elementary_count("lower", True, n) == 1
    before = elementary_count("upper", False, n) + elementary_count("lower", False, n)
    after = elementary_count("upper", True, n) + elementary_count("lower", True, n)
    assert before == after == n + 1


@pytest.mark.parametrize("sign,l,expected", [("+", 1, "-"), ("+", 2, "+"), ("-", 3, "+")])
def test_reeb_endpoint_sign(sign, l, expected):
    assert reeb_endpoint_sign(sign, l) == expected


def test_reeb_endpoint_sign_involution():
    for sign in ("+", "-"):
        for l in range(1, 6):
            assert reeb_endpoint_sign(reeb_endpoint_sign(sign, l), l) == sign


def test_chord_points():
    n = 3
    start = chord_start_point(ReebChord(1), n)
    assert np.allclose(start, np.ones(n) / math.sqrt(n))
    for sign in ("+", "-"):
        for l in range(1, 5):
            chord = ReebChord(l, sign, (0.4, 1.3))
            end = chord_end_point(chord, n)
            assert np.allclose(np.abs(end), 1 / math.sqrt(n))
            product = np.prod(end)
            assert abs(product.imag) < 1e-12
            assert ("+" if product.real > 0 else "-") == reeb_endpoint_sign(sign, l)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_index_witness_is_confirmed_numerically(n):
    for s in (ElementarySection(n=n, eps=0.3), ElementarySection(n=n, eps=0.3, side="lower", k=n)):
        estimate = projection_maslov_estimate(s)
        assert (estimate.maslov, estimate.weighted_infinity) == (2, 1)
    witness = elementary_index_witness(n)
    assert (witness.maslov, witness.weighted_infinity) == (2, 1)
    assert witness.index == n + 1
    assert witness.consistent
    assert disc_index(IndexData(n=n, maslov=2, weighted_infinity=1)) == single_puncture_index(n, 1)
