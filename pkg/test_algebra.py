"""
Tests for the exact Laurent algebra and the mutation substitution
"""

import numpy as np
import pytest
from sympy.polys.domains import QQ_I

from algebra import (
    LaurentPolynomial,
    MutationRule,
    RationalFunction,
    apply_mutation,
    eval_at,
    gaussian,
    laurent_arith,
    laurent_embed,
    mutate_local_system,
    mutate_potential,
    random_laurent,
    standard_rule,
    verify_invariance,
)
from errors import DomainError, StructuralError, WallError

X2 = ("x1", "x2")


@pytest.fixture
def gens2():
    return LaurentPolynomial.gens(X2)


@pytest.fixture
def rule2():
    return standard_rule(2)


# -----------------------------
# Arithmetic
# -----------------------------
def test_difference_of_squares(gens2):
    x1, x2 = gens2
    product = laurent_arith(x1 + x2, x1 - x2, "mul")
    assert product == x1 ** 2 - x2 ** 2
    assert product.terms == {(2, 0): gaussian(1), (0, 2): gaussian(-1)}


def test_additive_identity_and_unit(gens2):
    x1, x2 = gens2
    w = x1 + 3 * x2 ** -1
    assert laurent_arith(w, LaurentPolynomial.zero(X2), "add") == w
    assert laurent_arith(x2 ** -1, x2, "mul") == LaurentPolynomial.constant(X2, 1)


def test_self_subtraction_is_canonical_zero(gens2):
    x1, x2 = gens2
    w = x1 ** -2 * x2 + gaussian(1, 2) * x2 ** 3
    difference = laurent_arith(w, w, "sub")
    assert difference.is_zero()
    assert difference.terms == {}
    assert difference == LaurentPolynomial.zero(X2)


def test_equal_values_share_representation(gens2):
    x1, x2 = gens2
    a = (x1 + x2) * x1 ** -1
    b = LaurentPolynomial.from_terms(X2, {(0, 0): 1, (-1, 1): 1})
    assert a == b
    assert hash(a) == hash(b)


def test_variable_mismatch_is_structural(gens2):
    x1, _ = gens2
    y1, = LaurentPolynomial.gens(("y1",))
    with pytest.raises(StructuralError):
        laurent_arith(x1, y1, "add")


def test_exponent_length_checked():
    with pytest.raises(StructuralError):
        LaurentPolynomial.from_terms(X2, {(1,): 1})


def test_coefficients_accept_fraction_strings():
    w = LaurentPolynomial.from_terms(X2, {(1, 0): "3/4", (0, 1): {"re": "1/2", "im": "-1/3"}})
    assert w.terms[(1, 0)] == gaussian("3/4")
    assert w.terms[(0, 1)] == gaussian("1/2", "-1/3")


def test_embed_by_name(gens2):
    x1, x2 = gens2
    embedded = laurent_embed(x1 * x2 ** -1, ("y1", "x2", "x1"))
    assert embedded.terms == {(0, -1, 1): gaussian(1)}
    with pytest.raises(StructuralError):
        laurent_embed(x1, ("x2",))


# -----------------------------
# Rational functions
# -----------------------------
def test_rational_function_normalizes_common_factor(gens2):
    x1, x2 = gens2
    f = RationalFunction.normalized((1 + x1) * x2, (1 + x1) * x2 ** 2)
    assert f.numerator == LaurentPolynomial.constant(X2, 1)
    assert f.denominator == x2


def test_denominator_is_monic(gens2):
    x1, _ = gens2
    f = RationalFunction.normalized(LaurentPolynomial.constant(X2, 1), 2 * x1 + 4)
    assert f.denominator == x1 + 2
    assert f.numerator == LaurentPolynomial.constant(X2, "1/2")


def test_zero_denominator_rejected(gens2):
    x1, _ = gens2
    with pytest.raises(StructuralError):
        RationalFunction.normalized(x1, LaurentPolynomial.zero(X2))


# -----------------------------
# Mutation
# -----------------------------
def test_forward_mutation_of_mutated_variable(gens2, rule2):
    x1, x2 = gens2
    result = apply_mutation(x2, rule2, "forward")
    assert result.is_laurent
    assert result.as_laurent() == x2 + x1 * x2


def test_forward_fixes_fiber_variable(gens2, rule2):
    x1, _ = gens2
    assert apply_mutation(x1, rule2, "forward").as_laurent() == x1


def test_forward_of_inverse_variable(gens2, rule2):
    x1, x2 = gens2
    result = apply_mutation(x2 ** -1, rule2, "forward")
    assert not result.is_laurent
    assert result.numerator == LaurentPolynomial.constant(X2, 1)
    assert result.denominator == x2 * (1 + x1)


def test_forward_with_nonnegative_powers_has_trivial_denominator(gens2, rule2):
    x1, x2 = gens2
    result = apply_mutation(x1 ** -3 * x2 ** 2 + x2, rule2, "forward")
    assert result.denominator.poly == result.denominator.ring.one


@pytest.mark.parametrize("build,expected", [
    (lambda x1, x2: x2 + x1 * x2, lambda x1, x2: x2),
    (lambda x1, x2: x1, lambda x1, x2: x1),
    (lambda x1, x2: x2 ** -1, lambda x1, x2: x2 ** -1 * (1 + x1)),
])
def test_mutate_potential_cases(gens2, rule2, build, expected):
    result = mutate_potential(build(*gens2), rule2)
    assert result.is_laurent
    assert result.laurent == expected(*gens2)


def test_substitution_matches_generic_normal_form(gens2, rule2):
    x1, x2 = gens2
    wall = 1 + x1
    w = x2 * wall ** 2 + gaussian(0, 1) * x2
    expected = RationalFunction.normalized(x2 * wall ** 2 + gaussian(0, 1) * x2, wall)
    assert apply_mutation(w, rule2, "inverse") == expected

    cancelling = x2 ** 2 * wall ** 2 + x2 ** -1
    assert apply_mutation(cancelling, rule2, "inverse") == RationalFunction.from_laurent(x2 ** 2 + x2 ** -1 * wall)


def test_round_trip_with_four_variables_and_high_powers():
    rule = standard_rule(4)
    x1, x2, x3, x4 = LaurentPolynomial.gens(rule.variables)
    w = x4 ** -5 * (x1 + x2) + 3 * x4 ** 5 * x3 ** -2 + gaussian(1, -1) * x4 ** -4
    assert verify_invariance(w, rule)


def test_mutate_potential_flags_non_laurent(gens2, rule2):
    _, x2 = gens2
    result = mutate_potential(x2, rule2)
    assert not result.is_laurent
    assert result.laurent is None


def test_verify_invariance_cases(gens2, rule2):
    x1, x2 = gens2
    assert verify_invariance(LaurentPolynomial.zero(X2), rule2)
    assert verify_invariance(x2 + x2 ** -1 * x1 ** -1, rule2)


def test_random_round_trip():
    rng = np.random.default_rng(20240601)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        rule = standard_rule(n, passive=int(rng.integers(0, 3)))
        w = random_laurent(rule.variables, rng, max_terms=12, exponent_range=(-5, 5))
        assert verify_invariance(w, rule)


def test_mutation_is_a_ring_homomorphism():
    rng = np.random.default_rng(7)
    rule = standard_rule(3, passive=1)
    for _ in range(10):
        a = random_laurent(rule.variables, rng, max_terms=4, exponent_range=(-2, 2))
        b = random_laurent(rule.variables, rng, max_terms=4, exponent_range=(-2, 2))
        for direction in ("forward", "inverse"):
            fa = apply_mutation(a, rule, direction)
            fb = apply_mutation(b, rule, direction)
            assert apply_mutation(a + b, rule, direction).equals(fa + fb)
            assert apply_mutation(a * b, rule, direction).equals(fa * fb)


def test_rule_validation():
    with pytest.raises(StructuralError):
        MutationRule(variables=X2, n=3, mutated_index=1, fiber_indices=(0,), passive_indices=())
    with pytest.raises(StructuralError):
        MutationRule(variables=X2, n=2, mutated_index=1, fiber_indices=(1,), passive_indices=())
    with pytest.raises(StructuralError):
        MutationRule.from_names(X2, "x3", ["x1"])


def test_rule_variable_mismatch(rule2):
    y1, = LaurentPolynomial.gens(("y1",))
    with pytest.raises(StructuralError):
        apply_mutation(y1, rule2, "forward")


def test_extended_rule_keeps_mutation_data(rule2):
    extended = rule2.extended_to(("x1", "x2", "w1", "w2"))
    assert extended.mutated == "x2"
    assert extended.fiber == ("x1",)
    assert extended.passive == ("w1", "w2")


# -----------------------------
# Evaluation
# -----------------------------
def test_eval_cases(gens2):
    x1, x2 = gens2
    assert eval_at(x2 * (1 + x1), {"x1": 1, "x2": 2}) == gaussian(4)
    assert eval_at(x1 + x2 + x1 ** -1 * x2 ** -1, {"x1": 1, "x2": 1}) == gaussian(3)


def test_eval_wall_and_domain(gens2):
    x1, _ = gens2
    f = RationalFunction.normalized(LaurentPolynomial.constant(X2, 1), 1 + x1)
    with pytest.raises(WallError):
        eval_at(f, {"x1": -1, "x2": 5})
    with pytest.raises(DomainError):
        eval_at(f, {"x1": 0, "x2": 5})
    with pytest.raises(StructuralError):
        eval_at(f, {"x1": 2})


def test_eval_compatibility_with_local_system_mutation():
    rng = np.random.default_rng(11)
    rule = standard_rule(3, passive=1)
    point = {"x1": "1/2", "x2": (2, 1), "x3": -3, "y1": "5/7"}
    moved = mutate_local_system(point, rule)
    for _ in range(5):
        w = random_laurent(rule.variables, rng, max_terms=6, exponent_range=(-3, 3))
        forward = apply_mutation(w, rule, "forward")
        assert eval_at(forward, point) == eval_at(w, moved)
        assert eval_at(mutate_potential(w, rule).value, moved) == eval_at(w, point)


def test_local_system_mutation_on_wall(rule2):
    with pytest.raises(WallError):
        mutate_local_system({"x1": -1, "x2": 3}, rule2)
    moved = mutate_local_system({"x1": 1, "x2": 2}, rule2)
    assert moved["x2"] == QQ_I(4, 0)
    assert moved["x1"] == QQ_I(1, 0)
