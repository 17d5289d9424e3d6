import random
from fractions import Fraction

import pytest

from drinfeldlab.algebra.fq import FqConfig
from drinfeldlab.drinfeld.module import DrinfeldModule, conjugate
from drinfeldlab.fields.places import INFINITY, FieldDescriptor, Place
from drinfeldlab.heights.canonical import (
    canonical_height,
    canonical_height_detail,
    canonical_height_local,
    h_phi,
    local_decomposition,
    relevant_places,
    steps_for_tolerance,
    zimmer_bounds,
)
from drinfeldlab.heights.green import Orbit, green_local, green_local_a, is_T_generic, lambda_local
from drinfeldlab.heights.interval import HeightInterval
from drinfeldlab.heights.torsion import annihilator, is_torsion, torsion_submodule, verify_submodule
from drinfeldlab.utils.errors import DomainError, ResourceGuardError, UnsupportedFieldError

BASE2 = FieldDescriptor.base_rational(FqConfig(2))
BASE3 = FieldDescriptor.base_rational(FqConfig(3))
F = BASE2.field
T = F.gen()
ONE = F.one
AT_T = Place.finite(F.poly((0, 1)))

CARLITZ = DrinfeldModule.carlitz(BASE2)
CARLITZ3 = DrinfeldModule.carlitz(BASE3)
RANK2 = DrinfeldModule(BASE2, (ONE, T))


# -- interval ---------------------------------------------------------------------------


def test_interval_arithmetic():
    a = HeightInterval(Fraction(1), Fraction(3))
    assert a.mid == 2 and a.width == 2
    assert (a + HeightInterval.point(1)) == HeightInterval(Fraction(2), Fraction(4))
    assert a.scale(-1) == HeightInterval(Fraction(-3), Fraction(-1))
    assert a.intersect(HeightInterval(Fraction(2), Fraction(5))) == HeightInterval(Fraction(2), Fraction(3))
    assert HeightInterval(Fraction(1), Fraction(1)).exact
    with pytest.raises(DomainError):
        HeightInterval(Fraction(2), Fraction(1))
    with pytest.raises(DomainError):
        a.intersect(HeightInterval.point(7))
    assert a.to_dict() == {"lo": "1", "hi": "3", "exact": False}


# -- Green's functions and local heights ------------------------------------------------


def test_green_escapes_at_infinity():
    result = green_local(CARLITZ, INFINITY, T ** 2)
    assert result.value == HeightInterval.point(2)
    assert result.escaped_at == 0 and result.closed_form


def test_green_vanishes_on_torsion_and_zero():
    assert green_local(CARLITZ, INFINITY, T).value == HeightInterval.point(0)
    assert green_local(RANK2, AT_T, F.zero).value == HeightInterval.point(0)
    with pytest.raises(DomainError):
        green_local(CARLITZ, INFINITY, T ** 2, n_max=0)


def test_green_with_other_endomorphisms_agrees():
    x = T ** 2
    for coeffs in [(1, 1), (0, 0, 1)]:
        a = BASE2.a_poly(coeffs)
        assert green_local_a(CARLITZ, INFINITY, x, a).value == HeightInterval.point(2)
    with pytest.raises(DomainError):
        green_local_a(CARLITZ, INFINITY, x, BASE2.a_poly((1,)))


def test_lambda_examples():
    assert lambda_local(CARLITZ, AT_T, T) == HeightInterval.point(1)
    assert lambda_local(CARLITZ, INFINITY, T ** 2) == HeightInterval.point(0)
    with pytest.raises(DomainError):
        lambda_local(CARLITZ, INFINITY, F.zero)


def test_lambda_is_invariant_under_isomorphism():
    """lambda_psi(x) = lambda_phi(alpha x) for psi = conjugate(phi, alpha)."""
    rng = random.Random(17)
    for _ in range(12):
        coeffs = (F.random_element(rng, 1), F.random_element(rng, 1, nonzero=True))
        M = DrinfeldModule(BASE2, coeffs)
        alpha = F.random_element(rng, 1, nonzero=True)
        x = F.random_element(rng, 1, nonzero=True)
        psi = conjugate(M, alpha)
        for v in relevant_places(M, alpha * x, extra=relevant_places(psi, x)):
            left = lambda_local(psi, v, x, n_max=4)
            right = lambda_local(M, v, alpha * x, n_max=4)
            assert left.intersects(right), (M, alpha, x, v)


def test_T_genericity():
    assert is_T_generic(CARLITZ, INFINITY, T ** 2)
    assert not is_T_generic(CARLITZ, INFINITY, T)


def test_orbit_detects_cycles():
    orbit = Orbit(CARLITZ, ONE)
    assert orbit.get(1) == T + ONE
    assert orbit.get(5) is None
    assert orbit.preperiodic and not orbit.truncated


# -- canonical heights ------------------------------------------------------------------


def test_zimmer_constants():
    b2 = zimmer_bounds(CARLITZ)
    assert (b2.C1, b2.C2, b2.B_lower, b2.B_upper) == (2, 1, 2, 1)
    b3 = zimmer_bounds(CARLITZ3)
    assert (b3.C1, b3.C2) == (Fraction(3, 4), Fraction(1, 2))


def test_h_phi_examples():
    assert h_phi(CARLITZ) == 0
    assert h_phi(RANK2) == Fraction(2, 3)
    assert h_phi(conjugate(CARLITZ, T.inverse())) == 1


def test_steps_for_tolerance():
    assert steps_for_tolerance(zimmer_bounds(CARLITZ), Fraction(1, 64)) == 8


def test_canonical_height_both_methods():
    tol = Fraction(1, 64)
    x = T ** 2
    glob = canonical_height(CARLITZ, x, tol)
    assert glob.contains(2) and glob.width <= tol
    assert canonical_height_local(CARLITZ, x) == HeightInterval.point(2)
    y = CARLITZ(x)
    assert canonical_height_local(CARLITZ, y) == HeightInterval.point(4)
    assert canonical_height(CARLITZ, y, tol).contains(4)


def test_canonical_height_of_torsion_and_zero():
    assert canonical_height(CARLITZ, ONE) == HeightInterval.point(0)
    assert canonical_height(CARLITZ, F.zero) == HeightInterval.point(0)
    assert canonical_height_local(CARLITZ, F.zero) == HeightInterval.point(0)
    with pytest.raises(DomainError):
        canonical_height(CARLITZ, T, Fraction(0))


def test_degree_budget_widens_but_keeps_the_value():
    detail = canonical_height_detail(CARLITZ, T ** 2, Fraction(1, 2 ** 20), max_degree=64)
    assert detail.truncated and detail.steps < detail.target_steps
    assert detail.interval.contains(2)


def test_local_decomposition_terms():
    decomposition = local_decomposition(CARLITZ, T ** 2)
    by_place = {term.place: term for term in decomposition.terms}
    assert set(by_place) == {INFINITY, AT_T}
    assert by_place[INFINITY].green.value == HeightInterval.point(2)
    assert by_place[INFINITY].local_height == HeightInterval.point(0)
    assert by_place[AT_T].local_height == HeightInterval.point(2)
    assert decomposition.total == HeightInterval.point(2)


def test_global_and_local_methods_agree_on_random_points():
    rng = random.Random(23)
    for _ in range(10):
        M = DrinfeldModule(BASE2, (F.random_element(rng, 2, nonzero=True),))
        x = F.random_element(rng, 2)
        glob = canonical_height(M, x, Fraction(1, 8))
        local = canonical_height_local(M, x, n_max=6)
        assert glob.intersects(local), (M, x)


def test_canonical_height_scales_along_the_orbit():
    x = T + ONE / T
    h = canonical_height_local(RANK2, x, n_max=5)
    h_next = canonical_height_local(RANK2, RANK2(x), n_max=5)
    assert h_next.intersects(h.scale(4))


# -- torsion ----------------------------------------------------------------------------


def test_is_torsion_examples():
    assert is_torsion(CARLITZ, ONE)
    assert is_torsion(CARLITZ, F.zero)
    assert not is_torsion(CARLITZ3, CARLITZ3.field.one)
    assert not is_torsion(CARLITZ, T ** 2)


def test_carlitz_torsion_over_f2():
    points = torsion_submodule(CARLITZ)
    assert {F.zero, ONE, T, T + ONE} <= set(points)
    assert verify_submodule(CARLITZ, points)
    assert points == sorted(points, key=lambda x: x.key())


def test_carlitz_torsion_over_f3_is_trivial():
    assert torsion_submodule(CARLITZ3) == [CARLITZ3.field.zero]


def test_rank2_torsion_is_closed():
    points = torsion_submodule(RANK2)
    assert F.zero in points and ONE in points
    assert verify_submodule(RANK2, points)
    assert not verify_submodule(CARLITZ, [F.zero, T ** 2])


def test_torsion_guards():
    with pytest.raises(ResourceGuardError):
        torsion_submodule(CARLITZ, guard=3)
    tower = FieldDescriptor.tower(FqConfig(2))
    with pytest.raises(UnsupportedFieldError):
        torsion_submodule(DrinfeldModule.carlitz(tower))
    with pytest.raises(ResourceGuardError):
        is_torsion(CARLITZ, T ** 2, bounds=zimmer_bounds(conjugate(CARLITZ, T ** 40)), max_steps=2)


def test_is_torsion_runs_over_the_base_only():
    tower_carlitz = DrinfeldModule.carlitz(FieldDescriptor.tower(FqConfig(2)))
    with pytest.raises(UnsupportedFieldError):
        is_torsion(tower_carlitz, tower_carlitz.field.one)


@pytest.mark.parametrize(
    "x, expected",
    [
        (T, (0, 1)),
        (T + ONE, (1, 1)),
        (ONE, (0, 1, 1)),
    ],
)
def test_annihilators(x, expected):
    a = annihilator(CARLITZ, x)
    assert a is not None and a.coeffs == expected


def test_annihilator_of_rank2_fixed_point():
    assert annihilator(RANK2, ONE).coeffs == (1, 1)
    assert annihilator(CARLITZ, T ** 2, max_degree=2) is None


@pytest.mark.slow
def test_methods_agree_at_scale():
    rng = random.Random(200)
    for _ in range(200):
        q = rng.choice([2, 3])
        desc = FieldDescriptor.base_rational(FqConfig(q))
        rank = rng.choice([1, 2])
        coeffs = [desc.field.random_element(rng, 1) for _ in range(rank - 1)]
        coeffs.append(desc.field.random_element(rng, 1, nonzero=True))
        M = DrinfeldModule(desc, tuple(coeffs))
        x = desc.field.random_element(rng, 2)
        glob = canonical_height(M, x, Fraction(1, 16))
        local = canonical_height_local(M, x, n_max=6)
        assert glob.intersects(local), (M, x)
        if glob.exact and local.exact:
            assert glob == local
