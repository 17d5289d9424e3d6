import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeldlab.algebra.factor import is_irreducible, squarefree_decomposition, upoly_factor
from drinfeldlab.algebra.fq import FqConfig, FqElem, field_arith, finite_field
from drinfeldlab.algebra.ratfunc import function_field
from drinfeldlab.algebra.upoly import UPoly, upoly_gcd, upoly_xgcd
from drinfeldlab.utils.errors import DomainError, FieldMismatchError

F2 = finite_field(FqConfig(2))
F3 = finite_field(FqConfig(3))
F4 = finite_field(FqConfig(2, 2, (1, 1, 1)))
F9 = finite_field(FqConfig.of_order(9))


def poly(field, *coeffs):
    return UPoly(field, tuple(coeffs))


def test_prime_field_arithmetic():
    assert F2.add(1, 1) == 0
    assert F3.inv(2) == 2
    assert F3.mul(2, 2) == 1


def test_extension_field_generator_squared():
    # g = x is encoded as 2 (digits [0, 1]); g^2 = g + 1 is digits [1, 1]
    g = F4.from_digits([0, 1])
    assert F4.mul(g, g) == F4.from_digits([1, 1])


def test_config_validation():
    with pytest.raises(DomainError):
        FqConfig(4)
    with pytest.raises(DomainError):
        FqConfig(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2
    with pytest.raises(DomainError):
        FqConfig(3, 2)
    assert FqConfig.of_order(4).modulus == (1, 1, 1)
    assert FqConfig.of_order(5) == FqConfig(5)
    with pytest.raises(DomainError):
        FqConfig.of_order(6)


elements9 = st.integers(min_value=0, max_value=8)


@given(elements9, elements9, elements9)
def test_field_axioms_f9(a, b, c):
    assert F9.mul(a, F9.add(b, c)) == F9.add(F9.mul(a, b), F9.mul(a, c))
    assert F9.add(a, F9.neg(a)) == 0
    if a:
        assert F9.mul(a, F9.inv(a)) == 1
        assert F9.pow(a, 8) == 1


@given(elements9)
def test_pth_root_inverts_pth_power(a):
    assert F9.pow(F9.pth_root(a), 3) == a


@given(elements9, elements9)
def test_field_arith_matches_the_operators(a, b):
    x, y = FqElem(a, F9), FqElem(b, F9)
    assert field_arith(x, y, "add") == x + y == FqElem(F9.add(a, b), F9)
    assert field_arith(x, y, "mul") == x * y
    assert field_arith(x, 5, "pow") == x ** 5
    if b:
        assert field_arith(x, y, "inv") * y == FqElem(1, F9)


@settings(max_examples=200)
@given(st.sampled_from([F2, F3, F4, F9]), st.integers(min_value=0, max_value=8))
def test_frobenius_fixes_every_element(fq, a):
    x = FqElem(a % fq.q, fq)
    assert x ** fq.q == x
    assert field_arith(x, fq.q, "pow") == x


def test_field_arith_rejects_bad_input():
    with pytest.raises(DomainError):
        field_arith(FqElem(1, F9), FqElem(2, F9), "sub")
    with pytest.raises(FieldMismatchError):
        field_arith(FqElem(1, F9), FqElem(1, F3), "add")
    assert FqElem.of(F4, [0, 1]) * FqElem.of(F4, [0, 1]) == FqElem.of(F4, [1, 1])


def test_gcd_examples():
    T = poly(F2, 0, 1)
    assert upoly_gcd(poly(F2, 0, 1, 1), T) == T
    assert upoly_gcd(poly(F2, 1, 0, 0, 1), poly(F2, 1, 1)) == poly(F2, 1, 1)
    f = poly(F3, 1, 2)
    assert upoly_gcd(f, UPoly.zero(F3)) == f.monic() == poly(F3, 2, 1)


coeff_lists = st.lists(st.integers(min_value=0, max_value=2), max_size=8)


@settings(max_examples=500)
@given(coeff_lists, coeff_lists)
def test_division_and_xgcd_identities(a, b):
    f, g = UPoly(F3, tuple(a)), UPoly(F3, tuple(b))
    if not g.is_zero():
        quo, rem = divmod(f, g)
        assert quo * g + rem == f
        assert rem.degree < g.degree
    d, s, t = upoly_xgcd(f, g)
    assert s * f + t * g == d
    if not d.is_zero():
        assert d.divides(f) and d.divides(g)
        assert d == upoly_gcd(f, g)


@settings(max_examples=40)
@given(coeff_lists)
def test_polynomial_frobenius_is_qth_power(a):
    f = UPoly(F3, tuple(a))
    assert f.frob() == f ** 3


@pytest.mark.parametrize(
    "field, coeffs, expected",
    [
        (F2, (0, 1, 1), [((0, 1), 1), ((1, 1), 1)]),
        (F2, (1, 0, 1), [((1, 1), 2)]),
        (F3, (1, 0, 1), [((1, 0, 1), 1)]),
    ],
)
def test_factor_examples(field, coeffs, expected):
    factors = upoly_factor(UPoly(field, coeffs))
    assert [(P.coeffs, e) for P, e in factors] == expected


def test_factorization_reassembles():
    f = poly(F3, 2, 0, 1) * poly(F3, 1, 1) ** 3 * poly(F3, 1, 0, 1)
    product = UPoly.constant(F3, f.leading)
    for P, e in upoly_factor(f, seed=5):
        assert is_irreducible(P)
        product = product * P ** e
    assert product == f


def test_squarefree_decomposition_in_characteristic_p():
    # (T + 1)^4 over F_2 has only even exponents
    f = poly(F2, 1, 1) ** 4 * poly(F2, 0, 1)
    parts = dict((P.coeffs, e) for P, e in squarefree_decomposition(f))
    assert parts == {(0, 1): 1, (1, 1): 4}


def test_rational_function_canonical_form():
    fld = function_field(F2)
    x = fld.element([0, 1, 1], [1, 1])  # (T^2 + T) / (T + 1) = T
    assert x == fld.gen()
    assert x.height() == 1
    y = fld.element([1], [0, 1])
    assert (x * y).is_one()
    assert (y ** -1) == x
    assert (x + y).frob() == x.frob() + y.frob()
