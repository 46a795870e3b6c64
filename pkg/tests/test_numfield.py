import math
import random
from fractions import Fraction

import pytest

from arithmeticoid.numfield import (
    FieldElement,
    FieldError,
    InfiniteOrder,
    NumberField,
    archimedean_place,
    ord,
    places_over,
    places_up_to,
    product_formula_check,
    roots_of_unity,
    splitting_type,
    standard_abs,
)

Q = NumberField()
QI = NumberField(1)
Q3 = NumberField(3)


# ---------------------------------------------------------------- oracles

def oracle_splitting(field, p):
    """Brute-force roots of the minimal polynomial of omega mod p."""
    t, n = field.omega_trace, field.omega_norm
    roots = [r for r in range(p) if (r * r - t * r + n) % p == 0]
    if len(roots) == 2:
        return "split"
    if len(roots) == 0:
        return "inert"
    # single root: ramified iff it is a double root, which for a quadratic it is
    return "ramified"


def oracle_norm(x):
    z = x.as_complex()
    return abs(z) ** 2 if x.field.d is not None else z.real


def random_element(rng, field, span=30):
    while True:
        a = Fraction(rng.randint(-span, span), rng.randint(1, span))
        b = Fraction(rng.randint(-span, span), rng.randint(1, span)) if field.d else Fraction(0)
        x = FieldElement(field, a, b)
        if not x.is_zero():
            return x


# ---------------------------------------------------------------- parsing

def test_parse_field_strings():
    assert NumberField.parse("Q") == Q
    assert NumberField.parse("Q(sqrt(-1))") == QI
    assert NumberField.parse("Q(sqrt(-163))").d == 163
    with pytest.raises(FieldError):
        NumberField.parse("Q(sqrt(-4))")  # not squarefree
    with pytest.raises(FieldError):
        NumberField.parse("Q(sqrt(2))")


def test_parse_elements():
    assert FieldElement.parse(Q, "5/3") == Q.element(Fraction(5, 3))
    x = FieldElement.parse(QI, "2, -1/2")
    assert (x.a, x.b) == (Fraction(2), Fraction(-1, 2))


def test_integral_basis_choice():
    assert not QI.half_basis and QI.discriminant == -4
    assert Q3.half_basis and Q3.discriminant == -3
    # omega = (1+sqrt(-3))/2 satisfies t^2 - t + 1
    w = Q3.omega()
    assert (w * w - w + Q3.one()).is_zero()


# ---------------------------------------------------------------- places

def test_places_up_to_rationals():
    vs = places_up_to(Q, 10)
    assert vs[0].is_archimedean
    assert [v.prime for v in vs[1:]] == [2, 3, 5, 7]


def test_gaussian_splitting_examples():
    (v2,) = places_over(QI, 2)
    assert (v2.e, v2.f) == (2, 1)
    v5s = places_over(QI, 5)
    assert len(v5s) == 2 and all((v.e, v.f) == (1, 1) for v in v5s)


def test_eisenstein_seven_splits():
    assert splitting_type(Q3, 7) == "split"
    assert oracle_splitting(Q3, 7) == "split"


def test_splitting_matches_bruteforce_oracle():
    from sympy import primerange

    for field in (QI, Q3, NumberField(5), NumberField(7), NumberField(163)):
        for p in primerange(2, 60):
            assert splitting_type(field, int(p)) == oracle_splitting(field, int(p)), (field, p)


def test_local_degrees_sum_to_field_degree():
    from sympy import primerange

    for field in (Q, QI, Q3, NumberField(5)):
        for p in primerange(2, 60):
            assert sum(v.e * v.f for v in places_over(field, int(p))) == field.degree


# ---------------------------------------------------------------- ord

def test_ord_examples():
    v5 = places_over(Q, 5)[0]
    assert ord(Q.element(5), v5) == 1
    assert ord(Q.element(Fraction(1, 5)), v5) == -1
    (v2,) = places_over(QI, 2)
    assert ord(QI.element(1, 1), v2) == 1  # (1+i)^2 = 2i


def test_ord_split_places_distinguish_conjugates():
    va, vb = places_over(QI, 5)
    x = QI.element(2, 1)  # norm 5
    vals = sorted([ord(x, va), ord(x, vb)])
    assert vals == [0, 1]
    xb = x.conjugate()
    assert ord(xb, va) == ord(x, vb) and ord(xb, vb) == ord(x, va)


def test_ord_additive_on_random_pairs():
    rng = random.Random(501)
    fields = [Q, QI, Q3]
    for _ in range(500):
        field = rng.choice(fields)
        x, y = random_element(rng, field), random_element(rng, field)
        for p in (2, 3, 5, 7):
            for v in places_over(field, p):
                assert ord(x * y, v) == ord(x, v) + ord(y, v)


def test_ord_matches_norm_valuation():
    # sum of f_v * ord_v over v | p equals ord_p of the norm
    rng = random.Random(502)
    for _ in range(200):
        field = rng.choice([QI, Q3, NumberField(5)])
        x = random_element(rng, field)
        n = x.norm()
        for p in (2, 3, 5, 7, 11, 13):
            np = 0
            num, den = n.numerator, n.denominator
            while num % p == 0:
                num //= p
                np += 1
            while den % p == 0:
                den //= p
                np -= 1
            assert sum(v.f * ord(x, v) for v in places_over(field, p)) == np


def test_ord_errors():
    v5 = places_over(Q, 5)[0]
    with pytest.raises(InfiniteOrder):
        ord(Q.zero(), v5)
    with pytest.raises(FieldError):
        ord(Q.element(5), archimedean_place(Q))


# ---------------------------------------------------------------- standard_abs

def test_standard_abs_examples():
    v5 = places_over(Q, 5)[0]
    r = standard_abs(Q.element(5), v5)
    assert r.coeff == -1 and r.prime == 5  # |5|_5 = 1/5
    arch = standard_abs(Q.element(5), archimedean_place(Q))
    assert arch.value == pytest.approx(math.log(5), abs=1e-15)
    two = standard_abs(QI.element(1, 1), archimedean_place(QI))
    assert two.value == pytest.approx(math.log(2), abs=1e-15)  # |N(1+i)| = 2


def test_norm_matches_complex_oracle():
    rng = random.Random(503)
    for _ in range(200):
        field = rng.choice([QI, Q3, NumberField(7)])
        x = random_element(rng, field)
        assert float(x.norm()) == pytest.approx(oracle_norm(x), rel=1e-9)


# ---------------------------------------------------------------- product formula

def test_product_formula_examples():
    rep = product_formula_check(Q.element(5))
    assert rep.exact and rep.residual < 1e-12
    rep = product_formula_check(Q.element(Fraction(6, 35)))
    assert rep.exact and rep.residual < 1e-12
    rep = product_formula_check(QI.element(2, 1))
    assert rep.exact and rep.residual < 1e-12


def test_product_formula_random():
    rng = random.Random(504)
    for _ in range(150):
        field = rng.choice([Q, QI, Q3, NumberField(5)])
        rep = product_formula_check(random_element(rng, field))
        assert rep.exact
        assert rep.residual < 1e-9


# ---------------------------------------------------------------- roots of unity

def test_roots_of_unity_listing():
    assert {str(x) for x in roots_of_unity(Q)} == {"1", "-1"}
    assert len(roots_of_unity(QI)) == 4
    assert len(roots_of_unity(Q3)) == 6
    assert len(roots_of_unity(NumberField(5))) == 2


def test_roots_of_unity_kernel_property():
    # every listed root: ord 0 everywhere, archimedean modulus 1
    for field in (Q, QI, Q3):
        for z in roots_of_unity(field):
            assert abs(z.norm()) == 1
            for p in (2, 3, 5, 7, 11):
                for v in places_over(field, p):
                    assert ord(z, v) == 0
    # sampled non-roots fail
    rng = random.Random(505)
    for _ in range(100):
        field = rng.choice([Q, QI, Q3])
        x = random_element(rng, field)
        if any(x == z for z in roots_of_unity(field)):
            continue
        flat = abs(x.norm()) == 1 and all(
            ord(x, v) == 0 for p in (2, 3, 5, 7, 11, 13) for v in places_over(field, p)
        )
        if flat:
            # norm-1 elements of an imaginary quadratic are roots of unity; must not happen
            assert False, f"unexpected unit {x}"


def test_power_identities():
    i = QI.omega()
    assert (i ** 4).is_one()
    assert (i ** -1) == -i
    w = Q3.omega()
    assert (w ** 6).is_one() and not (w ** 3).is_one()
