import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import gcdex, primefactors

from quadsigma.abgroup import FinAbGroup, IntMatrix, two_rank
from quadsigma.elements import QuadElement
from quadsigma.localsym import SigmaSet, is_fundamental_discriminant, is_squarefree
from quadsigma.quadfield import (
    EnvelopeError,
    QuadForm,
    QuadIdeal,
    class_group,
    compose_forms,
    field,
    fundamental_unit,
    place_valuation,
    primes_above,
    principal_generator,
    principal_ideal,
    reduce_form,
    s_class_group,
    s_unit_group,
)

from oracles import reduced_form_count, smallest_pell_solution

NEG_D = [D for D in range(-200, 0) if is_fundamental_discriminant(D)]
SMALL_D = [D for D in range(-200, 201) if is_fundamental_discriminant(D)]


def d_of(D):
    return D // 4 if D % 4 == 0 else D


def el(d, r, s):
    """r + s*sqrt(d) in field(d)."""
    return QuadElement.from_d_coords(field(d).D, r, s)


def up_to_sign(xs):
    return {x if (x.x, x.y) > (0, 0) else -x for x in xs}


# -- fields and forms


def test_field_examples():
    K = field(-5)
    assert (K.D, K.signature, K.torsion_order) == (-20, "imaginary", 2)
    assert field(-3).torsion_order == 6
    assert field(-1).torsion_order == 4
    assert (field(6).D, field(6).signature) == (24, "real")
    with pytest.raises(EnvelopeError):
        field(503)
    with pytest.raises(ValueError):
        field(4)


def test_reduce_form_examples():
    cases = [((5, 0, 1), -20, (1, 0, 5)), ((3, 2, 2), -20, (2, 2, 3)), ((2, 1, 3), -23, (2, 1, 3))]
    for f, D, want in cases:
        f = QuadForm(*f)
        assert f.disc == D
        red, M = reduce_form(f)
        assert red == QuadForm(*want)
        assert f.transform(M) == red


@given(st.integers(1, 40), st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40))
def test_reduce_form_tracks_matrix(a, b, p, r):
    # random form in the class of a reduced one, pushed through a unimodular matrix
    D = b * b - 4 * a * 7
    if D >= 0 or (b * b - D) % (4 * a):
        return
    f = QuadForm(a, b, 7)
    if not f.is_primitive() or gcd(p, r) != 1:
        return
    # complete (p, r) to a unimodular matrix
    s, q, _ = gcdex(p, r)  # s*p + q*r = 1
    g = f.transform(((p, -int(q)), (r, int(s))))
    red, M = reduce_form(g)
    assert g.transform(M) == red
    assert red == reduce_form(f)[0]


# -- class groups


def test_class_group_examples():
    C = class_group(field(-23))
    assert C.group == FinAbGroup((3,))
    assert set(C.forms) == {QuadForm(1, 1, 6), QuadForm(2, 1, 3), QuadForm(2, -1, 3)}
    C = class_group(field(-5))
    assert C.group == FinAbGroup((2,))
    assert set(C.forms) == {QuadForm(1, 0, 5), QuadForm(2, 2, 3)}
    assert class_group(field(2)).order() == 1
    assert class_group(field(-14)).group == FinAbGroup((4,))
    assert class_group(field(10)).group == FinAbGroup((2,))
    assert class_group(field(79)).group == FinAbGroup((3,))


def test_narrow_versus_wide():
    # d = 3: two narrow classes, x^2 - 3y^2 = -1 unsolvable, wide group trivial
    C3 = class_group(field(3))
    assert C3.narrow_order == 2 and C3.order() == 1
    assert C3.unit_norm_is_minus_one is False
    assert all((x * x + 1) % 3 for x in range(3))  # -1 is no square mod 3
    C2 = class_group(field(2))
    assert C2.narrow_order == 1 and C2.unit_norm_is_minus_one is True


@pytest.mark.parametrize("D", NEG_D)
def test_class_number_oracle(D):
    assert class_group(field(d_of(D))).order() == reduced_form_count(D)


@pytest.mark.parametrize("D", SMALL_D)
def test_composition_matches_ideal_products(D):
    K = field(d_of(D))
    C = class_group(K)
    forms = C.forms
    for f in forms:
        I = QuadIdeal(D, f.a, f.b)
        if D < 0:
            assert I.form() == f  # reduced forms survive form -> ideal -> form
        for g in forms:
            J = QuadIdeal(D, g.a, g.b)
            lhs = C.narrow_index(compose_forms(f, g))
            rhs = C.narrow_index((I * J).form())
            assert lhs == rhs
            if D < 0:
                assert reduce_form(compose_forms(f, g))[0] == reduce_form((I * J).form())[0]


@pytest.mark.parametrize("d", [-23, -14, -5, -30, -105, 10, 15, 34, 79, 82, 3])
def test_tau_involution_and_norm_triviality(d):
    K = field(d)
    C = class_group(K)
    G = C.group
    tt = C.tau.compose(C.tau)
    zero = G.reduce([0] * G.ngens)
    for x in G.elements():
        assert tt(x) == G.reduce(x)
        # [I] * tau[I] is the class of the principal ideal (N I)
        assert G.reduce([a + b for a, b in zip(x, C.tau(x))]) == zero
    sigma = SigmaSet.of(set(SigmaSet.minimal(d).finite_primes) | {2, 3})
    S = s_class_group(K, sigma)
    sq = S.tau.compose(S.tau)
    assert all(sq(x) == S.group.reduce(x) for x in S.group.elements())


@pytest.mark.parametrize("D", NEG_D)
def test_genus_two_rank(D):
    # imaginary fields: the 2-rank of the class group is t - 1, t = number of primes dividing D
    assert two_rank(class_group(field(d_of(D))).group) == len(primefactors(-D)) - 1


# -- units


def test_fundamental_unit_examples():
    cases = [(2, el(2, 1, 1), -1), (3, el(3, 2, 1), 1), (5, el(5, Fraction(1, 2), Fraction(1, 2)), -1)]
    for d, eps, n in cases:
        u = fundamental_unit(field(d))
        assert u == eps and u.norm() == n
    assert str(fundamental_unit(field(5))) == "(1+√5)/2"
    assert fundamental_unit(field(94)) == el(94, 2143295, 221064)
    with pytest.raises(ValueError):
        fundamental_unit(field(-5))


@pytest.mark.parametrize("d", [d for d in range(2, 101) if is_squarefree(d)])
def test_fundamental_unit_window(d):
    K = field(d)
    eps = fundamental_unit(K)
    assert abs(eps.norm()) == 1 and eps.is_integral() and eps.gt_one()
    # eps = (X + Y sqrt D)/2
    X, Y = Fraction(2 * eps.x, eps.denom), Fraction(2 * eps.y, eps.denom)
    assert X.denominator == 1 and Y.denominator == 1
    # no unit with smaller positive y (units > 1 have x, y > 0 and grow with y)
    assert smallest_pell_solution(K.D, int(Y)) == (int(X), int(Y))


# -- primes and Sigma-class groups


def test_primes_above_examples():
    K = field(-5)
    C = class_group(K)
    nontrivial = C.coords(QuadForm(2, 2, 3))
    above3 = primes_above(K, 3)
    assert len(above3) == 2 and all(P.kind == "split" and c == nontrivial for P, c in above3)
    (P5, c5), = primes_above(K, 5)
    assert P5.kind == "ramified" and c5 == (0,)
    assert principal_generator(K, P5.ideal) in (el(-5, 0, 1), el(-5, 0, -1))
    (P11, c11), = primes_above(field(-14), 11)
    assert P11.kind == "inert" and not any(c11)


def test_s_class_group_examples():
    assert s_class_group(field(-5), SigmaSet.of([2, 5])).group == FinAbGroup(())
    assert s_class_group(field(-14), SigmaSet.of([2, 7])).group == FinAbGroup((2,))
    # the prime above 23 is generated by sqrt(-23), so the quotient stays Z/3
    K = field(-23)
    (P, c), = primes_above(K, 23)
    assert not any(c)
    assert s_class_group(K, SigmaSet.of([23])).group == FinAbGroup((3,))


def test_s_class_group_rejects_bad_sigma():
    with pytest.raises(ValueError):
        s_class_group(field(-14), SigmaSet.of([2]))
    with pytest.raises(EnvelopeError):
        s_class_group(field(-14), SigmaSet.of([2, 7, 101]))


def test_principal_generator_examples():
    K = field(-5)
    two = QuadIdeal(K.D, 1, 0, Fraction(2))
    assert principal_generator(K, two) in (el(-5, 2, 0), el(-5, -2, 0))
    assert principal_generator(K, QuadIdeal(K.D, 5, 0)) in (el(-5, 0, 1), el(-5, 0, -1))
    assert principal_generator(K, QuadIdeal(K.D, 2, 2)) is None


@pytest.mark.parametrize("d", [-23, -5, -14, 2, 3, 10, 79, 94, -3, -1])
def test_principal_generator_generates(d):
    K = field(d)
    rng = random.Random(d)
    for _ in range(20):
        x = QuadElement(K.D, rng.randint(-30, 30), rng.randint(-30, 30), 1)
        if x.is_zero():
            continue
        I = principal_ideal(K, x)
        g = principal_generator(K, I)
        assert g is not None
        assert principal_ideal(K, g) == I
        assert abs((g / x).norm()) == 1 and (g / x).is_integral()


# -- S-units


def test_s_unit_examples():
    U = s_unit_group(field(-5), SigmaSet.of([2, 5]))
    assert U.torsion_gen == el(-5, -1, 0)
    assert up_to_sign(U.free_gens) == up_to_sign([el(-5, 2, 0), el(-5, 0, 1)])
    U = s_unit_group(field(-5), SigmaSet.of([2, 3, 5]))
    want = [el(-5, 2, 0), el(-5, 0, 1), el(-5, 1, 1), el(-5, 1, -1)]
    assert up_to_sign(U.free_gens) == up_to_sign(want)
    U = s_unit_group(field(2), SigmaSet.of([2]))
    assert U.free_gens == [el(2, 1, 1), el(2, 0, 1)]
    U = s_unit_group(field(-3), SigmaSet.of([3]))
    assert U.torsion_order == 6 and U.rank == 1


SUNIT_CASES = [
    (-5, [2, 3, 5]), (-14, [2, 7, 3]), (-23, [23, 2, 3]), (-3, [3, 7]), (-1, [2, 5]),
    (2, [2, 7]), (3, [2, 3, 11]), (10, [2, 5, 3]), (79, [2, 79, 5]), (-105, [2, 3, 5, 7]),
]


def subgroup_order(G, gens):
    seen = {G.reduce([0] * G.ngens)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.reduce([a + b for a, b in zip(x, g)])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


@pytest.mark.parametrize("d,primes", SUNIT_CASES)
def test_s_unit_soundness(d, primes):
    K = field(d)
    U = s_unit_group(K, SigmaSet.of(primes))
    assert U.rank == len(U.places) + (1 if K.is_real else 0)
    C = class_group(K)
    for j, g in enumerate(U.free_gens):
        col = U.valuation_matrix.column(j)
        assert [place_valuation(g, P) for P in U.places] == col
        # norm of g accounts for every prime: |N g| = prod p^(f_P v_P)
        expected = Fraction(1)
        for P, v in zip(U.places, col):
            expected *= Fraction(P.p) ** ((2 if P.kind == "inert" else 1) * v)
        assert abs(g.norm()) == expected
    # valuation columns span the kernel of the class map: index = size of the image
    offset = 1 if K.is_real else 0
    m = len(U.places)
    cols = [U.valuation_matrix.column(j) for j in range(offset, U.rank)]
    det = abs(IntMatrix.from_columns(cols, m).det())
    classes = [C.coords(P.ideal) for P in U.places]
    assert det == subgroup_order(C.group, classes)
    assert U.torsion_gen ** U.torsion_order == el(d, 1, 0)


@pytest.mark.parametrize("d,primes", SUNIT_CASES)
def test_s_unit_log_roundtrip(d, primes):
    U = s_unit_group(field(d), SigmaSet.of(primes))
    rng = random.Random(abs(d))
    for _ in range(15):
        exps = [rng.randrange(U.torsion_order)] + [rng.randint(-3, 3) for _ in range(U.rank)]
        assert U.log(U.element(exps)) == tuple(exps)
    with pytest.raises(ArithmeticError):
        U.log(el(d, 13, 0))


# -- elements


def test_element_examples():
    assert el(2, 1, 1).norm() == -1
    assert el(-5, 0, 1).norm() == 5
    assert str(el(-5, 0, 1)) == "√-5"
    assert str(el(-5, 1, -1)) == "1-√-5"
    assert str(el(2, 1, 1)) == "1+√2"


@given(st.sampled_from([-5, -3, -1, 2, 3, 5, 13]), st.integers(-50, 50), st.integers(-50, 50),
       st.integers(-50, 50), st.integers(-50, 50))
def test_element_arithmetic(d, a, b, c, e):
    x, y = el(d, a, b), el(d, c, e)
    assert x.conj().conj() == x
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y) - y == x
    if not y.is_zero():
        assert (x / y) * y == x
        assert y ** -2 * y ** 2 == el(d, 1, 0)
