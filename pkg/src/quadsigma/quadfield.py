"""Global arithmetic of quadratic fields Q(sqrt d).

Class groups come from binary quadratic forms: reduced forms (imaginary)
or cycles of reduced forms under the rho operator (real) give the narrow
group; the wide group is the quotient by the class of the negated
principal form, which is trivial exactly when the fundamental unit has
norm -1.  No floating point is used; sqrt(D) only enters through integer
comparisons against ``isqrt(D)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Optional, Sequence

from sympy import isprime

from .abgroup import AbHom, FinAbGroup, IntMatrix, Subquotient, _kernel_lattice, lattice_basis
from .elements import QuadElement
from .localsym import SigmaSet, fundamental_discriminant, kronecker, valuation

__all__ = [
    "EnvelopeError",
    "MAX_ABS_D",
    "MAX_SIGMA_PRIME",
    "QuadField",
    "QuadForm",
    "QuadIdeal",
    "ClassGroup",
    "SClassGroup",
    "SUnitGroup",
    "field",
    "reduce_form",
    "compose_forms",
    "class_group",
    "fundamental_unit",
    "primes_above",
    "s_class_group",
    "principal_generator",
    "principal_ideal",
    "place_valuation",
    "s_unit_group",
    "hnf_lattice",
]

MAX_ABS_D = 500
MAX_SIGMA_PRIME = 100


class EnvelopeError(ValueError):
    """Input outside the supported range of field discriminants and primes."""


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class QuadField:
    d: int
    D: int
    signature: str
    torsion_order: int

    @property
    def is_real(self) -> bool:
        return self.signature == "real"

    def element(self, x: int, y: int, denom: int = 1) -> QuadElement:
        return QuadElement(self.D, x, y, denom)

    def omega(self) -> QuadElement:
        """``(D + sqrt D)/2``; ``O_K = Z + Z*omega``."""
        return QuadElement(self.D, self.D, 1, 2)

    def torsion_generator(self) -> QuadElement:
        if self.torsion_order == 4:
            return QuadElement(self.D, 0, 1, 2)  # i = sqrt(-4)/2
        if self.torsion_order == 6:
            return QuadElement(self.D, 1, 1, 2)  # (1 + sqrt(-3))/2
        return QuadElement(self.D, -1, 0, 1)

    def __str__(self) -> str:
        return f"Q(√{self.d})"


def field(d: int) -> QuadField:
    if d in (0, 1):
        raise ValueError(f"d = {d} does not define a quadratic field")
    if abs(d) > MAX_ABS_D:
        raise EnvelopeError(f"|d| = {abs(d)} exceeds the supported bound {MAX_ABS_D}")
    D = fundamental_discriminant(d)
    torsion = {-1: 4, -3: 6}.get(d, 2)
    return QuadField(d, D, "real" if d > 0 else "imaginary", torsion)


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class QuadForm:
    """The binary quadratic form ``a x^2 + b xy + c y^2``."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def transform(self, m: Sequence[Sequence[int]]) -> "QuadForm":
        """``f(p X + q Y, r X + s Y)`` for ``m = ((p, q), (r, s))``."""
        (p, q), (r, s) = m
        a, b, c = self.a, self.b, self.c
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def conj(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c)

    @classmethod
    def principal(cls, D: int) -> "QuadForm":
        k = D % 2
        return cls(1, k, (k - D) // 4)

    @classmethod
    def from_ab(cls, a: int, b: int, D: int) -> "QuadForm":
        num = b * b - D
        if num % (4 * a):
            raise ValueError(f"b^2 - D not divisible by 4a for a={a}, b={b}, D={D}")
        return cls(a, b, num // (4 * a))

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


Mat2 = tuple[tuple[int, int], tuple[int, int]]
_I2: Mat2 = ((1, 0), (0, 1))


def _mat_mul(m: Mat2, n: Mat2) -> Mat2:
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _is_reduced_imag(f: QuadForm) -> bool:
    a, b, c = f.a, f.b, f.c
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def _is_reduced_real(f: QuadForm, s: int) -> bool:
    # 0 < b < sqrt D  and  sqrt D - b < 2|a| < sqrt D + b, with s = isqrt(D)
    a, b = abs(f.a), f.b
    return 0 < b <= s and s < 2 * a + b and 2 * a - b <= s


def _rho_real(f: QuadForm, D: int, s: int) -> tuple[QuadForm, Mat2]:
    a, b, c = f.a, f.b, f.c
    ac = abs(c)
    m = 2 * ac
    if c * c > D:
        r = (-b) % m
        if r > ac:
            r -= m
    else:
        r = s - ((s + b) % m)
    t = (r + b) // (2 * c)
    return QuadForm(c, r, (r * r - D) // (4 * c)), ((0, -1), (1, t))


def _reduce_imag(f: QuadForm) -> tuple[QuadForm, Mat2]:
    a, b, c = f.a, f.b, f.c
    m = _I2
    while True:
        t = (a - b) // (2 * a)
        if t:
            c = a * t * t + b * t + c
            b = b + 2 * a * t
            m = _mat_mul(m, ((1, t), (0, 1)))
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            m = _mat_mul(m, ((0, -1), (1, 0)))
            continue
        return QuadForm(a, b, c), m


def _reduce_real(f: QuadForm) -> tuple[QuadForm, Mat2]:
    D = f.disc
    s = isqrt(D)
    m = _I2
    for _ in range(100000):
        if _is_reduced_real(f, s):
            return f, m
        f, step = _rho_real(f, D, s)
        m = _mat_mul(m, step)
    raise RuntimeError(f"reduction of {f} did not terminate")


def reduce_form(f: QuadForm) -> tuple[QuadForm, Mat2]:
    """Reduced form properly equivalent to ``f`` and the transformation ``M``
    with ``f.transform(M) == reduced``."""
    D = f.disc
    if D < 0:
        if f.a <= 0:
            raise ValueError("only positive definite forms are handled for D < 0")
        return _reduce_imag(f)
    if isqrt(D) ** 2 == D:
        raise ValueError("square discriminant")
    return _reduce_real(f)


def compose_forms(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Gauss composition of primitive forms of the same discriminant with positive
    leading coefficients (unreduced result)."""
    if f1.disc != f2.disc:
        raise ValueError("discriminants differ")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, _ = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    return QuadForm.from_ab(a3, b3, f1.disc)


def _reduced_forms_imag(D: int) -> list[QuadForm]:
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            f = QuadForm(a, b, num // (4 * a))
            if f.is_primitive() and _is_reduced_imag(f):
                out.append(f)
        a += 1
    return out


def _reduced_forms_real(D: int) -> list[QuadForm]:
    s = isqrt(D)
    out = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        n = (D - b * b) // 4
        for a in range(1, n + 1):
            if n % a:
                continue
            for sa in (a, -a):
                f = QuadForm(sa, b, -n // sa)
                if f.is_primitive() and _is_reduced_real(f, s):
                    out.append(f)
    return out


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class QuadIdeal:
    """``scale * (a Z + (b + sqrt D)/2 Z)``; ``b`` is normalized into ``(-a, a]``."""

    D: int
    a: int
    b: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        a, b = int(self.a), int(self.b)
        if a <= 0:
            raise ValueError("a must be positive")
        if (b * b - self.D) % (4 * a):
            raise ValueError(f"({a}, {b}) is not an ideal of discriminant {self.D}")
        b %= 2 * a
        if b > a:
            b -= 2 * a
        scale = Fraction(self.scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def unit(cls, D: int) -> "QuadIdeal":
        return cls(D, 1, D % 2)

    def norm(self) -> Fraction:
        return self.scale * self.scale * self.a

    def form(self) -> QuadForm:
        return QuadForm.from_ab(self.a, self.b, self.D)

    def conj(self) -> "QuadIdeal":
        return QuadIdeal(self.D, self.a, -self.b, self.scale)

    def basis(self) -> tuple[QuadElement, QuadElement]:
        s = self.scale
        return (
            QuadElement(self.D, self.a * s.numerator, 0, s.denominator),
            QuadElement(self.D, self.b * s.numerator, s.numerator, 2 * s.denominator),
        )

    def is_integral(self) -> bool:
        return self.scale.denominator == 1

    def __mul__(self, other: "QuadIdeal") -> "QuadIdeal":
        if other.D != self.D:
            raise ValueError("ideals of different fields")
        gens = [x * y for x in self.basis() for y in other.basis()]
        return _ideal_from_generators(self.D, gens)

    def __pow__(self, k: int) -> "QuadIdeal":
        if k < 0:
            raise ValueError("negative powers not supported")
        result = QuadIdeal.unit(self.D)
        for _ in range(k):
            result = result * self
        return result

    def contains(self, x: QuadElement) -> bool:
        u, v = _uv(x / self.scale)
        if u.denominator != 1 or v.denominator != 1:
            return False
        u, v = int(u), int(v)
        return (u - v * ((self.b - self.D) // 2)) % self.a == 0

    def __str__(self) -> str:
        body = f"[{self.a}, ({self.b}+√{self.D})/2]"
        return body if self.scale == 1 else f"{self.scale}*{body}"


def _uv(x: QuadElement) -> tuple[Fraction, Fraction]:
    """Coordinates of ``x`` in the basis ``1, omega`` of ``O_K``."""
    X = Fraction(2 * x.x, x.denom)  # x = (X + Y sqrt D)/2
    Y = Fraction(2 * x.y, x.denom)
    return (X - Y * x.D) / 2, Y


def _ideal_from_generators(D: int, gens: Sequence[QuadElement]) -> QuadIdeal:
    coords = [_uv(g) for g in gens]
    den = 1
    for u, v in coords:
        den = den * u.denominator // gcd(den, u.denominator)
        den = den * v.denominator // gcd(den, v.denominator)
    vecs = [(int(u * den), int(v * den)) for u, v in coords]
    # products by omega make the Z-span an O_K-module
    nD = (D * D - D) // 4
    vecs += [(-v * nD, u + v * D) for u, v in vecs]
    n1, (m, n2) = _hnf2(vecs)
    if n2 == 0 or n1 == 0:
        raise ValueError("generators do not span a full-rank lattice")
    if n1 % n2 or m % n2:
        raise ArithmeticError("lattice is not an ideal")
    a = n1 // n2
    b = 2 * (m // n2) + D
    return QuadIdeal(D, a, b, Fraction(n2, den))


def _hnf2(vecs) -> tuple[int, tuple[int, int]]:
    """HNF of a rank-2 lattice in Z^2: ``(n1, (m, n2))`` with basis ``(n1,0), (m,n2)``."""
    pivot = None
    us = 0
    for u, v in vecs:
        if v == 0:
            us = gcd(us, u)
            continue
        if pivot is None:
            pivot = (u, v)
            continue
        pu, pv = pivot
        g, s, t = _xgcd(pv, v)
        pivot = (s * pu + t * u, g)
        us = gcd(us, (v // g) * pu - (pv // g) * u)
    if pivot is None:
        return us, (0, 0)
    pu, pv = pivot
    if pv < 0:
        pu, pv = -pu, -pv
    if us:
        pu %= us
    return us, (pu, pv)


def principal_ideal(K: QuadField, x: QuadElement) -> QuadIdeal:
    if x.is_zero():
        raise ZeroDivisionError("zero generates no fractional ideal")
    return _ideal_from_generators(K.D, [x])


# ---------------------------------------------------------------------------
# class groups


class ClassGroup:
    """Wide ideal class group of a quadratic field.

    ``group`` is the abstract group, ``forms`` one reduced form with positive
    leading coefficient per narrow class, and ``tau`` the Galois action.
    """

    def __init__(self, K: QuadField):
        self.field = K
        D = K.D
        if D < 0:
            reduced = _reduced_forms_imag(D)
            self._cycle = {f: i for i, f in enumerate(reduced)}
            reps = reduced
        else:
            reduced = _reduced_forms_real(D)
            s = isqrt(D)
            self._cycle = {}
            reps = []
            for f in reduced:
                if f in self._cycle:
                    continue
                idx = len(reps)
                g = f
                cyc = []
                while g not in self._cycle:
                    self._cycle[g] = idx
                    cyc.append(g)
                    g, _ = _rho_real(g, D, s)
                reps.append(next(h for h in cyc if h.a > 0))
        # the principal class first
        p_idx = self._narrow_index(QuadForm.principal(D))
        order = [p_idx] + [i for i in range(len(reps)) if i != p_idx]
        remap = {old: new for new, old in enumerate(order)}
        self._cycle = {f: remap[i] for f, i in self._cycle.items()}
        self.forms = [reps[i] for i in order]
        self.narrow_order = len(self.forms)
        self.negated_principal = None
        if D > 0:
            pf = QuadForm.principal(D)
            self.negated_principal = self._narrow_index(QuadForm(-1, pf.b, -pf.c))
        self._build_group()

    def _narrow_index(self, f: QuadForm) -> int:
        r, _ = reduce_form(f)
        return self._cycle[r]

    def narrow_index(self, f: QuadForm) -> int:
        if f.disc != self.field.D:
            raise ValueError("form of the wrong discriminant")
        return self._narrow_index(f)

    def _build_group(self) -> None:
        h = self.narrow_order
        mult = {}

        def mul(i, j):
            key = (i, j) if i <= j else (j, i)
            if key not in mult:
                mult[key] = self._narrow_index(compose_forms(self.forms[i], self.forms[j]))
            return mult[key]

        # greedy generating set
        gens: list[int] = []
        reached = {0}
        for i in range(h):
            if i in reached:
                continue
            gens.append(i)
            frontier = list(reached)
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = mul(x, g)
                        if y not in reached:
                            reached.add(y)
                            nxt.append(y)
                frontier = nxt
        relations = [[int(k == 0) for k in range(h)]]
        for i in range(h):
            for g in gens:
                row = [0] * h
                row[i] += 1
                row[g] += 1
                row[mul(i, g)] -= 1
                relations.append(row)
        if self.negated_principal is not None:
            relations.append([int(k == self.negated_principal) for k in range(h)])
        self._sq = Subquotient(h, [[int(i == j) for i in range(h)] for j in range(h)], relations)
        self._coords = [self._sq.coords([int(k == i) for k in range(h)]) for i in range(h)]
        factors = self._sq.factors
        witnesses = []
        for j in range(len(factors)):
            target = tuple(int(k == j) for k in range(len(factors)))
            witnesses.append(next(self.forms[i] for i in range(h) if self._coords[i] == target))
        self.group = FinAbGroup(factors, tuple(witnesses))
        self.tau = AbHom.from_function(
            self.group, self.group, lambda e: self.coords(self.group.generator_witnesses[e.index(1)].conj())
        )

    def coords(self, f: QuadForm) -> tuple[int, ...]:
        """Class of a form (positive leading coefficient) or ideal in group coordinates."""
        if isinstance(f, QuadIdeal):
            f = f.form()
        return self._coords[self.narrow_index(f)]

    def order(self) -> int:
        return self.group.order()

    @property
    def unit_norm_is_minus_one(self) -> Optional[bool]:
        if self.negated_principal is None:
            return None
        return self.negated_principal == 0


@lru_cache(maxsize=4096)
def _class_group_cached(d: int) -> ClassGroup:
    return ClassGroup(field(d))


def class_group(K: QuadField) -> ClassGroup:
    return _class_group_cached(K.d)


# ---------------------------------------------------------------------------
# units


@lru_cache(maxsize=4096)
def _fundamental_unit_cached(d: int) -> QuadElement:
    K = field(d)
    D = K.D
    s = isqrt(d)
    P, Q = (1, 2) if d % 4 == 1 else (0, 1)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[QuadElement] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(quotients)
        # complete quotient (P + sqrt d)/Q
        quotients.append(QuadElement.from_d_coords(D, Fraction(P, Q), Fraction(1, Q)))
        a = (P + s) // Q
        P = a * Q - P
        Q = (d - P * P) // Q
    eps = QuadElement(D, 1, 0, 1)
    for x in quotients[seen[(P, Q)]:]:
        eps = eps * x
    if abs(eps.norm()) != 1 or not eps.is_integral() or not eps.gt_one():
        raise ArithmeticError(f"continued fraction produced a non-unit {eps}")
    return eps


def fundamental_unit(K: QuadField) -> QuadElement:
    """Smallest unit greater than 1 (real fields)."""
    if not K.is_real:
        raise ValueError(f"{K} is imaginary: no fundamental unit")
    return _fundamental_unit_cached(K.d)


# ---------------------------------------------------------------------------
# primes and Sigma-class groups


@dataclass(frozen=True)
class PrimeIdeal:
    ideal: QuadIdeal
    p: int
    kind: str  # split / inert / ramified

    def __str__(self) -> str:
        if self.kind == "inert":
            return f"({self.p})"
        return f"P{self.p}[{self.ideal.a},{self.ideal.b}]"


def _primes_above(K: QuadField, p: int) -> list[PrimeIdeal]:
    D = K.D
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if D % p == 0:
        kind = "ramified"
    else:
        kind = "split" if kronecker(D, p) == 1 else "inert"
    if kind == "inert":
        return [PrimeIdeal(QuadIdeal(D, 1, D % 2, Fraction(p)), p, kind)]
    bs = sorted({b for b in range(-p + 1, p + 1) if (b * b - D) % (4 * p) == 0}, key=lambda b: (abs(b), -b))
    ideals = []
    for b in bs:
        I = QuadIdeal(D, p, b)
        if I not in ideals:
            ideals.append(I)
    want = 1 if kind == "ramified" else 2
    if len(ideals) != want:
        raise ArithmeticError(f"found {len(ideals)} primes above {p} (expected {want})")
    return [PrimeIdeal(I, p, kind) for I in ideals]


def primes_above(K: QuadField, p: int) -> list[tuple[PrimeIdeal, tuple[int, ...]]]:
    """Primes of ``K`` above ``p`` with their classes in ``class_group(K)``."""
    C = class_group(K)
    return [(P, C.coords(P.ideal.form())) for P in _primes_above(K, p)]


def _check_sigma(K: QuadField, sigma: SigmaSet) -> None:
    sigma.validate(K.d)
    # ramified primes are bounded by |d| already; the bound applies to the extra primes
    big = [p for p in sigma.finite_primes if p > MAX_SIGMA_PRIME and K.D % p]
    if big:
        raise EnvelopeError(f"primes {big} exceed the supported bound {MAX_SIGMA_PRIME}")


@dataclass
class SClassGroup:
    group: FinAbGroup
    tau: AbHom
    quotient: AbHom  # class_group(K).group -> group

    def order(self) -> int:
        return self.group.order()


def s_class_group(K: QuadField, sigma: SigmaSet) -> SClassGroup:
    """Class group modulo the classes of the primes above the finite part of ``sigma``."""
    _check_sigma(K, sigma)
    C = class_group(K)
    G = C.group
    n = G.ngens
    killed = [list(c) for p in sigma.finite_primes for _, c in primes_above(K, p)]
    sq = Subquotient(n, [[int(i == j) for i in range(n)] for j in range(n)], G.relation_columns() + killed)
    Q = sq.group
    quotient = AbHom.from_function(G, Q, lambda e: sq.coords(e))
    tau = AbHom(Q, Q, IntMatrix.from_columns([list(sq.coords(C.tau(g))) for g in sq.gens], Q.ngens))
    return SClassGroup(Q, tau, quotient)


# ---------------------------------------------------------------------------
# principal generators


def principal_generator(K: QuadField, I: QuadIdeal) -> Optional[QuadElement]:
    """A generator of ``I`` if it is principal, else None."""
    f = I.form()
    red, M = reduce_form(f)
    candidates = []
    if K.is_real:
        D, s = K.D, isqrt(K.D)
        g = red
        while True:
            if abs(g.a) == 1:
                candidates.append(M)
                break
            g, step = _rho_real(g, D, s)
            M = _mat_mul(M, step)
            if g == red:
                break
    elif red.a == 1:
        candidates.append(M)
    if not candidates:
        return None
    (p, _), (r, _) = candidates[0]
    beta = QuadElement(K.D, I.b, 1, 2)
    gamma = (QuadElement(K.D, p * I.a, 0, 1) + beta * r) * I.scale
    if principal_ideal(K, gamma) != I:
        raise ArithmeticError(f"generator {gamma} does not generate {I}")
    return gamma


def _normalize_associate(K: QuadField, g: QuadElement) -> QuadElement:
    """Fix a representative of ``g`` modulo roots of unity."""
    if K.is_real:
        return g if g.sign() > 0 else -g
    zeta = K.torsion_generator()
    best = None
    for k in range(K.torsion_order):
        h = g * zeta ** k
        r, s = h.d_coords()
        if K.torsion_order == 2:
            ok = r > 0 or (r == 0 and s > 0)
        elif K.torsion_order == 4:
            ok = r > 0 and s >= 0
        else:
            ok = r > 0 and 0 <= s < r  # arg in [0, 60 degrees)
        if ok:
            best = h
            break
    if best is None:
        raise ArithmeticError(f"no normalized associate of {g}")
    return best


# ---------------------------------------------------------------------------
# S-units


def place_valuation(x: QuadElement, P: PrimeIdeal) -> int:
    """Valuation of the nonzero element ``x`` at the prime ``P``."""
    if x.is_zero():
        raise ValueError("valuation of zero")
    p = P.p
    num = QuadElement(x.D, x.x, x.y, 1)  # x = num / denom with num integral
    e = 2 if P.kind == "ramified" else 1
    den_val = e * valuation(x.denom, p)
    nn = num.norm().numerator
    if P.kind == "inert":
        return valuation(nn, p) // 2 - den_val
    if P.kind == "ramified":
        return valuation(nn, p) - den_val
    content = 0
    while True:
        q = num / p
        if not q.is_integral():
            break
        num = q
        content += 1
    rest = valuation(num.norm().numerator, p)
    return content + (rest if P.ideal.contains(num) else 0) - den_val


def hnf_lattice(basis: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Hermite basis of a full-rank lattice: vector ``i`` ends at coordinate ``i``
    with positive pivot; earlier coordinates reduced into ``[0, pivot_j)``."""
    cols = [list(v) for v in basis]
    if len(cols) != dim:
        raise ValueError("lattice must have full rank")
    for i in range(dim - 1, -1, -1):
        # gather the gcd of row i over columns 0..i into column i
        for j in range(i):
            if cols[j][i] == 0:
                continue
            a, b = cols[i][i], cols[j][i]
            g, s, t = _xgcd(a, b)
            ci, cj = cols[i], cols[j]
            cols[i] = [s * x + t * y for x, y in zip(ci, cj)]
            cols[j] = [(a // g) * y - (b // g) * x for x, y in zip(ci, cj)]
        if cols[i][i] < 0:
            cols[i] = [-x for x in cols[i]]
        if cols[i][i] == 0:
            raise ValueError("lattice is not of full rank")
    for i in range(dim):
        for j in range(i - 1, -1, -1):
            q = cols[i][j] // cols[j][j]
            if q:
                cols[i] = [x - q * y for x, y in zip(cols[i], cols[j])]
    return cols


@dataclass
class SUnitGroup:
    """Generators of the Sigma-units of ``K``.

    ``free_gens`` starts with the fundamental unit for real fields, followed by
    generators of the principal ideals supported on ``places``;
    ``valuation_matrix`` has one row per place and one column per free
    generator.
    """

    field: QuadField
    sigma: SigmaSet
    places: list[PrimeIdeal]
    torsion_gen: QuadElement
    free_gens: list[QuadElement]
    valuation_matrix: IntMatrix
    lattice_basis: list[list[int]] = dc_field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.free_gens)

    @property
    def torsion_order(self) -> int:
        return self.field.torsion_order

    def as_group(self) -> FinAbGroup:
        """Abstract group: generator 0 is the torsion generator, then the free ones."""
        return FinAbGroup((self.torsion_order,) + (0,) * self.rank, ("torsion",) + tuple(str(g) for g in self.free_gens))

    def generators(self) -> list[QuadElement]:
        return [self.torsion_gen] + list(self.free_gens)

    def element(self, exponents: Sequence[int]) -> QuadElement:
        out = QuadElement(self.field.D, 1, 0, 1)
        for g, k in zip(self.generators(), exponents):
            out = out * g ** k
        return out

    def valuations(self, x: QuadElement) -> list[int]:
        return [place_valuation(x, P) for P in self.places]

    def log(self, x: QuadElement) -> tuple[int, ...]:
        """Exponents of ``x`` in the generators; ``ArithmeticError`` if ``x`` is no Sigma-unit."""
        K = self.field
        norm = x.norm()
        for n in (norm.numerator, norm.denominator):
            n = abs(n)
            for p in self.sigma.finite_primes:
                while n % p == 0:
                    n //= p
            if n != 1:
                raise ArithmeticError(f"{x} is not a Sigma-unit")
        vals = self.valuations(x)
        offset = 1 if K.is_real else 0
        m = len(self.places)
        exps = [0] * self.rank
        if m:
            basis = [self.valuation_matrix.column(j) for j in range(offset, self.rank)]
            c = _solve_full(basis, vals, m)
            if c is None:
                raise ArithmeticError(f"valuations {vals} outside the S-unit lattice")
            exps[offset:] = c
        rest = x
        for g, k in zip(self.free_gens, exps):
            if k:
                rest = rest / g ** k
        if abs(rest.norm()) != 1 or not rest.is_integral():
            raise ArithmeticError(f"{x} is not a Sigma-unit")
        t = 0
        if K.is_real:
            if rest.sign() < 0:
                t, rest = 1, -rest
            eps = self.free_gens[0]
            k = 0
            while not rest.is_one():
                if rest.gt_one():
                    rest, k = rest / eps, k + 1
                else:
                    rest, k = rest * eps, k - 1
                if abs(k) > 10000:
                    raise ArithmeticError("unit exponent search diverged")
            exps[0] = k
        else:
            zeta = self.torsion_gen
            for t in range(self.torsion_order):
                if (zeta ** t) == rest:
                    break
            else:
                raise ArithmeticError(f"{rest} is not a root of unity")
        return (t % self.torsion_order,) + tuple(exps)


def _solve_full(basis, target, dim):
    from .abgroup import solve_integer

    return solve_integer(IntMatrix.from_columns(basis, dim), target)


def s_unit_group(K: QuadField, sigma: SigmaSet) -> SUnitGroup:
    _check_sigma(K, sigma)
    C = class_group(K)
    places = [P for p in sigma.finite_primes for P in _primes_above(K, p)]
    m = len(places)
    free: list[QuadElement] = []
    if K.is_real:
        free.append(fundamental_unit(K))
    hnf: list[list[int]] = []
    if m:
        classes = [list(C.coords(P.ideal.form())) for P in places]
        Zm = FinAbGroup((0,) * m)
        class_map = AbHom(Zm, C.group, IntMatrix.from_columns(classes, C.group.ngens))
        ker = lattice_basis(_kernel_lattice(class_map), m)
        hnf = hnf_lattice(ker, m)
        for vec in hnf:
            I = QuadIdeal.unit(K.D)
            for P, k in zip(places, vec):
                if k:
                    I = I * P.ideal ** k
            g = principal_generator(K, I)
            if g is None:
                raise ArithmeticError(f"ideal {I} with trivial class has no generator")
            free.append(_normalize_associate(K, g))
    cols = [[place_valuation(g, P) for P in places] for g in free]
    vm = IntMatrix.from_columns(cols, m)
    return SUnitGroup(K, sigma, places, K.torsion_generator(), free, vm, hnf)
