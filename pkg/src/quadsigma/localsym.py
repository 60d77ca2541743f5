"""Local symbols over Q: Kronecker and Hilbert symbols, splitting of primes
in Q(sqrt d), and the set of places of degree two in a finite set of places.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from sympy import factorint, isprime

__all__ = [
    "Place",
    "INFINITY",
    "SigmaSet",
    "kronecker",
    "hilbert",
    "splitting_type",
    "sigma_prime_set",
    "is_local_norm",
    "hilbert_matrix",
    "is_squarefree",
    "fundamental_discriminant",
    "is_fundamental_discriminant",
    "valuation",
]

Rational = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class Place:
    """A place of Q: ``p == 0`` is the real place, otherwise a prime."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def kind(self) -> str:
        return "infinite" if self.p == 0 else "finite"

    @property
    def is_infinite(self) -> bool:
        return self.p == 0

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    def __str__(self) -> str:
        return "inf" if self.p == 0 else str(self.p)


INFINITY = Place(0)


def _place(v) -> Place:
    if isinstance(v, Place):
        return v
    if v in (None, "inf", "oo", 0):
        return INFINITY
    return Place(int(v))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminant(d: int) -> int:
    if d in (0, 1) or not is_squarefree(d):
        raise ValueError(f"{d} is not a squarefree integer other than 0, 1")
    return d if d % 4 == 1 else 4 * d


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class SigmaSet:
    """The real place together with a finite set of primes."""

    finite_primes: tuple[int, ...] = ()
    includes_infinity: bool = True

    def __post_init__(self):
        if not self.includes_infinity:
            raise ValueError("the set must contain the real place")
        primes = tuple(sorted(set(int(p) for p in self.finite_primes)))
        for p in primes:
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "finite_primes", primes)

    @classmethod
    def of(cls, primes: Iterable[int]) -> "SigmaSet":
        return cls(tuple(primes))

    @classmethod
    def minimal(cls, d: int) -> "SigmaSet":
        return cls(tuple(factorint(abs(fundamental_discriminant(d)))))

    def places(self) -> list[Place]:
        return [INFINITY] + [Place(p) for p in self.finite_primes]

    def missing_ramified(self, d: int) -> list[int]:
        D = fundamental_discriminant(d)
        return [p for p in factorint(abs(D)) if p not in self.finite_primes]

    def validate(self, d: int) -> None:
        missing = self.missing_ramified(d)
        if missing:
            raise ValueError(f"Sigma {self} misses ramified primes {missing} of Q(sqrt({d}))")

    def __str__(self) -> str:
        return "{" + ",".join(["inf"] + [str(p) for p in self.finite_primes]) + "}"


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a | n)``."""
    if n == 0:
        if a == 0:
            raise ValueError("(0 | 0) is undefined")
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 and a % 8 in (3, 5):
        result = -result
    # n odd positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _to_integer(x: Rational) -> int:
    """An integer in the same square class as the nonzero rational ``x``."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("symbol of zero")
    return x.numerator * x.denominator


def _split_p(n: int, p: int) -> tuple[int, int]:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert(a: Rational, b: Rational, v) -> int:
    """Hilbert symbol ``(a, b)_v`` over Q."""
    a, b, v = _to_integer(a), _to_integer(b), _place(v)
    if v.is_infinite:
        return -1 if a < 0 and b < 0 else 1
    p = v.p
    alpha, u = _split_p(a, p)
    beta, w = _split_p(b, p)
    if p == 2:
        def eps(x):
            return ((x - 1) // 2) % 2

        def omega(x):
            return ((x * x - 1) // 8) % 2

        e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * kronecker(u, p) ** (beta % 2) * kronecker(w, p) ** (alpha % 2)


def splitting_type(D: int, p: int) -> str:
    """'split', 'inert' or 'ramified' for the prime ``p`` in the field of discriminant ``D``."""
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if D % p == 0:
        return "ramified"
    return "split" if kronecker(D, p) == 1 else "inert"


def sigma_prime_set(d: int, sigma: SigmaSet) -> tuple[list[Place], int]:
    """Places of ``sigma`` with local degree 2 in Q(sqrt d), and rho = max(0, #-1)."""
    sigma.validate(d)
    D = fundamental_discriminant(d)
    places = [INFINITY] if d < 0 else []
    places += [Place(p) for p in sigma.finite_primes if splitting_type(D, p) != "split"]
    return places, max(0, len(places) - 1)


def is_local_norm(x: Rational, d: int, v) -> bool:
    """Whether ``x`` is a norm from ``Q_v(sqrt d)``."""
    return hilbert(x, d, v) == 1


def hilbert_matrix(generators: Sequence[Rational], d: int, places: Sequence) -> list[list[int]]:
    """F_2 matrix with rows indexed by ``places`` and columns by ``generators``;
    an entry is 1 when the generator is not a local norm at that place."""
    return [[0 if is_local_norm(g, d, v) else 1 for g in generators] for v in places]
