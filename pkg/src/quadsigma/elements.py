"""Exact arithmetic in Q(sqrt D)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

__all__ = ["QuadElement"]


@dataclass(frozen=True)
class QuadElement:
    """The number ``(x + y*sqrt(D)) / denom`` with ``D`` the field discriminant.

    Stored in lowest terms with ``denom > 0``; integral elements have
    ``denom`` 1 or 2.
    """

    D: int
    x: int
    y: int
    denom: int = 1

    def __post_init__(self):
        x, y, n = int(self.x), int(self.y), int(self.denom)
        if n == 0:
            raise ZeroDivisionError("zero denominator")
        if n < 0:
            x, y, n = -x, -y, -n
        g = gcd(gcd(x, y), n)
        object.__setattr__(self, "x", x // g)
        object.__setattr__(self, "y", y // g)
        object.__setattr__(self, "denom", n // g)

    # -- constructors

    @classmethod
    def rational(cls, D: int, q) -> "QuadElement":
        q = Fraction(q)
        return cls(D, q.numerator, 0, q.denominator)

    @classmethod
    def sqrt_d(cls, D: int) -> "QuadElement":
        """``sqrt(d)`` for the squarefree kernel ``d`` of ``D``."""
        return cls(D, 0, 1, 2) if D % 4 == 0 else cls(D, 0, 1, 1)

    @classmethod
    def from_d_coords(cls, D: int, r, s) -> "QuadElement":
        """The element ``r + s*sqrt(d)``."""
        r, s = Fraction(r), Fraction(s)
        if D % 4 == 0:  # sqrt(d) = sqrt(D)/2
            s = s / 2
        q = lcm(r.denominator, s.denominator)
        return cls(D, int(r * q), int(s * q), q)

    # -- arithmetic

    def _check(self, other: "QuadElement") -> None:
        if other.D != self.D:
            raise ValueError("elements of different fields")

    def _coerce(self, other) -> "QuadElement":
        if isinstance(other, QuadElement):
            self._check(other)
            return other
        return QuadElement.rational(self.D, other)

    def __mul__(self, other) -> "QuadElement":
        o = self._coerce(other)
        return QuadElement(
            self.D,
            self.x * o.x + self.y * o.y * self.D,
            self.x * o.y + self.y * o.x,
            self.denom * o.denom,
        )

    __rmul__ = __mul__

    def __add__(self, other) -> "QuadElement":
        o = self._coerce(other)
        return QuadElement(
            self.D,
            self.x * o.denom + o.x * self.denom,
            self.y * o.denom + o.y * self.denom,
            self.denom * o.denom,
        )

    __radd__ = __add__

    def __neg__(self) -> "QuadElement":
        return QuadElement(self.D, -self.x, -self.y, self.denom)

    def __sub__(self, other) -> "QuadElement":
        return self + (-self._coerce(other))

    def conj(self) -> "QuadElement":
        return QuadElement(self.D, self.x, -self.y, self.denom)

    def norm(self) -> Fraction:
        return Fraction(self.x * self.x - self.D * self.y * self.y, self.denom * self.denom)

    def trace(self) -> Fraction:
        return Fraction(2 * self.x, self.denom)

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElement(self.D, c.x * n.denominator, c.y * n.denominator, c.denom * n.numerator)

    def __truediv__(self, other) -> "QuadElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "QuadElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "QuadElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadElement(self.D, 1, 0, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- predicates

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def is_integral(self) -> bool:
        t, n = self.trace(), self.norm()
        return t.denominator == 1 and n.denominator == 1

    def is_one(self) -> bool:
        return self.x == 1 and self.y == 0 and self.denom == 1

    def sign(self) -> int:
        """Sign under the embedding with ``sqrt(D) > 0`` (real fields only)."""
        if self.D < 0:
            raise ValueError("no real embedding")
        x, y = self.x, self.y
        if x >= 0 and y >= 0:
            return 0 if x == 0 and y == 0 else 1
        if x <= 0 and y <= 0:
            return -1
        # opposite signs: compare x^2 with D*y^2
        if x * x > self.D * y * y:
            return 1 if x > 0 else -1
        return 1 if y > 0 else -1

    def gt_one(self) -> bool:
        return (self - 1).sign() > 0

    # -- display

    def d_coords(self) -> tuple[Fraction, Fraction]:
        """``(r, s)`` with value ``r + s*sqrt(d)``."""
        s = Fraction(self.y, self.denom)
        if self.D % 4 == 0:
            s *= 2
        return Fraction(self.x, self.denom), s

    def __str__(self) -> str:
        d = self.D // 4 if self.D % 4 == 0 else self.D
        r, s = self.d_coords()
        q = lcm(r.denominator, s.denominator)
        R, S = int(r * q), int(s * q)
        root = f"√{d}"
        if S == 0:
            body = str(R)
        else:
            sq = root if abs(S) == 1 else f"{abs(S)}{root}"
            if R == 0:
                body = ("-" if S < 0 else "") + sq
            else:
                body = f"{R}{'-' if S < 0 else '+'}{sq}"
        if q == 1:
            return body
        return f"({body})/{q}" if (R and S) else f"{body}/{q}"
