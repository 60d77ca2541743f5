"""Cross-checks between local symbols and class groups for Q(sqrt d) / Q.

Two independent stacks meet here.  The unit side works in the F_2 space
of Sigma-units of Q modulo squares (basis -1 and the finite primes of
Sigma) and uses only Hilbert symbols; the class side uses forms, ideals and
the Galois action on Sigma-class groups.  ``verify_field`` compares the
group orders coming out of both.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .abgroup import AbHom, FinAbGroup, IntMatrix, InvolutionModule, Subquotient, _kernel_sq, tate_h
from .elements import QuadElement
from .localsym import Place, SigmaSet, hilbert_matrix, sigma_prime_set
from .quadfield import QuadField, SUnitGroup, field as make_field, s_class_group, s_unit_group

__all__ = [
    "UnitSquareClasses",
    "SigmaProfile",
    "AlphaBetaCheck",
    "VerificationReport",
    "CSV_FIELDS",
    "w_subgroup",
    "norm_image",
    "w_over_n_order",
    "relative_brauer_order",
    "ambiguous_class_order",
    "h_minus_one_order",
    "alpha_beta_r0_check",
    "verify_field",
]


# ---------------------------------------------------------------------------
# F_2 linear algebra on bit tuples


def _f2_echelon(vectors):
    """Row-reduced basis (list of lists) of the span of ``vectors``."""
    rows = [list(v) for v in vectors]
    basis = []
    pivots = []
    for r in rows:
        r = [x % 2 for x in r]
        for b, p in zip(basis, pivots):
            if r[p]:
                r = [(x + y) % 2 for x, y in zip(r, b)]
        if any(r):
            p = r.index(1)
            for i, b in enumerate(basis):
                if b[p]:
                    basis[i] = [(x + y) % 2 for x, y in zip(b, r)]
            basis.append(r)
            pivots.append(p)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [basis[i] for i in order]


def _f2_rank(vectors) -> int:
    return len(_f2_echelon(vectors))


def _f2_kernel(matrix: list[list[int]], ncols: int) -> list[tuple[int, ...]]:
    """Basis of ``{x : matrix x = 0}`` over F_2."""
    ech = _f2_echelon(matrix)
    pivots = [r.index(1) for r in ech]
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for r, p in zip(ech, pivots):
            x[p] = r[f]
        out.append(tuple(x))
    return out


# ---------------------------------------------------------------------------
# units of Q modulo squares


@dataclass(frozen=True)
class UnitSquareClasses:
    """``O*_{Q,Sigma} / squares`` with basis ``-1, p_1, ..., p_k``."""

    sigma: SigmaSet

    @property
    def basis_labels(self) -> tuple[int, ...]:
        return (-1,) + self.sigma.finite_primes

    @property
    def dimension(self) -> int:
        return 1 + len(self.sigma.finite_primes)

    def exponents(self, x) -> tuple[int, ...]:
        """Exact exponents of a Sigma-unit of Q: sign bit, then prime exponents."""
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero is not a unit")
        out = [1 if x < 0 else 0]
        num, den = abs(x.numerator), x.denominator
        for p in self.sigma.finite_primes:
            k = 0
            while num % p == 0:
                num //= p
                k += 1
            while den % p == 0:
                den //= p
                k -= 1
            out.append(k)
        if num != 1 or den != 1:
            raise ArithmeticError(f"{x} is not a unit outside {self.sigma}")
        return tuple(out)

    def vector(self, x) -> tuple[int, ...]:
        return tuple(e % 2 for e in self.exponents(x))

    def element(self, bits) -> int:
        out = 1
        for b, g in zip(bits, self.basis_labels):
            if b % 2:
                out *= g
        return out


@dataclass
class SigmaProfile:
    d: int
    sigma: SigmaSet
    sigma_prime: list[Place]
    rho: int
    hilbert: list[list[int]]
    W_basis: list[tuple[int, ...]]
    e: int
    coker_lambda_order: int
    norm_image_basis: Optional[list[tuple[int, ...]]] = None

    @property
    def classes(self) -> UnitSquareClasses:
        return UnitSquareClasses(self.sigma)


def w_subgroup(d: int, sigma: SigmaSet) -> SigmaProfile:
    """Sigma-units of Q that are local norms at every place of ``sigma``."""
    places, rho = sigma_prime_set(d, sigma)
    classes = UnitSquareClasses(sigma)
    gens = list(classes.basis_labels)
    H = hilbert_matrix(gens, d, places)
    W = _f2_kernel(H, len(gens))
    e = classes.dimension - len(W)
    return SigmaProfile(d, sigma, places, rho, H, W, e, 2 ** (rho - e))


def norm_image(sunits: SUnitGroup, classes: UnitSquareClasses) -> list[tuple[int, ...]]:
    """Basis of the image of the norm of the Sigma-units in ``classes``."""
    vecs = [classes.vector(g.norm()) for g in sunits.generators()]
    return [tuple(v) for v in _f2_echelon(vecs)]


def w_over_n_order(profile: SigmaProfile) -> int:
    if profile.norm_image_basis is None:
        raise ValueError("norm image not computed")
    W, N = profile.W_basis, profile.norm_image_basis
    if _f2_rank(list(W) + list(N)) != len(W):
        raise ArithmeticError("norm image is not contained in W (bug)")
    return 2 ** (len(W) - len(N))


def relative_brauer_order(profile: SigmaProfile) -> int:
    """Order of the kernel of the sum map ``(Z/2)^{Sigma'} -> Z/2``."""
    n = len(profile.sigma_prime)
    src = FinAbGroup((2,) * n)
    total = AbHom(src, FinAbGroup((2,)), IntMatrix(1, n, (1,) * n))
    return _kernel_sq(total).group.order()


def _involution(K: QuadField, sigma: SigmaSet) -> InvolutionModule:
    sc = s_class_group(K, sigma)
    return InvolutionModule(sc.group, sc.tau)


def ambiguous_class_order(K: QuadField, sigma: SigmaSet) -> int:
    return _involution(K, sigma).fixed_subgroup().order()


def h_minus_one_order(K: QuadField, sigma: SigmaSet) -> int:
    return tate_h(_involution(K, sigma), -1).order()


# ---------------------------------------------------------------------------
# alpha_0 / beta_0


@dataclass
class AlphaBetaCheck:
    norm_one: FinAbGroup
    quotient: FinAbGroup
    beta_alpha_is_square: bool
    alpha_beta_is_square: bool
    elementwise: bool

    @property
    def passed(self) -> bool:
        return self.beta_alpha_is_square and self.alpha_beta_is_square and self.elementwise


def _conj_ratio(x: QuadElement) -> QuadElement:
    """``x^2 / N(x) = x / conj(x)``."""
    return x / x.conj()


def alpha_beta_r0_check(K: QuadField, sigma: SigmaSet, sunits: Optional[SUnitGroup] = None) -> AlphaBetaCheck:
    """Check that both composites of alpha_0 and beta_0 are squaring.

    alpha_0 maps norm-one Sigma-units to Sigma-units modulo those of Q;
    beta_0 sends the class of ``x`` to ``x / conj(x)``.
    """
    U = sunits if sunits is not None else s_unit_group(K, sigma)
    classes = UnitSquareClasses(sigma)
    GK = U.as_group()
    GQ = FinAbGroup((2,) + (0,) * len(sigma.finite_primes))
    n = GK.ngens

    norm_cols = [list(classes.exponents(g.norm())) for g in U.generators()]
    norm_hom = AbHom(GK, GQ, IntMatrix.from_columns(norm_cols, GQ.ngens))
    incl_cols = [list(U.log(QuadElement.rational(K.D, q))) for q in classes.basis_labels]

    N1 = _kernel_sq(norm_hom)
    quot = Subquotient(n, [[int(i == j) for i in range(n)] for j in range(n)], incl_cols + GK.relation_columns())

    alpha = AbHom(N1.group, quot.group, IntMatrix.from_columns([list(quot.coords(u)) for u in N1.gens], quot.group.ngens))
    beta_cols = []
    elementwise = True
    for q in quot.gens:
        x = U.element(q)
        y = _conj_ratio(x)
        beta_cols.append(list(N1.coords(list(U.log(y)))))
        # x / conj(x) differs from x^2 by the rational 1/N(x)
        elementwise &= (y / (x * x)).is_rational()
    beta = AbHom(quot.group, N1.group, IntMatrix.from_columns(beta_cols, N1.group.ngens))

    for u in N1.gens:
        x = U.element(u)
        elementwise &= x.norm() == 1 and _conj_ratio(x) == x * x

    def is_doubling(h: AbHom) -> bool:
        k = h.domain.ngens
        return all(h(e) == h.domain.reduce([2 * t for t in e]) for e in (tuple(int(i == j) for i in range(k)) for j in range(k)))

    return AlphaBetaCheck(
        N1.group,
        quot.group,
        is_doubling(beta.compose(alpha)),
        is_doubling(alpha.compose(beta)),
        elementwise,
    )


# ---------------------------------------------------------------------------
# reports

CSV_FIELDS = (
    "d", "sigma", "rho", "e", "order_c_sigma", "order_c_fixed", "order_h_minus1",
    "order_w_over_n", "coker_lambda", "brauer_order",
    "pass_n1", "pass_n2", "pass_n3", "pass_n4", "pass_n5", "pass_n6", "ms_elapsed",
)


@dataclass
class VerificationReport:
    d: int
    sigma: str
    rho: int
    e: int
    order_c_sigma: int
    order_c_fixed: int
    order_h_minus1: int
    order_w_over_n: int
    coker_lambda: int
    brauer_order: int
    pass_n1: bool
    pass_n2: bool
    pass_n3: bool
    pass_n4: bool
    pass_n5: bool
    pass_n6: bool
    ms_elapsed: Optional[float] = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return all(getattr(self, f"pass_n{i}") for i in range(1, 7))

    def to_dict(self, timings: bool = True) -> dict:
        out = asdict(self)
        if not timings:
            out["ms_elapsed"] = None
        return out

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), separators=(",", ":"))

    def to_csv_row(self, timings: bool = True) -> str:
        buf = io.StringIO()
        row = self.to_dict(timings)
        csv.writer(buf, lineterminator="\n").writerow(
            ["" if row[k] is None else (int(row[k]) if isinstance(row[k], bool) else row[k]) for k in CSV_FIELDS]
        )
        return buf.getvalue()

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_FIELDS) + "\n"


def verify_field(d: int, sigma: SigmaSet) -> VerificationReport:
    """Compute both sides of every identity for ``(d, sigma)``."""
    start = time.perf_counter()
    K = make_field(d)
    sigma.validate(d)

    profile = w_subgroup(d, sigma)
    U = s_unit_group(K, sigma)
    profile.norm_image_basis = norm_image(U, profile.classes)
    w_n = w_over_n_order(profile)

    module = _involution(K, sigma)
    c_sigma = module.group.order()
    c_fixed = module.fixed_subgroup().order()
    h_minus = tate_h(module, -1).order()
    brauer = relative_brauer_order(profile)
    coker = profile.coker_lambda_order
    ab = alpha_beta_r0_check(K, sigma, U)

    elapsed = (time.perf_counter() - start) * 1000
    return VerificationReport(
        d=d,
        sigma=str(sigma),
        rho=profile.rho,
        e=profile.e,
        order_c_sigma=c_sigma,
        order_c_fixed=c_fixed,
        order_h_minus1=h_minus,
        order_w_over_n=w_n,
        coker_lambda=coker,
        brauer_order=brauer,
        pass_n1=w_n == coker,
        pass_n2=c_fixed == w_n,
        pass_n3=h_minus == coker,
        pass_n4=c_sigma % coker == 0,
        pass_n5=brauer == 2 ** profile.rho,
        pass_n6=ab.passed,
        ms_elapsed=round(elapsed, 3),
    )
