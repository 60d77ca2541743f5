"""Integer linear algebra and finitely generated abelian groups.

Groups are stored as ``Z^k / diag(d_1, ..., d_k)`` with ``d_1 | d_2 | ...``
(a factor 0 is a free summand).  Every construction that produces a new
group (kernels, images, cokernels, Tate quotients) goes through a
sub-quotient ``L / R`` of a lattice in ``Z^n`` and is reduced with the
Smith normal form, so subgroup membership is decided by solving integer
systems rather than by enumerating elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Optional, Sequence

__all__ = [
    "IntMatrix",
    "FinAbGroup",
    "AbHom",
    "InvolutionModule",
    "ExactSequence",
    "snf",
    "group_from_presentation",
    "hom_decompose",
    "kercok_sequence",
    "verify_exact",
    "tate_h",
    "two_rank",
    "Subquotient",
    "lattice_basis",
    "integer_kernel",
    "solve_integer",
]


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with explicit shape (so 0 x n matrices are fine)."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length does not match row count")
        return cls(rows, len(columns), tuple(int(columns[j][i]) for i in range(rows) for j in range(len(columns))))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_columns(self.to_rows(), self.cols) if self.rows else IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a = self.to_rows()
        bcols = other.columns()
        out = [sum(x * y for x, y in zip(r, c)) for r in a for c in bcols]
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return [sum(x * y for x, y in zip(r, v)) for r in self.to_rows()]

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self) -> int:
        """Exact determinant (fraction-free Bareiss elimination)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix.from_rows(m)


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_work(m: IntMatrix):
    """Return (U, Uinv, S, V) as nested lists with U*M*V = S."""
    nr, nc = m.rows, m.cols
    S = m.to_rows()
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Ui = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_add(dst, src, q):  # row_dst += q * row_src
        if q == 0:
            return
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
        for r in Ui:  # column op on the inverse: col_src -= q * col_dst
            r[src] -= q * r[dst]

    def row_swap(i, j):
        if i == j:
            return
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        S[i] = [-x for x in S[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(dst, src, q):  # col_dst += q * col_src
        if q == 0:
            return
        for r in S:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    def col_swap(i, j):
        if i == j:
            return
        for r in S:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                row = S[i]
                for j in range(t, nc):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return U, Ui, S, V
            _, i, j = best
            row_swap(t, i)
            col_swap(t, j)
            p = S[t][t]
            for i in range(t + 1, nr):
                if S[i][t]:
                    row_add(i, t, -(S[i][t] // p))
            for j in range(t + 1, nc):
                if S[t][j]:
                    col_add(j, t, -(S[t][j] // p))
            if any(S[i][t] for i in range(t + 1, nr)) or any(S[t][j] for j in range(t + 1, nc)):
                continue
            bad = next(
                (i for i in range(t + 1, nr) if any(S[i][j] % p for j in range(t + 1, nc))),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if S[t][t] < 0:
            row_neg(t)
    return U, Ui, S, V


def snf(m) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns ``(U, S, V)`` with ``U @ M @ V == S``.

    ``U`` and ``V`` are unimodular, ``S`` is diagonal with nonnegative
    entries forming a divisibility chain (zeros last).  Pivots are the
    smallest nonzero entry in absolute value.
    """
    m = _as_matrix(m)
    U, _, S, V = _snf_work(m)
    return (
        IntMatrix(m.rows, m.rows, tuple(x for r in U for x in r)),
        IntMatrix(m.rows, m.cols, tuple(x for r in S for x in r)),
        IntMatrix(m.cols, m.cols, tuple(x for r in V for x in r)),
    )


class _SNF:
    """Cached Smith decomposition of a matrix, used for solving and spans."""

    def __init__(self, m: IntMatrix):
        self.m = m
        self.U, self.Uinv, S, self.V = _snf_work(m)
        self.diag = [S[i][i] for i in range(min(m.rows, m.cols))]
        self.rank = sum(1 for x in self.diag if x)

    def solve(self, b: Sequence[int]) -> Optional[list[int]]:
        """Some integer x with M x = b, or None."""
        y = [sum(u * v for u, v in zip(row, b)) for row in self.U]
        z = [0] * self.m.cols
        for i, yi in enumerate(y):
            s = self.diag[i] if i < len(self.diag) else 0
            if s == 0:
                if yi:
                    return None
            elif yi % s:
                return None
            else:
                z[i] = yi // s
        return [sum(v * zz for v, zz in zip(row, z)) for row in self.V]

    def column_basis(self) -> list[list[int]]:
        """A basis of the lattice spanned by the columns."""
        return [
            [self.Uinv[i][k] * self.diag[k] for i in range(self.m.rows)]
            for k in range(self.rank)
        ]

    def kernel_basis(self) -> list[list[int]]:
        return [[self.V[i][k] for i in range(self.m.cols)] for k in range(self.rank, self.m.cols)]


def lattice_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Basis (as a list of vectors) of the lattice spanned by ``vectors`` in ``Z^dim``."""
    if not vectors:
        return []
    return _SNF(IntMatrix.from_columns(vectors, dim)).column_basis()


def integer_kernel(m) -> list[list[int]]:
    """Basis of ``{x in Z^cols : M x = 0}``."""
    m = _as_matrix(m)
    if m.rows == 0:
        return [[int(i == j) for i in range(m.cols)] for j in range(m.cols)]
    return _SNF(m).kernel_basis()


def solve_integer(m, b: Sequence[int]) -> Optional[list[int]]:
    """Integer solution of ``M x = b`` or None."""
    m = _as_matrix(m)
    if m.cols == 0:
        return [] if not any(b) else None
    return _SNF(m).solve(b)


# ---------------------------------------------------------------------------
# groups


def _check_factors(factors: Sequence[int]) -> tuple[int, ...]:
    factors = tuple(int(d) for d in factors)
    seen_zero = False
    prev = None
    for d in factors:
        if d < 0 or d == 1:
            raise ValueError(f"invalid invariant factor {d}")
        if d == 0:
            seen_zero = True
            continue
        if seen_zero:
            raise ValueError("free factors (0) must trail the torsion factors")
        if prev is not None and d % prev:
            raise ValueError(f"divisibility chain broken: {prev} does not divide {d}")
        prev = d
    return factors


@dataclass(frozen=True)
class FinAbGroup:
    """``Z/d_1 + ... + Z/d_k`` with ``d_i | d_{i+1}``; 0 encodes a copy of Z.

    ``generator_witnesses`` are opaque labels for the generators and never
    take part in equality.
    """

    invariant_factors: tuple[int, ...] = ()
    generator_witnesses: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", _check_factors(self.invariant_factors))
        if self.generator_witnesses is not None:
            w = tuple(self.generator_witnesses)
            if len(w) != len(self.invariant_factors):
                raise ValueError("one witness per generator required")
            object.__setattr__(self, "generator_witnesses", w)

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        return cls(() if n == 1 else (n,))

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors)

    @property
    def is_finite(self) -> bool:
        return 0 not in self.invariant_factors

    def order(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return prod(self.invariant_factors)

    def exponent(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def relation_columns(self) -> list[list[int]]:
        k = self.ngens
        return [[d if i == j else 0 for i in range(k)] for j, d in enumerate(self.invariant_factors) if d]

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d if d else x for x, d in zip(v, self.invariant_factors))

    def elements(self):
        """Iterate over all elements (finite groups only; meant for small test oracles)."""
        from itertools import product

        self.order()
        return product(*(range(d) for d in self.invariant_factors))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self.invariant_factors)


def _in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int], dim: int) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return _SNF(IntMatrix.from_columns(basis, dim)).solve(v) is not None


class Subquotient:
    """The group ``L / R`` for lattices ``R <= L <= Z^n``.

    ``L`` is given by spanning vectors, ``R`` by spanning vectors lying in
    ``L``.  ``group`` is the reduced ``FinAbGroup``; ``coords`` expresses an
    element of ``L`` in its generators and ``gens`` gives the generators as
    vectors of ``Z^n``.
    """

    def __init__(self, dim: int, lattice: Sequence[Sequence[int]], relations: Sequence[Sequence[int]], witnesses=None):
        self.dim = dim
        self.basis = lattice_basis(list(lattice), dim)
        k = len(self.basis)
        self._lsnf = _SNF(IntMatrix.from_columns(self.basis, dim)) if k else None
        rel_coords = []
        for r in relations:
            c = self._lattice_coords(r)
            if c is None:
                raise ValueError("relation vector does not lie in the lattice")
            rel_coords.append(c)
        if rel_coords:
            U, Uinv, S, _ = _snf_work(IntMatrix.from_columns(rel_coords, k))
            diag = [S[i][i] if i < len(rel_coords) else 0 for i in range(k)]
        else:
            U = [[int(i == j) for j in range(k)] for i in range(k)]
            Uinv = [row[:] for row in U]
            diag = [0] * k
        self._U = U
        self._keep = [i for i in range(k) if diag[i] != 1]
        self.factors = tuple(diag[i] for i in self._keep)
        self.gens = [
            [sum(self.basis[j][r] * Uinv[j][i] for j in range(k)) for r in range(dim)]
            for i in self._keep
        ]
        w = tuple(tuple(g) for g in self.gens) if witnesses is None else witnesses
        self.group = FinAbGroup(self.factors, w)

    def _lattice_coords(self, v: Sequence[int]) -> Optional[list[int]]:
        if self._lsnf is None:
            return [] if not any(v) else None
        return self._lsnf.solve(v)

    def contains(self, v: Sequence[int]) -> bool:
        return self._lattice_coords(v) is not None

    def coords(self, v: Sequence[int]) -> tuple[int, ...]:
        c = self._lattice_coords(v)
        if c is None:
            raise ValueError(f"{list(v)} is not in the lattice")
        y = [sum(u * x for u, x in zip(self._U[i], c)) for i in self._keep]
        return self.group.reduce(y)


def group_from_presentation(m, ngens: Optional[int] = None) -> FinAbGroup:
    """Group with ``ngens`` generators and one relation per row of ``m``."""
    if isinstance(m, IntMatrix):
        rows, ngens = m.to_rows(), m.cols
    else:
        rows = [list(r) for r in m]
        if ngens is None:
            if not rows:
                raise ValueError("ngens required for an empty relation set")
            ngens = len(rows[0])
    return Subquotient(ngens, _unit_vectors(ngens), rows).group


def _unit_vectors(n: int) -> list[list[int]]:
    return [[int(i == j) for i in range(n)] for j in range(n)]


# ---------------------------------------------------------------------------
# homomorphisms


class AbHom:
    """Homomorphism given by the images of the domain generators.

    ``matrix`` has one column per domain generator holding the exponent
    vector of its image in the codomain generators.
    """

    def __init__(self, domain: FinAbGroup, codomain: FinAbGroup, matrix):
        if not isinstance(matrix, IntMatrix):
            matrix = IntMatrix.from_rows(matrix, domain.ngens) if matrix else IntMatrix.zeros(codomain.ngens, domain.ngens)
        if (matrix.rows, matrix.cols) != (codomain.ngens, domain.ngens):
            raise ValueError(
                f"matrix shape {matrix.rows}x{matrix.cols} does not match "
                f"{codomain.ngens}x{domain.ngens}"
            )
        cols = [list(codomain.reduce(c)) for c in matrix.columns()]
        self.domain = domain
        self.codomain = codomain
        self.matrix = IntMatrix.from_columns(cols, codomain.ngens)
        for j, d in enumerate(domain.invariant_factors):
            if d == 0:
                continue
            image = codomain.reduce([d * x for x in cols[j]])
            if any(image):
                raise ValueError(f"not well defined: relation {d}*e_{j} maps to {image}")

    @classmethod
    def from_function(cls, domain: FinAbGroup, codomain: FinAbGroup, fn) -> "AbHom":
        cols = [list(fn(tuple(int(i == j) for i in range(domain.ngens)))) for j in range(domain.ngens)]
        return cls(domain, codomain, IntMatrix.from_columns(cols, codomain.ngens))

    @classmethod
    def identity(cls, g: FinAbGroup) -> "AbHom":
        return cls(g, g, IntMatrix.identity(g.ngens))

    @classmethod
    def zero(cls, a: FinAbGroup, b: FinAbGroup) -> "AbHom":
        return cls(a, b, IntMatrix.zeros(b.ngens, a.ngens))

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.codomain.reduce(self.matrix.apply(list(x)))

    def compose(self, inner: "AbHom") -> "AbHom":
        """``self o inner``."""
        if inner.codomain != self.domain:
            raise ValueError("maps are not composable")
        return AbHom(inner.domain, self.codomain, self.matrix @ inner.matrix)

    def __repr__(self) -> str:
        return f"AbHom({self.domain} -> {self.codomain}, {self.matrix.to_rows()})"


def _kernel_lattice(f: AbHom) -> list[list[int]]:
    """Spanning set of ``{x in Z^m : f(x) = 0}`` (contains the domain relations)."""
    m, n = f.domain.ngens, f.codomain.ngens
    rel = f.codomain.relation_columns()
    if m == 0:
        return []
    if n == 0:
        return _unit_vectors(m)
    block = [f.matrix.column(j) for j in range(m)] + [[-x for x in r] for r in rel]
    ker = integer_kernel(IntMatrix.from_columns(block, n))
    return [v[:m] for v in ker]


def _image_lattice(f: AbHom) -> list[list[int]]:
    return f.matrix.columns() + f.codomain.relation_columns()


def _kernel_sq(f: AbHom) -> Subquotient:
    return Subquotient(f.domain.ngens, _kernel_lattice(f) + f.domain.relation_columns(), f.domain.relation_columns())


def _image_sq(f: AbHom) -> Subquotient:
    return Subquotient(f.codomain.ngens, _image_lattice(f), f.codomain.relation_columns())


def _cokernel_sq(f: AbHom) -> Subquotient:
    return Subquotient(f.codomain.ngens, _unit_vectors(f.codomain.ngens), _image_lattice(f))


def hom_decompose(f: AbHom) -> tuple[FinAbGroup, FinAbGroup, FinAbGroup]:
    """``(kernel, image, cokernel)``; kernel witnesses are domain coordinate vectors."""
    return _kernel_sq(f).group, _image_sq(f).group, _cokernel_sq(f).group


def _sq_hom(src: Subquotient, dst: Subquotient, ambient_map) -> AbHom:
    cols = [list(dst.coords(ambient_map(g))) for g in src.gens]
    return AbHom(src.group, dst.group, IntMatrix.from_columns(cols, dst.group.ngens))


# ---------------------------------------------------------------------------
# exact sequences


@dataclass(frozen=True)
class ExactSequence:
    """``groups[0] -> groups[1] -> ... `` with ``maps[i]: groups[i] -> groups[i+1]``."""

    groups: tuple[FinAbGroup, ...]
    maps: tuple[AbHom, ...]

    def __post_init__(self):
        if len(self.maps) != len(self.groups) - 1:
            raise ValueError("need exactly one map between consecutive groups")
        for i, f in enumerate(self.maps):
            if f.domain != self.groups[i] or f.codomain != self.groups[i + 1]:
                raise ValueError(f"map {i} does not connect groups {i} and {i + 1}")

    def orders(self) -> list[int]:
        return [g.order() for g in self.groups]


def kercok_sequence(f: AbHom, g: AbHom) -> ExactSequence:
    """Six-term sequence ``0 -> Ker f -> Ker gf -> Ker g -> Coker f -> Coker gf -> Coker g -> 0``.

    The connecting map sends ``x`` in ``Ker g`` to its class in ``Coker f``.
    """
    if f.codomain != g.domain:
        raise ValueError("codomain of f must equal domain of g")
    gf = g.compose(f)
    F = f.matrix
    G = g.matrix
    ker_f, ker_gf, ker_g = _kernel_sq(f), _kernel_sq(gf), _kernel_sq(g)
    cok_f, cok_gf, cok_g = _cokernel_sq(f), _cokernel_sq(gf), _cokernel_sq(g)
    zero = FinAbGroup.trivial()
    maps = [
        AbHom.zero(zero, ker_f.group),
        _sq_hom(ker_f, ker_gf, lambda x: x),
        _sq_hom(ker_gf, ker_g, F.apply),
        _sq_hom(ker_g, cok_f, lambda x: x),
        _sq_hom(cok_f, cok_gf, G.apply),
        _sq_hom(cok_gf, cok_g, lambda x: x),
        AbHom.zero(cok_g.group, zero),
    ]
    groups = (zero, ker_f.group, ker_gf.group, ker_g.group, cok_f.group, cok_gf.group, cok_g.group, zero)
    return ExactSequence(groups, tuple(maps))


def verify_exact(seq: ExactSequence) -> bool:
    """True iff image equals kernel at every interior node."""
    for i in range(1, len(seq.groups) - 1):
        into, out = seq.maps[i - 1], seq.maps[i]
        dim = seq.groups[i].ngens
        rel = seq.groups[i].relation_columns()
        im = lattice_basis(_image_lattice(into), dim)
        ker = lattice_basis(_kernel_lattice(out) + rel, dim)
        if not all(_in_lattice(ker, v, dim) for v in im):
            return False
        if not all(_in_lattice(im, v, dim) for v in ker):
            return False
    return True


# ---------------------------------------------------------------------------
# involutions and Tate cohomology


@dataclass(frozen=True)
class InvolutionModule:
    group: FinAbGroup
    tau: AbHom

    def __post_init__(self):
        if self.tau.domain != self.group or self.tau.codomain != self.group:
            raise ValueError("tau must be an endomorphism of the group")
        sq = self.tau.compose(self.tau)
        n = self.group.ngens
        for j in range(n):
            e = [int(i == j) for i in range(n)]
            if sq(e) != self.group.reduce(e):
                raise ValueError("tau is not an involution")

    def endo(self, sign: int) -> AbHom:
        """``1 + sign * tau``."""
        n = self.group.ngens
        T = self.tau.matrix
        m = IntMatrix(n, n, tuple(int(i == j) + sign * T[i, j] for i in range(n) for j in range(n)))
        return AbHom(self.group, self.group, m)

    def fixed_subgroup(self) -> FinAbGroup:
        return _kernel_sq(self.endo(-1)).group


def tate_h(module: InvolutionModule, degree: int, norm_kernel_restriction: Optional[Iterable[Sequence[int]]] = None) -> FinAbGroup:
    """Tate cohomology of the involution module.

    degree 0: ``ker(1 - tau) / im(1 + tau)``; degree -1:
    ``ker(1 + tau) / im(1 - tau)``.  With ``norm_kernel_restriction`` (a list
    of elements spanning a subgroup of ``ker(1 + tau)``) the degree -1
    numerator is replaced by that subgroup.
    """
    if degree not in (0, -1):
        raise ValueError("only degrees 0 and -1 are supported")
    G = module.group
    n = G.ngens
    rel = G.relation_columns()
    num_map = module.endo(-1 if degree == 0 else 1)
    den_map = module.endo(1 if degree == 0 else -1)
    numerator = _kernel_lattice(num_map) + rel
    denominator = lattice_basis(_image_lattice(den_map), n)
    if norm_kernel_restriction is not None:
        if degree != -1:
            raise ValueError("a norm-kernel restriction only applies in degree -1")
        sub = [list(v) for v in norm_kernel_restriction] + rel
        ker = lattice_basis(numerator, n)
        for v in sub:
            if not _in_lattice(ker, v, n):
                raise ValueError(f"{v} is not in the kernel of 1 + tau")
        sub_basis = lattice_basis(sub, n)
        for v in denominator:
            if not _in_lattice(sub_basis, v, n):
                raise ValueError("restriction does not contain the image of 1 - tau")
        numerator = sub
    return Subquotient(n, numerator, denominator).group


def two_rank(g: FinAbGroup) -> int:
    if not g.is_finite:
        raise ValueError("2-rank requested for an infinite group")
    return sum(1 for d in g.invariant_factors if d % 2 == 0)
