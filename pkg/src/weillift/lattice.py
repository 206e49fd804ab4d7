"""Even-lattice arithmetic: Gram matrices, discriminant forms, isotropic
elements and definite theta-series coefficients.

Lattices are given by integer Gram matrices; vectors are coordinate
tuples with respect to the implicit basis.  The discriminant group is
put into elementary-divisor normal form by an integer Smith reduction,
so elements have a canonical residue-tuple representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, isqrt, lcm

from .cyclo import CycloNum, e_of, root_of_unity, sqrt_nat

__all__ = [
    "IntegralLattice",
    "FiniteQuadraticModule",
    "discriminant_form",
    "isotropic_elements",
    "theta_coefficients",
    "smith_normal_form",
    "lattice_from_json",
    "NAMED_GRAMS",
    "LatticeError",
]


class LatticeError(ValueError):
    """Raised on invalid lattice input."""


# -- integer linear algebra -------------------------------------------------


def smith_normal_form(mat):
    """Smith normal form of an integer matrix.

    Returns (D, U, V) with U*mat*V = D, U and V unimodular, and the
    diagonal of D nonnegative with d_i | d_{i+1}.
    """
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, c):  # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, c):  # col_i += c * col_j
        for r in range(m):
            a[r][i] += c * a[r][j]
        for r in range(n):
            v[r][i] += c * v[r][j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        row_swap(t, pivot[0])
        col_swap(t, pivot[1])
        while True:
            cleared = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, -q)
                    if a[i][t]:
                        row_swap(t, i)
                        cleared = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, -q)
                    if a[t][j]:
                        col_swap(t, j)
                        cleared = False
            if not cleared:
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    return a, u, v


def integer_kernel(mat):
    """Basis (list of integer vectors) of the kernel of mat over Z.

    The result spans a saturated sublattice of Z^n.
    """
    d, _u, v = smith_normal_form(mat)
    m = len(mat)
    n = len(mat[0])
    r = 0
    for i in range(min(m, n)):
        if d[i][i] != 0:
            r += 1
    return [[v[row][j] for row in range(n)] for j in range(r, n)]


def _mat_fraction_inverse(mat):
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise LatticeError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _det_int(mat):
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


# -- lattices ---------------------------------------------------------------


@dataclass(frozen=True)
class IntegralLattice:
    """An even non-degenerate lattice given by its Gram matrix."""

    gram: tuple
    name: str = ""

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square and non-empty")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise LatticeError("gram matrix must be symmetric")
            if g[i][i] % 2 != 0:
                raise LatticeError("gram matrix must have even diagonal (even lattice)")
        if _det_int(g) == 0:
            raise LatticeError("gram matrix must be non-degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return _det_int(self.gram)

    @property
    def signature(self) -> tuple[int, int]:
        """(b_plus, b_minus), computed by exact rational diagonalization."""
        n = self.rank
        a = [[Fraction(x) for x in row] for row in self.gram]
        pos = neg = 0
        for k in range(n):
            if a[k][k] == 0:
                j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
                if j is not None:
                    a[k], a[j] = a[j], a[k]
                    for row in a:
                        row[k], row[j] = row[j], row[k]
                else:
                    j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                    assert j is not None, "degenerate block in signature computation"
                    for col in range(n):
                        a[k][col] += a[j][col]
                    for row in a:
                        row[k] += row[j]
            piv = a[k][k]
            if piv > 0:
                pos += 1
            else:
                neg += 1
            # congruence step: Schur complement of the pivot
            for r in range(k + 1, n):
                f = a[r][k] / piv
                if f:
                    for c in range(k + 1, n):
                        a[r][c] -= f * a[k][c]
            for r in range(k + 1, n):
                a[r][k] = Fraction(0)
                a[k][r] = Fraction(0)
        return (pos, neg)

    # bilinear form and quadratic form on rational coordinate vectors

    def bil(self, x, y) -> Fraction:
        g = self.gram
        n = self.rank
        return sum(Fraction(x[i]) * g[i][j] * Fraction(y[j]) for i in range(n) for j in range(n))

    def q(self, x) -> Fraction:
        return self.bil(x, x) / 2

    def gram_times(self, x):
        """The pairing functional G*x as a vector of Fractions."""
        return [sum(Fraction(x[j]) * self.gram[i][j] for j in range(self.rank)) for i in range(self.rank)]

    def in_dual(self, x) -> bool:
        return all(v.denominator == 1 for v in self.gram_times(x))

    def in_lattice(self, x) -> bool:
        return all(Fraction(v).denominator == 1 for v in x)

    def direct_sum(self, other: "IntegralLattice") -> "IntegralLattice":
        n, m = self.rank, other.rank
        g = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                g[n + i][n + j] = other.gram[i][j]
        name = f"{self.name}+{other.name}" if self.name and other.name else ""
        return IntegralLattice(tuple(tuple(row) for row in g), name)


# Fixed Gram matrices for the named primitives.  The root lattices are
# taken negative definite so that sums like U + U + E8 have signature
# (2, l); pass an explicit "gram" for the positive definite versions.
NAMED_GRAMS = {
    "U": ((0, 1), (1, 0)),
    "A1": ((-2,),),
    "A2": ((-2, -1), (-1, -2)),
    "E8": (
        (-2, 1, 0, 0, 0, 0, 0, 0),
        (1, -2, 1, 0, 0, 0, 0, 0),
        (0, 1, -2, 1, 0, 0, 0, 1),
        (0, 0, 1, -2, 1, 0, 0, 0),
        (0, 0, 0, 1, -2, 1, 0, 0),
        (0, 0, 0, 0, 1, -2, 1, 0),
        (0, 0, 0, 0, 0, 1, -2, 0),
        (0, 0, 1, 0, 0, 0, 0, -2),
    ),
}


def _named_lattice(name: str) -> IntegralLattice:
    if name in NAMED_GRAMS:
        return IntegralLattice(NAMED_GRAMS[name], name)
    if name.startswith("U(") and name.endswith(")"):
        n = int(name[2:-1])
        return IntegralLattice(((0, n), (n, 0)), name)
    raise LatticeError(f"unknown lattice name {name!r}")


def lattice_from_json(doc) -> IntegralLattice:
    """Build a lattice from the JSON input schema.

    Accepts {"name": ..., "gram": [[...]]}, {"sum": [spec, ...]} with
    named primitives, or a bare name string.
    """
    if isinstance(doc, str):
        return _named_lattice(doc)
    if "sum" in doc:
        parts = [lattice_from_json(p) for p in doc["sum"]]
        acc = parts[0]
        for p in parts[1:]:
            acc = acc.direct_sum(p)
        if "name" in doc:
            acc = IntegralLattice(acc.gram, doc["name"])
        return acc
    if "gram" in doc:
        return IntegralLattice(tuple(tuple(r) for r in doc["gram"]), doc.get("name", ""))
    raise LatticeError("lattice JSON needs 'gram', 'sum' or a name string")


# -- discriminant forms -----------------------------------------------------


@dataclass
class FiniteQuadraticModule:
    """The discriminant form L'/L with its Q/Z-valued quadratic form."""

    elementary_divisors: tuple[int, ...]
    signature_pair: tuple[int, int]
    generators: tuple  # dual vectors (tuples of Fractions) in lattice coordinates
    lattice: IntegralLattice
    _to_tuple: tuple = field(default=None, repr=False)  # U-rows and divisors for class map

    @property
    def order(self) -> int:
        n = 1
        for d in self.elementary_divisors:
            n *= d
        return n

    def elements(self):
        """All elements in canonical (lexicographic residue tuple) order."""
        return list(product(*(range(d) for d in self.elementary_divisors)))

    def zero(self):
        return tuple(0 for _ in self.elementary_divisors)

    def neg(self, t):
        return tuple((-x) % d for x, d in zip(t, self.elementary_divisors))

    def add(self, t, u):
        return tuple((x + y) % d for x, y, d in zip(t, u, self.elementary_divisors))

    def smul(self, a, t):
        return tuple((a * x) % d for x, d in zip(t, self.elementary_divisors))

    def order_of(self, t) -> int:
        return lcm(1, *(d // gcd(x, d) for x, d in zip(t, self.elementary_divisors)))

    def vector(self, t):
        """A dual-lattice representative of the class t, in lattice coordinates."""
        n = self.lattice.rank
        v = [Fraction(0)] * n
        for x, g in zip(t, self.generators):
            if x:
                v = [a + x * b for a, b in zip(v, g)]
        return tuple(v)

    def class_of(self, vec):
        """Class of a dual-lattice vector, as a residue tuple."""
        y = self.lattice.gram_times(vec)
        if any(c.denominator != 1 for c in y):
            raise LatticeError("vector is not in the dual lattice")
        u_rows, divisors = self._to_tuple
        out = []
        for row, d in zip(u_rows, divisors):
            s = sum(int(yi) * r for yi, r in zip(y, row))
            out.append(s % d)
        return tuple(out)

    def q(self, t) -> Fraction:
        v = self.vector(t)
        return self.lattice.q(v) % 1

    def bil(self, t, u) -> Fraction:
        return self.lattice.bil(self.vector(t), self.vector(u)) % 1

    def exponent(self) -> int:
        """Smallest N with N*q integral on the whole module."""
        n = 1
        for t in self.elements():
            n = lcm(n, self.q(t).denominator)
        return n

    def milgram_sum(self) -> CycloNum:
        total = CycloNum.zero()
        for t in self.elements():
            total = total + e_of(self.q(t))
        return total

    def milgram_ok(self) -> bool:
        b_plus, b_minus = self.signature_pair
        rhs = sqrt_nat(self.order) * root_of_unity(b_plus - b_minus, 8)
        return self.milgram_sum() == rhs


def discriminant_form(lat: IntegralLattice) -> FiniteQuadraticModule:
    """The discriminant form L'/L in elementary-divisor normal form."""
    d, u, _v = smith_normal_form(lat.gram)
    n = lat.rank
    divisors = []
    u_rows = []
    ginv = _mat_fraction_inverse(lat.gram)
    uinv = _mat_fraction_inverse(u)
    gens = []
    for i in range(n):
        di = d[i][i]
        if di > 1:
            divisors.append(di)
            u_rows.append([u[i][j] for j in range(n)])
            # generator: dual vector G^{-1} U^{-1} e_i, of order d_i in L'/L
            col = [uinv[r][i] for r in range(n)]
            gen = tuple(sum(ginv[r][k] * col[k] for k in range(n)) for r in range(n))
            gens.append(gen)
    mod = FiniteQuadraticModule(
        elementary_divisors=tuple(divisors),
        signature_pair=lat.signature,
        generators=tuple(gens),
        lattice=lat,
        _to_tuple=(tuple(tuple(r) for r in u_rows), tuple(divisors)),
    )
    assert mod.order == abs(lat.det)
    return mod


def isotropic_elements(mod: FiniteQuadraticModule):
    """All (element, additive order) with q = 0 in Q/Z, canonically sorted."""
    return [(t, mod.order_of(t)) for t in mod.elements() if mod.q(t) == 0]


# -- definite theta coefficients --------------------------------------------


def _cholesky_data(gram):
    """Rational Cholesky data for a positive definite Gram matrix."""
    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    diag = []
    offdiag = []
    for i in range(n):
        piv = a[i][i]
        if piv <= 0:
            raise LatticeError("matrix is not positive definite")
        diag.append(piv)
        row = [a[i][j] / piv for j in range(n)]
        offdiag.append(row)
        for r in range(i + 1, n):
            f = a[r][i] / piv
            for c in range(i, n):
                a[r][c] -= f * a[i][c]
    return diag, offdiag


def short_vectors(gram, shift, bound: Fraction):
    """All x in shift + Z^n with Q(x) <= bound for positive definite Q.

    Q(x) = x^T gram x / 2; the recursion walks the rational Cholesky
    decomposition with exact boundary tests.
    """
    n = len(gram)
    diag, offd = _cholesky_data(gram)
    # Q(x) = (1/2) sum_i diag[i] * (x_i + sum_{j>i} offd[i][j] x_j)^2
    results = []
    x = [Fraction(0)] * n

    def rec(i, remaining):
        if i < 0:
            results.append(tuple(x))
            return
        # center term: x_i + sum_{j>i} offd[i][j] * x_j
        c = sum(offd[i][j] * x[j] for j in range(i + 1, n))
        radius_sq = 2 * remaining / diag[i]
        # integer k with x_i = shift_i + k; exact window via float + exact check
        s = Fraction(shift[i])
        approx = float(radius_sq) ** 0.5 if radius_sq > 0 else 0.0
        center = float(-c - s)
        lo = int(center - approx) - 2
        hi = int(center + approx) + 2
        for k in range(lo, hi + 1):
            xi = s + k
            term = diag[i] * (xi + c) ** 2 / 2
            if term <= remaining:
                x[i] = xi
                rec(i - 1, remaining - term)
        x[i] = Fraction(0)

    rec(n - 1, Fraction(bound))
    return results


def theta_coefficients(lat: IntegralLattice, coset, prec: int):
    """Representation counts of a definite lattice coset.

    Returns a map from |q(lambda)| (an exact Fraction) to the number of
    vectors lambda in coset + L with that norm, for |q| <= prec.
    """
    b_plus, b_minus = lat.signature
    if b_plus and b_minus:
        raise LatticeError("theta_coefficients needs a definite Gram matrix")
    if prec < 0:
        raise LatticeError("prec must be nonnegative")
    if len(coset) != lat.rank:
        raise LatticeError("coset vector has wrong length")
    sign = 1 if b_minus == 0 else -1
    gram = tuple(tuple(sign * x for x in row) for row in lat.gram)
    shift = tuple(Fraction(c) % 1 for c in coset)
    counts: dict[Fraction, int] = {}
    for v in short_vectors(gram, shift, Fraction(prec)):
        norm = sum(Fraction(v[i]) * gram[i][j] * Fraction(v[j]) for i in range(lat.rank) for j in range(lat.rank)) / 2
        counts[norm] = counts.get(norm, 0) + 1
    return counts
