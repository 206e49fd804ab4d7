"""Exact Weil representation of Mp2(Z) on the group algebra of a
discriminant form.

Generator matrices follow the standard T/S formulas; arbitrary group
elements are reached either by a Euclidean word decomposition in T and S
(with explicit tracking of the metaplectic square-root branch) or by the
closed coefficient formula for the standard lift, whose c != 0 branch is
a Gauss sum over L/cL.  Both paths produce exactly equal matrices, which
the test suite uses as a dual-route oracle.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .cyclo import CycloNum, e_of, root_of_unity, sqrt_nat
from .cusp import CuspError, IsotropicCusp
from .lattice import FiniteQuadraticModule, IntegralLattice, discriminant_form, isotropic_elements

__all__ = [
    "WeilMatrix",
    "InvariantBasis",
    "WorkBudgetError",
    "rho_generator",
    "rho_word",
    "rho_shintani",
    "invariants_basis",
    "rho_K_compat_check",
    "sl2_word",
]

DEFAULT_WORK_BUDGET = 10**7


class WorkBudgetError(RuntimeError):
    """Gauss-sum enumeration would exceed the configured work budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} terms, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass
class WeilMatrix:
    """A value of the Weil representation as an exact matrix."""

    module: FiniteQuadraticModule
    entries: list  # |D| x |D| nested lists of CycloNum, rows = target index
    label: str = ""

    def __post_init__(self):
        self._elements = self.module.elements()
        self._index = {t: i for i, t in enumerate(self._elements)}

    @property
    def size(self) -> int:
        return len(self.entries)

    def __matmul__(self, other: "WeilMatrix") -> "WeilMatrix":
        n = self.size
        a, b = self.entries, other.entries
        out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for k in range(n):
                aik = a[i][k]
                if aik.is_zero():
                    continue
                row_b = b[k]
                row_o = out[i]
                for j in range(n):
                    if not row_b[j].is_zero():
                        row_o[j] = row_o[j] + aik * row_b[j]
        return WeilMatrix(self.module, out, label=f"{self.label}*{other.label}")

    def dagger(self) -> "WeilMatrix":
        n = self.size
        out = [[self.entries[j][i].conjugate() for j in range(n)] for i in range(n)]
        return WeilMatrix(self.module, out, label=f"{self.label}^+")

    def scaled(self, c) -> "WeilMatrix":
        out = [[x * c for x in row] for row in self.entries]
        return WeilMatrix(self.module, out, label=self.label)

    def __eq__(self, other):
        if not isinstance(other, WeilMatrix):
            return NotImplemented
        n = self.size
        return all(self.entries[i][j] == other.entries[i][j] for i in range(n) for j in range(n))

    def is_unitary(self) -> bool:
        return (self @ self.dagger()) == identity_matrix(self.module)

    def apply(self, coeffs: dict) -> dict:
        """Apply to a vector given as {element tuple: CycloNum}."""
        n = self.size
        vec = [CycloNum.zero()] * n
        for t, c in coeffs.items():
            vec[self._index[t]] = vec[self._index[t]] + c
        out = {}
        for i in range(n):
            acc = CycloNum.zero()
            for j in range(n):
                if not vec[j].is_zero() and not self.entries[i][j].is_zero():
                    acc = acc + self.entries[i][j] * vec[j]
            if not acc.is_zero():
                out[self._elements[i]] = acc
        return out

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "size": self.size,
            "entries": [[x.to_json() for x in row] for row in self.entries],
            "approx": [[[x.embed().real, x.embed().imag] for x in row] for row in self.entries],
        }


def identity_matrix(mod: FiniteQuadraticModule) -> WeilMatrix:
    n = mod.order
    out = [[CycloNum.one() if i == j else CycloNum.zero() for j in range(n)] for i in range(n)]
    return WeilMatrix(mod, out, label="1")


def rho_generator(mod: FiniteQuadraticModule, gen: str) -> WeilMatrix:
    """rho(T), rho(S) or rho(Z) on C[L'/L]."""
    elements = mod.elements()
    n = len(elements)
    index = {t: i for i, t in enumerate(elements)}
    b_plus, b_minus = mod.signature_pair
    if gen == "T":
        out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
        for j, t in enumerate(elements):
            out[j][j] = e_of(mod.q(t))
        return WeilMatrix(mod, out, label="T")
    if gen == "S":
        norm = (root_of_unity(b_minus - b_plus, 8) / sqrt_nat(n))
        out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
        for j, gamma in enumerate(elements):
            for i, delta in enumerate(elements):
                out[i][j] = norm * e_of(-mod.bil(gamma, delta))
        return WeilMatrix(mod, out, label="S")
    if gen == "Z":
        scalar = root_of_unity(b_minus - b_plus, 4)  # i^(b_minus - b_plus)
        out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
        for j, t in enumerate(elements):
            out[index[mod.neg(t)]][j] = scalar
        return WeilMatrix(mod, out, label="Z")
    raise ValueError(f"unknown generator {gen!r}")


# -- SL2(Z) words and the metaplectic branch ---------------------------------

T_MAT = ((1, 1), (0, 1))
S_MAT = ((0, -1), (1, 0))


def _mat_mul(m1, m2):
    return (
        (m1[0][0] * m2[0][0] + m1[0][1] * m2[1][0], m1[0][0] * m2[0][1] + m1[0][1] * m2[1][1]),
        (m1[1][0] * m2[0][0] + m1[1][1] * m2[1][0], m1[1][0] * m2[0][1] + m1[1][1] * m2[1][1]),
    )


def _t_power(n):
    return ((1, n), (0, 1))


def sl2_word(m) -> list:
    """Write an SL2(Z) matrix as a word [('T', n), ('S',), ...].

    The product of the generators, left to right, equals the matrix
    exactly (as integer matrices; S^2 supplies -1 where needed).
    """
    (a, b), (c, d) = m
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    word = []
    while c != 0:
        n = a // c
        if n:
            word.append(("T", n))
            a, b = a - n * c, b - n * d
        # left-multiply by S^{-1}: rows (a b; c d) -> (c, d; -a, -b)
        word.append(("S",))
        a, b, c, d = c, d, -a, -b
    if a == 1:
        if b:
            word.append(("T", b))
    else:
        word.append(("S",))
        word.append(("S",))
        if b:
            word.append(("T", -b))
    # verify the reconstruction
    acc = ((1, 0), (0, 1))
    for g in word:
        acc = _mat_mul(acc, _t_power(g[1]) if g[0] == "T" else S_MAT)
    assert acc == ((m[0][0], m[0][1]), (m[1][0], m[1][1])), "word reconstruction failed"
    return word


def _principal_sqrt_j(mat, tau: complex) -> complex:
    return cmath.sqrt(mat[1][0] * tau + mat[1][1])


def _apply_mobius(mat, tau: complex) -> complex:
    (a, b), (c, d) = mat
    return (a * tau + b) / (c * tau + d)


def metaplectic_sign(word) -> int:
    """Sign relating the word's square-root branch to the principal one.

    Multiplying the standard lifts of the word letters produces (M, phi)
    with phi = sign * principal_sqrt(c*tau + d); the sign is a discrete
    +-1 decided numerically far from the branch cut.
    """
    tau = 0.31 + 1.07j
    cur = ((1, 0), (0, 1))
    eps = 1
    for g in word:
        gm = _t_power(g[1]) if g[0] == "T" else S_MAT
        new = _mat_mul(cur, gm)
        ratio = (
            _principal_sqrt_j(cur, _apply_mobius(gm, tau))
            * _principal_sqrt_j(gm, tau)
            / _principal_sqrt_j(new, tau)
        )
        if abs(ratio - 1) < 1e-9:
            pass
        elif abs(ratio + 1) < 1e-9:
            eps = -eps
        else:  # pragma: no cover
            raise AssertionError(f"square-root cocycle not +-1: {ratio}")
        cur = new
    return eps


def rho_word(mod: FiniteQuadraticModule, m, label: str | None = None) -> WeilMatrix:
    """rho of the standard lift of an SL2(Z) matrix via a word in T and S.

    The word product realizes some square root of c*tau + d; if it is the
    negative of the principal branch the result is corrected by
    rho(Z^2)^{-1} = (-1)^(b_minus - b_plus).
    """
    word = sl2_word(m)
    elements = mod.elements()
    n = len(elements)
    t_phases = [mod.q(t) for t in elements]
    s_matrix = rho_generator(mod, "S")
    acc = identity_matrix(mod)
    for g in word:
        if g[0] == "T":
            k = g[1]
            # right-multiply by the diagonal T^k: scale column j
            for i in range(n):
                row = acc.entries[i]
                for j in range(n):
                    if not row[j].is_zero():
                        row[j] = row[j] * e_of((k * t_phases[j]) % 1)
        else:
            acc = acc @ s_matrix
    if metaplectic_sign(word) == -1:
        b_plus, b_minus = mod.signature_pair
        if (b_minus - b_plus) % 2 == 1:
            acc = acc.scaled(Fraction(-1))
    acc.label = label or f"word{tuple(map(tuple, m))}"
    return acc


# -- Shintani's closed formula ------------------------------------------------


def rho_shintani(lat: IntegralLattice, m, work_budget: int = DEFAULT_WORK_BUDGET) -> WeilMatrix:
    """rho of the standard lift by the closed coefficient formula.

    The c = 0 branch is a signed permutation; for c != 0 each entry is a
    Gauss sum over L/cL with |c|^rank terms, guarded by the work budget.
    """
    (a, b), (c, d) = (tuple(m[0]), tuple(m[1]))
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    mod = discriminant_form(lat)
    elements = mod.elements()
    n = len(elements)
    index = {t: i for i, t in enumerate(elements)}
    b_plus, b_minus = mod.signature_pair
    label = f"shintani{((a, b), (c, d))}"

    if c == 0:
        sgn_d = 1 if d > 0 else -1
        prefactor = root_of_unity((b_minus - b_plus) * (1 - sgn_d), 8)
        out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
        for j, gamma in enumerate(elements):
            beta = mod.smul(a, gamma)
            phase = e_of((a * b * mod.q(beta)) % 1)
            out[index[beta]][j] = prefactor * phase
        return WeilMatrix(mod, out, label=label)

    rank = lat.rank
    required = abs(c) ** rank
    if required > work_budget:
        raise WorkBudgetError(required, work_budget)

    sgn_c = 1 if c > 0 else -1
    denom = sqrt_nat(abs(c) ** rank) * sqrt_nat(mod.order)
    prefactor = root_of_unity((b_minus - b_plus) * sgn_c, 8) / denom

    gram = lat.gram
    vectors = [mod.vector(t) for t in elements]
    g_vecs = [lat.gram_times(v) for v in vectors]  # pairing functionals G*v
    norms = [lat.q(v) * 2 for v in vectors]  # (v, v)
    box = list(product(range(abs(c)), repeat=rank))
    # (r, r) and G*r for all r, with plain integer arithmetic
    r_norm = []
    r_gram = []
    for r in box:
        gr = [sum(gram[i][j] * r[j] for j in range(rank)) for i in range(rank)]
        r_gram.append(gr)
        r_norm.append(sum(r[i] * gr[i] for i in range(rank)))

    out = [[CycloNum.zero() for _ in range(n)] for _ in range(n)]
    two_c = Fraction(2 * c)
    for jb, beta in enumerate(elements):
        vb = vectors[jb]
        gb = g_vecs[jb]
        nb = norms[jb]
        for jg, gamma in enumerate(elements):
            vg = vectors[jg]
            gg = g_vecs[jg]
            ng = norms[jg]
            const = a * nb - 2 * lat.bil(vb, vg) + d * ng
            counts: dict[Fraction, int] = {}
            for k, r in enumerate(box):
                # a(beta+r, beta+r) - 2(gamma, beta+r) + d(gamma, gamma)
                lin = sum((a * gb[i] - gg[i]) * r[i] for i in range(rank))
                val = (const + 2 * lin + a * r_norm[k]) / two_c % 1
                counts[val] = counts.get(val, 0) + 1
            total = CycloNum.zero()
            for val, cnt in sorted(counts.items()):
                total = total + e_of(val) * cnt
            if not total.is_zero():
                out[jb][jg] = prefactor * total
    return WeilMatrix(mod, out, label=label)


# -- invariant vectors ---------------------------------------------------------


@dataclass
class InvariantBasis:
    """Exact basis of the invariant vectors Inv(C[L'/L])."""

    module: FiniteQuadraticModule
    dimension: int
    basis: list  # list of |D|-vectors of CycloNum


def _kernel_of_rows(rows, n):
    """Exact kernel of a stacked row system over the cyclotomic field."""
    mat = [list(r) for r in rows]
    # clear rational denominators rowwise (cosmetic; keeps entries integral)
    pivots = []  # (row, col)
    row_at = 0
    for col in range(n):
        piv = None
        for r in range(row_at, len(mat)):
            if not mat[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        mat[row_at], mat[piv] = mat[piv], mat[row_at]
        inv = mat[row_at][col].inverse()
        mat[row_at] = [x * inv for x in mat[row_at]]
        for r in range(len(mat)):
            if r != row_at and not mat[r][col].is_zero():
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[row_at])]
        pivots.append((row_at, col))
        row_at += 1
    pivot_cols = {c for _, c in pivots}
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        v = [CycloNum.zero()] * n
        v[f] = CycloNum.one()
        for r, c in pivots:
            v[c] = -mat[r][f]
        basis.append(v)
    return basis


def invariants_basis(mod: FiniteQuadraticModule) -> InvariantBasis:
    """Exact kernel of the stacked system (rho(T) - 1; rho(S) - 1)."""
    n = mod.order
    rt = rho_generator(mod, "T")
    rs = rho_generator(mod, "S")
    one = identity_matrix(mod)
    rows = []
    for mat in (rt, rs):
        for i in range(n):
            rows.append([mat.entries[i][j] - one.entries[i][j] for j in range(n)])
    basis = _kernel_of_rows(rows, n)
    elements = mod.elements()
    iso = {t for t, _ in isotropic_elements(mod)}
    index = {t: i for i, t in enumerate(elements)}
    b_plus, b_minus = mod.signature_pair
    z_scalar = root_of_unity(b_minus - b_plus, 4)
    for v in basis:
        coeffs = {elements[i]: v[i] for i in range(n)}
        assert rt.apply(coeffs) == _clean(coeffs), "basis vector not T-invariant"
        assert rs.apply(coeffs) == _clean(coeffs), "basis vector not S-invariant"
        for t, c in coeffs.items():
            if not c.is_zero():
                assert t in iso, "invariant vector supported off the isotropic set"
        # rho(Z) v = v forces i^(b_minus-b_plus) * v(-gamma) = v(gamma)
        for t in elements:
            assert v[index[t]] == z_scalar * v[index[mod.neg(t)]]
    return InvariantBasis(module=mod, dimension=len(basis), basis=basis)


def _clean(coeffs: dict) -> dict:
    return {t: c for t, c in coeffs.items() if not c.is_zero()}


# -- compatibility with the cusp sublattice ------------------------------------


def rho_K_compat_check(
    lat: IntegralLattice,
    cusp: IsotropicCusp,
    m,
    gamma,
    n: int,
    work_budget: int = DEFAULT_WORK_BUDGET,
    method: str = "word",
) -> bool:
    """Exact test of the rho_L / rho_K pushdown identity at a cusp.

    gamma is a K'/K class (residue tuple); n is an integer.  Both sides
    are assembled as vectors in C[L'/L] over the fiber of the projection
    and compared exactly.
    """
    (a, _b), (c, _d) = (tuple(m[0]), tuple(m[1]))
    mod_l = discriminant_form(lat)
    mod_k = cusp.k_module()
    n_z = cusp.level

    def rho_of(lattice, mod):
        if method == "shintani":
            return rho_shintani(lattice, m, work_budget)
        return rho_word(mod, m)

    rho_l = rho_of(lat, mod_l)
    rho_k = rho_of(cusp.k_lattice, mod_k)

    def fiber_class(k_class, m_shift: int, extra=None):
        lift, t0 = cusp.section(mod_k.vector(k_class))
        if t0 != 0:
            raise CuspError(
                "K'/K representative does not lift integrally; "
                "the identity needs (gamma, zeta_K) in Z"
            )
        vec = [x + Fraction(m_shift * zi, n_z) for x, zi in zip(lift, cusp.z)]
        if extra is not None:
            vec = [x + y for x, y in zip(vec, extra)]
        return mod_l.class_of(vec)

    # left side: rho_L applied to the phase-weighted fiber sum over gamma
    lhs_vec: dict = {}
    for m_shift in range(n_z):
        idx = fiber_class(gamma, m_shift)
        phase = e_of(Fraction(-m_shift * n, n_z) % 1)
        lhs_vec[idx] = lhs_vec.get(idx, CycloNum.zero()) + phase
    lhs = rho_l.apply(lhs_vec)

    # right side: (rho_K e_gamma) spread over the shifted fiber
    q_zp = lat.q(cusp.z_prime)
    shift_vec = [-n * c * x for x in cusp.z_prime]
    rhs: dict = {}
    k_elements = mod_k.elements()
    k_index = {t: i for i, t in enumerate(k_elements)}
    col = k_index[tuple(gamma)]
    for i, beta in enumerate(k_elements):
        coeff = rho_k.entries[i][col]
        if coeff.is_zero():
            continue
        for m_shift in range(n_z):
            idx = fiber_class(beta, m_shift, extra=shift_vec)
            phase = e_of((Fraction(-a * m_shift * n, n_z) + q_zp * a * c * n * n) % 1)
            term = coeff * phase
            rhs[idx] = rhs.get(idx, CycloNum.zero()) + term
    return _clean(lhs) == _clean(rhs)
