"""Holomorphic boundary data of Eisenstein theta lifts.

Everything finite is exact: twisted divisor sums and boundary
q-expansion coefficients live in cyclotomic fields, constant terms come
from a Bernoulli-polynomial evaluation of the two-sided partial zeta
values.  The handful of genuinely transcendental quantities (partial
zeta and Dirichlet L-values away from the Bernoulli range) are evaluated
in floating point with an Euler-Maclaurin tail, accurate far below the
1e-12 tolerances used by the callers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from .cyclo import CycloNum, e_of
from .cusp import CuspError, IsotropicCusp, find_isotropic_vectors, _solve_dot
from .lattice import (
    FiniteQuadraticModule,
    IntegralLattice,
    LatticeError,
    discriminant_form,
    integer_kernel,
    isotropic_elements,
)
from .weil import invariants_basis

__all__ = [
    "QExpansion",
    "BoundaryDecomposition",
    "twisted_divisor_sum",
    "constant_term",
    "constant_term_closed",
    "constant_term_numeric",
    "boundary_qexpansion",
    "eisenstein_projection_coeffs",
    "assemble_adjoint_vector",
    "singular_dim",
    "bernoulli_number",
    "bernoulli_poly",
    "zeta_plus_numeric",
    "dirichlet_characters",
    "dirichlet_l_value",
]


# -- Bernoulli numbers and polynomials ---------------------------------------


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with B_1 = -1/2, by the defining recurrence."""
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for k in range(n):
        total += comb(n + 1, k) * bernoulli_number(k)
    return -total / (n + 1)


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum(comb(n, k) * bernoulli_number(k) * x ** (n - k) for k in range(n + 1))


# -- partial zeta values -------------------------------------------------------


def _hurwitz_zeta(s: float, a: float, cutoff: int = 40, correction_terms: int = 10) -> float:
    """Hurwitz zeta for real s > 1, a > 0: direct sum + Euler-Maclaurin tail.

    With cutoff 40 and 10 correction terms the remainder (bounded by the
    first omitted term) is far below 1e-16 relative for s >= 2.
    """
    total = 0.0
    for k in range(cutoff):
        total += (k + a) ** (-s)
    m = cutoff + a
    total += m ** (1.0 - s) / (s - 1.0)
    total += 0.5 * m ** (-s)
    poch = s
    fact = m ** (-s - 1.0)
    for j in range(1, correction_terms + 1):
        b2j = float(bernoulli_number(2 * j))
        total += b2j / math.factorial(2 * j) * poch * fact
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        fact /= m * m
    return total


def zeta_plus_numeric(b: int, s: float, n: int) -> float:
    """Partial zeta: sum of k^(-s) over positive k = b mod n."""
    b_bar = b % n
    if b_bar == 0:
        b_bar = n
    return n ** (-s) * _hurwitz_zeta(s, b_bar / n)


def constant_term_closed(b: int, kappa: int, n_z: int) -> CycloNum:
    """Exact boundary constant term Gamma(k) N^k / (-2 pi i)^k * zeta^b(k).

    Evaluated through the Bernoulli-polynomial expansion of the two-sided
    partial zeta value; the result lies in Q(zeta_{N_z}) and is rational
    whenever 2 cos(2 pi b / N_z) is.
    """
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    total = CycloNum.zero()
    for j in range(n_z):
        total = total + e_of(Fraction(-j * b, n_z) % 1) * bernoulli_poly(kappa, Fraction(j, n_z))
    sign = Fraction(-1) if kappa % 2 == 0 else Fraction(1)
    return total * (sign * Fraction(n_z ** (kappa - 1), kappa))


def constant_term_numeric(b: int, kappa: int, n_z: int) -> complex:
    """Independent oracle for the constant term via partial-zeta summation."""
    zp = zeta_plus_numeric(b, kappa, n_z) + (-1) ** kappa * zeta_plus_numeric(-b, kappa, n_z)
    return math.factorial(kappa - 1) * n_z**kappa / (-2j * math.pi) ** kappa * zp


def constant_term(beta, cusp: IsotropicCusp, kappa: int):
    """Constant term of the boundary restriction for beta in L'/L.

    Returns an exact value (Fraction when rational, CycloNum otherwise);
    0 when beta is not of the form b*z/N_z.
    """
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    mod = discriminant_form(cusp.lattice)
    beta = tuple(beta)
    n_z = cusp.level
    for b in range(n_z):
        vec = tuple(Fraction(b * zi, n_z) for zi in cusp.z)
        if mod.class_of(vec) == beta:
            value = constant_term_closed(b, kappa, n_z)
            return value.to_fraction() if value.is_rational() else value
    return Fraction(0)


# -- twisted divisor sums and q-expansions -------------------------------------


def _divisors(m: int):
    out = [d for d in range(1, m + 1) if m % d == 0]
    return out


def twisted_divisor_sum(m: int, c: int, b: int, kappa: int, n_lambda: int, n_z: int) -> CycloNum:
    """sigma~^{c,b}_{kappa-1}(m): signed divisor sum over both signs.

    Terms sgn(n) n^(kappa-1) e(n b / N_z) over divisors n of m (positive
    and negative) with m/n = c mod N_lambda.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    total = CycloNum.zero()
    for d in _divisors(m):
        for n in (d, -d):
            if (m // n) % n_lambda != c % n_lambda:
                continue
            sgn = 1 if n > 0 else -1
            term = e_of(Fraction(n * b, n_z) % 1) * Fraction(sgn * n ** (kappa - 1))
            total = total + term
    return total


@dataclass
class BoundaryDecomposition:
    """Solution (c, b) of beta = c*d/N_d - c(d,zeta)z/(N_d N_z) + b*z/N_z."""

    exists: bool
    c_beta: int = 0
    b_beta: int = 0


def decompose_boundary(mod: FiniteQuadraticModule, cusp: IsotropicCusp, d_ambient, n_d: int, beta) -> BoundaryDecomposition:
    lat = cusp.lattice
    n_z = cusp.level
    d_zeta = lat.bil(d_ambient, cusp.zeta)
    beta = tuple(beta)
    found = []
    for c in range(n_d):
        for b in range(n_z):
            vec = tuple(
                Fraction(c) * Fraction(di, n_d)
                - Fraction(c) * d_zeta / (n_d * n_z) * zi
                + Fraction(b, n_z) * zi
                for di, zi in zip(d_ambient, cusp.z)
            )
            if mod.class_of(vec) == beta:
                found.append((c, b))
    if not found:
        return BoundaryDecomposition(False)
    assert len(found) == 1, f"decomposition is not unique: {found}"
    return BoundaryDecomposition(True, *found[0])


@dataclass
class QExpansion:
    """Exact Fourier expansion sum a(m) q^(m/N) of a boundary restriction."""

    denominator: int
    constant: object                 # Fraction or CycloNum
    coeffs: dict = field(default_factory=dict)  # m >= 1 -> Fraction or CycloNum
    prec: int = 0

    def coefficient(self, m: int):
        if m == 0:
            return self.constant
        return self.coeffs.get(m, Fraction(0))

    def approx(self, m: int) -> complex:
        v = self.coefficient(m)
        return v.embed() if isinstance(v, CycloNum) else complex(v)

    def to_json(self) -> dict:
        def render(v):
            if isinstance(v, CycloNum):
                if v.is_rational():
                    v = v.to_fraction()
                else:
                    return v.to_json()
            return f"{v.numerator}/{v.denominator}"

        return {
            "N": self.denominator,
            "constant": render(self.constant),
            "coeffs": {str(m): render(c) for m, c in sorted(self.coeffs.items())},
            "prec": self.prec,
        }


def _as_exact(value: CycloNum):
    return value.to_fraction() if value.is_rational() else value


def boundary_qexpansion(
    lat: IntegralLattice,
    cusp: IsotropicCusp,
    d_data,
    beta,
    kappa: int,
    prec: int,
) -> QExpansion:
    """q-expansion of the holomorphic boundary part at the plane <z, d>.

    d_data is (d, N_d, d') with d a primitive isotropic vector of K in
    K-basis coordinates; d' (a dual vector with (d, d') = 1) is accepted
    for validation only.
    """
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    d_coords, n_d_given, d_prime = (tuple(d_data[0]), d_data[1], d_data[2] if len(d_data) > 2 else None)
    k_lat = cusp.k_lattice
    if k_lat.q(d_coords) != 0:
        raise CuspError("d must be isotropic in K")
    g = 0
    for x in d_coords:
        g = gcd(g, int(x))
    if g != 1:
        raise CuspError("d must be primitive in K")
    n_d = cusp.level_in_k(d_coords)
    if n_d_given is not None and n_d_given != n_d:
        raise CuspError(f"stated level {n_d_given} differs from computed level {n_d}")
    if d_prime is not None:
        if k_lat.bil(d_coords, d_prime) != 1:
            raise CuspError("(d, d') must equal 1")

    mod = discriminant_form(lat)
    beta = tuple(beta)
    n_z = cusp.level
    d_ambient = cusp.k_to_ambient(d_coords)
    dec = decompose_boundary(mod, cusp, d_ambient, n_d, beta)
    if not dec.exists:
        return QExpansion(denominator=n_d, constant=Fraction(0), coeffs={}, prec=prec)

    constant = Fraction(0)
    if dec.c_beta % n_d == 0:
        constant = _as_exact(constant_term_closed(dec.b_beta, kappa, n_z))

    d_zeta_k = lat.bil(d_ambient, cusp.zeta_K)
    coeffs = {}
    for m in range(1, prec + 1):
        sigma = twisted_divisor_sum(m, dec.c_beta, dec.b_beta, kappa, n_d, n_z)
        phase_exp = Fraction(-m) * d_zeta_k / (n_z * n_d) % 1
        value = sigma * e_of(phase_exp)
        if not value.is_zero():
            coeffs[m] = _as_exact(value)
    return QExpansion(denominator=n_d, constant=constant, coeffs=coeffs, prec=prec)


# -- Dirichlet characters and the cusp-value projection -------------------------


def _unit_group_generators(n: int):
    """Generators (g, order) of (Z/n)^x via the prime-power decomposition."""
    if n == 1:
        return []
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1
    if m > 1:
        factors.append((m, 1))
    gens = []
    for p, e in factors:
        pe = p**e
        others = n // pe
        local = []
        if p == 2:
            if e == 2:
                local = [(3, 2)]
            elif e >= 3:
                local = [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            phi = pe - pe // p
            g = next(
                g for g in range(2, pe) if g % p and _mult_order(g, pe) == phi
            )
            local = [(g, phi)]
        for g, order in local:
            # CRT lift: g at this factor, 1 elsewhere
            lifted = _crt(g, pe, 1, others)
            gens.append((lifted % n, order))
    return gens


def _mult_order(g: int, n: int) -> int:
    o = 1
    x = g % n
    while x != 1:
        x = x * g % n
        o += 1
    return o


def _crt(a1, n1, a2, n2):
    if n2 == 1:
        return a1
    g, s, _t = _xgcd(n1, n2)
    assert g == 1
    return (a1 + n1 * ((a2 - a1) * s % n2)) % (n1 * n2)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def dirichlet_characters(n: int):
    """All Dirichlet characters mod n as dicts unit -> complex value."""
    if n == 1:
        return [{0: 1.0 + 0j}]
    gens = _unit_group_generators(n)
    units = [u for u in range(n) if gcd(u, n) == 1]
    # exponent tuples for every unit by enumeration of the generator span
    from itertools import product as iproduct

    rep = {}
    for exps in iproduct(*(range(order) for _, order in gens)):
        u = 1
        for (g, _order), e in zip(gens, exps):
            u = u * pow(g, e, n) % n
        rep.setdefault(u, exps)
    assert len(rep) == len(units)
    chars = []
    for vals in iproduct(*(range(order) for _, order in gens)):
        chi = {}
        for u in units:
            exps = rep[u]
            angle = sum(
                v * e / order for v, e, (_g, order) in zip(vals, exps, gens)
            )
            chi[u] = cmath.exp(2j * cmath.pi * angle)
        chars.append(chi)
    return chars


def dirichlet_l_value(chi: dict, s: float, n: int) -> complex:
    """L(chi, s) by partial-zeta decomposition over residue classes."""
    return sum(chi[r] * zeta_plus_numeric(r, s, n) for r in chi)


def eisenstein_projection_coeffs(n_delta: int, kappa: int) -> dict:
    """Coefficients combining the lifts of c*delta into the delta-pattern.

    Applying them to the cusp-value matrix reproduces the character sum
    (1/(2*phi)) * sum_chi (chi(b) + (-1)^kappa chi(-b)).  Characters with
    chi(-1) != (-1)^kappa annihilate the cusp values of the lifts (which
    have parity (-1)^kappa) and are omitted, which makes the coefficients
    symmetric under c -> -c for even kappa.
    """
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    all_chars = dirichlet_characters(n_delta)
    phi = len(all_chars)
    units = sorted(all_chars[0].keys())
    parity = (-1) ** kappa
    minus_one = (n_delta - 1) % max(n_delta, 1)
    chars = [chi for chi in all_chars if abs(chi[minus_one] - parity) < 1e-9]
    l_values = [dirichlet_l_value(chi, kappa, n_delta) for chi in chars]
    pref = (-2j * math.pi) ** kappa / (2 * phi * math.factorial(kappa - 1) * n_delta**kappa)
    return {
        c: pref * sum(chi[c] / lv for chi, lv in zip(chars, l_values))
        for c in units
    }


# -- adjoint-lift assembly -------------------------------------------------------


def assemble_adjoint_vector(mod: FiniteQuadraticModule, a: dict, c_const: dict, l: int) -> dict:
    """Invariant-vector assembly from cusp values of a singular-weight form.

    a and c_const map isotropic classes to numbers; the output is the
    vector with coefficient at gamma given by the prefactor times
    sum over delta with gamma in <delta> of zeta_+^{k}(l - kappa) a_delta C_delta.
    """
    if l <= 2 or l % 2:
        raise ValueError("l must be even and greater than 2")
    kappa = l // 2 - 1
    iso = {t for t, _ in isotropic_elements(mod)}
    for source in (a, c_const):
        for t in source:
            if tuple(t) not in iso:
                raise ValueError(f"support outside the isotropic set: {t}")
    pref = math.gamma(l / 2) / (2 * (2 * math.pi) ** (l / 2))
    s = l - kappa
    out = {}
    for gamma in mod.elements():
        total = 0.0
        for delta, n_delta in isotropic_elements(mod):
            weight = a.get(delta, 0.0) * c_const.get(delta, 1.0)
            if not weight:
                continue
            k_delta = next(
                (k for k in range(n_delta) if mod.smul(k, delta) == gamma), None
            )
            if k_delta is None:
                continue
            total += zeta_plus_numeric(k_delta, s, n_delta) * weight
        out[gamma] = pref * total
    return out


# -- singular-weight dimension reports --------------------------------------------


def _try_u_split(lat: IntegralLattice, bound: int):
    """Find a hyperbolic-plane summand: (e, f, complement basis) or None."""
    limit = (2 * bound + 1) ** lat.rank
    if limit > 5_000_000:
        return None
    for vec, level in find_isotropic_vectors(lat, bound):
        if level != 1:
            continue
        pair = [int(x) for x in lat.gram_times(vec)]
        f0 = _solve_dot(pair, 1)
        qf = lat.q(f0)
        assert qf.denominator == 1
        f = tuple(int(x) - int(qf) * v for x, v in zip(f0, vec))
        assert lat.q(f) == 0 and lat.bil(vec, f) == 1
        rows = [pair, [int(x) for x in lat.gram_times(f)]]
        comp = integer_kernel(rows)
        return vec, f, comp
    return None


def _splits_two_u(lat: IntegralLattice) -> str:
    if lat.rank < 4:
        return "no"
    for bound in (1, 2):
        first = _try_u_split(lat, bound)
        if first is None:
            continue
        _e, _f, comp = first
        comp_gram = tuple(tuple(int(lat.bil(b1, b2)) for b2 in comp) for b1 in comp)
        comp_lat = IntegralLattice(comp_gram)
        if comp_lat.rank < 2:
            return "unknown"
        for bound2 in (1, 2):
            if _try_u_split(comp_lat, bound2) is not None:
                return "yes"
    return "unknown"


def _verify_split_hint(lat: IntegralLattice, hint) -> None:
    if len(hint) != 4:
        raise LatticeError("split hint needs four vectors z1, z1', z2, z2'")
    vecs = []
    for v in hint:
        if any(Fraction(x).denominator != 1 for x in v) or len(v) != lat.rank:
            raise LatticeError("hint vectors must be integral lattice vectors")
        vecs.append(tuple(int(x) for x in v))
    want = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    for i in range(4):
        for j in range(4):
            if lat.bil(vecs[i], vecs[j]) != want[i][j]:
                raise LatticeError("hint vectors do not form U + U")
    # the split is genuine iff the orthogonal complement carries the full
    # determinant (unimodular summands force equality of the sublattice sum)
    rows = [[int(x) for x in lat.gram_times(v)] for v in vecs]
    comp = integer_kernel(rows)
    comp_gram = [[int(lat.bil(b1, b2)) for b2 in comp] for b1 in comp]
    if comp and abs(_det_of(comp_gram)) != abs(lat.det):
        raise LatticeError("hint planes do not split off: complement determinant mismatch")


def _det_of(g) -> int:
    n = len(g)
    a = [[Fraction(x) for x in row] for row in g]
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
    return int(det)


def singular_dim(lat: IntegralLattice, split_hint=None) -> dict:
    """Invariant dimension and the boundary-Eisenstein dimension report."""
    mod = discriminant_form(lat)
    inv = invariants_basis(mod)
    b_plus, b_minus = lat.signature
    report = {
        "dim_inv": inv.dimension,
        "signature": [b_plus, b_minus],
    }
    is_2_l = b_plus == 2 and b_minus >= 4 and b_minus % 2 == 0
    kappa = Fraction(b_minus, 2) - 1 if b_plus == 2 else None
    if kappa is not None:
        report["kappa"] = int(kappa) if kappa.denominator == 1 else f"{kappa.numerator}/{kappa.denominator}"
    if not is_2_l:
        report["flag"] = "not (2,l)"
    if split_hint is not None:
        _verify_split_hint(lat, split_hint)
        splits = "yes"
    else:
        splits = _splits_two_u(lat)
    report["splits_two_U"] = splits
    if splits == "yes":
        report["dim_boundary_eisenstein"] = inv.dimension
    else:
        report["dim_boundary_eisenstein"] = "not determined"
    return report
