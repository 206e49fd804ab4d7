"""Isotropic cusp data: levels, the sublattice K = L ∩ z^perp ∩ z'^perp,
and the projection from L_0'/L onto K'/K."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np

from .lattice import (
    FiniteQuadraticModule,
    IntegralLattice,
    LatticeError,
    discriminant_form,
    integer_kernel,
)

__all__ = ["IsotropicCusp", "cusp_data", "find_isotropic_vectors", "CuspError"]


class CuspError(ValueError):
    """Raised on invalid cusp input."""


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _solve_dot(coeffs, target: int):
    """Integer vector w with coeffs . w == target, via an xgcd chain."""
    n = len(coeffs)
    w = [0] * n
    g = 0
    combo = [0] * n  # current Bezout combination achieving g
    for i, a in enumerate(coeffs):
        if a == 0:
            continue
        if g == 0:
            g = abs(a)
            combo = [0] * n
            combo[i] = 1 if a > 0 else -1
        else:
            g2, s, t = _xgcd(g, a)
            combo = [s * c for c in combo]
            combo[i] += t
            g = g2
    if g == 0 or target % g != 0:
        raise CuspError("pairing equation has no integer solution")
    f = target // g
    return [f * c for c in combo]


def _size_reduce(w, kernel_basis):
    """Deterministically shrink w by integer kernel vectors (greedy passes)."""
    w = list(w)
    for _ in range(8):
        changed = False
        for k in kernel_basis:
            kk = sum(x * x for x in k)
            if kk == 0:
                continue
            dot = sum(a * b for a, b in zip(w, k))
            c = round(Fraction(dot, kk))
            if c:
                w = [a - c * b for a, b in zip(w, k)]
                changed = True
        if not changed:
            break
    return w


@dataclass
class IsotropicCusp:
    """Data attached to a primitive isotropic z and a dual z' with (z,z')=1."""

    lattice: IntegralLattice
    z: tuple
    z_prime: tuple
    level: int
    zeta: tuple
    zeta_K: tuple
    b_coeff: Fraction
    k_basis: tuple       # columns: lattice coordinates of a basis of K
    k_lattice: IntegralLattice

    def k_module(self) -> FiniteQuadraticModule:
        return discriminant_form(self.k_lattice)

    # -- coordinate plumbing -------------------------------------------

    def k_to_ambient(self, coords):
        """K-basis coordinates -> lattice coordinates."""
        n = self.lattice.rank
        out = [Fraction(0)] * n
        for c, b in zip(coords, self.k_basis):
            if c:
                out = [o + Fraction(c) * bi for o, bi in zip(out, b)]
        return tuple(out)

    def ambient_to_k(self, vec):
        """Lattice coordinates of a vector in K ⊗ Q -> K-basis coordinates."""
        cols = [[Fraction(b[r]) for b in self.k_basis] for r in range(self.lattice.rank)]
        m = len(self.k_basis)
        rows = [cols[r] + [Fraction(vec[r])] for r in range(self.lattice.rank)]
        # rational least-structure solve: gaussian elimination on the tall system
        piv_rows = []
        used = [False] * len(rows)
        sol = [Fraction(0)] * m
        mat = [row[:] for row in rows]
        col = 0
        pivots = []
        for col in range(m):
            piv = next((r for r in range(len(mat)) if not used[r] and mat[r][col] != 0), None)
            if piv is None:
                raise CuspError("K basis is degenerate")
            used[piv] = True
            pivots.append((piv, col))
            inv = 1 / mat[piv][col]
            mat[piv] = [x * inv for x in mat[piv]]
            for r in range(len(mat)):
                if r != piv and mat[r][col]:
                    f = mat[r][col]
                    mat[r] = [x - f * y for x, y in zip(mat[r], mat[piv])]
        for piv, col in pivots:
            sol[col] = mat[piv][m]
        # consistency: rows not used must be all zero
        for r in range(len(mat)):
            if not used[r] and mat[r][m] != 0:
                raise CuspError("vector is not in K ⊗ Q")
        del piv_rows
        return tuple(sol)

    def project(self, lam):
        """pi(lambda) = lambda_K + ((lambda,z)/N_z) * zeta_K, lattice coords."""
        lat = self.lattice
        lz = lat.bil(lam, self.z)
        lzp = lat.bil(lam, self.z_prime)
        zpzp = lat.bil(self.z_prime, self.z_prime)
        lam_k = [
            Fraction(lam[i]) - lz * Fraction(self.z_prime[i]) + lz * zpzp * self.z[i] - lzp * self.z[i]
            for i in range(lat.rank)
        ]
        out = [a + (lz / self.level) * zk for a, zk in zip(lam_k, self.zeta_K)]
        return tuple(out)

    def orthogonal_projection(self, lam):
        """lambda_K, the orthogonal projection onto K ⊗ R (lattice coords)."""
        lat = self.lattice
        lz = lat.bil(lam, self.z)
        lzp = lat.bil(lam, self.z_prime)
        zpzp = lat.bil(self.z_prime, self.z_prime)
        return tuple(
            Fraction(lam[i]) - lz * Fraction(self.z_prime[i]) + lz * zpzp * self.z[i] - lzp * self.z[i]
            for i in range(lat.rank)
        )

    def section(self, gamma_coords):
        """A dual-lattice lift of a K'/K class into L_0'.

        gamma_coords are K-basis coordinates of a K' representative.  The
        lift is g + t*z/N_z with the smallest t in [0,1) making the result
        integral against all of L; shifting by z/N_z walks the fiber.
        """
        g = self.k_to_ambient(gamma_coords)
        pairing = self.lattice.bil(g, self.zeta)
        t = (-pairing) % 1
        lift = tuple(gi + t * Fraction(zi, self.level) for gi, zi in zip(g, self.z))
        if not self.lattice.in_dual(lift):
            raise CuspError("section lift failed to land in the dual lattice")
        return lift, t

    def level_in_k(self, vec_k_coords) -> int:
        """Level of a K-vector: (vec, K) = N * Z."""
        kg = self.k_lattice.gram_times(vec_k_coords)
        g = 0
        for x in kg:
            assert x.denominator == 1
            g = gcd(g, int(x))
        return g


def find_isotropic_vectors(lat: IntegralLattice, coordinate_bound: int):
    """All primitive isotropic z with max |coordinate| <= bound, up to sign.

    Brute-force box search, fully vectorized but still exponential in the
    rank: intended for small-rank discovery (or bound 1 up to rank ~12).
    """
    if coordinate_bound < 1:
        raise LatticeError("coordinate_bound must be >= 1")
    n = lat.rank
    width = 2 * coordinate_bound + 1
    total = width**n
    if total > 20_000_000:
        raise LatticeError(f"search box of size {total} is too large")
    gram = np.array(lat.gram, dtype=np.int64)
    # lexicographic box enumeration, deterministic output order
    idx = np.arange(total)
    coords = np.empty((total, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        coords[:, j] = idx % width - coordinate_bound
        idx //= width
    norms = np.einsum("ij,jk,ik->i", coords, gram, coords)
    mask = norms == 0
    # canonical sign: first nonzero coordinate positive (discards zero)
    nonzero = coords != 0
    first_idx = np.argmax(nonzero, axis=1)
    has_nonzero = nonzero.any(axis=1)
    first_val = coords[np.arange(total), first_idx]
    mask &= has_nonzero & (first_val > 0)
    mask &= np.gcd.reduce(np.abs(coords), axis=1) == 1
    out = []
    for row in coords[mask]:
        pair = gram @ row
        level = 0
        for x in pair:
            level = gcd(level, int(x))
        out.append((tuple(int(x) for x in row), level))
    return out


def cusp_data(lat: IntegralLattice, z, z_prime) -> IsotropicCusp:
    """Assemble the cusp data for a primitive isotropic z and dual z'."""
    n = lat.rank
    z = tuple(int(x) for x in z)
    z_prime = tuple(Fraction(x) for x in z_prime)
    if lat.q(z) != 0:
        raise CuspError("z must be isotropic")
    g = 0
    for x in z:
        g = gcd(g, x)
    if g != 1:
        raise CuspError("z must be primitive")
    if not lat.in_dual(z_prime):
        raise CuspError("z' must lie in the dual lattice")
    if lat.bil(z, z_prime) != 1:
        raise CuspError("(z, z') must equal 1")

    pair_z = [int(x) for x in lat.gram_times(z)]
    level = 0
    for x in pair_z:
        level = gcd(level, x)

    # zeta in L with (z, zeta) = level; deterministic small solution
    kernel_z = integer_kernel([pair_z])
    zeta = tuple(_size_reduce(_solve_dot(pair_z, level), kernel_z))
    assert lat.bil(z, zeta) == level

    # K = L ∩ z^perp ∩ z'^perp via a saturated integer kernel
    den = 1
    pair_zp = lat.gram_times(z_prime)
    for x in pair_zp:
        den = den * x.denominator // gcd(den, x.denominator)
    rows = [pair_z, [int(x * den) for x in pair_zp]]
    k_basis = integer_kernel(rows)
    if len(k_basis) != n - 2:
        raise CuspError("K does not have rank rank(L) - 2")
    k_gram = tuple(
        tuple(int(lat.bil(b1, b2)) for b2 in k_basis) for b1 in k_basis
    )
    k_lat = IntegralLattice(k_gram, f"K({lat.name})" if lat.name else "K")
    bp, bm = lat.signature
    if k_lat.signature != (bp - 1, bm - 1):
        raise CuspError("K has unexpected signature")

    # zeta = zeta_K + N_z z' + B z
    b_coeff = lat.bil(zeta, z_prime) - level * lat.bil(z_prime, z_prime)
    zeta_k = tuple(
        Fraction(zeta[i]) - level * z_prime[i] - b_coeff * z[i] for i in range(n)
    )
    cusp = IsotropicCusp(
        lattice=lat,
        z=z,
        z_prime=z_prime,
        level=level,
        zeta=zeta,
        zeta_K=zeta_k,
        b_coeff=b_coeff,
        k_basis=tuple(tuple(b) for b in k_basis),
        k_lattice=k_lat,
    )
    # the decomposition pins zeta_K inside K ⊗ Q, orthogonal to z and z'
    assert lat.bil(zeta_k, z) == 0 and lat.bil(zeta_k, z_prime) == 0
    _check_projection(cusp)
    return cusp


def _check_projection(cusp: IsotropicCusp):
    """Spot-check that pi maps L_0' into K' and hits the K'/K generators."""
    lat = cusp.lattice
    kmod = cusp.k_module()
    for idx in range(len(kmod.elementary_divisors)):
        t = tuple(int(i == idx) for i in range(len(kmod.elementary_divisors)))
        gen_k = kmod.vector(t)
        lift, _ = cusp.section(gen_k)
        image = cusp.project(lift)
        diff = [a - b for a, b in zip(cusp.ambient_to_k(image), gen_k)]
        if any(d.denominator != 1 for d in diff):
            raise CuspError("projection does not invert the section on a generator")
