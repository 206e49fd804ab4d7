"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Numbers are stored as coefficient vectors over the power basis
1, zeta_M, ..., zeta_M^(phi(M)-1) after reduction modulo the M-th
cyclotomic polynomial.  All coefficients are exact rationals; there is
no floating-point fallback anywhere in the arithmetic.  Values of
different orders are combined by coercion into Q(zeta_lcm).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

__all__ = [
    "CycloNum",
    "root_of_unity",
    "sqrt_nat",
    "euler_phi",
    "cyclotomic_polynomial",
]


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials, den monic up to leading +-1."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        coeff = num[k + len(den) - 1]
        assert coeff % lead == 0
        q = coeff // lead
        out[k] = q
        if q:
            for i, d in enumerate(den):
                num[k + i] -= q * d
    assert all(c == 0 for c in num)
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    # x^n - 1 divided by the product of Phi_d over proper divisors d | n
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(order: int) -> tuple[tuple[int, ...], ...]:
    """zeta_order^k as integer vectors in the power basis, k = 0..2*order."""
    phi = euler_phi(order)
    modulus = cyclotomic_polynomial(order)
    # Phi is monic; x^phi = -(lower part)
    top = [-c for c in modulus[:phi]]
    rows: list[tuple[int, ...]] = []
    cur = [0] * phi
    cur[0] = 1
    rows.append(tuple(cur))
    for _ in range(2 * order):
        nxt = [0] + cur[:-1]
        lead = cur[-1]
        if lead:
            for i in range(phi):
                nxt[i] += lead * top[i]
        cur = nxt
        rows.append(tuple(cur))
    return tuple(rows)


def _reduce_power(order: int, k: int) -> tuple[int, ...]:
    return _power_table(order)[k % order]


class CycloNum:
    """An exact element of Q(zeta_M)."""

    __slots__ = ("order", "coeffs")
    __hash__ = None  # values of equal worth may live at different orders

    def __init__(self, order: int, coeffs):
        phi = euler_phi(order)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != phi:
            raise ValueError(f"need {phi} coefficients for order {order}, got {len(coeffs)}")
        self.order = order
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(x) -> "CycloNum":
        return CycloNum(1, (Fraction(x),))

    @staticmethod
    def zero() -> "CycloNum":
        return CycloNum(1, (Fraction(0),))

    @staticmethod
    def one() -> "CycloNum":
        return CycloNum(1, (Fraction(1),))

    # -- coercion ------------------------------------------------------

    def to_order(self, new_order: int) -> "CycloNum":
        if new_order == self.order:
            return self
        if new_order % self.order != 0:
            raise ValueError(f"cannot coerce order {self.order} into {new_order}")
        step = new_order // self.order
        phi = euler_phi(new_order)
        out = [Fraction(0)] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                row = _reduce_power(new_order, i * step)
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return CycloNum(new_order, out)

    @staticmethod
    def _common(a: "CycloNum", b: "CycloNum"):
        m = a.order * b.order // gcd(a.order, b.order)
        return a.to_order(m), b.to_order(m), m

    @staticmethod
    def _wrap(x) -> "CycloNum":
        if isinstance(x, CycloNum):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloNum.from_rational(x)
        return NotImplemented

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        other = CycloNum._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, m = CycloNum._common(self, other)
        return CycloNum(m, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = CycloNum._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CycloNum._wrap(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycloNum(self.order, tuple(c * q for c in self.coeffs))
        if not isinstance(other, CycloNum):
            return NotImplemented
        a, b, m = CycloNum._common(self, other)
        phi = euler_phi(m)
        conv = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        conv[i + j] += x * y
        out = list(conv[:phi])
        for k in range(phi, len(conv)):
            c = conv[k]
            if c:
                row = _reduce_power(m, k)
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return CycloNum(m, out)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero cyclotomic number")
        phi = euler_phi(self.order)
        modulus = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        # extended Euclid in Q[x]: u*self + v*Phi = gcd = const
        r0, r1 = modulus, list(self.coeffs)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _poly_deg(r1) > 0:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        const = r1[_poly_deg(r1)]
        inv = [c / const for c in s1]
        inv += [Fraction(0)] * (phi - len(inv))
        return CycloNum(self.order, inv[:phi])

    def __truediv__(self, other):
        other = CycloNum._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, _ = CycloNum._common(self, other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return CycloNum._wrap(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNum.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycloNum":
        """Complex conjugation, the ring map zeta -> zeta^(-1)."""
        phi = euler_phi(self.order)
        out = [Fraction(0)] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                row = _reduce_power(self.order, (self.order - i) % self.order)
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return CycloNum(self.order, out)

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        other = CycloNum._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, _ = CycloNum._common(self, other)
        return a.coeffs == b.coeffs

    def __bool__(self):
        return not self.is_zero()

    # -- embedding and output ---------------------------------------------

    def embed(self) -> complex:
        """Complex embedding zeta_M -> exp(2*pi*i/M)."""
        z = 0j
        for i, c in enumerate(self.coeffs):
            if c:
                z += float(c) * cmath.exp(2j * cmath.pi * i / self.order)
        return z

    def to_json(self) -> dict:
        approx = self.embed()
        return {
            "order": self.order,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
            "approx": [approx.real, approx.imag],
        }

    def __repr__(self):
        if self.is_rational():
            return f"CycloNum({self.coeffs[0]})"
        return f"CycloNum(order={self.order}, coeffs={[str(c) for c in self.coeffs]})"


# -- polynomial helpers over Q (ascending coefficient lists) -------------


def _poly_deg(p: list[Fraction]) -> int:
    d = len(p) - 1
    while d > 0 and p[d] == 0:
        d -= 1
    return d


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    a = list(a)
    db = _poly_deg(b)
    lead = b[db]
    q = [Fraction(0)] * max(len(a) - db, 1)
    for k in range(_poly_deg(a) - db, -1, -1):
        c = a[k + db] / lead
        q[k] = c
        if c:
            for i in range(db + 1):
                a[k + i] -= c * b[i]
    return q, a


# -- named constructors ----------------------------------------------------


def root_of_unity(a: int, b: int) -> CycloNum:
    """The exact root of unity e(a/b) = exp(2*pi*i*a/b)."""
    if b < 1:
        raise ValueError("denominator must be positive")
    frac = Fraction(a, b) % 1
    order = frac.denominator
    phi = euler_phi(order)
    row = _reduce_power(order, frac.numerator % order)
    return CycloNum(order, tuple(Fraction(c) for c in row[:phi]))


def e_of(x) -> CycloNum:
    """e(x) for a rational x, exact."""
    x = Fraction(x)
    return root_of_unity(x.numerator, x.denominator)


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycloNum:
    """Exact square root of a prime with positive real embedding."""
    if p == 2:
        # zeta_8 + zeta_8^(-1)
        return root_of_unity(1, 8) + root_of_unity(-1, 8)
    g = CycloNum.zero()
    for k in range(p):
        g = g + root_of_unity(k * k % p, p)
    if p % 4 == 1:
        return g
    # quadratic Gauss sum equals i*sqrt(p) here
    return g * root_of_unity(-1, 4)


def sqrt_nat(n: int) -> CycloNum:
    """Exact square root of a positive integer (positive real embedding)."""
    if n < 1:
        raise ValueError("sqrt_nat needs a positive integer")
    square_part = 1
    result = CycloNum.one()
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            exp = 0
            while m % p == 0:
                m //= p
                exp += 1
            square_part *= p ** (exp // 2)
            if exp % 2:
                result = result * _sqrt_prime(p)
        p += 1
    if m > 1:
        result = result * _sqrt_prime(m)
    return result * square_part
