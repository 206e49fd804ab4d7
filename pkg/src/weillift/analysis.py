"""Floating-point verification of the analytic identities behind the
lift: tube-domain metric and weight-kappa Laplacian, half-integer Bessel
sums, the Laplace-transform integral, and Siegel-domain inequalities."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "TubePoint",
    "SiegelPoint",
    "hermitian_metric",
    "laplace_kappa",
    "laplace_kappa_richardson",
    "k_bessel_half",
    "bessel_sum_identity_check",
    "laplace_integral_check",
    "siegel_domain_check",
    "siegel_epsilon_estimate",
    "cone_norm",
]


def cone_norm(y) -> float:
    """q(Y) = y_1^2 - y_2^2 - ... - y_l^2 in the diagonalized basis."""
    y = np.asarray(y, dtype=float)
    return float(y[0] ** 2 - np.sum(y[1:] ** 2))


@dataclass
class TubePoint:
    """A point X + iY of the tube domain over the positive cone."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("X and Y must be real vectors of equal length")
        if self.y[0] <= 0 or cone_norm(self.y) <= 0:
            raise ValueError("Y must lie in the positive cone (y_1 > 0, q(Y) > 0)")

    @property
    def dim(self) -> int:
        return len(self.y)

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y


def hermitian_metric(y, l: int | None = None):
    """Metric h, its inverse and det(h) on the tube domain at Y.

    h = (w w^T) / q(Y)^2 + J / (2 q(Y)) with w = (-y_1, y_2, ..., y_l)
    and J = diag(-1, 1, ..., 1); the inverse is 4 Y Y^T + 2 q(Y) J.
    """
    y = np.asarray(y, dtype=float)
    if l is not None and len(y) != l:
        raise ValueError("Y has wrong length")
    l = len(y)
    q = cone_norm(y)
    if y[0] <= 0 or q <= 0:
        raise ValueError("Y must lie in the positive cone")
    j = np.diag([-1.0] + [1.0] * (l - 1))
    w = y.copy()
    w[0] = -w[0]
    h = np.outer(w, w) / q**2 + j / (2 * q)
    h_inv = 4 * np.outer(y, y) + 2 * q * j
    return h, h_inv, float(np.linalg.det(h))


# -- the weight-kappa Laplacian by central finite differences ------------------


def _second_partial(f, z0, u: int, v: int, step: float) -> complex:
    """d^2 f / dr_u dr_v where r = (x_1..x_l, y_1..y_l) are the real coords."""
    l = len(z0) // 2

    def at(du, dv):
        r = np.array(z0, dtype=float)
        r[u] += du
        r[v] += dv
        return f(r[:l] + 1j * r[l:])

    if u == v:
        return (at(step, 0) - 2 * at(0, 0) + at(-step, 0)) / step**2
    return (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) / (4 * step**2)


def _first_partial(f, z0, u: int, step: float) -> complex:
    l = len(z0) // 2

    def at(du):
        r = np.array(z0, dtype=float)
        r[u] += du
        return f(r[:l] + 1j * r[l:])

    return (at(step) - at(-step)) / (2 * step)


def laplace_kappa(f, point: TubePoint, kappa: int, step: float = 1e-3) -> complex:
    """Weight-kappa Laplacian of f at the point, by central differences.

    Implements 2 sum_ij y_i y_j d2f/dz_j dzbar_i
    - q(Y) (d2f/dz_1 dzbar_1 - sum_{i>1} d2f/dz_i dzbar_i)
    - i kappa sum_i y_i df/dzbar_i,
    with the Wirtinger derivatives expanded in real coordinates.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    l = point.dim
    y = point.y
    q = cone_norm(y)
    r0 = np.concatenate([point.x, point.y])

    # cache of mixed second partials over real coordinates
    second: dict = {}

    def d2(u, v):
        key = (min(u, v), max(u, v))
        if key not in second:
            val = _second_partial(f, r0, key[0], key[1], step)
            if not np.isfinite(val.real) or not np.isfinite(val.imag):
                raise ValueError("non-finite sample in finite differences")
            second[key] = val
        return second[key]

    def dz_dzbar(j, i):
        # d^2/dz_j dzbar_i = 1/4 (d_xj d_xi + d_yj d_yi + i (d_xj d_yi - d_yj d_xi))
        return 0.25 * (
            d2(j, i) + d2(l + j, l + i) + 1j * (d2(j, l + i) - d2(l + j, i))
        )

    def dzbar(i):
        return 0.5 * (_first_partial(f, r0, i, step) + 1j * _first_partial(f, r0, l + i, step))

    total = 0j
    for i in range(l):
        for j in range(l):
            total += 2 * y[i] * y[j] * dz_dzbar(j, i)
    diag = dz_dzbar(0, 0) - sum(dz_dzbar(i, i) for i in range(1, l))
    total -= q * diag
    total -= 1j * kappa * sum(y[i] * dzbar(i) for i in range(l))
    return total


def laplace_kappa_richardson(f, point: TubePoint, kappa: int, step: float = 1e-3) -> complex:
    """Richardson extrapolation of laplace_kappa over step and step/2."""
    a1 = laplace_kappa(f, point, kappa, step)
    a2 = laplace_kappa(f, point, kappa, step / 2)
    return (4 * a2 - a1) / 3


# -- Bessel functions of half-integer order -------------------------------------


def k_bessel_half(n: int, z: float) -> float:
    """K_{n + 1/2}(z) in closed form; callers map K_{-v} = K_v first.

    K_{n+1/2}(z) = sqrt(pi / 2z) e^{-z} sum_{m=0}^{n} (2z)^{-m} (n+m)! / (m! (n-m)!)
    """
    if z <= 0:
        raise ValueError("argument must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative (use the K_{-v} = K_v symmetry)")
    acc = 0.0
    for m in range(n + 1):
        acc += (2 * z) ** (-m) * math.factorial(n + m) / (math.factorial(m) * math.factorial(n - m))
    return math.sqrt(math.pi / (2 * z)) * math.exp(-z) * acc


def _k_half_by_index(idx: int, z: float) -> float:
    """K_{idx - 1/2}(z) for integer idx, via the K_{-v} = K_v symmetry."""
    n = idx - 1 if idx >= 1 else -idx
    return k_bessel_half(n, z)


def bessel_sum_identity_check(kappa: int, y: float):
    """Finite double Bessel sum against 2^(kappa-1) y^(-1/2) e^(-2 pi y).

    Returns (lhs, rhs, abs_err); the right side is 0 for y < 0.
    """
    if y == 0:
        raise ValueError("y must be nonzero")
    ay = abs(y)
    sign = 1.0 if y > 0 else -1.0
    lhs = 0.0
    for h in range(kappa + 1):
        for j in range((kappa - h) // 2 + 1):
            coeff = (
                (-1) ** j
                / ((4 * math.pi * ay) ** j * math.factorial(j))
                * math.comb(kappa, h)
                * math.factorial(kappa - h)
                / math.factorial(kappa - h - 2 * j)
            )
            lhs += coeff * sign ** (kappa - h) * _k_half_by_index(kappa - h - j, 2 * math.pi * ay)
    rhs = 2.0 ** (kappa - 1) * y ** (-0.5) * math.exp(-2 * math.pi * y) if y > 0 else 0.0
    return lhs, rhs, abs(lhs - rhs)


def laplace_integral_check(alpha: float, beta: float, gamma: float):
    """Quadrature vs closed form for int_0^inf exp(-a v - b / v) v^g dv.

    The closed form is 2 (b/a)^((g+1)/2) K_{g+1}(2 sqrt(a b)); quadrature
    runs over u = log v where the integrand decays doubly exponentially.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")

    def integrand(u):
        return math.exp(-alpha * math.exp(u) - beta * math.exp(-u) + (gamma + 1) * u)

    center = 0.5 * math.log(beta / alpha)
    width = 1.0
    peak = integrand(center)
    while integrand(center - width) > peak * 1e-18 or integrand(center + width) > peak * 1e-18:
        width *= 1.5
        if width > 1e4:  # pragma: no cover
            raise RuntimeError("quadrature window failed to close")
    quadrature, est_err = integrate.quad(
        integrand, center - width, center + width, epsabs=1e-14, epsrel=1e-12, limit=200
    )
    if est_err > 1e-8 * max(1.0, abs(quadrature)):  # pragma: no cover
        raise RuntimeError("quadrature did not converge")
    order = gamma + 1
    x = 2 * math.sqrt(alpha * beta)
    doubled = 2 * order
    if abs(doubled - round(doubled)) < 1e-12 and round(doubled) % 2 != 0:
        n = int(round(abs(order) - 0.5))
        k_val = k_bessel_half(n, x)
    else:
        k_val = float(special.kv(order, x))
    closed = 2 * (beta / alpha) ** (order / 2) * k_val
    rel_err = abs(quadrature - closed) / abs(closed)
    return quadrature, closed, rel_err


# -- Siegel domains ---------------------------------------------------------------


@dataclass
class SiegelPoint:
    """Tube-domain point in coordinates split along a second cusp.

    Coordinates are (z_1, z_2, Z_D) with q(Y) = y_1 y_2 + q_D(Y_D); the
    D block is negative definite with Gram matrix d_gram.
    """

    x1: float
    x2: float
    x_d: np.ndarray
    y1: float
    y2: float
    y_d: np.ndarray
    d_gram: np.ndarray

    def __post_init__(self):
        self.x_d = np.asarray(self.x_d, dtype=float)
        self.y_d = np.asarray(self.y_d, dtype=float)
        self.d_gram = np.asarray(self.d_gram, dtype=float)

    def q_d(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if len(v) == 0:
            return 0.0
        return float(v @ self.d_gram @ v) / 2.0

    def q_y(self) -> float:
        return self.y1 * self.y2 + self.q_d(self.y_d)


def siegel_domain_check(point: SiegelPoint, t: float) -> bool:
    """The four Siegel-domain inequalities, verbatim."""
    if t <= 0:
        raise ValueError("t must be positive")
    if point.x1**2 + point.x2**2 + abs(point.q_d(point.x_d)) >= t**2:
        return False
    if not (1.0 / t < point.y1):
        return False
    if not (point.y1**2 < t**2 * point.q_y()):
        return False
    if not (abs(point.q_d(point.y_d)) < t**2 * point.y1**2):
        return False
    return True


def _r_t_sample(rng: random.Random, t: float, d_gram: np.ndarray):
    """One Y = (y1, y2, Y_D) from the truncated cone region R_t."""
    dim_d = len(d_gram)
    while True:
        y1 = math.exp(rng.uniform(math.log(1.0 / t) + 1e-9, math.log(10.0 * t)))
        y_d = np.array([rng.uniform(-1.0, 1.0) for _ in range(dim_d)])
        if dim_d:
            qd = float(y_d @ d_gram @ y_d) / 2.0
            if abs(qd) >= t**2 * y1**2:
                continue
        else:
            qd = 0.0
        lower = max((y1**2 / t**2 - qd) / y1, 0.0)
        y2 = lower + math.exp(rng.uniform(math.log(1e-2), math.log(10.0)))
        if y1**2 < t**2 * (y1 * y2 + qd) and abs(qd) < t**2 * y1**2:
            return y1, y2, y_d


def siegel_epsilon_estimate(k_gram, t: float, samples: int, seed: int = 0):
    """Empirical witness for the Siegel-domain pairing inequality.

    Samples dual vectors lambda (coefficient box of radius 5) against
    points Y of R_t and returns the running minimum of
    ((lambda,Y)^2/Y^2 - q(lambda)) * Y^2 / (y2^2 l1^2/2 + y1^2 l2^2/2 + Y^2 |l_D|^2)
    together with the sample achieving it.  |l_D|^2 denotes |2 q_D(l_D)|.
    """
    gram = np.asarray(k_gram, dtype=float)
    n = len(gram)
    if n < 2 or gram[0][0] != 0 or gram[1][1] != 0 or gram[0][1] != 1 or gram[1][0] != 1:
        raise ValueError("K gram must start with a hyperbolic block [[0,1],[1,0]]")
    d_gram = gram[2:, 2:]
    if n > 2:
        eigs = np.linalg.eigvalsh(d_gram)
        if eigs.max() >= 0:
            raise ValueError("the D block of K must be negative definite")
    gram_inv = np.linalg.inv(gram)
    rng = random.Random(seed)
    eps_hat = math.inf
    witness = None
    produced = 0
    while produced < samples:
        coeffs = [rng.randint(-5, 5) for _ in range(n)]
        if not any(coeffs):
            continue
        lam = gram_inv @ np.array(coeffs, dtype=float)
        y1, y2, y_d = _r_t_sample(rng, t, d_gram)
        y_sq = 2 * (y1 * y2 + (float(y_d @ d_gram @ y_d) / 2.0 if n > 2 else 0.0))
        lam1, lam2, lam_d = lam[0], lam[1], lam[2:]
        q_lam = float(lam @ gram @ lam) / 2.0
        q_lam_d = float(lam_d @ d_gram @ lam_d) / 2.0 if n > 2 else 0.0
        pairing = lam1 * y2 + lam2 * y1 + (float(lam_d @ d_gram @ y_d) if n > 2 else 0.0)
        num = pairing**2 / y_sq - q_lam
        den = (y2**2 * lam1**2 / 2 + y1**2 * lam2**2 / 2 + y_sq * abs(2 * q_lam_d)) / y_sq
        if den == 0:
            continue
        ratio = num / den
        produced += 1
        if ratio < eps_hat:
            eps_hat = ratio
            witness = {"lambda_coeffs": coeffs, "y": [y1, y2, *map(float, y_d)], "ratio": ratio}
    if witness is None:
        raise ValueError("no valid samples produced")
    return eps_hat, witness
