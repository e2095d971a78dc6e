"""Complete/incomplete elliptic integrals and Jacobi elliptic functions.

Everything here is parametrised by the modulus ``p`` (not the parameter
``m = p**2``) and keeps the complementary parameter ``1 - p**2`` as a separate,
independently accurate number.  Near ``p = 1`` the complementary parameter is
the only meaningful quantity and recomputing it as ``1 - p*p`` would destroy it.

Algorithms
----------
* ``K(p)``: arithmetic-geometric mean, ``K = pi / (2 AGM(1, p'))``.
* ``E(p)`` and ``F(lambda, p)``: Carlson symmetric integrals R_F and R_D
  (duplication algorithm), accurate uniformly in ``p``.
* ``sn, cn, dn``: AGM descent (descending Landen sequence) on a
  quarter-period-reduced argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError

__all__ = [
    "Modulus",
    "JacobiTriple",
    "agm",
    "carlson_rf",
    "carlson_rd",
    "complete_K",
    "complete_E",
    "incomplete_F",
    "jacobi",
]

_LN4 = math.log(4.0)


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus ``p`` with its complementary parameter ``1 - p**2``.

    ``log_p_bar_sq`` is only needed when ``p_bar_sq`` underflows double
    precision (the zero-temperature end of a temperature scan); it is ``None``
    otherwise.
    """

    p: float
    p_bar_sq: float
    log_p_bar_sq: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"modulus p={self.p!r} outside [0, 1]")
        if not (0.0 <= self.p_bar_sq <= 1.0):
            raise DomainError(f"complementary parameter {self.p_bar_sq!r} outside [0, 1]")

    @classmethod
    def from_p(cls, p: float) -> "Modulus":
        p = float(p)
        return cls(p, (1.0 - p) * (1.0 + p))

    @classmethod
    def from_q(cls, q: float, p_bar_sq: float | None = None) -> "Modulus":
        """Build from the parameter ``q = p**2`` (optionally with an exact ``1 - q``)."""
        q = float(q)
        if p_bar_sq is None:
            p_bar_sq = 1.0 - q
        return cls(math.sqrt(q), float(p_bar_sq))

    @property
    def q(self) -> float:
        return self.p * self.p

    @property
    def p_bar(self) -> float:
        return math.sqrt(self.p_bar_sq)


class JacobiTriple(NamedTuple):
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def agm(a: float, b: float, tol: float = 1e-16) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    if a < 0 or b < 0:
        raise DomainError("AGM needs non-negative arguments")
    if a == 0.0 or b == 0.0:
        return 0.0
    for _ in range(64):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero."""
    if min(x, y, z) < 0 or (x + y == 0) or (y + z == 0) or (x + z == 0):
        raise DomainError("R_F needs non-negative arguments, at most one zero")
    for _ in range(200):
        mu = (x + y + z) / 3.0
        dx, dy, dz = 1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    # Truncation error ~ 0.2 * (1e-4)**6 relative.
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(mu)


def carlson_rd(x: float, y: float, z: float) -> float:
    """Carlson's degenerate integral R_D(x, y, z) = R_J(x, y, z, z)."""
    if min(x, y) < 0 or x + y == 0 or z <= 0:
        raise DomainError("R_D needs x, y >= 0 (not both zero) and z > 0")
    total = 0.0
    fac = 1.0
    for _ in range(200):
        mu = (x + y + 3.0 * z) / 5.0
        dx, dy, dz = 1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        total += fac / (sz * (z + lam))
        fac *= 0.25
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    ea = dx * dy
    eb = dz * dz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    series = (
        1.0
        + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
        + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea))
    )
    return 3.0 * total + fac * series / (mu * math.sqrt(mu))


def complete_K(m: Modulus) -> float:
    """Complete elliptic integral of the first kind K(p), by AGM."""
    if m.p_bar_sq == 0.0:
        if m.log_p_bar_sq is not None:
            # K = ln(4/p') + O(p'^2 ln p'); the correction is below 1e-300 here.
            return _LN4 - 0.5 * m.log_p_bar_sq
        raise DivergenceError("K(p) diverges at p = 1")
    return math.pi / (2.0 * agm(1.0, m.p_bar))


def complete_E(m: Modulus) -> float:
    """Complete elliptic integral of the second kind E(p)."""
    if m.p_bar_sq == 0.0:
        return 1.0
    if m.p == 0.0:
        return 0.5 * math.pi
    return carlson_rf(0.0, m.p_bar_sq, 1.0) - m.q / 3.0 * carlson_rd(0.0, m.p_bar_sq, 1.0)


def k_minus_e_over_q(m: Modulus) -> float:
    """(K - E) / p**2, finite at p = 0 (value pi/4) and free of cancellation there."""
    if m.p_bar_sq == 0.0:
        raise DivergenceError("(K - E)/p^2 diverges at p = 1")
    return carlson_rd(0.0, m.p_bar_sq, 1.0) / 3.0


def incomplete_F(lam: float, m: Modulus) -> float:
    """Incomplete elliptic integral of the first kind F(lambda, p), lambda in [0, pi/2]."""
    if not (0.0 <= lam <= 0.5 * math.pi + 1e-15):
        raise DomainError(f"amplitude {lam!r} outside [0, pi/2]")
    lam = min(lam, 0.5 * math.pi)
    if lam == 0.0:
        return 0.0
    s, c = math.sin(lam), math.cos(lam)
    if lam == 0.5 * math.pi:
        return complete_K(m)
    y = 1.0 - m.q * s * s
    if m.p_bar_sq < 0.5:
        # 1 - p^2 sin^2 = p'^2 + p^2 cos^2, no cancellation near p = 1
        y = m.p_bar_sq + m.q * c * c
    return s * carlson_rf(c * c, y, 1.0)


def _agm_descent(u: np.ndarray, m: Modulus) -> tuple[np.ndarray, np.ndarray]:
    """sn, cn for u in [0, K/2] by descending Landen (AGM) transformation."""
    a = [1.0]
    c = [m.p]
    b = m.p_bar
    while c[-1] > 1e-17 * a[-1] and len(a) < 40:
        a_next = 0.5 * (a[-1] + b)
        c_next = c[-1] * c[-1] / (4.0 * a_next)
        b = math.sqrt(a[-1] * b)
        a.append(a_next)
        c.append(c_next)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[k] / a[k] * np.sin(phi)))
    return np.sin(phi), np.cos(phi)


def jacobi(u, m: Modulus) -> JacobiTriple:
    """Jacobi elliptic functions sn, cn, dn at real argument(s) ``u``.

    Scalars in give floats out; arrays in give arrays out.
    """
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if m.p == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif m.p_bar_sq == 0.0:
        sech = 1.0 / np.cosh(u)
        sn, cn, dn = np.tanh(u), sech, sech
    else:
        sn, cn, dn = _jacobi_general(u, m)
    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)


def _jacobi_general(u: np.ndarray, m: Modulus):
    K = complete_K(m)
    r = np.mod(u, 4.0 * K)
    sgn_s = np.ones_like(r)
    sgn_c = np.ones_like(r)
    # sn(u + 2K) = -sn u, cn(u + 2K) = -cn u, dn(u + 2K) = dn u
    upper = r >= 2.0 * K
    r = np.where(upper, r - 2.0 * K, r)
    sgn_s = np.where(upper, -sgn_s, sgn_s)
    sgn_c = np.where(upper, -sgn_c, sgn_c)
    # sn(2K - v) = sn v, cn(2K - v) = -cn v
    second = r > K
    r = np.where(second, 2.0 * K - r, r)
    sgn_c = np.where(second, -sgn_c, sgn_c)
    # r in [0, K]; on (K/2, K] reflect through the quarter period so that cn and
    # dn keep full relative accuracy as they become small near p = 1.
    near = r > 0.5 * K
    v = np.where(near, K - r, r)
    s_v, c_v = _agm_descent(v, m)
    # dn^2 = 1 - q sn^2 = p'^2 + q cn^2; use whichever form does not cancel
    qs2 = m.q * s_v * s_v
    d_v = np.sqrt(np.where(qs2 < 0.5, 1.0 - qs2, m.p_bar_sq + m.q * c_v * c_v))
    p_bar = m.p_bar
    sn = np.where(near, c_v / d_v, s_v)
    cn = np.where(near, p_bar * s_v / d_v, c_v)
    dn = np.where(near, p_bar / d_v, d_v)
    return sgn_s * sn, sgn_c * cn, dn
