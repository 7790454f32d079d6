"""Derivative determinants of a stable density and their boundary behaviour.

Delta^k(z) = (-1)^{k(k-1)/2} det[(z^{j-1} f^{(j-1)}(z))^{(i-1)}] is the
Wronskian W(g_1, ..., g_k) of g_j(z) = (-1)^{j-1} z^{j-1} f^{(j-1)}(z). For
alpha < 1 and z > 0 the g_j have the convergent tail series

    g_j^{(i-1)}(z) = (-1)^{i-1}/pi sum_q (-1)^{q-1} Gamma(j + q alpha)/q!
                     prod_{r<i} (r + q alpha) sin(pi q rho alpha) z^{-q alpha - i}
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import DomainError, InvalidParams
from .specfun import Precision, log_gamma, to_mpf
from .stable import EvalConfig, StableParams, density_derivative, derivative_at_zero

__all__ = [
    "DeltaSeriesConfig",
    "delta_k",
    "delta_k_at_zero",
    "delta_k_at_zero_display",
    "tail_exponent_fit",
    "leading_coefficient_identity",
    "radial_leading_identity",
    "wronskian",
    "g_series",
    "GFunction",
]


@dataclass(frozen=True)
class DeltaSeriesConfig:
    q_max: int = 40
    digits: int = 40

    def __post_init__(self):
        if self.q_max < 5:
            raise InvalidParams("q_max must be at least 5")


def _check(p: StableParams, k: int):
    if int(k) != k or k < 1:
        raise InvalidParams("k must be a positive integer")
    if k > 5:
        raise InvalidParams("derivative determinants are provided for k <= 5")


def g_series(p: StableParams, j: int, i: int, z, cfg: DeltaSeriesConfig | None = None):
    """g_j^{(i-1)}(z) from the tail series truncated after q_max terms (alpha < 1)."""
    cfg = cfg or DeltaSeriesConfig()
    if not p.alpha < 1:
        raise DomainError("the tail series converges only for alpha < 1")
    with mp.workdps(cfg.digits + 10):
        a, r, z = to_mpf(p.alpha), to_mpf(p.rho), to_mpf(z)
        if not z > 0:
            raise DomainError("the tail series needs z > 0")
        lz = mp.log(z)
        terms = []
        for q in range(1, cfg.q_max + 1):
            s = mp.sinpi(q * r * a)
            if s == 0:
                continue
            poch = mp.fprod(rr + q * a for rr in range(1, i))
            terms.append((-1) ** (q - 1) * mp.exp(mp.loggamma(j + q * a) - mp.loggamma(q + 1)
                                                  - (q * a + i) * lz) * poch * s)
        out = (-1) ** (i - 1) * mp.fsum(terms) / mp.pi
    return out


def _series_converged(p, k, z, cfg):
    """True when the last retained tail term is negligible at z."""
    a, zf = float(p.alpha), float(z)
    q = cfg.q_max
    lead = math.lgamma(k + a) - a * math.log(zf)
    last = math.lgamma(k + q * a) - math.lgamma(q + 1) - q * a * math.log(zf)
    return last < lead - (cfg.digits + 5) * math.log(10)


def _engine_matrix(p, k, z, ecfg):
    """Entries (z^{j-1} f^{(j-1)})^{(i-1)} by Leibniz from density derivatives."""
    z = to_mpf(z)
    derivs = [density_derivative(p, m, z, ecfg) for m in range(2 * k - 1)]
    M = []
    for i in range(1, k + 1):
        row = []
        for j in range(1, k + 1):
            # (z^{j-1} f^{(j-1)})^{(i-1)} = sum_l C(i-1,l) (z^{j-1})^{(l)} f^{(j-1+i-1-l)}
            tot = mp.mpf(0)
            for l in range(0, min(i - 1, j - 1) + 1):
                zpow = mp.ff(j - 1, l) * z ** (j - 1 - l)
                tot += mp.binomial(i - 1, l) * zpow * derivs[j - 1 + i - 1 - l]
            row.append(tot)
        M.append(row)
    return M


def delta_k(p: StableParams, k: int, z, cfg: DeltaSeriesConfig | None = None,
            eval_cfg: EvalConfig | None = None):
    """Delta^k_{alpha,rho}(z) for z >= 0."""
    _check(p, k)
    cfg = cfg or DeltaSeriesConfig()
    ecfg = eval_cfg or EvalConfig.with_digits(cfg.digits)
    with mp.workdps(cfg.digits + 10):
        z = to_mpf(z)
        if z < 0:
            raise DomainError("Delta^k is defined for z >= 0")
        if z == 0:
            prec = Precision(cfg.digits)
            d0 = [derivative_at_zero(p, m, prec) for m in range(1, k + 1)]
            # lower triangular at z = 0 with diagonal (j-1)! f^{(j-1)}(0)
            det = mp.fprod(mp.factorial(j - 1) * d0[j - 1] for j in range(1, k + 1))
            return (-1) ** (k * (k - 1) // 2) * det
        if p.alpha < 1 and p.rho > 0 and _series_converged(p, k, z, cfg):
            M = mp.matrix([[g_series(p, j, i, z, cfg) for j in range(1, k + 1)] for i in range(1, k + 1)])
            return mp.det(M)
        M = mp.matrix(_engine_matrix(p, k, z, ecfg))
        return (-1) ** (k * (k - 1) // 2) * mp.det(M)


def delta_k_at_zero(p: StableParams, k: int, prec: Precision | None = None):
    """Closed form of Delta^k(0).

    The determinant is triangular at 0 with diagonal (j-1)! f^{(j-1)}(0), so
    Delta^k(0) = prod (j-1)! Gamma(1 + j/alpha) sin(pi j rho) / (pi^k k!).
    The factor prod (j-1)! equals 1 for k <= 2; see delta_k_at_zero_display.
    """
    _check(p, k)
    if not (0 < p.alpha < 2 and 0 < p.rho < 1):
        raise InvalidParams("Delta^k(0) needs alpha in (0, 2) and rho in (0, 1)")
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        out = mp.fprod(mp.factorial(j - 1) for j in range(1, k + 1)) * delta_k_at_zero_display(p, k, prec.raised(10))
    with mp.workdps(prec.digits):
        return +out


def delta_k_at_zero_display(p: StableParams, k: int, prec: Precision | None = None):
    """prod Gamma(1 + j/alpha) / (pi^k k!) * prod sin(pi j rho), without the (j-1)! factors."""
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        a, r = to_mpf(p.alpha), to_mpf(p.rho)
        g = mp.fprod(mp.exp(log_gamma(1 + j / a, prec)) for j in range(1, k + 1))
        s = mp.fprod(mp.sinpi(j * r) for j in range(1, k + 1))
        out = g / (mp.pi ** k * mp.factorial(k)) * s
    with mp.workdps(prec.digits):
        return +out


def tail_exponent_fit(p: StableParams, k: int, zgrid=None, cfg: DeltaSeriesConfig | None = None) -> float:
    """Least-squares slope of log|Delta^k| against log z, by default on [1e2, 1e4]."""
    _check(p, k)
    if not p.alpha < 1:
        raise DomainError("the tail fit is provided for alpha < 1")
    a, r = float(p.alpha), float(p.rho)
    for q in range(1, k + 1):
        if abs(math.sin(math.pi * q * r * a)) < 1e-12:
            raise DomainError("a sine factor of the leading coefficient vanishes")
    zgrid = np.geomspace(1e2, 1e4, 9) if zgrid is None else np.asarray(zgrid, float)
    vals = [abs(delta_k(p, k, float(z), cfg)) for z in zgrid]
    if any(v == 0 for v in vals):
        raise DomainError("Delta^k vanishes on the fit grid")
    ly = np.array([float(mp.log(v)) for v in vals])
    slope = np.polyfit(np.log(zgrid), ly, 1)[0]
    return float(slope)


def _identity(alpha, k, radial: bool, digits: int = 40):
    if int(k) != k or not 1 <= k <= 4:
        raise InvalidParams("the enumeration is provided for 1 <= k <= 4")
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    with mp.workdps(digits + 10):
        a = to_mpf(alpha)
        lhs = mp.mpf(0)
        for sigma in itertools.permutations(range(1, k + 1)):
            M = mp.matrix(k, k)
            for i in range(1, k + 1):
                q = sigma[i - 1]
                c = mp.fprod(r + q * a for r in range(1, i))
                if radial:
                    c *= mp.gamma(1 + q * a)
                for j in range(1, k + 1):
                    M[i - 1, j - 1] = mp.gamma(j + q * a) * c
            lhs += mp.det(M)
        prod = mp.fprod(mp.factorial(j - 1) ** 2 * mp.gamma(1 + a * j) for j in range(1, k + 1))
        if radial:
            prod = mp.fprod(mp.factorial(j - 1) * mp.gamma(1 + a * j) for j in range(1, k + 1)) ** 2
        rhs = a ** (k * (k - 1)) * prod
    return lhs, rhs


def leading_coefficient_identity(alpha, k: int):
    """(sum over S_k of det[Gamma(j + s(i) a) prod_{r<i}(r + s(i) a)], a^{k(k-1)} prod ((j-1)!)^2 Gamma(1 + a j))."""
    return _identity(alpha, k, False)


def radial_leading_identity(alpha, k: int):
    """Same enumeration with an extra Gamma(1 + s(i) a) per row; rhs a^{k(k-1)} (prod (j-1)! Gamma(1 + a j))^2."""
    return _identity(alpha, k, True)


class GFunction:
    """g_j(z) = (-1)^{j-1} z^{j-1} f^{(j-1)}(z) with series derivatives (alpha < 1)."""

    def __init__(self, p: StableParams, j: int, cfg: DeltaSeriesConfig | None = None):
        self.p, self.j, self.cfg = p, j, cfg or DeltaSeriesConfig()

    def __call__(self, z):
        return self.derivative(z, 0)

    def derivative(self, z, n: int):
        return g_series(self.p, self.j, n + 1, z, self.cfg)


def wronskian(fs, z, digits: int = 30):
    """det[f_j^{(i-1)}(z)].

    Functions exposing ``derivative(z, n)`` are differentiated with it; plain
    callables are differentiated by central differences with a step matched
    to ``digits`` (the callable is assumed accurate to about that many
    digits), so their entries lose roughly a factor i + 2 in digits.
    """
    k = len(fs)
    with mp.workdps(digits + 20):
        z = to_mpf(z)
        M = mp.matrix(k, k)
        for j, f in enumerate(fs):
            der = getattr(f, "derivative", None)
            for i in range(k):
                if callable(der):
                    M[i, j] = der(z, i)
                elif i == 0:
                    M[i, j] = f(z)
                else:
                    h = mp.mpf(10) ** (-mp.mpf(digits) / (i + 2)) * max(1, abs(z))
                    M[i, j] = mp.diff(f, z, i, h=h)
        out = mp.det(M)
    with mp.workdps(digits):
        return +out
