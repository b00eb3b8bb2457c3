"""Density estimators at a point and at the origin, plus tuning rules.

The estimator is the sample mean of an observation kernel L over the data.
Tuning: closed-form bandwidth and shift rules for the three regularity
regimes (smooth errors, moment-bounded targets, supersmooth errors) and for
the origin.  expected_estimate integrates the target-side kernel against a
density and serves as the bias oracle in tests.
"""

import dataclasses
import math
import warnings

import numpy as np
from scipy import integrate

from .errors import (
    BandwidthTooLarge,
    DomainError,
    EmptySample,
    NonConvergence,
    SupportWarning,
)
from .kernels import build_exp_zero_kernel, build_gaussian_jackknife_kernel


@dataclasses.dataclass(frozen=True)
class AtPoint:
    """Estimation target x0 > 0."""

    x0: float

    def __post_init__(self):
        if not float(self.x0) > 0.0:
            raise DomainError("estimation point x0 must be positive")


@dataclasses.dataclass(frozen=True)
class AtZero:
    """Estimation target at the origin."""


@dataclasses.dataclass(frozen=True)
class SmoothRule:
    A: float
    beta: float
    gamma: float


@dataclasses.dataclass(frozen=True)
class MomentRule:
    A: float
    beta: float
    gamma: float
    alpha: float
    M: float
    b: float
    eps: float = 0.01


@dataclasses.dataclass(frozen=True)
class SuperSmoothRule:
    A: float
    beta: float
    gamma: float
    lam: float


@dataclasses.dataclass(frozen=True)
class ZeroRule:
    A: float
    beta: float
    M: float
    p: float
    q: float


@dataclasses.dataclass(frozen=True)
class HolderClassSpec:
    """Smoothness class parameters: local Holder constant A and exponent
    beta on a log-neighborhood of ratio r, with M a sup or moment bound."""

    A: float
    beta: float
    r: float = math.e
    M: float = 0.0

    def __post_init__(self):
        if not (self.A > 0.0 and self.beta > 0.0):
            raise ValueError("A and beta must be positive")
        if not self.r > 1.0:
            raise ValueError("neighborhood ratio r must exceed 1")
        if self.M < 0.0:
            raise ValueError("M must be nonnegative")


@dataclasses.dataclass(frozen=True)
class EstimatorConfig:
    """Target, shift s, bandwidth h, the observation kernel, and a note on
    how (s, h) were chosen."""

    target: object
    s: float
    h: float
    lkernel: object
    provenance: object = "manual"

    def __post_init__(self):
        if not float(self.h) > 0.0:
            raise ValueError("bandwidth h must be positive")
        lk = self.lkernel
        if lk is not None and not lk.params.get("s_free"):
            if abs(float(self.s) - lk.s) > 1e-12:
                raise ValueError("config s does not match the kernel's s")


def _sample_array(sample):
    y = np.atleast_1d(np.asarray(sample, dtype=float))
    if y.size == 0:
        raise EmptySample("cannot estimate from an empty sample")
    return y


def estimate_at_point(sample, config):
    """Mean of L(x0, Y_j) over the sample.

    Summation is compensated (exact rounding of the true sum), so the result
    does not depend on sample order or on how a caller partitions the work.
    """
    if not isinstance(config.target, AtPoint):
        raise DomainError("config targets the origin; use estimate_at_zero")
    y = _sample_array(sample)
    bad = int(np.count_nonzero(y <= 0.0))
    if bad:
        warnings.warn(f"{bad} observation(s) outside the reachable support "
                      "contribute zero", SupportWarning, stacklevel=2)
    vals = config.lkernel.evaluate(config.target.x0, y)
    return math.fsum(vals) / y.size


def estimate_at_zero(sample, config):
    """Mean of L(Y_j) over the sample for the origin target."""
    if not isinstance(config.target, AtZero):
        raise DomainError("config targets a point; use estimate_at_point")
    y = _sample_array(sample)
    bad = int(np.count_nonzero(y < 0.0))
    if bad:
        warnings.warn(f"{bad} negative observation(s) contribute zero",
                      SupportWarning, stacklevel=2)
    vals = config.lkernel.evaluate0(y)
    return math.fsum(vals) / y.size


# ---------------------------------------------------------------------------
# tuning rules


def bandwidth_smooth(A, beta, x0, n, gamma=1.0, r=None):
    """h* = [A^2 x0^2 (x0^beta + 1)^2 n]^(-1/(2 beta + 2 gamma + 1)).

    gamma is the polynomial transform-decay exponent of the error model.
    Warns (BandwidthTooLarge) when h* reaches the regime where the risk
    bound's side condition h* < min(ln r, 1) fails.
    """
    A, beta, x0, n = float(A), float(beta), float(x0), float(n)
    if min(A, beta, x0, n) <= 0.0:
        raise ValueError("all rule parameters must be positive")
    h = (A * A * x0 * x0 * (x0 ** beta + 1.0) ** 2 * n) \
        ** (-1.0 / (2.0 * beta + 2.0 * gamma + 1.0))
    cap = 1.0 if r is None else min(math.log(r), 1.0)
    if h >= cap:
        warnings.warn(f"h*={h:.4g} violates the side condition h* < {cap:.4g}",
                      BandwidthTooLarge, stacklevel=2)
    return h


def s_star_moment(alpha, b, eps=0.01):
    """s* = max(-alpha, (1 - b)/2 + eps) for moment-bounded targets.

    b is the upper strip edge of the error model (may be inf); eps is the
    arbitrarily-small line offset, exposed because no canonical value exists.
    """
    if not float(alpha) > 0.0:
        raise ValueError("alpha must be positive")
    if not float(eps) > 0.0:
        raise ValueError("eps must be positive")
    return max(-float(alpha), 0.5 * (1.0 - float(b)) + float(eps))


def bandwidth_moment(A, beta, gamma, alpha, M, b, x0, n, eps=0.01, C5=1.0):
    """Companion bandwidth to s_star_moment:
    h* = C5 [M^-1 A^2 x0^(2-2s*) (x0^beta + 1)^2 n]^(-1/(2 beta + 2 gamma + 1)).
    """
    s = s_star_moment(alpha, b, eps)
    if not float(M) > 0.0:
        raise ValueError("moment bound M must be positive")
    base = (A * A / M) * float(x0) ** (2.0 - 2.0 * s) \
        * (float(x0) ** beta + 1.0) ** 2 * n
    return C5 * base ** (-1.0 / (2.0 * beta + 2.0 * gamma + 1.0))


def bandwidth_supersmooth(A, beta, gamma, lam, x0, n, C1=1.0):
    """h* = C1 gamma [ln(A^2 x0^(2 beta + 2) n)]^(-1 + 1/(2 lam)) for
    exponentially decaying error transforms."""
    arg = float(A) ** 2 * float(x0) ** (2.0 * beta + 2.0) * float(n)
    if arg <= math.e:
        raise DomainError("A^2 x0^(2 beta + 2) n must exceed e")
    return C1 * gamma * math.log(arg) ** (-1.0 + 1.0 / (2.0 * lam))


def bandwidth_zero(A, beta, M, p, q, n):
    """Origin rule: returns (s*, h*, kappa) with s* = (1 - p)/2,
    kappa = 1 when p = 0 (else 0), and
    h* = [M A^-2 (ln n)^(q + kappa) / n]^(1/(2 beta + 1 + p))."""
    p, q = float(p), float(q)
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    if n < 3:
        raise ValueError("n must be at least 3")
    kappa = 1.0 if p == 0.0 else 0.0
    s = 0.5 * (1.0 - p)
    h = (float(M) / float(A) ** 2 * math.log(n) ** (q + kappa) / n) \
        ** (1.0 / (2.0 * beta + 1.0 + p))
    return s, h, kappa


# ---------------------------------------------------------------------------
# bias oracle


def _target_kernel(lk):
    if lk.kernel is not None:
        return lk.kernel
    if lk.kind == "closed_beta":
        return build_gaussian_jackknife_kernel(lk.params["m"])
    if lk.kind == "closed_beta_zero":
        return build_exp_zero_kernel(lk.params["m"])
    raise DomainError("kernel reference unavailable for this L-kernel")


def expected_estimate(config, f_X):
    """E[estimate] = integral of the target-side kernel against f_X.

    At a point: int K(u) e^(u h) f_X(x0 e^(u h)) du.  At the origin:
    int K_s(v) f_X(v h) dv.  Pure quadrature; raises NonConvergence when the
    reported error is not tiny relative to the value.
    """
    K = _target_kernel(config.lkernel)
    h = config.h
    if isinstance(config.target, AtPoint):
        x0 = config.target.x0
        lo, hi = K.support
        if not math.isfinite(lo):
            span = 30.0 * (K.m + 1) * (1.0 + h)
            lo, hi = -span, span

        def f(u):
            return K.evaluate(u) * math.exp(u * h) * f_X(x0 * math.exp(u * h))

        val, err = integrate.quad(f, lo, hi, limit=600)
    else:
        span = 50.0 * (K.m + 1) * max(1.0, 1.0 / (config.s + 0.5)) \
            if K.params.get("base") != "gauss" else (K.m + 1) * math.e ** 10

        def f(v):
            return K.evaluate(v) * f_X(v * h)

        val, err = integrate.quad(f, 0.0, span, limit=600,
                                  points=(h, 1.0, min(10.0, span / 2)))
    if err > 1e-7 * max(1.0, abs(val)):
        raise NonConvergence(f"bias quadrature error {err:.2e} too large")
    return val
