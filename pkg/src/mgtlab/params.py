"""Structural constants, regime classification, and stability numbers.

The third-order equation

    u''' + alpha*u'' + beta*A u' + gamma*A u - (g * A u')(t) = 0

is governed by three positive constants (alpha, beta, gamma).  Their
relation to the product alpha*beta splits the memoryless dynamics into
subcritical (exponentially stable), critical (marginally stable) and
supercritical (exponentially unstable) regimes.  For exponential kernels
g(s) = rho*delta*exp(-delta*s) the fourth-order reduction carries two
scalar stability numbers kappa and varpi; growth is predicted whenever
varpi < -lambda1*kappa, with lambda1 the smallest eigenvalue of A in play.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import MassRestrictionViolated, NotSubcritical


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class MgtParams:
    """The structural constants of the equation.

    All three must be strictly positive.  Whether the structural
    constraint gamma <= alpha*beta holds is recorded at construction;
    operations that need it check :attr:`structural_ok`.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    @property
    def structural_ok(self) -> bool:
        """True when gamma <= alpha*beta (exact comparison on stored values)."""
        return self.gamma <= self.alpha * self.beta


@dataclass(frozen=True)
class StabilityReport:
    """Stability numbers of the fourth-order reduction at one eigenvalue.

    ``blowup_predicted`` is the comparison varpi < -lambda1*kappa.
    """

    kappa: float
    varpi: float
    lambda1: float
    threshold: float
    blowup_predicted: bool


def classify_regime(params: MgtParams, rel_tol: float = 0.0) -> Regime:
    """Classify gamma against alpha*beta.

    The default is the exact trichotomy on the stored floating-point
    values.  For constants produced by upstream computation pass a small
    relative tolerance (1e-12 is the documented choice): values with
    |gamma - alpha*beta| <= rel_tol*max(gamma, alpha*beta) classify as
    critical.
    """
    product = params.alpha * params.beta
    if rel_tol > 0.0 and abs(params.gamma - product) <= rel_tol * max(params.gamma, product):
        return Regime.CRITICAL
    if params.gamma < product:
        return Regime.SUBCRITICAL
    if params.gamma == product:
        return Regime.CRITICAL
    return Regime.SUPERCRITICAL


def stability_numbers(params: MgtParams, rho: float, delta: float,
                      lambda1: float) -> StabilityReport:
    """Evaluate kappa and varpi for the exponential kernel (rho, delta).

    kappa = (alpha*beta - gamma + rho*delta) / (alpha + delta)
    varpi = (alpha*beta - gamma - alpha*rho) * delta**2 / (gamma + delta*beta - rho*delta)

    Requires rho < beta so that gamma + delta*beta - rho*delta > 0.
    """
    if rho >= params.beta:
        raise MassRestrictionViolated(
            f"stability numbers need rho < beta, got rho={rho}, beta={params.beta}")
    if rho <= 0 or delta <= 0 or lambda1 <= 0:
        raise ValueError("rho, delta and lambda1 must be positive")
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    kappa = (alpha * beta - gamma + rho * delta) / (alpha + delta)
    varpi = ((alpha * beta - gamma - alpha * rho) * delta ** 2
             / (gamma + delta * beta - rho * delta))
    threshold = -lambda1 * kappa
    return StabilityReport(kappa=kappa, varpi=varpi, lambda1=lambda1,
                           threshold=threshold,
                           blowup_predicted=varpi < threshold)


def _decay_bound(params: MgtParams, delta: float, k):
    """Mass bound at auxiliary parameter k, in the theta -> (k/delta)+ limit.

    The bound (beta - gamma/k) * min{1, 2/(k*(2+theta))} decreases in
    theta, so its supremum over the open interval theta > k/delta is the
    limit value at theta = k/delta.  Works on scalars and arrays.
    """
    k = np.asarray(k, dtype=float)
    factor = np.minimum(1.0, 2.0 / (k * (2.0 + k / delta)))
    return (params.beta - params.gamma / k) * factor


def decay_mass_threshold(params: MgtParams, delta: float,
                         grid: int = 10_000) -> float:
    """Supremum over k in (gamma/beta, alpha) of the decay mass bound.

    Resolved by a dense grid scan followed by golden-section refinement
    around the best grid point.  Only defined in the subcritical regime.
    """
    if params.gamma >= params.alpha * params.beta:
        raise NotSubcritical(
            f"decay condition requires gamma < alpha*beta, got "
            f"gamma={params.gamma}, alpha*beta={params.alpha * params.beta}")
    if delta <= 0:
        raise ValueError("delta must be positive")
    lo, hi = params.gamma / params.beta, params.alpha
    ks = np.linspace(lo, hi, grid + 2)[1:-1]
    values = _decay_bound(params, delta, ks)
    best = int(np.argmax(values))
    # golden-section refinement on the bracket around the best grid point
    a = ks[max(best - 1, 0)]
    b = ks[min(best + 1, len(ks) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = float(_decay_bound(params, delta, c))
    fd = float(_decay_bound(params, delta, d))
    for _ in range(80):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(_decay_bound(params, delta, c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(_decay_bound(params, delta, d))
    return max(float(values[best]), fc, fd)


def satisfies_decay_mass_condition(params: MgtParams, rho: float,
                                   delta: float) -> bool:
    """Whether (rho, delta) meets the small-mass sufficient condition for
    exponential decay of the exponential-kernel dynamics.

    True iff there exist k in (gamma/beta, alpha) and theta > k/delta with
    rho <= (beta - gamma/k)*min{1, 2/(k*(2+theta))}.  Implemented as the
    strict comparison rho < sup_k of the theta-limit bound; strictness
    respects the open theta interval.  A true answer always implies
    rho < beta - gamma/alpha.
    """
    return rho < decay_mass_threshold(params, delta)
