"""Memory kernels, their masses, and the resolvent of the convolution.

Two representations are supported: the exponential kernel
g(s) = rho*delta*exp(-delta*s) with everything in closed form, and a
tabulated kernel on a uniform grid, linearly interpolated inside the
table and extended by zero past its end.

The resolvent R of the scaled kernel mu = -g/beta solves the second-kind
convolution equation R + mu*R = mu on a uniform grid.  The march uses
Gregory (end-corrected trapezoidal) weights, which keeps the scheme a
one-pass recurrence while pushing the discretization error well below
the plain trapezoidal level; consistency is still judged against the
plain trapezoidal identity, whose defect decays at second order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidKernelTable, InvalidStep, NegativeTime, SingularDiagonal


def _check_nonnegative_time(s) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise NegativeTime(f"kernel evaluated at negative time {arr.min()}")
    return arr


@dataclass(frozen=True)
class ExponentialKernel:
    """g(s) = rho * delta * exp(-delta * s), total mass exactly rho."""

    rho: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")

    def eval(self, s):
        arr = _check_nonnegative_time(s)
        out = self.rho * self.delta * np.exp(-self.delta * arr)
        return float(out) if np.isscalar(s) or arr.ndim == 0 else out

    __call__ = eval

    def mass(self) -> float:
        return self.rho

    def cumulative_mass(self, t):
        """G(t) = rho * (1 - exp(-delta*t)), in closed form."""
        arr = _check_nonnegative_time(t)
        out = self.rho * (-np.expm1(-self.delta * arr))
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def derivative_bound(self) -> float:
        """sup |g'| = rho * delta**2, attained at s = 0."""
        return self.rho * self.delta ** 2


@dataclass(frozen=True, eq=False)
class TabulatedKernel:
    """Kernel sampled at 0, h, 2h, ...; linear inside, zero past the end.

    Values must be nonnegative and nonincreasing.  A zero table is the
    legitimate representation of the memoryless case.
    """

    step: float
    values: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidKernelTable(f"step must be positive, got {self.step!r}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise InvalidKernelTable("need a 1-d table with at least two entries")
        if not np.all(np.isfinite(vals)):
            raise InvalidKernelTable("table contains non-finite entries")
        if np.any(vals < 0):
            raise InvalidKernelTable("kernel values must be nonnegative")
        slack = 1e-12 * max(float(vals[0]), 1.0)
        if np.any(np.diff(vals) > slack):
            raise InvalidKernelTable("kernel values must be nonincreasing")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.step

    @property
    def end(self) -> float:
        return (len(self.values) - 1) * self.step

    def eval(self, s):
        arr = _check_nonnegative_time(s)
        out = np.interp(arr, self.grid, self.values, right=0.0)
        return float(out) if np.isscalar(s) or arr.ndim == 0 else out

    __call__ = eval

    def mass(self) -> float:
        """Trapezoidal integral of the table."""
        return float(np.sum(0.5 * (self.values[1:] + self.values[:-1])) * self.step)

    def cumulative_mass(self, t):
        """Exact integral of the interpolant on [0, t] (running trapezoid)."""
        arr = _check_nonnegative_time(t)
        scalar = np.isscalar(t) or arr.ndim == 0
        arr = np.atleast_1d(arr)
        nodes = np.concatenate(
            ([0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * self.step)))
        clipped = np.minimum(arr, self.end)
        idx = np.minimum((clipped / self.step).astype(int), len(self.values) - 2)
        t0 = idx * self.step
        g0 = self.values[idx]
        gt = np.interp(clipped, self.grid, self.values)
        out = nodes[idx] + 0.5 * (clipped - t0) * (g0 + gt)
        return float(out[0]) if scalar else out

    def derivative_bound(self) -> float:
        """Largest difference quotient |g(t+h)-g(t)|/h over the table.

        Reported, not asserted: a table with jumps can exceed any intended
        bound on g', and admissibility is the caller's judgment.
        """
        return float(np.max(np.abs(np.diff(self.values)))) / self.step

    @classmethod
    def from_csv(cls, path) -> "TabulatedKernel":
        """Load a two-column (s, g(s)) file; s must start at 0 and be
        uniformly spaced and strictly increasing."""
        rows = []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if lineno == 1 and not _is_number(row[0]):
                    continue  # header line
                if len(row) < 2:
                    raise InvalidKernelTable(f"{path}: line {lineno}: need two columns")
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError as exc:
                    raise InvalidKernelTable(f"{path}: line {lineno}: {exc}") from None
        if len(rows) < 2:
            raise InvalidKernelTable(f"{path}: need at least two data rows")
        s = np.array([r[0] for r in rows])
        g = np.array([r[1] for r in rows])
        if abs(s[0]) > 1e-12:
            raise InvalidKernelTable(f"{path}: grid must start at 0, got {s[0]}")
        diffs = np.diff(s)
        if np.any(diffs <= 0):
            raise InvalidKernelTable(f"{path}: grid must be strictly increasing")
        h = float(diffs[0])
        if np.max(np.abs(diffs - h)) > 1e-9 * h:
            raise InvalidKernelTable(f"{path}: grid spacing is not uniform")
        return cls(step=h, values=g)


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


Kernel = ExponentialKernel | TabulatedKernel


@dataclass(frozen=True)
class ExponentialResolvent:
    """Closed form R(t) = amplitude * exp(-rate * t) for the exponential
    kernel, obtained by transform-domain algebra.

    amplitude = -rho*delta/beta and rate = delta*(1 - rho/beta).  The rate
    is nonpositive once rho >= beta; ``decaying`` flags that boundary.
    """

    amplitude: float
    rate: float

    @property
    def decaying(self) -> bool:
        return self.rate > 0

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.amplitude * np.exp(-self.rate * arr)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def shifted_damping(self, alpha: float) -> float:
        """alpha_hat = alpha - R(0), the damping seen by the reduced
        memoryless equation."""
        return alpha - self.amplitude


def resolvent_exponential_closed_form(rho: float, delta: float,
                                      beta: float) -> ExponentialResolvent:
    """Resolvent of mu = -g/beta for g(s) = rho*delta*exp(-delta*s).

    In the transform domain mu_hat(s) = c/(s+delta) with c = -rho*delta/beta,
    and R_hat = mu_hat/(1+mu_hat) = c/(s+delta+c), i.e.
    R(t) = c*exp(-(delta+c)*t).
    """
    if rho <= 0 or delta <= 0 or beta <= 0:
        raise ValueError("rho, delta, beta must be positive")
    c = -rho * delta / beta
    return ExponentialResolvent(amplitude=c, rate=delta + c)


@dataclass(frozen=True, eq=False)
class ResolventTable:
    """Sampled resolvent R of mu = -g/beta on a uniform grid.

    ``residual`` re-substitutes R into the plain trapezoidal Volterra
    identity R + mu*R - mu; its maximum decays at second order in the
    step and stays under 10*step**2 for smooth kernels.
    """

    step: float
    values: np.ndarray
    beta: float
    mu: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.step

    def residual(self) -> np.ndarray:
        R, mu, h = self.values, self.mu, self.step
        n = len(R)
        out = np.empty(n)
        out[0] = R[0] - mu[0]
        for k in range(1, n):
            acc = 0.5 * (mu[k] * R[0] + mu[0] * R[k])
            if k > 1:
                acc += np.dot(mu[k - 1:0:-1], R[1:k])
            out[k] = R[k] + h * acc - mu[k]
        return out

    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual())))

    def shifted_damping(self, alpha: float) -> float:
        return alpha - float(self.values[0])


def _quadrature_weights(k: int) -> np.ndarray:
    """Composite weights for nodes 0..k: trapezoid, Simpson, Simpson 3/8,
    then the third-order Gregory rule."""
    if k == 1:
        return np.array([0.5, 0.5])
    if k == 2:
        return np.array([1.0, 4.0, 1.0]) / 3.0
    if k == 3:
        return np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    w = np.ones(k + 1)
    w[0] = w[-1] = 5.0 / 12.0
    w[1] = w[-2] = 13.0 / 12.0
    return w


def resolvent(kernel: Kernel, beta: float, horizon: float,
              step: float) -> ResolventTable:
    """March the resolvent equation R + mu*R = mu for mu = -g/beta.

    The step must divide the horizon.  Each node solves the implicit
    relation exactly: R_k * (1 + h*w_kk*mu_0) = mu_k - h*sum_{j<k} w_kj *
    mu(t_k - t_j) * R_j.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if step <= 0 or horizon <= 0:
        raise InvalidStep(f"horizon and step must be positive, got {horizon}, {step}")
    n = int(round(horizon / step))
    if n < 1 or abs(n * step - horizon) > 1e-9 * horizon:
        raise InvalidStep(f"step {step} does not divide horizon {horizon}")
    t = np.arange(n + 1) * step
    mu = -np.asarray(kernel.eval(t), dtype=float) / beta
    R = np.empty(n + 1)
    R[0] = mu[0]
    for k in range(1, n + 1):
        w = _quadrature_weights(k)
        diag = 1.0 + step * w[k] * mu[0]
        if abs(diag) < 1e-12:
            raise SingularDiagonal(
                f"1 + (step*w)*mu(0) = {diag}: step {step} too large for g(0)/beta "
                f"= {-mu[0]}")
        acc = np.dot(w[:k] * mu[k:0:-1], R[:k])
        R[k] = (mu[k] - step * acc) / diag
    return ResolventTable(step=step, values=R, beta=beta, mu=mu)
