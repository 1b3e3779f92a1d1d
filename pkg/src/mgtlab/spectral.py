"""Characteristic polynomials per eigenvalue and the growth certificate.

On the eigenspace A w = lam w the dynamics reduce to scalar ODEs.  The
memoryless third-order equation has characteristic cubic

    xi^3 + alpha*xi^2 + beta*lam*xi + gamma*lam,

and the fourth-order reduction for the exponential kernel has the quartic

    xi^4 + (alpha+delta)*xi^3 + (alpha*delta + beta*lam)*xi^2
        + lam*(gamma + delta*beta - rho*delta)*xi + lam*gamma*delta.

The certificate construction locates a quartic root p + i*q(p) with p > 0
on the curve x -> x + i*q(x) along which the imaginary part of the quartic
vanishes identically; the real part restricted to the curve is a scalar
function f whose sign change delivers p.  The explicit solution
exp(p*t) * (r*sin(q*t) + cos(q*t)) then certifies energy growth at rate
epsilon = 2*p along the times t_n = 2*pi*n/q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DenominatorNonNegative, MassRestrictionViolated,
                     NoConvergence, NoSignChange, RepeatedRoots)
from .params import MgtParams
from .trajectory import ModeTrajectory


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial (degree 3 or 4) for eigenvalue lam.

    Coefficients run from the leading term down to the constant.
    """

    coefficients: tuple
    lam: float

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) not in (4, 5):
            raise ValueError("only degree 3 or 4 polynomials are supported")
        if coeffs[0] != 1.0:
            raise ValueError(f"leading coefficient must be 1, got {coeffs[0]}")
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, xi):
        """Horner evaluation; accepts real/complex scalars and arrays."""
        acc = np.asarray(xi) * 0 + self.coefficients[0]
        for c in self.coefficients[1:]:
            acc = acc * xi + c
        return acc

    def derivative(self, xi):
        acc = np.asarray(xi) * 0
        for k, c in enumerate(self.coefficients[:-1]):
            acc = acc * xi + c * (self.degree - k)
        return acc

    def residual_scale(self, xi) -> float:
        """Natural residual scale (1 + |xi|)**degree."""
        return (1.0 + abs(xi)) ** self.degree


def characteristic_quartic(params: MgtParams, rho: float, delta: float,
                           lam: float) -> CharPoly:
    if rho <= 0 or delta <= 0 or lam <= 0:
        raise ValueError("rho, delta, lam must be positive")
    a, b, g = params.alpha, params.beta, params.gamma
    return CharPoly(
        coefficients=(1.0, a + delta, a * delta + b * lam,
                      lam * (g + delta * b - rho * delta), lam * g * delta),
        lam=lam)


def characteristic_cubic(params: MgtParams, lam: float) -> CharPoly:
    if lam <= 0:
        raise ValueError("lam must be positive")
    return CharPoly(
        coefficients=(1.0, params.alpha, params.beta * lam, params.gamma * lam),
        lam=lam)


def durand_kerner(coefficients, tol: float = 1e-13,
                  max_sweeps: int = 10_000) -> np.ndarray:
    """Simultaneous root iteration for a monic polynomial.

    Portable fallback and cross-check for the companion-matrix route.
    """
    coeffs = np.asarray(coefficients, dtype=complex)
    n = len(coeffs) - 1
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    # non-real, non-symmetric starting angles avoid stalling on real roots
    angles = 2.0 * np.pi * (np.arange(n) / n) + 0.4
    z = radius * np.exp(1j * angles)
    for _ in range(max_sweeps):
        p = np.polyval(coeffs, z)
        denom = np.empty(n, dtype=complex)
        for i in range(n):
            diff = z[i] - np.delete(z, i)
            denom[i] = np.prod(diff)
        delta = p / denom
        z = z - delta
        if np.max(np.abs(delta)) < tol * (1.0 + np.max(np.abs(z))):
            return z
    raise NoConvergence(f"Durand-Kerner did not settle in {max_sweeps} sweeps")


def _polish(coeffs, roots, iterations: int = 5) -> np.ndarray:
    """A few Newton steps per root; keeps companion-matrix output at the
    residual tolerance even for large coefficient scales."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deriv = np.polyder(coeffs)
    z = np.asarray(roots, dtype=complex).copy()
    for _ in range(iterations):
        dp = np.polyval(deriv, z)
        mask = np.abs(dp) > 0
        z[mask] = z[mask] - np.polyval(coeffs, z[mask]) / dp[mask]
    return z


def _sorted_roots(roots: np.ndarray) -> np.ndarray:
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def poly_roots(poly: CharPoly, method: str = "companion") -> np.ndarray:
    """All roots of the characteristic polynomial, deterministically sorted.

    ``companion`` diagonalizes the companion matrix and polishes with
    Newton; ``durand-kerner`` runs the simultaneous iteration.  Each root
    satisfies |P(root)| <= 1e-9*(1+|root|)**degree and the root sum
    matches -coefficients[1] to 1e-9 relative, else the other method is
    tried before giving up.
    """
    coeffs = np.asarray(poly.coefficients, dtype=float)

    def compute(which: str) -> np.ndarray:
        if which == "companion":
            return _polish(coeffs, np.roots(coeffs))
        return _polish(coeffs, durand_kerner(coeffs))

    def acceptable(roots: np.ndarray) -> bool:
        residuals = np.abs(poly(roots))
        scales = (1.0 + np.abs(roots)) ** poly.degree
        if np.any(residuals > 1e-9 * scales):
            return False
        target = -poly.coefficients[1]
        return abs(np.sum(roots) - target) <= 1e-9 * max(1.0, abs(target))

    roots = compute(method)
    if not acceptable(roots):
        fallback = "durand-kerner" if method == "companion" else "companion"
        roots = compute(fallback)
        if not acceptable(roots):
            raise NoConvergence("root residuals exceed tolerance for both methods")
    return _sorted_roots(roots)


def _check_mass(params: MgtParams, rho: float) -> None:
    if rho >= params.beta:
        raise MassRestrictionViolated(
            f"operation needs rho < beta, got rho={rho}, beta={params.beta}")


def q_of_x(params: MgtParams, rho: float, delta: float, lam: float, x):
    """Imaginary-part curve q(x) > 0 along which Im P(x + i q(x)) = 0.

    q(x)^2 = (4x^3 + 3(alpha+delta)x^2 + 2(alpha*delta+beta*lam)x
              + lam*(gamma+delta*beta-rho*delta)) / (alpha+delta+4x).
    """
    _check_mass(params, rho)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("x must be nonnegative")
    a, b, g = params.alpha, params.beta, params.gamma
    num = (4.0 * arr ** 3 + 3.0 * (a + delta) * arr ** 2
           + 2.0 * (a * delta + b * lam) * arr
           + lam * (g + delta * b - rho * delta))
    out = np.sqrt(num / (a + delta + 4.0 * arr))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def f_of_x(params: MgtParams, rho: float, delta: float, lam: float, x):
    """Real part of the quartic restricted to the curve x + i q(x).

    Positive at x=0 for delta large when rho > beta - gamma/alpha, and
    -inf as x -> inf; a sign change locates the growing root.
    """
    _check_mass(params, rho)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("x must be nonnegative")
    a, b, g = params.alpha, params.beta, params.gamma
    c3 = a + delta
    c2 = a * delta + b * lam
    c1 = lam * (g + delta * b - rho * delta)
    c0 = lam * g * delta
    q2 = (4.0 * arr ** 3 + 3.0 * c3 * arr ** 2 + 2.0 * c2 * arr + c1) / (c3 + 4.0 * arr)
    out = (arr ** 4 + c3 * arr ** 3 + c2 * arr ** 2 + c1 * arr + c0
           + q2 * q2 - (6.0 * arr ** 2 + 3.0 * c3 * arr + c2) * q2)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _scan_bound(params: MgtParams, rho: float, delta: float, lam: float) -> float:
    # real parts of quartic roots are below the Cauchy bound
    poly = characteristic_quartic(params, rho, delta, lam)
    return 1.0 + max(abs(c) for c in poly.coefficients[1:])


def f_sign_changes(params: MgtParams, rho: float, delta: float, lam: float,
                   resolution: int = 4096) -> list:
    """All roots of f bracketed by a sign scan on [0, root bound].

    The construction only needs the smallest one, but multiplicity is not
    ruled out; this reports every change the scan resolves.
    """
    bound = _scan_bound(params, rho, delta, lam)
    xs = np.linspace(0.0, bound, resolution + 1)
    fs = f_of_x(params, rho, delta, lam, xs)
    roots = []
    for j in range(resolution):
        if fs[j] == 0.0:
            roots.append(float(xs[j]))
        elif fs[j] * fs[j + 1] < 0.0:
            roots.append(_bisect_f(params, rho, delta, lam, xs[j], xs[j + 1]))
    if fs[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def _bisect_f(params: MgtParams, rho: float, delta: float, lam: float,
              lo: float, hi: float, iterations: int = 200) -> float:
    flo = f_of_x(params, rho, delta, lam, lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = f_of_x(params, rho, delta, lam, mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    # secant polish to push |f| toward round-off
    x0, x1 = lo, hi
    f0 = f_of_x(params, rho, delta, lam, x0)
    f1 = f_of_x(params, rho, delta, lam, x1)
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (math.isfinite(x2) and x2 >= 0):
            break
        x0, f0, x1 = x1, f1, x2
        f1 = f_of_x(params, rho, delta, lam, x1)
    return x1 if abs(f1) < abs(f0) else x0


def find_p(params: MgtParams, rho: float, delta: float, lam: float) -> float:
    """Smallest p > 0 with f(p) = 0, by upward scan and bisection.

    Requires f(0) > 0; otherwise the decay rate delta has not crossed the
    growth threshold for this rho and NoSignChange reports f(0).
    """
    f0 = f_of_x(params, rho, delta, lam, 0.0)
    if f0 <= 0.0:
        raise NoSignChange(
            f"f(0) = {f0} <= 0: no positive root bracketed from 0 "
            f"(delta may be too small for rho={rho})", f0=f0)
    bound = _scan_bound(params, rho, delta, lam)
    resolution = 4096
    lo_window = 0.0
    for _ in range(64):
        xs = np.linspace(lo_window, lo_window + bound, resolution + 1)
        fs = f_of_x(params, rho, delta, lam, xs)
        sign_change = np.nonzero(fs[:-1] * fs[1:] <= 0.0)[0]
        if len(sign_change):
            j = int(sign_change[0])
            return _bisect_f(params, rho, delta, lam, xs[j], xs[j + 1])
        lo_window += bound
        bound *= 2.0
    raise NoConvergence("no sign change of f located below the doubling cap")


def r_of_p(params: MgtParams, lam: float, p: float, q: float) -> float:
    """Mixing coefficient of the oscillatory solution, r = r(p).

    r = (p^3 - 3 p q^2 + alpha (p^2 - q^2) + beta lam p + gamma lam)
        / (q^3 - 3 p^2 q - 2 alpha p q - beta lam q)

    The denominator is strictly negative whenever gamma <= alpha*beta,
    p > 0 and q = q(p); a nonnegative value signals violated inputs.
    """
    a, b, g = params.alpha, params.beta, params.gamma
    num = p ** 3 - 3.0 * p * q ** 2 + a * (p ** 2 - q ** 2) + b * lam * p + g * lam
    den = q ** 3 - 3.0 * p ** 2 * q - 2.0 * a * p * q - b * lam * q
    if den >= 0.0:
        raise DenominatorNonNegative(
            f"denominator {den} >= 0; expected strictly negative for admissible "
            f"(p, q) under gamma <= alpha*beta")
    return num / den


@dataclass(frozen=True)
class BlowupCertificate:
    """Constructive witness of exponential energy growth for one mode.

    The complex number p + i*q annihilates the quartic (residual below
    1e-9 of the natural scale), epsilon = 2*p exactly, and the mode
    coefficient exp(p*t)*(r sin(q t) + cos(q t)) realizes the growth
    F(t_n) >= lam * exp(epsilon * t_n) at t_n = 2*pi*n/q.
    """

    p: float
    q: float
    r: float
    epsilon: float
    residual: float
    lam: float

    def initial_datum(self) -> tuple:
        """Mode coefficients of (u, u', u'') at t = 0."""
        p, q, r = self.p, self.q, self.r
        return (1.0, p + r * q, p ** 2 + 2.0 * r * p * q - q ** 2)

    def third_derivative0(self) -> float:
        p, q, r = self.p, self.q, self.r
        return p ** 3 + 3.0 * r * p ** 2 * q - 3.0 * p * q ** 2 - r * q ** 3

    def t_n(self, n: int) -> float:
        return 2.0 * math.pi * n / self.q

    def period(self) -> float:
        return self.t_n(1)


def blowup_certificate(params: MgtParams, rho: float, delta: float,
                       lam: float) -> BlowupCertificate:
    """Assemble (p, q, r, epsilon) for rho strictly inside
    (beta - gamma/alpha, beta)."""
    lower = params.beta - params.gamma / params.alpha
    if not (rho > lower and rho < params.beta):
        raise MassRestrictionViolated(
            f"certificate needs rho strictly inside (beta - gamma/alpha, beta) "
            f"= ({lower}, {params.beta}), got rho={rho}")
    p = find_p(params, rho, delta, lam)
    q = q_of_x(params, rho, delta, lam, p)
    r = r_of_p(params, lam, p, q)
    poly = characteristic_quartic(params, rho, delta, lam)
    xi = complex(p, q)
    residual = abs(poly(xi))
    tolerance = 1e-9 * poly.residual_scale(xi)
    if residual > tolerance:
        raise NoConvergence(
            f"|P(p+iq)| = {residual} above tolerance {tolerance}")
    return BlowupCertificate(p=p, q=q, r=r, epsilon=2.0 * p,
                             residual=residual, lam=lam)


def _oscillator_coefficients(p: float, q: float, r: float, order: int) -> list:
    """(A_m, B_m) with d^m/dt^m [e^{pt}(A0 sin qt + B0 cos qt)]
    = e^{pt}(A_m sin qt + B_m cos qt), starting from (A0, B0) = (r, 1)."""
    pairs = [(r, 1.0)]
    for _ in range(order):
        A, B = pairs[-1]
        pairs.append((p * A - q * B, p * B + q * A))
    return pairs


def analytic_mode_solution(certificate: BlowupCertificate,
                           times) -> ModeTrajectory:
    """Closed-form sampling of the certified solution and its derivatives."""
    t = np.asarray(times, dtype=float)
    if len(t) < 2:
        raise ValueError("need at least two sample times")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be increasing")
    p, q = certificate.p, certificate.q
    pairs = _oscillator_coefficients(p, q, certificate.r, 3)
    growth = np.exp(p * t)
    s, c = np.sin(q * t), np.cos(q * t)
    comps = [growth * (A * s + B * c) for A, B in pairs]
    return ModeTrajectory(lam=certificate.lam, step=float(t[1] - t[0]),
                          times=t, u=comps[0], ut=comps[1], utt=comps[2],
                          uttt=comps[3])


def general_mode_solution(poly: CharPoly, init, times) -> ModeTrajectory:
    """Exact solution of the constant-coefficient mode ODE with the given
    initial derivatives, via the exponential basis of the (distinct) roots.

    Solves the Vandermonde system in the roots for the modal amplitudes;
    real data and conjugate-closed roots make the reconstruction real.
    """
    init = np.asarray(init, dtype=float)
    if len(init) != poly.degree:
        raise ValueError(f"need {poly.degree} initial values, got {len(init)}")
    roots = poly_roots(poly)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < 1e-8:
                raise RepeatedRoots(
                    f"roots {roots[i]} and {roots[j]} closer than 1e-8; "
                    f"the exponential basis degenerates")
    t = np.asarray(times, dtype=float)
    if len(t) < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("times must be increasing with at least two samples")
    vander = np.vander(roots, poly.degree, increasing=True).T  # rows: powers
    amplitudes = np.linalg.solve(vander, init.astype(complex))
    basis = np.exp(np.outer(t, roots))  # (n_times, degree)
    comps = []
    for order in range(4 if poly.degree == 4 else 3):
        comps.append((basis * (amplitudes * roots ** order)).sum(axis=1).real)
    return ModeTrajectory(lam=poly.lam, step=float(t[1] - t[0]), times=t,
                          u=comps[0], ut=comps[1], utt=comps[2],
                          uttt=comps[3] if poly.degree == 4 else None)
