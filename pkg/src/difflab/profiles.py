"""Closed-form self-similar profiles, sharp decay exponents, and the separable
Dirichlet solution.

The source solution of ∂t n = (|γ|/(γ+1)) Δ n^{γ+1} has the self-similar form

    n(t, x) = t^{-αd} F(x t^{-α}),    α = 1/(dγ + 2),

with shape F(ξ) = (C - α|ξ|²/2)_+^{1/γ} for γ > 0 (compact support) and
F(ξ) = (C + α|ξ|²/2)^{1/γ} for -2/d < γ < 0 (fat tail ~ |ξ|^{2/γ}).  The
constant C > 0 is fixed by the total mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalFailureError
from .params import DiffusionParams

BISECTION_RTOL = 1e-12
BISECTION_MAX_ITER = 200
# quadrature/analytic-tail split: where the integrand is within 1% of its power asymptote
_TAIL_MATCH = 0.99


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d=1, 2π, 4π, ...)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _validate(gamma: float, dim: int) -> None:
    if dim < 1 or int(dim) != dim:
        raise DomainError(f"dimension must be a positive integer, got {dim}")
    if gamma == 0 or (gamma < 0 and gamma <= -2.0 / dim):
        raise DomainError(f"gamma = {gamma} outside (-2/d, 0) u (0, inf) for d = {dim}")


def _fde_tail_beyond(gamma: float, dim: int, c: float, xi0: float) -> float:
    """Exact ∫_{ξ0}^∞ (c + αξ²/2)^{1/γ} ξ^{d-1} dξ (per unit sphere area).

    Substituting u = αξ²/(2c) turns the tail into an incomplete Beta integral
    with a = d/2, b = -1/γ - d/2 > 0 on the mass-preserving range.
    """
    alpha = 1.0 / (dim * gamma + 2.0)
    a = dim / 2.0
    b = -1.0 / gamma - dim / 2.0
    u0 = alpha * xi0 * xi0 / (2.0 * c)
    x0 = u0 / (1.0 + u0)
    full = special.beta(a, b)
    return 0.5 * c ** (1.0 / gamma) * (2.0 * c / alpha) ** (dim / 2.0) * full * (
        1.0 - special.betainc(a, b, x0)
    )


def _shape_mass(gamma: float, dim: int, c: float) -> float:
    """Total mass of the shape F with constant c, by adaptive quadrature.

    The fat-diffusion integrand decays like ξ^{2/γ+d-1}; beyond the cutoff
    where F is within 1% of (αξ²/2)^{1/γ} the tail is integrated exactly,
    so truncation cannot bias the constant.
    """
    alpha = 1.0 / (dim * gamma + 2.0)
    area = sphere_area(dim)
    if gamma > 0:
        edge = math.sqrt(2.0 * c / alpha)
        val, _ = integrate.quad(
            lambda x: (c - 0.5 * alpha * x * x) ** (1.0 / gamma) * x ** (dim - 1),
            0.0, edge, limit=200, epsabs=1e-14, epsrel=1e-12,
        )
        return area * val
    cut = math.sqrt(2.0 * c / (alpha * (_TAIL_MATCH ** gamma - 1.0)))
    val, _ = integrate.quad(
        lambda x: (c + 0.5 * alpha * x * x) ** (1.0 / gamma) * x ** (dim - 1),
        0.0, cut, limit=200, epsabs=1e-14, epsrel=1e-12,
    )
    return area * (val + _fde_tail_beyond(gamma, dim, c, cut))


def profile_constant(gamma: float, dim: int, mass: float) -> float:
    """Profile constant C such that the shape F carries the requested mass.

    Solved by bisection; the mass is monotone in C (increasing for γ > 0,
    decreasing for γ < 0 since the exponent d/2 + 1/γ flips sign).
    """
    _validate(gamma, dim)
    if mass <= 0:
        raise DomainError(f"mass must be positive, got {mass}")
    increasing = dim / 2.0 + 1.0 / gamma > 0

    def resid(c):
        return _shape_mass(gamma, dim, c) - mass

    lo = hi = 1.0
    flo = fhi = resid(1.0)
    for _ in range(BISECTION_MAX_ITER):
        if (flo <= 0 if increasing else flo >= 0):
            break
        lo /= 4.0
        flo = resid(lo)
    else:
        raise NumericalFailureError("could not bracket the profile constant from below")
    for _ in range(BISECTION_MAX_ITER):
        if (fhi >= 0 if increasing else fhi <= 0):
            break
        hi *= 4.0
        fhi = resid(hi)
    else:
        raise NumericalFailureError("could not bracket the profile constant from above")
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= BISECTION_RTOL * mid:
            return mid
        fm = resid(mid)
        if (fm < 0) == increasing:
            lo = mid
        else:
            hi = mid
    raise NumericalFailureError(
        f"profile-constant bisection did not reach rtol={BISECTION_RTOL} in {BISECTION_MAX_ITER} iterations"
    )


@dataclass(frozen=True)
class BarenblattProfile:
    """Self-similar source solution with mass-calibrated constant.

    Evaluation uses the shifted time t + time_offset, which implements the
    sandwiching profiles B(t ± τ; M) without extra machinery.
    """

    params: DiffusionParams
    mass: float
    profile_constant: float
    time_offset: float = 0.0

    @classmethod
    def from_mass(cls, params: DiffusionParams, mass: float, time_offset: float = 0.0):
        c = profile_constant(params.gamma, params.dim, mass)
        return cls(params, mass, c, time_offset)

    def _shifted(self, t: float) -> float:
        tt = t + self.time_offset
        if tt <= 0:
            raise DomainError(f"profile evaluated at t + offset = {tt} <= 0")
        return tt

    def support_radius(self, t: float) -> float:
        """Edge of the support, sqrt(2C/α)·t^α for γ > 0; infinite for γ < 0."""
        tt = self._shifted(t)
        p = self.params
        if p.gamma < 0:
            return math.inf
        return math.sqrt(2.0 * self.profile_constant / p.alpha) * tt ** p.alpha

    def shape(self, xi):
        """F(ξ); positive part for γ > 0, strictly positive for γ < 0."""
        p = self.params
        xi = np.asarray(xi, dtype=float)
        quad = 0.5 * p.alpha * xi * xi
        if p.gamma > 0:
            base = np.maximum(self.profile_constant - quad, 0.0)
            return base ** (1.0 / p.gamma)
        return (self.profile_constant + quad) ** (1.0 / p.gamma)

    def density(self, t: float, r):
        tt = self._shifted(t)
        p = self.params
        return tt ** (-p.alpha * p.dim) * self.shape(np.asarray(r, dtype=float) * tt ** -p.alpha)

    def pressure(self, t: float, r):
        """Signed pressure sign(γ) n^γ in closed form."""
        tt = self._shifted(t)
        p = self.params
        xi = np.asarray(r, dtype=float) * tt ** -p.alpha
        quad = 0.5 * p.alpha * xi * xi
        scale = tt ** (-p.alpha * p.gamma * p.dim)
        if p.gamma > 0:
            return scale * np.maximum(self.profile_constant - quad, 0.0)
        return -scale * (self.profile_constant + quad)

    def pressure_gradient(self, t: float, r):
        """Radial derivative of the signed pressure: -α r/t on the support.

        The same expression holds in both regimes (for γ < 0 everywhere);
        outside the γ > 0 support the pressure vanishes identically.
        """
        tt = self._shifted(t)
        p = self.params
        r = np.asarray(r, dtype=float)
        grad = -p.alpha * r / tt
        if p.gamma > 0:
            grad = np.where(r <= self.support_radius(t), grad, 0.0)
        return grad

    def tail_mass(self, t: float, radius: float) -> float:
        """Mass beyond the given radius; t-independent in similarity variables."""
        tt = self._shifted(t)
        p = self.params
        xi0 = radius * tt ** -p.alpha
        area = sphere_area(p.dim)
        if p.gamma < 0:
            return area * _fde_tail_beyond(p.gamma, p.dim, self.profile_constant, xi0)
        edge = math.sqrt(2.0 * self.profile_constant / p.alpha)
        if xi0 >= edge:
            return 0.0
        val, _ = integrate.quad(
            lambda x: (self.profile_constant - 0.5 * p.alpha * x * x) ** (1.0 / p.gamma) * x ** (p.dim - 1),
            xi0, edge, limit=200, epsabs=1e-14, epsrel=1e-12,
        )
        return area * val


def sharp_decay_exponent(gamma: float, dim: int, b: float) -> float:
    """Power of t in the sharp drift-less decay of max |p|^b |∇p|²."""
    _validate(gamma, dim)
    alpha = 1.0 / (dim * gamma + 2.0)
    return -1.0 - gamma * dim * (b + 1.0) * alpha


def gap_decay_exponent(gamma: float, dim: int, b: float) -> float:
    """Power of t for the weighted gap to the self-similar gradient.

    Combines the background power β = -αγdb - 2 + 2α with the extra decay
    -(1 - γbd/2)/(dγ+2) gained from the confined formulation.
    """
    _validate(gamma, dim)
    alpha = 1.0 / (dim * gamma + 2.0)
    beta = -alpha * gamma * dim * b - 2.0 + 2.0 * alpha
    rate = 1.0 - gamma * b * dim / 2.0
    return beta - rate * alpha


@dataclass(frozen=True)
class DirichletSeparable:
    """Separable solution n(t,x) = a(|x|) b(t) on a ball with zero boundary data.

    ``nodes`` carries the shooting grid for w = a^{γ+1}, which solves
    -Δw = w^{1/(γ+1)}, w'(0) = 0, w(R) = 0.
    """

    gamma: float
    dim: int
    radius: float
    b0: float
    nodes: np.ndarray
    w_values: np.ndarray
    boundary_slope: float

    @property
    def a_values(self) -> np.ndarray:
        return np.maximum(self.w_values, 0.0) ** (1.0 / (self.gamma + 1.0))

    def a_of(self, r):
        return np.interp(np.asarray(r, dtype=float), self.nodes, self.a_values)

    def time_factor(self, t):
        """b(t) = (b0^{-γ} + γ|γ| t/(γ+1))^{-1/γ}, decaying like t^{-1/γ}."""
        g = self.gamma
        t = np.asarray(t, dtype=float)
        return (self.b0 ** -g + g * abs(g) * t / (g + 1.0)) ** (-1.0 / g)

    def density(self, t, r):
        return self.a_of(r) * self.time_factor(t)


def _shoot(peak: float, gamma: float, dim: int, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integrate w'' = -w_+^m - (d-1) w'/r outward from w(0)=peak, w'(0)=0."""
    m = 1.0 / (gamma + 1.0)
    h = nodes[1] - nodes[0]
    w = np.empty_like(nodes)
    v = np.empty_like(nodes)
    w[0], v[0] = peak, 0.0
    # series start past the axis singularity: w ≈ peak - peak^m r²/(2d)
    w[1] = peak - peak ** m * h * h / (2.0 * dim)
    v[1] = -(peak ** m) * h / dim

    def rhs(r, wv, vv):
        src = max(wv, 0.0) ** m
        return vv, -src - (dim - 1) * vv / r

    for j in range(1, len(nodes) - 1):
        r = nodes[j]
        k1w, k1v = rhs(r, w[j], v[j])
        k2w, k2v = rhs(r + 0.5 * h, w[j] + 0.5 * h * k1w, v[j] + 0.5 * h * k1v)
        k3w, k3v = rhs(r + 0.5 * h, w[j] + 0.5 * h * k2w, v[j] + 0.5 * h * k2v)
        k4w, k4v = rhs(r + h, w[j] + h * k3w, v[j] + h * k3v)
        w[j + 1] = w[j] + h * (k1w + 2 * k2w + 2 * k3w + k4w) / 6.0
        v[j + 1] = v[j] + h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
    return w, v


def dirichlet_separable(
    gamma: float, dim: int, radius: float, b0: float, steps: int = 4096
) -> DirichletSeparable:
    """Construct the separable Dirichlet solution by radial shooting.

    Bisection on the center value w(0); the zero level set of w scales like
    w(0)^{(1-m)/2}, so the boundary value is monotone in the center value.
    """
    if gamma <= 0:
        raise DomainError("the separable Dirichlet solution is built for gamma > 0")
    if radius <= 0 or b0 <= 0:
        raise DomainError("radius and b0 must be positive")
    m = 1.0 / (gamma + 1.0)
    nodes = np.linspace(0.0, radius, steps + 1)

    # scale-law initial guess from a unit-height shot on an extended range
    wide = np.linspace(0.0, 8.0 * radius, 8 * steps + 1)
    w1, _ = _shoot(1.0, gamma, dim, wide)
    below = np.nonzero(w1 <= 0.0)[0]
    if len(below) == 0:
        raise NumericalFailureError("unit-height shot never reached zero; cannot bracket")
    r1 = wide[below[0]]
    guess = (radius / r1) ** (2.0 / (1.0 - m))

    lo, hi = guess / 4.0, guess * 4.0
    w_lo, _ = _shoot(lo, gamma, dim, nodes)
    w_hi, _ = _shoot(hi, gamma, dim, nodes)
    if not (w_lo[-1] < 0.0 < w_hi[-1]):
        raise NumericalFailureError("shooting bracket failed around the scale-law guess")
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        w, v = _shoot(mid, gamma, dim, nodes)
        if abs(w[-1]) < 1e-9 * mid:
            return DirichletSeparable(gamma, dim, radius, b0, nodes, w, float(v[-1]))
        if w[-1] < 0.0:
            lo = mid
        else:
            hi = mid
    raise NumericalFailureError(
        f"shooting bisection did not reach |w(R)| < 1e-9 w(0) in {BISECTION_MAX_ITER} iterations"
    )
