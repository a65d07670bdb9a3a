"""Conformal map of a convex domain onto the unit disk via collocation.

The map is represented as ``a(z) = tau * z * exp(g(z))`` with
``g(z) = integral q(theta) log(sigma(theta) - z) dtheta`` over a sampled
boundary; the real density ``q`` solves a single-layer collocation
system on the odd grid.  The weakly singular circle kernel
``log|e^{i theta} - e^{i phi}|`` is integrated exactly against
trigonometric polynomials through the ``c(k)`` cosine sums, while the
remaining smooth kernel gets the trapezoidal rule with the diagonal
replaced by ``log|sigma'(theta_i)|``.

The square system is solved directly (minimum-norm least squares, which
coincides with LU on well-conditioned systems).  When the domain's
logarithmic capacity is close to 1 the single layer is rank deficient
with inconsistent data; the domain is then rescaled by ``2/max|sigma|``,
solved there, and evaluations compose with the inverse scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityDegeneracyError,
    ContractViolation,
    DomainError,
    NonSmoothBoundaryError,
    SpectralDomainError,
)
from .linalg import as_matrix, eigenvalues, function_of_matrix
from .numrange import BoundarySample, interior_margin, transform_sample

__all__ = [
    "DiskConformalMap",
    "c_coefficients",
    "solve_density",
    "map_point",
    "map_derivative",
    "map_taylor",
    "map_matrix",
    "boundary_modulus_error",
]

# Residual acceptance for the direct collocation solve.
_RESIDUAL_RTOL = 1e-10
_RESIDUAL_ATOL = 1e-12

# Singular values below rcond * sigma_max are treated as the classical
# single-layer rank degeneracy.
_RCOND = 1e-12


def c_coefficients(n: int) -> np.ndarray:
    """Cosine sums c(k) = sum_{j=1..n} cos(j theta_k)/j for k = 0..2n."""
    if n < 1:
        raise ContractViolation("c_coefficients needs n >= 1")
    count = 2 * n + 1
    k = np.arange(count)
    j = np.arange(1, n + 1)
    # cos(j * 2 pi k / count) / j summed over j, for every k at once.
    table = np.cos(2.0 * np.pi * np.outer(k, j) / count) / j
    return table.sum(axis=1)


@dataclass(frozen=True)
class DiskConformalMap:
    """Solved conformal map data.

    ``scale`` is the pre-scaling factor applied to the domain before the
    collocation solve; evaluation always happens in the scaled frame.
    ``density`` is the solved density in that frame.
    """

    sample: BoundarySample
    scale: float
    nodes: np.ndarray
    density: np.ndarray
    coefficients: np.ndarray
    tau: complex
    residual: float

    @property
    def weight(self) -> float:
        return 2.0 * np.pi / len(self.nodes)


def _build_system(points: np.ndarray, tangents: np.ndarray, angles: np.ndarray,
                  coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    count = len(points)
    w = 2.0 * np.pi / count
    units = np.exp(1j * angles)
    num = points[None, :] - points[:, None]
    den = units[None, :] - units[:, None]
    np.fill_diagonal(num, 1.0)
    np.fill_diagonal(den, 1.0)
    kernel = np.log(np.abs(num / den))
    np.fill_diagonal(kernel, np.log(np.abs(tangents)))
    idx = (np.arange(count)[None, :] - np.arange(count)[:, None]) % count
    system = w * (kernel - coeffs[idx])
    rhs = -np.log(np.abs(points))
    return system, rhs


def _solve_collocation(points, tangents, angles, coeffs):
    system, rhs = _build_system(points, tangents, angles, coeffs)
    q = np.linalg.lstsq(system, rhs, rcond=_RCOND)[0]
    residual = float(np.max(np.abs(system @ q - rhs)))
    ok = residual <= _RESIDUAL_RTOL * float(np.max(np.abs(rhs))) + _RESIDUAL_ATOL
    return q, residual, ok


def solve_density(sample: BoundarySample, force: bool = False) -> DiskConformalMap:
    """Solve the collocation system for the density q and normalize the map.

    The boundary sample must be smooth (or ``force`` must be set) and 0
    must lie strictly inside the sampled polygon; translate the matrix
    first if it does not.
    """
    if not sample.smooth and not force:
        raise NonSmoothBoundaryError(
            "boundary sample is flagged non-smooth; collocation accuracy is "
            "unguaranteed (pass force=True to override)"
        )
    if interior_margin(sample, 0.0) <= 0.0:
        raise ContractViolation("0 must be strictly inside the boundary sample")

    coeffs = c_coefficients(sample.n)
    q, residual, ok = _solve_collocation(
        sample.points, sample.tangents, sample.angles, coeffs
    )
    scale = 1.0
    if not ok:
        # Near-unit logarithmic capacity: rescale the domain, solve there.
        scale = 2.0 / float(np.max(np.abs(sample.points)))
        scaled = transform_sample(sample, shift=0.0, scale=scale)
        q, residual, ok = _solve_collocation(
            scaled.points, scaled.tangents, scaled.angles, coeffs
        )
        if not ok:
            raise CapacityDegeneracyError(
                f"collocation system is singular even after rescaling "
                f"(residual {residual:.3e})"
            )

    nodes = sample.points * scale
    mapped = DiskConformalMap(
        sample=sample,
        scale=scale,
        nodes=nodes,
        density=q,
        coefficients=coeffs,
        tau=1.0 + 0.0j,
        residual=residual,
    )
    g0 = _g_value(mapped, 0.0 + 0.0j)
    tau = complex(np.exp(-1j * g0.imag))
    return DiskConformalMap(
        sample=sample,
        scale=scale,
        nodes=nodes,
        density=q,
        coefficients=coeffs,
        tau=tau,
        residual=residual,
    )


def _g_value(mapping: DiskConformalMap, zhat: complex) -> complex:
    """g(zhat) with the log branch unwrapped cumulatively around the grid."""
    diff = mapping.nodes - zhat
    args = np.unwrap(np.angle(diff))
    vals = np.log(np.abs(diff)) + 1j * args
    return complex(mapping.weight * np.dot(mapping.density, vals))


def _g_derivative(mapping: DiskConformalMap, zhat: complex, order: int) -> complex:
    """m-th derivative of g at zhat: -(m-1)! * sum w q_j / (sigma_j - zhat)^m."""
    diff = mapping.nodes - zhat
    total = np.dot(mapping.density, 1.0 / diff**order)
    return complex(-mapping.weight * math.factorial(order - 1) * total)


def _require_interior(mapping: DiskConformalMap, z: complex) -> None:
    if interior_margin(mapping.sample, z) <= 0.0:
        raise DomainError(f"point {z} is not strictly inside the domain")


def map_point(mapping: DiskConformalMap, z: complex) -> complex:
    """Evaluate a(z) for z strictly inside the domain."""
    z = complex(z)
    _require_interior(mapping, z)
    zhat = mapping.scale * z
    return mapping.tau * zhat * np.exp(_g_value(mapping, zhat))


def map_derivative(mapping: DiskConformalMap, z: complex) -> complex:
    """Evaluate a'(z) = tau s e^{g}(1 + zhat g'(zhat)) for interior z."""
    z = complex(z)
    _require_interior(mapping, z)
    zhat = mapping.scale * z
    g = _g_value(mapping, zhat)
    gp = _g_derivative(mapping, zhat, 1)
    return mapping.tau * mapping.scale * np.exp(g) * (1.0 + zhat * gp)


def map_taylor(mapping: DiskConformalMap, z: complex, order: int) -> np.ndarray:
    """Derivatives a^(m)(z) for m = 0..order via truncated power series.

    Builds the Taylor coefficients of g at zhat, exponentiates the series
    and multiplies by (zhat + x); the chain rule for the pre-scaling
    contributes a factor scale^m.
    """
    z = complex(z)
    _require_interior(mapping, z)
    zhat = mapping.scale * z
    k = order + 1
    # Taylor coefficients of g(zhat + x): [g, g', g''/2!, ...]
    gcoef = np.zeros(k, dtype=complex)
    gcoef[0] = _g_value(mapping, zhat)
    for m in range(1, k):
        gcoef[m] = _g_derivative(mapping, zhat, m) / math.factorial(m)
    # exp of the series: e^{g0} * exp(series with zero constant term)
    expo = np.zeros(k, dtype=complex)
    expo[0] = 1.0
    for m in range(1, k):
        acc = 0.0 + 0.0j
        for j in range(1, m + 1):
            acc += j * gcoef[j] * expo[m - j]
        expo[m] = acc / m
    expo *= np.exp(gcoef[0])
    # multiply by (zhat + x)
    series = zhat * expo
    series[1:] += expo[:-1]
    derivs = np.array(
        [
            mapping.tau
            * mapping.scale**m
            * math.factorial(m)
            * series[m]
            for m in range(k)
        ],
        dtype=complex,
    )
    return derivs


def map_matrix(mapping: DiskConformalMap, a) -> np.ndarray:
    """B = a(A) through the Newton divided-difference matrix function.

    Every eigenvalue of A must be strictly inside the mapped domain.
    """
    mat = as_matrix(a, "A")
    for lam in eigenvalues(mat):
        if interior_margin(mapping.sample, complex(lam)) <= 0.0:
            raise SpectralDomainError(
                f"eigenvalue {complex(lam):.6g} is not interior to the domain"
            )
    return function_of_matrix(
        mat,
        lambda z: map_point(mapping, z),
        df=lambda z, m: map_taylor(mapping, z, m)[m],
    )


def boundary_modulus_error(
    mapping: DiskConformalMap,
    phis: np.ndarray,
    boundary_points: np.ndarray,
) -> float:
    """max | |a(sigma(phi))| - 1 | at off-node boundary points.

    Uses the same kernel split as the solve: the smooth part of the
    layer potential is summed by the trapezoidal rule while the circle
    kernel is integrated exactly against the degree-n density through
    phi-shifted cosine sums.  ``phis`` are the curve parameters of the
    given boundary points (must avoid the collocation nodes).
    """
    phis = np.asarray(phis, dtype=float)
    pts = np.asarray(boundary_points, dtype=complex) * mapping.scale
    n = mapping.sample.n
    angles = mapping.sample.angles
    units = np.exp(1j * angles)
    w = mapping.weight
    worst = 0.0
    for phi, sig in zip(phis, pts):
        kernel = np.log(np.abs((mapping.nodes - sig) / (units - np.exp(1j * phi))))
        m = np.arange(1, n + 1)
        cphi = (np.cos(np.outer(angles - phi, m)) / m).sum(axis=1)
        u = w * np.dot(mapping.density, kernel - cphi)
        worst = max(worst, abs(abs(sig) * math.exp(u) - 1.0))
    return worst
