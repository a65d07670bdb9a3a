"""Closed-form lower and upper bounds for the domain constants C(Omega, d).

Lower bounds come with explicit witness pairs (A, f) where the source
construction gives one; upper bounds are the published completely
bounded estimates (sector, strip, ellipse, parabola, total variation,
and the universal 11.08 cap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .conformal import DiskConformalMap, map_derivative, map_point, solve_density
from .errors import ContractViolation
from .linalg import function_of_matrix, operator_norm
from .numrange import BoundarySample, transform_sample

__all__ = [
    "BoundReport",
    "UNIVERSAL_UPPER",
    "sector_lower",
    "cone_witness",
    "polygon_lower",
    "conformal_lower",
    "rough_lower",
    "sector_upper",
    "ellipse_parabola_upper",
    "tv_upper",
    "report_sector",
    "report_strip",
    "report_polygon",
    "report_ellipse",
    "report_parabola",
    "report_from_sample",
]

# Universal completely bounded bound on any convex domain.
UNIVERSAL_UPPER = 11.08

_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """Labeled lower/upper bounds for one domain, with witness residuals."""

    domain: str
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)
    witness_residuals: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        if not self.lower or not self.upper:
            return True
        return max(self.lower.values()) <= min(self.upper.values()) + 1e-9

    @property
    def best_lower(self) -> float:
        return max(self.lower.values()) if self.lower else -math.inf

    @property
    def best_upper(self) -> float:
        return min(self.upper.values()) if self.upper else math.inf


def sector_lower(alpha: float) -> float:
    """pi sin(alpha)/(2 alpha) for the sector of half-angle alpha; pi/2 at 0."""
    if not 0.0 <= alpha <= math.pi / 2:
        raise ContractViolation("sector_lower needs alpha in [0, pi/2]")
    if alpha == 0.0:
        return math.pi / 2.0
    return math.pi * math.sin(alpha) / (2.0 * alpha)


def cone_witness(alpha: float) -> tuple[np.ndarray, float]:
    """Witness matrix and value for the sector lower bound.

    A = [[1, 2 sin(alpha)], [0, 1]] and f(z) = (1 - z^s)/(1 + z^s) with
    s = pi/(2 alpha) give ||f(A)|| = pi sin(alpha)/(2 alpha) exactly.
    """
    if not 0.0 < alpha <= math.pi / 2:
        raise ContractViolation("cone_witness needs alpha in (0, pi/2]")
    s = math.pi / (2.0 * alpha)
    a = np.array([[1.0, 2.0 * math.sin(alpha)], [0.0, 1.0]], dtype=complex)

    def f(z):
        return (1.0 - z**s) / (1.0 + z**s)

    def df(z, m):
        if m != 1:
            raise ContractViolation("cone witness needs first derivatives only")
        return -2.0 * s * z ** (s - 1.0) / (1.0 + z**s) ** 2

    return a, operator_norm(function_of_matrix(a, f, df))


def polygon_lower(m: int) -> float:
    """2 * integral_0^1 (1 + t^m)^(-2/m) dt for the regular m-gon."""
    if m < 3:
        raise ContractViolation("polygon_lower needs at least 3 sides")
    val, _err = quad(
        lambda t: (1.0 + t**m) ** (-2.0 / m),
        0.0,
        1.0,
        epsabs=_QUAD_TOL,
        epsrel=_QUAD_TOL,
        limit=200,
    )
    return 2.0 * val


def conformal_lower(mapping: DiskConformalMap, z1: complex) -> float:
    """2 d(z1, boundary) |a'(z1)| / (1 - |a(z1)|^2) at an interior point."""
    z1 = complex(z1)
    dist = float(np.min(np.abs(mapping.sample.points - z1)))
    a = map_point(mapping, z1)
    da = map_derivative(mapping, z1)
    return 2.0 * dist * abs(da) / (1.0 - abs(a) ** 2)


def rough_lower(r: float, big_r: float) -> float:
    """2 r / R for a domain between concentric balls of radii r <= R."""
    if not 0.0 < r <= big_r:
        raise ContractViolation("rough_lower needs 0 < r <= R")
    return 2.0 * r / big_r


def _sector_upper_candidates(alpha: float) -> dict:
    out = {"universal": UNIVERSAL_UPPER}
    if alpha > 0.0:
        out["log_tan"] = (
            (math.pi - alpha)
            / math.pi
            * (2.0 - (2.0 / math.pi) * math.log(math.tan(alpha * math.pi / (4.0 * (math.pi - alpha)))))
        )
        out["aperture"] = (math.pi - alpha) / alpha
        integral, _ = quad(
            lambda x: (math.pi - x + math.sin(x)) / math.sin(x),
            alpha,
            math.pi / 2,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        out["integral"] = 1.0 + (2.0 / math.pi) * integral
    if alpha < math.pi / 3 - 1e-6:
        # Degenerates 0/0 at alpha = pi/3; not analytically continued.
        arg = math.cos(math.pi - 2.0 * alpha) / math.cos(alpha)
        arg = min(1.0, max(-1.0, arg))
        out["arccos"] = (
            2.0
            - 2.0 * alpha / math.pi
            + (2.0 * math.cos(alpha))
            / (math.pi * math.sqrt(1.0 + 2.0 * math.cos(2.0 * alpha)))
            * math.acos(arg)
        )
    return out


def sector_upper(alpha: float) -> float:
    """Minimum of the published sector upper bounds valid at alpha."""
    if not 0.0 <= alpha <= math.pi / 2:
        raise ContractViolation("sector_upper needs alpha in [0, pi/2]")
    return min(_sector_upper_candidates(alpha).values())


def ellipse_parabola_upper(e: float | None = None, parabola: bool = False) -> float:
    """2 + 2/sqrt(4 - e^2) for an ellipse; 2 + 2/sqrt(3) for the parabola."""
    if parabola:
        return 2.0 + 2.0 / math.sqrt(3.0)
    if e is None or not 0.0 <= e < 1.0:
        raise ContractViolation("ellipse eccentricity must lie in [0, 1)")
    return 2.0 + 2.0 / math.sqrt(4.0 - e**2)


def tv_upper(sample: BoundarySample, omega: complex | None = None) -> float:
    """2 + pi + TV(log|sigma - omega|), minimized over boundary nodes.

    With ``omega`` given (diagnostic mode, e.g. a domain center) the total
    variation runs over the full closed polygon.  Otherwise omega ranges
    over the boundary nodes; the evaluation node and its two neighbours
    are excluded and the variation is taken along the remaining open
    chain, which keeps the discrete sum finite.
    """
    pts = sample.points
    count = len(pts)
    if omega is not None:
        vals = np.log(np.abs(pts - complex(omega)))
        tv = float(np.sum(np.abs(np.diff(np.concatenate([vals, vals[:1]])))))
        return min(UNIVERSAL_UPPER, 2.0 + math.pi + tv)
    best = math.inf
    for k in range(count):
        chain = [(k + 2 + i) % count for i in range(count - 3)]
        vals = np.log(np.abs(pts[chain] - pts[k]))
        tv = float(np.sum(np.abs(np.diff(vals))))
        best = min(best, tv)
    return min(UNIVERSAL_UPPER, 2.0 + math.pi + best)


def report_sector(alpha: float) -> BoundReport:
    lower = {"cone": sector_lower(alpha)}
    residuals = {}
    if alpha > 0.0:
        _, witness = cone_witness(alpha)
        lower["witness"] = witness
        residuals["cone_witness"] = abs(witness - sector_lower(alpha))
    return BoundReport(
        domain=f"sector({alpha:.6g})",
        lower=lower,
        upper=_sector_upper_candidates(alpha),
        witness_residuals=residuals,
    )


def report_strip() -> BoundReport:
    return BoundReport(
        domain="strip",
        lower={"strip": math.pi / 2.0},
        upper={"cb_strip": 2.0 + 2.0 / math.sqrt(3.0), "universal": UNIVERSAL_UPPER},
    )


def report_polygon(m: int) -> BoundReport:
    return BoundReport(
        domain=f"polygon({m})",
        lower={
            "conformal_integral": polygon_lower(m),
            "rough": 2.0 * math.cos(math.pi / m),
            "bounded_domain": 1.5,
        },
        upper={"universal": UNIVERSAL_UPPER},
    )


def report_ellipse(e: float) -> BoundReport:
    return BoundReport(
        domain=f"ellipse({e:.6g})",
        lower={"bounded_domain": 1.5, "rough": 2.0 * math.sqrt(1.0 - e**2)},
        upper={
            "cb_ellipse": ellipse_parabola_upper(e),
            "universal": UNIVERSAL_UPPER,
        },
    )


def report_parabola() -> BoundReport:
    return BoundReport(
        domain="parabola",
        lower={"aperture_zero": math.pi / 2.0},
        upper={
            "cb_parabola": ellipse_parabola_upper(parabola=True),
            "universal": UNIVERSAL_UPPER,
        },
    )


def report_from_sample(sample: BoundarySample) -> BoundReport:
    """Bounds for the sampled convex domain itself."""
    centroid = complex(np.mean(sample.points))
    margins = sample.support - np.real(np.exp(-1j * sample.angles) * centroid)
    r = float(np.min(margins))
    big_r = float(np.max(np.abs(sample.points - centroid)))
    lower = {"bounded_domain": 1.5}
    residuals = {}
    if r > 0:
        lower["rough"] = rough_lower(r, big_r)
        shifted = transform_sample(sample, shift=centroid)
        mapping = solve_density(shifted)
        lower["conformal"] = conformal_lower(mapping, 0.0)
    return BoundReport(
        domain="sampled",
        lower=lower,
        upper={"tv": tv_upper(sample), "universal": UNIVERSAL_UPPER},
        witness_residuals=residuals,
    )
