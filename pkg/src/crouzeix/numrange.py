"""Numerical range boundaries via the support-function characterization.

The boundary of W(A) is sampled at the odd angle grid
``theta_j = 2 pi j / (2n + 1)``: for each direction the extreme point is
the Rayleigh quotient of the top eigenvector of
``cos(theta) M + sin(theta) N`` where ``A = M + iN`` with Hermitian M, N.
A boundary sample is the exchange format consumed by the conformal
solver, so it also carries per-node tangents (spectral differentiation)
and a smoothness flag that goes false when the top eigenvalue gap
collapses somewhere on the grid (flat boundary pieces).

The module also hosts the closed-form cardioid family used for matrices
whose numerical range has a straight segment on the boundary, where the
support parameterization is discontinuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ContractViolation
from .linalg import as_matrix, hermitian_eigen, operator_norm

__all__ = [
    "BoundarySample",
    "NumericalRangeMeta",
    "grid_angles",
    "support_point",
    "boundary",
    "circle_boundary",
    "numerical_radius",
    "contains",
    "sample_contains",
    "hausdorff",
    "hausdorff_polyline",
    "cardioid_boundary",
    "cardioid_matrix",
    "cardioid_curve",
    "transform_sample",
    "polygon_is_convex",
    "range_meta",
]

# Top-gap threshold (relative to ||A||) below which the boundary is
# treated as having a flat part.
GAP_RTOL = 1e-6

_GOLDEN_STEPS = 60


def grid_angles(n: int) -> np.ndarray:
    """The odd collocation grid theta_j = 2 pi j/(2n+1), j = 0..2n."""
    if n < 1:
        raise ContractViolation("half-order n must be >= 1")
    count = 2 * n + 1
    return 2.0 * np.pi * np.arange(count) / count


@dataclass(frozen=True)
class BoundarySample:
    """Discretized boundary of a numerical range.

    ``points[j]`` lies on the boundary curve; for support-aligned samples
    it is the extreme point in direction ``angles[j]`` and ``support[j]``
    is the support value there.  For samples built from an explicit
    parameterization (cardioid family) the angles are just the curve
    parameter and ``support`` holds the polygon support values.
    """

    n: int
    angles: np.ndarray
    points: np.ndarray
    support: np.ndarray
    tangents: np.ndarray
    smooth: bool
    min_gap: float
    support_aligned: bool = True

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class NumericalRangeMeta:
    """Scalar diagnostics of a numerical range computation."""

    matrix: np.ndarray
    radius: float
    min_gap: float


def _split_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = 0.5 * (a + a.conj().T)
    n = (a - a.conj().T) / 2j
    return m, n


def support_point(a, theta: float) -> tuple[float, complex, float]:
    """Extreme point of W(A) in direction ``exp(i theta)``.

    Returns ``(w_m, z, gap)``: the support value (top eigenvalue of
    ``cos(theta) M + sin(theta) N``), the boundary point, and the gap to
    the second eigenvalue (``inf`` for 1x1 matrices).
    """
    mat = as_matrix(a)
    m, n = _split_hermitian(mat)
    h = math.cos(theta) * m + math.sin(theta) * n
    eig = hermitian_eigen(h)
    w_m = float(eig.values[-1])
    vec = eig.vectors[:, -1]
    z = complex(vec.conj() @ mat @ vec)
    gap = float(eig.values[-1] - eig.values[-2]) if mat.shape[0] > 1 else math.inf
    return w_m, z, gap


def _trig_derivative(samples: np.ndarray) -> np.ndarray:
    """Spectral derivative of a 2 pi-periodic sample set on the odd grid."""
    count = len(samples)
    wavenumbers = np.fft.fftfreq(count, d=1.0 / count)
    return np.fft.ifft(1j * wavenumbers * np.fft.fft(samples))


def _refine_min_gap(mat: np.ndarray, angles: np.ndarray, gaps: np.ndarray,
                    scale: float) -> float:
    """Search between grid nodes for top-eigenvalue near-crossings.

    The gap can vanish at an angle strictly between two nodes (a straight
    boundary segment whose normal misses the grid), so every suspicious
    local minimum of the sampled gap gets a golden-section refinement.
    """
    count = len(angles)
    spacing = 2.0 * np.pi / count
    min_gap = float(np.min(gaps))
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    suspects = [
        j
        for j in range(count)
        if gaps[j] < 0.1 * scale
        and gaps[j] <= gaps[(j - 1) % count]
        and gaps[j] <= gaps[(j + 1) % count]
    ]
    for j in sorted(suspects, key=lambda i: gaps[i])[:4]:
        lo, hi = angles[j] - spacing, angles[j] + spacing
        x1 = hi - inv_phi * (hi - lo)
        x2 = lo + inv_phi * (hi - lo)
        f1 = support_point(mat, x1)[2]
        f2 = support_point(mat, x2)[2]
        for _ in range(40):
            if f1 > f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + inv_phi * (hi - lo)
                f2 = support_point(mat, x2)[2]
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - inv_phi * (hi - lo)
                f1 = support_point(mat, x1)[2]
        min_gap = min(min_gap, f1, f2)
    return min_gap


def boundary(a, n: int = 64) -> BoundarySample:
    """Sample the boundary of W(A) on the odd support grid of half-order ``n``."""
    mat = as_matrix(a)
    if n < 4:
        raise ContractViolation("boundary needs half-order n >= 4")
    angles = grid_angles(n)
    points = np.empty(len(angles), dtype=complex)
    support = np.empty(len(angles), dtype=float)
    gaps = np.empty(len(angles), dtype=float)
    for j, theta in enumerate(angles):
        support[j], points[j], gaps[j] = support_point(mat, theta)
    scale = max(operator_norm(mat), 1e-300)
    if mat.shape[0] > 1:
        min_gap = _refine_min_gap(mat, angles, gaps, scale)
    else:
        min_gap = math.inf
    smooth = bool(min_gap >= GAP_RTOL * scale)
    tangents = _trig_derivative(points)
    return BoundarySample(
        n=n,
        angles=angles,
        points=points,
        support=support,
        tangents=tangents,
        smooth=smooth,
        min_gap=min_gap,
    )


def circle_boundary(center: complex, radius: float, n: int = 64) -> BoundarySample:
    """Synthetic boundary sample of a circle (exact points and tangents)."""
    if radius <= 0:
        raise ContractViolation("circle_boundary needs radius > 0")
    center = complex(center)
    angles = grid_angles(n)
    units = np.exp(1j * angles)
    points = center + radius * units
    return BoundarySample(
        n=n,
        angles=angles,
        points=points,
        support=np.real(np.conj(units) * center) + radius,
        tangents=1j * radius * units,
        smooth=True,
        min_gap=math.inf,
    )


def numerical_radius(a, n: int = 64) -> float:
    """max |z| over W(A), grid maximum refined by golden section in theta."""
    mat = as_matrix(a)
    if mat.shape[0] == 1:
        return abs(complex(mat[0, 0]))
    sample = boundary(mat, n)
    radii = np.abs(sample.points)
    j = int(np.argmax(radii))
    best = float(radii[j])

    def modulus(theta: float) -> float:
        return abs(support_point(mat, theta)[1])

    spacing = 2.0 * np.pi / sample.size
    lo, hi = sample.angles[j] - spacing, sample.angles[j] + spacing
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = modulus(x1), modulus(x2)
    for _ in range(_GOLDEN_STEPS):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = modulus(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = modulus(x1)
    return max(best, f1, f2)


def sample_contains(sample: BoundarySample, z: complex, tol: float = 1e-9) -> bool:
    """Exterior-polygon membership test against the sampled support lines."""
    z = complex(z)
    lhs = np.real(np.exp(-1j * sample.angles) * z)
    return bool(np.all(lhs <= sample.support + tol))


def interior_margin(sample: BoundarySample, z: complex) -> float:
    """min_j (w_j - Re(e^{-i theta_j} z)); positive means strictly inside."""
    z = complex(z)
    lhs = np.real(np.exp(-1j * sample.angles) * z)
    return float(np.min(sample.support - lhs))


def contains(a, z: complex, n: int = 64, tol: float = 1e-9) -> bool:
    """True when z passes every sampled supporting-line constraint of W(A)."""
    return sample_contains(boundary(a, n), z, tol)


def hausdorff(b1: BoundarySample, b2: BoundarySample) -> float:
    """Symmetric max-min distance between the two sampled vertex sets."""
    p = b1.points[:, None]
    q = b2.points[None, :]
    dist = np.abs(p - q)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _points_to_polyline(p: np.ndarray, q: np.ndarray) -> float:
    """max over p of the distance to the closed polyline through q."""
    a = q
    b = np.roll(q, -1)
    ab = b - a
    denom = np.maximum(np.abs(ab) ** 2, 1e-300)
    t = np.clip(((p[:, None] - a[None, :]) * np.conj(ab[None, :])).real / denom, 0.0, 1.0)
    foot = a[None, :] + t * ab[None, :]
    return float(np.max(np.min(np.abs(p[:, None] - foot), axis=1)))


def hausdorff_polyline(b1: BoundarySample, b2: BoundarySample) -> float:
    """Hausdorff distance between the two closed boundary polylines.

    Unlike :func:`hausdorff` this measures against polygon edges, so two
    samplings of the same curve with different node placement compare at
    the polygon sagitta scale rather than the node spacing.
    """
    return max(
        _points_to_polyline(b1.points, b2.points),
        _points_to_polyline(b2.points, b1.points),
    )


def polygon_is_convex(points: np.ndarray, tol: float = 1e-9) -> bool:
    """Cross products of consecutive edges all one sign, up to tol slack."""
    pts = np.asarray(points, dtype=complex)
    edges = np.roll(pts, -1) - pts
    cross = np.imag(np.conj(edges) * np.roll(edges, -1))
    scale = max(float(np.max(np.abs(edges))) ** 2, 1e-300)
    return bool(np.all(cross >= -tol * max(scale, 1.0)))


def transform_sample(sample: BoundarySample, shift: complex = 0.0, scale: float = 1.0) -> BoundarySample:
    """Boundary sample of ``scale * (W - shift)`` for real positive scale.

    Translation and positive scaling leave outward normals unchanged, so a
    support-aligned sample stays aligned.
    """
    if scale <= 0:
        raise ContractViolation("transform_sample needs scale > 0")
    shift = complex(shift)
    new_support = (sample.support - np.real(np.exp(-1j * sample.angles) * shift)) * scale
    return replace(
        sample,
        points=(sample.points - shift) * scale,
        support=new_support,
        tangents=sample.tangents * scale,
    )


def range_meta(a, n: int = 64) -> NumericalRangeMeta:
    """Numerical radius and worst top-eigenvalue gap over the grid."""
    mat = as_matrix(a)
    sample = boundary(mat, n)
    return NumericalRangeMeta(
        matrix=mat,
        radius=numerical_radius(mat, n),
        min_gap=sample.min_gap,
    )


# ---------------------------------------------------------------------------
# Cardioid family: A(a,b) = [[0, a, b], [-a, 0, b], [-b, -b, 1]]
# ---------------------------------------------------------------------------


def cardioid_matrix(a: float, b: float) -> np.ndarray:
    """The real 3x3 family whose numerical range is a cardioid hull."""
    return np.array(
        [[0.0, a, b], [-a, 0.0, b], [-b, -b, 1.0]],
        dtype=complex,
    )


def cardioid_curve(a: float, b: float, t: np.ndarray) -> np.ndarray:
    """Parametrized cardioid arc of W(A(a,b)) for t in [-1/a, 1/a]."""
    t = np.asarray(t, dtype=float)
    ta2 = (t * a) ** 2
    denom = (1.0 - ta2) ** 2 + 2.0 * t**2 * b**2 * (1.0 + ta2)
    x = (1.0 - ta2) ** 2 / denom
    y = 4.0 * t * b**2 / denom
    return x + 1j * y


def _arc_length_table(a: float, b: float, samples: int = 8192) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative chord length of the upper arc t in [0, 1/a]."""
    t = np.linspace(0.0, 1.0 / a, samples)
    pts = cardioid_curve(a, b, t)
    seg = np.abs(np.diff(pts))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    return t, cum


def cardioid_boundary(a: float, b: float, n: int = 64, offset: float = 0.0) -> BoundarySample:
    """Closed boundary of W(A(a,b)) sampled at equal arc length.

    The curve is the cardioid arc joined to the vertical segment from ia
    to -ia.  Sampling at equal arc length gives a smooth 2 pi-periodic
    parameterization (the hull is C^1), which is what the collocation
    solver needs; the support parameterization would jump across the
    segment.  Node 0 sits at the point (1, 0); ``offset`` shifts every
    node by that fraction of the spacing (0.5 gives the midpoints used
    for off-node accuracy checks).
    """
    if a <= 0 or b <= 0:
        raise ContractViolation(
            "cardioid family degenerates at a=0 or b=0 (normal or reducible)"
        )
    if n < 4:
        raise ContractViolation("cardioid_boundary needs half-order n >= 4")
    count = 2 * n + 1

    t_tab, s_tab = _arc_length_table(a, b)
    arc_len = float(s_tab[-1])
    seg_len = 2.0 * a
    total = 2.0 * arc_len + seg_len
    t_of_s = PchipInterpolator(s_tab, t_tab)

    s_nodes = total * ((np.arange(count) + offset) % count) / count
    points = np.empty(count, dtype=complex)
    for j, s in enumerate(s_nodes):
        if s <= arc_len:
            points[j] = cardioid_curve(a, b, float(t_of_s(s)))
        elif s <= arc_len + seg_len:
            points[j] = 1j * (a - (s - arc_len))
        else:
            points[j] = np.conj(cardioid_curve(a, b, float(t_of_s(total - s))))

    angles = grid_angles(n)
    support = np.array(
        [float(np.max(np.real(np.exp(-1j * th) * points))) for th in angles]
    )
    tangents = _trig_derivative(points)
    return BoundarySample(
        n=n,
        angles=angles,
        points=points,
        support=support,
        tangents=tangents,
        smooth=True,
        min_gap=math.nan,
        support_aligned=False,
    )
