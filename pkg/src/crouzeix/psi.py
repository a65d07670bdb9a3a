"""The spectral-set constant psi(A) and its disk form psi_D(B).

psi_D(B) is the maximum of ||g(B)|| over Blaschke products g with at
most d-1 zeros in the open unit disk; it is approached by multistart
Nelder-Mead over the zero locations, sweeping every admissible zero
count.  psi(A) composes the pipeline: canonical normalization, boundary
sampling, conformal map solve, matrix image B = a(A), then psi_D(B).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .conformal import boundary_modulus_error, map_matrix, solve_density
from .errors import ContractViolation, SpectralDomainError
from .linalg import (
    as_matrix,
    eigenvalues,
    function_of_matrix,
    mobius_of_matrix,
    operator_norm,
    schur,
)
from .numrange import BoundarySample, boundary, interior_margin, support_point

__all__ = [
    "NormalMatrixSignal",
    "NormalizeRecord",
    "BlaschkeProduct",
    "PsiResult",
    "DiscontinuityFixture",
    "is_normal",
    "normalize_matrix",
    "blaschke_matrix_norm",
    "psi_disk",
    "psi",
    "psi_from_sample",
    "psi_discontinuity_fixtures",
]

# Zeros are clamped radially to this radius during optimization.
_CLAMP_RADIUS = 1.0 - 1e-9

_NORMALITY_RTOL = 1e-12


class NormalMatrixSignal(Exception):
    """Raised by normalize_matrix on normal input: psi(A) = 1, no pipeline."""


def is_normal(a, rtol: float = _NORMALITY_RTOL) -> bool:
    """Commutator test ||A*A - AA*|| <= rtol ||A||^2."""
    mat = as_matrix(a)
    h = mat.conj().T
    return operator_norm(h @ mat - mat @ h) <= rtol * operator_norm(mat) ** 2


@dataclass(frozen=True)
class NormalizeRecord:
    """Affine + unitary transform taking A to its canonical form.

    A' = exp(-i phase) (W* A W - shift I) / scale, so
    A  = exp(i phase) scale W A' W* + shift I.
    """

    unitary: np.ndarray
    shift: complex
    scale: float
    phase: float

    def invert(self, aprime: np.ndarray) -> np.ndarray:
        w = self.unitary
        return (
            np.exp(1j * self.phase) * self.scale * (w @ aprime @ w.conj().T)
            + self.shift * np.eye(w.shape[0])
        )

    def apply_scalar(self, z: complex) -> complex:
        """Action on points of the plane: W(A') = apply_scalar(W(A))."""
        return np.exp(-1j * self.phase) * (z - self.shift) / self.scale


def _swap_adjacent(t: np.ndarray, w: np.ndarray, p: int) -> None:
    """Unitary swap of the diagonal entries t[p,p], t[p+1,p+1] in place."""
    a, b, c = t[p, p], t[p, p + 1], t[p + 1, p + 1]
    v = np.array([b, c - a], dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return
    v /= nv
    g = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]], dtype=complex)
    t[:, p : p + 2] = t[:, p : p + 2] @ g
    t[p : p + 2, :] = g.conj().T @ t[p : p + 2, :]
    t[p + 1, p] = 0.0
    w[:, p : p + 2] = w[:, p : p + 2] @ g


def _canonical_order(lam: np.ndarray) -> list[int]:
    """Deterministic eigenvalue order: |lam| descending, then relative phase.

    The tie-break angle is measured against the largest-modulus eigenvalue,
    so the order is equivariant under a global rotation of the spectrum
    (whenever the modulus anchor is unique).
    """
    mods = np.abs(lam)
    if np.max(mods) < 1e-12:
        return list(range(len(lam)))
    anchor_idx = max(range(len(lam)), key=lambda i: (mods[i], lam[i].real, lam[i].imag))
    anchor = lam[anchor_idx]

    def key(i):
        rel = np.angle(lam[i] * np.conj(anchor)) if mods[i] > 0 else 0.0
        return (-mods[i], rel)

    return sorted(range(len(lam)), key=key)


def normalize_matrix(a) -> tuple[np.ndarray, NormalizeRecord]:
    """Canonical triangular form: null trace, unit off-diagonal mass.

    Returns (A', record) with A' = exp(-i phi)(W* A W - c I)/s upper
    triangular, trace 0, sum of squared off-diagonal moduli 1, and the
    first superdiagonal (plus the corner entry, for d >= 3) phased to be
    nonnegative real.  Raises NormalMatrixSignal when A is normal (then
    psi(A) = 1 and there is nothing to normalize).
    """
    mat = as_matrix(a)
    d = mat.shape[0]
    q, t = schur(mat)
    shift = complex(np.trace(mat)) / d
    t0 = t - shift * np.eye(d)
    off_mass = math.sqrt(float(np.sum(np.abs(np.triu(t0, 1)) ** 2)))
    if off_mass <= 1e-14 * (1.0 + operator_norm(mat)):
        raise NormalMatrixSignal("matrix is normal; psi(A) = 1")

    w = q.copy()
    order = _canonical_order(np.diag(t0))
    # Bubble each target eigenvalue into place with adjacent unitary swaps.
    current = list(range(d))
    for target_pos, src in enumerate(order):
        j = current.index(src)
        while j > target_pos:
            _swap_adjacent(t0, w, j - 1)
            current[j - 1], current[j] = current[j], current[j - 1]
            j -= 1

    tol = 1e-12 * off_mass
    sup = np.diag(t0, 1)
    sup_args = np.where(np.abs(sup) > tol, np.angle(sup), 0.0)
    if d >= 3 and abs(t0[0, d - 1]) > tol:
        phase = (np.sum(sup_args) - np.angle(t0[0, d - 1])) / (d - 2)
    elif d == 2 and abs(t0[0, 0]) > tol:
        phase = float(np.angle(t0[0, 0]))
    else:
        phase = 0.0
    deltas = np.where(np.abs(sup) > tol, phase - sup_args, 0.0)
    phis = np.concatenate(([0.0], np.cumsum(deltas)))
    diag_u = np.exp(1j * phis)

    aprime = np.exp(-1j * phase) * (np.conj(diag_u)[:, None] * t0 * diag_u[None, :])
    aprime = np.triu(aprime) / off_mass
    record = NormalizeRecord(
        unitary=w * diag_u[None, :],
        shift=shift,
        scale=off_mass,
        phase=phase,
    )
    return aprime, record


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product prod (z - zeta_j)/(1 - conj(zeta_j) z)."""

    zeros: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.zeros, dtype=complex))
        if np.any(np.abs(z) >= 1.0):
            raise ContractViolation("Blaschke zeros must lie in the open unit disk")
        object.__setattr__(self, "zeros", z)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for zeta in self.zeros:
            out = out * (z - zeta) / (1.0 - np.conj(zeta) * z)
        return out

    def of_matrix(self, b) -> np.ndarray:
        mat = as_matrix(b, "B")
        out = np.eye(mat.shape[0], dtype=complex)
        for zeta in self.zeros:
            out = out @ mobius_of_matrix(mat, zeta)
        return out


def blaschke_matrix_norm(b, g: BlaschkeProduct | Sequence[complex]) -> float:
    """||g(B)|| for a Blaschke product given by its zeros."""
    mat = as_matrix(b, "B")
    if np.max(np.abs(eigenvalues(mat))) >= 1.0:
        raise ContractViolation("blaschke_matrix_norm needs sigma(B) inside the disk")
    if not isinstance(g, BlaschkeProduct):
        g = BlaschkeProduct(np.asarray(g, dtype=complex))
    return operator_norm(g.of_matrix(mat))


@dataclass(frozen=True)
class PsiResult:
    """Outcome of a psi maximization with diagnostics."""

    value: float
    zeros: BlaschkeProduct
    restarts: int
    converged: bool
    per_restart: list = field(default_factory=list)
    uncertainty: float = math.nan


def _clamp_disk(zeta: np.ndarray) -> np.ndarray:
    mod = np.abs(zeta)
    over = mod > _CLAMP_RADIUS
    out = zeta.copy()
    out[over] *= _CLAMP_RADIUS / mod[over]
    return out


def _anchored_starts(eigs: np.ndarray, r: int, cap: int = 12) -> list[np.ndarray]:
    pool = [0.0 + 0.0j]
    for lam in eigs:
        lam = complex(lam)
        if all(abs(lam - p) > 1e-12 for p in pool):
            pool.append(lam)
    pool = [z if abs(z) < _CLAMP_RADIUS else z * _CLAMP_RADIUS / abs(z) for z in pool]
    pool.sort(key=lambda z: (abs(z), np.angle(z) if z != 0 else 0.0))
    combos = itertools.combinations_with_replacement(pool, r)
    return [np.array(c, dtype=complex) for c in itertools.islice(combos, cap)]


def psi_disk(b, restarts: int = 24, seed: int = 0) -> PsiResult:
    """psi_D(B): best Blaschke-product norm over all zero counts r <= d-1.

    Deterministic for a fixed seed: restart i of the r-zero sweep uses the
    generator seeded by (seed, r, i), and the reported value is the running
    maximum over every objective evaluation, so enlarging the restart
    budget can never lower it.
    """
    mat = as_matrix(b, "B")
    eigs = eigenvalues(mat)
    if np.max(np.abs(eigs)) >= 1.0:
        raise ContractViolation("psi_disk needs sigma(B) strictly inside the disk")
    if restarts < 1:
        raise ContractViolation("psi_disk needs restarts >= 1")
    d = mat.shape[0]

    best = {"value": 1.0, "zeros": np.zeros(0, dtype=complex)}
    per_restart: list[float] = []
    any_success = d == 1

    for r in range(1, d):
        def objective(x):
            zeta = _clamp_disk(x[0::2] + 1j * x[1::2])
            val = blaschke_matrix_norm(mat, BlaschkeProduct(zeta))
            if val > best["value"]:
                best["value"] = val
                best["zeros"] = zeta.copy()
            return -val

        starts = _anchored_starts(eigs, r)
        for i in range(restarts):
            rng = np.random.default_rng([seed, r, i])
            radius = 0.7 * np.sqrt(rng.uniform(size=r))
            angle = rng.uniform(0.0, 2.0 * np.pi, size=r)
            starts.append(radius * np.exp(1j * angle))
        for start in starts:
            x0 = np.empty(2 * r)
            x0[0::2], x0[1::2] = start.real, start.imag
            res = minimize(
                objective,
                x0,
                method="Nelder-Mead",
                options={"maxiter": 200 * r, "xatol": 1e-10, "fatol": 1e-12},
            )
            any_success = any_success or bool(res.success)
            per_restart.append(float(-res.fun))

    return PsiResult(
        value=float(best["value"]),
        zeros=BlaschkeProduct(best["zeros"]),
        restarts=restarts,
        converged=any_success,
        per_restart=per_restart,
    )


_MARGIN_RTOL = 1e-9


def psi_from_sample(
    mat: np.ndarray,
    sample: BoundarySample,
    restarts: int = 24,
    seed: int = 0,
    offnode: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> PsiResult:
    """psi of a matrix given a matched boundary sample of its numerical range.

    The sample must describe W(mat) (same frame: no residual shift or
    scale).  ``offnode`` optionally supplies (parameters, boundary points)
    between the collocation nodes; the map's modulus error there is
    reported as the result's uncertainty.
    """
    mat = as_matrix(mat)
    scale = max(1.0, float(np.max(sample.support)))
    for lam in eigenvalues(mat):
        if interior_margin(sample, complex(lam)) <= _MARGIN_RTOL * scale:
            raise SpectralDomainError(
                f"eigenvalue {complex(lam):.6g} touches the boundary of W(A); "
                "psi may be discontinuous there"
            )
    mapping = solve_density(sample)
    b = map_matrix(mapping, mat)
    if np.max(np.abs(eigenvalues(b))) >= 1.0 - 1e-12:
        raise SpectralDomainError("mapped spectrum reaches the unit circle")
    result = psi_disk(b, restarts=restarts, seed=seed)
    uncertainty = math.nan
    if offnode is not None:
        uncertainty = boundary_modulus_error(mapping, offnode[0], offnode[1])
    return replace(result, uncertainty=uncertainty)


def psi(a, n: int = 64, restarts: int = 24, seed: int = 0) -> PsiResult:
    """psi(A) through the full pipeline; 1 immediately for normal A."""
    mat = as_matrix(a)
    if is_normal(mat):
        return PsiResult(
            value=1.0,
            zeros=BlaschkeProduct(np.zeros(0, dtype=complex)),
            restarts=0,
            converged=True,
            uncertainty=0.0,
        )
    try:
        aprime, _record = normalize_matrix(mat)
    except NormalMatrixSignal:
        return PsiResult(
            value=1.0,
            zeros=BlaschkeProduct(np.zeros(0, dtype=complex)),
            restarts=0,
            converged=True,
            uncertainty=0.0,
        )
    sample = boundary(aprime, n)
    offnode = None
    if sample.smooth:
        half = math.pi / (2 * n + 1)
        phis = sample.angles + half
        sigmas = np.array([support_point(aprime, phi)[1] for phi in phis])
        offnode = (phis, sigmas)
    return psi_from_sample(aprime, sample, restarts=restarts, seed=seed, offnode=offnode)


@dataclass(frozen=True)
class DiscontinuityFixture:
    """A matrix with a known psi value or lower bound near a discontinuity."""

    matrix: np.ndarray
    expected: float
    kind: str  # "equals" | "lower_bound"
    epsilon: float = math.nan

    def scalar_norm(self) -> float:
        """||f(A)|| for f(z) = (1 - z^s)/(1 + z^s), s = pi/(2 eps)."""
        if self.kind != "lower_bound":
            raise ContractViolation("scalar_norm applies to the 3x3 fixture only")
        s = math.pi / (2.0 * self.epsilon)

        def f(z):
            return (1.0 - z**s) / (1.0 + z**s)

        def df(z, m):
            if m != 1:
                raise ContractViolation("fixture supplies first derivatives only")
            return -2.0 * s * z ** (s - 1.0) / (1.0 + z**s) ** 2

        return operator_norm(function_of_matrix(self.matrix, f, df))


def psi_discontinuity_fixtures(epsilon: float = 0.1) -> list[DiscontinuityFixture]:
    """The discontinuity showcase matrices with their expected values.

    The zero matrix has psi = 1 while any nonzero nilpotent 2x2
    perturbation jumps to 2; the 3x3 fixture with a 2 sin(eps) coupling
    admits the lower bound pi sin(eps)/(2 eps) through the sector map
    f(z) = (1 - z^{pi/2 eps})/(1 + z^{pi/2 eps}).
    """
    fixtures = [
        DiscontinuityFixture(np.zeros((2, 2), dtype=complex), 1.0, "equals"),
        DiscontinuityFixture(
            np.array([[0.0, 0.01], [0.0, 0.0]], dtype=complex), 2.0, "equals"
        ),
        DiscontinuityFixture(
            np.array(
                [
                    [0.0, 0.0, 0.0],
                    [0.0, 1.0, 2.0 * math.sin(epsilon)],
                    [0.0, 0.0, 1.0],
                ],
                dtype=complex,
            ),
            math.pi * math.sin(epsilon) / (2.0 * epsilon),
            "lower_bound",
            epsilon,
        ),
    ]
    return fixtures
