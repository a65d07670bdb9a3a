"""Structured maximization of the strip and sector domain constants.

The admissible matrices are parameterized so that the numerical range
constraint holds by construction:

* strip: A = [[D1, E], [E*, D2]] + i diag(I_k, -I_{d-k}) keeps
  |Im W(A)| <= 1;
* sector: A = H diag(e^{i alpha} I_k, e^{-i alpha} I_{d-k}) H with
  Hermitian H keeps |arg W(A)| <= alpha.

The objective is the norm of the matching Blaschke-type product in
exp(pi z/2) (strip) or z^{pi/(2 alpha)} (sector).  All maxima reported
here are best-found values: lower bounds for the true constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import (
    ContractViolation,
    ConvergenceError,
    InstabilityError,
    PoleError,
    SpectralDomainError,
)
from .linalg import eigenvalues, function_of_matrix, operator_norm

__all__ = [
    "StripCandidate",
    "SectorCandidate",
    "SearchResult",
    "strip_matrix",
    "sector_matrix",
    "strip_objective",
    "sector_objective",
    "optimize_strip",
    "optimize_sector",
    "embed_strip_candidate",
    "paper_symmetric_candidate",
]

# Hard cap on the sector exponent s = pi/(2 alpha); beyond it z^s is
# numerically meaningless in doubles.
MAX_SECTOR_EXPONENT = 50.0

_EXP_ARG_LIMIT = 300.0
_POLE_COND = 1e14
_PENALTY = 1e3


@dataclass(frozen=True)
class StripCandidate:
    """Parameters of a strip-admissible matrix and its Blaschke data."""

    d: int
    k: int
    d1: np.ndarray
    d2: np.ndarray
    e: np.ndarray
    gammas: np.ndarray

    def matrix(self) -> np.ndarray:
        return strip_matrix(self)


@dataclass(frozen=True)
class SectorCandidate:
    """Parameters of a sector-admissible matrix and its Blaschke data."""

    alpha: float
    d: int
    k: int
    d1: np.ndarray
    d2: np.ndarray
    e: np.ndarray
    gammas: np.ndarray

    @property
    def exponent(self) -> float:
        return math.pi / (2.0 * self.alpha)

    def matrix(self) -> np.ndarray:
        return sector_matrix(self)


@dataclass
class SearchResult:
    value: float
    candidate: object
    per_restart: list = field(default_factory=list)
    converged: bool = False
    trace: list = field(default_factory=list)


def _hermitian_block(d1, d2, e) -> np.ndarray:
    k, dk = len(d1), len(d2)
    h = np.zeros((k + dk, k + dk), dtype=complex)
    h[:k, :k] = np.diag(np.asarray(d1, dtype=float))
    h[k:, k:] = np.diag(np.asarray(d2, dtype=float))
    h[:k, k:] = e
    h[k:, :k] = np.asarray(e, dtype=complex).conj().T
    return h


def strip_matrix(c: StripCandidate) -> np.ndarray:
    h = _hermitian_block(c.d1, c.d2, c.e)
    shift = np.concatenate([np.ones(c.k), -np.ones(c.d - c.k)])
    return h + 1j * np.diag(shift)


def sector_matrix(c: SectorCandidate) -> np.ndarray:
    h = _hermitian_block(c.d1, c.d2, c.e)
    phases = np.concatenate(
        [np.full(c.k, np.exp(1j * c.alpha)), np.full(c.d - c.k, np.exp(-1j * c.alpha))]
    )
    return h @ (phases[:, None] * h)


def _mobius_product(m: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    d = m.shape[0]
    out = np.eye(d, dtype=complex)
    for gamma in gammas:
        den = m + np.conj(gamma) * np.eye(d)
        if np.linalg.cond(den) > _POLE_COND:
            raise PoleError(f"factor pole: M + conj({gamma:.4g}) I is singular")
        out = out @ np.linalg.solve(den.T, (m - gamma * np.eye(d)).T).T
    return out


def strip_objective(c: StripCandidate) -> float:
    """||f(A)|| with f(z) = prod (e^{pi z/2} - gamma_j)/(e^{pi z/2} + conj(gamma_j)).

    |f| = 1 on both strip edges for Re gamma_j >= 0, so the value is a
    lower bound for C(strip, d) whenever the candidate is admissible.
    """
    if np.any(np.asarray(c.gammas).real < -1e-12):
        raise ContractViolation("strip gammas need Re gamma >= 0")
    a = strip_matrix(c)
    if operator_norm(a) * math.pi / 2.0 > _EXP_ARG_LIMIT:
        raise InstabilityError("exp(pi A/2) out of double range")
    m = function_of_matrix(
        a,
        lambda z: np.exp(math.pi / 2.0 * z),
        df=lambda z, order: (math.pi / 2.0) ** order * np.exp(math.pi / 2.0 * z),
    )
    return operator_norm(_mobius_product(m, np.asarray(c.gammas, dtype=complex)))


def sector_objective(c: SectorCandidate) -> float:
    """||f(A)|| with f(z) = prod (z^s - gamma_j)/(z^s + conj(gamma_j)), s = pi/(2 alpha)."""
    if not 0.0 < c.alpha <= math.pi / 2.0:
        raise ContractViolation("sector alpha must lie in (0, pi/2]")
    if np.any(np.asarray(c.gammas).real < -1e-12):
        raise ContractViolation("sector gammas need Re gamma >= 0")
    s = c.exponent
    if s > MAX_SECTOR_EXPONENT:
        raise InstabilityError(f"sector exponent s = {s:.3g} exceeds the cap")
    a = sector_matrix(c)
    lams = eigenvalues(a)
    scale = max(operator_norm(a), 1e-300)
    if np.min(np.abs(lams)) <= 1e-12 * scale:
        raise SpectralDomainError("eigenvalue at the sector vertex 0")
    if s * math.log(float(np.max(np.abs(lams)))) > _EXP_ARG_LIMIT:
        raise InstabilityError("z^s overflows at the spectrum")

    def f(z):
        return z**s

    def df(z, order):
        coeff = 1.0
        for i in range(order):
            coeff *= s - i
        return coeff * z ** (s - order)

    m = function_of_matrix(a, f, df)
    return operator_norm(_mobius_product(m, np.asarray(c.gammas, dtype=complex)))


# ---------------------------------------------------------------------------
# Search spaces: pack/unpack unconstrained optimizer variables
# ---------------------------------------------------------------------------


def _gammas_from_vars(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # Re gamma >= 0 by construction: |arg gamma| = |arctan(v)| < pi/2.
    return np.exp(u) * np.exp(1j * np.arctan(v))


class _StripSpace:
    """Full strip parameterization at block split k: 2k(d-k) + 2d - 2 reals."""

    def __init__(self, d: int, k: int):
        self.d, self.k = d, k
        self.ne = 2 * k * (d - k) - (d - 1)
        self.nvars = k + (d - k - 1) + self.ne + 2 * (d - 1)

    def build(self, x: np.ndarray) -> StripCandidate:
        d, k = self.d, self.k
        pos = 0
        d1 = x[pos : pos + k]
        pos += k
        d2_free = x[pos : pos + d - k - 1]
        pos += d - k - 1
        d2 = np.concatenate([d2_free, [-(np.sum(d1) + np.sum(d2_free))]])
        e = np.zeros((k, d - k), dtype=complex)
        for i in range(k):
            for j in range(d - k):
                re = x[pos]
                pos += 1
                if i == 0 or j == d - k - 1:
                    e[i, j] = re  # first row and last column stay real
                else:
                    e[i, j] = re + 1j * x[pos]
                    pos += 1
        u = x[pos : pos + d - 1]
        v = x[pos + d - 1 : pos + 2 * (d - 1)]
        return StripCandidate(d=d, k=k, d1=d1, d2=d2, e=e, gammas=_gammas_from_vars(u, v))

    def random(self, rng: np.random.Generator) -> np.ndarray:
        x = rng.normal(scale=1.5, size=self.nvars)
        return x


class _StripSymmetricSpace:
    """d = 4 symmetric family: D = diag(x1, -x1), E = [[x2, x3], [x3, x2]],
    gammas = (g, 1, 1/g); four real variables (x1, x2, x3, log g)."""

    nvars = 4

    def __init__(self):
        self.d, self.k = 4, 2

    def build(self, x: np.ndarray) -> StripCandidate:
        x1, x2, x3, u = x
        diag = np.array([x1, -x1])
        e = np.array([[x2, x3], [x3, x2]], dtype=complex)
        gammas = np.array([np.exp(u), 1.0, np.exp(-u)], dtype=complex)
        return StripCandidate(d=4, k=2, d1=diag, d2=diag, e=e, gammas=gammas)

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(scale=1.5, size=4)


class _StripPersymmetricSpace:
    """Even d >= 6 ansatz: D1 = D2 = -reversal(D1), persymmetric real E,
    reciprocal-symmetric gamma chain with middle 1."""

    def __init__(self, d: int):
        if d < 6 or d % 2:
            raise ContractViolation("persymmetric ansatz needs even d >= 6")
        self.d, self.k = d, d // 2
        m = self.k
        self.ndiag = m // 2
        self.epairs = [
            (i, j)
            for i in range(m)
            for j in range(m)
            if (i, j) <= (m - 1 - j, m - 1 - i)
        ]
        self.ngam = (d - 2) // 2
        self.nvars = self.ndiag + len(self.epairs) + self.ngam

    def build(self, x: np.ndarray) -> StripCandidate:
        m = self.k
        diag = np.zeros(m)
        for i in range(self.ndiag):
            diag[i] = x[i]
            diag[m - 1 - i] = -x[i]
        e = np.zeros((m, m), dtype=complex)
        for val, (i, j) in zip(x[self.ndiag :], self.epairs):
            e[i, j] = val
            e[m - 1 - j, m - 1 - i] = val
        u = x[self.ndiag + len(self.epairs) :]
        gammas = np.concatenate([np.exp(u), [1.0], np.exp(-u[::-1])]).astype(complex)
        return StripCandidate(d=self.d, k=m, d1=diag, d2=diag, e=e, gammas=gammas)

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(scale=1.5, size=self.nvars)


class _SectorSpace:
    """Full sector parameterization at block split k (no trace constraint)."""

    def __init__(self, alpha: float, d: int, k: int):
        self.alpha, self.d, self.k = alpha, d, k
        self.ne = 2 * k * (d - k) - (d - 1)
        self.nvars = d + self.ne + 2 * (d - 1)

    def build(self, x: np.ndarray) -> SectorCandidate:
        d, k = self.d, self.k
        pos = 0
        d1 = x[pos : pos + k]
        pos += k
        d2 = x[pos : pos + d - k]
        pos += d - k
        e = np.zeros((k, d - k), dtype=complex)
        for i in range(k):
            for j in range(d - k):
                re = x[pos]
                pos += 1
                if i == 0 or j == d - k - 1:
                    e[i, j] = re
                else:
                    e[i, j] = re + 1j * x[pos]
                    pos += 1
        u = x[pos : pos + d - 1]
        v = x[pos + d - 1 : pos + 2 * (d - 1)]
        return SectorCandidate(
            alpha=self.alpha, d=d, k=k, d1=d1, d2=d2, e=e,
            gammas=_gammas_from_vars(u, v),
        )

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(scale=1.0, size=self.nvars)


class _SectorSymmetricSpace:
    """d = 4 sector analogue of the symmetric strip family."""

    nvars = 4

    def __init__(self, alpha: float):
        self.alpha = alpha
        self.d, self.k = 4, 2

    def build(self, x: np.ndarray) -> SectorCandidate:
        x1, x2, x3, u = x
        diag = np.array([x1, -x1])
        e = np.array([[x2, x3], [x3, x2]], dtype=complex)
        gammas = np.array([np.exp(u), 1.0, np.exp(-u)], dtype=complex)
        return SectorCandidate(
            alpha=self.alpha, d=4, k=2, d1=diag, d2=diag, e=e, gammas=gammas
        )

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(scale=1.0, size=4)


_SOFT_ERRORS = (PoleError, InstabilityError, SpectralDomainError, ConvergenceError)


def _multistart(objective, space, restarts, seed_key, starts=None, maxiter_factor=400):
    """Shared Nelder-Mead multistart loop; returns the running maximum."""

    best = {"value": -math.inf, "x": None}

    def neg(x):
        try:
            candidate = space.build(np.asarray(x, dtype=float))
            val = objective(candidate)
        except _SOFT_ERRORS:
            return _PENALTY
        if val > best["value"]:
            best["value"] = val
            best["x"] = np.asarray(x, dtype=float).copy()
        return -val

    pool = list(starts) if starts else []
    for i in range(restarts):
        rng = np.random.default_rng(list(seed_key) + [i])
        pool.append(space.random(rng))

    per_restart = []
    any_success = False
    options = {
        "maxiter": maxiter_factor * space.nvars,
        "xatol": 1e-9,
        "fatol": 1e-11,
        "adaptive": space.nvars > 5,
    }
    for x0 in pool:
        res = minimize(neg, np.asarray(x0, dtype=float), method="Nelder-Mead", options=options)
        per_restart.append(float(-res.fun))
        any_success = any_success or bool(res.success)
    if best["x"] is not None:
        # Polish the incumbent once with tighter tolerances.
        res = minimize(
            neg,
            best["x"],
            method="Nelder-Mead",
            options={**options, "xatol": 1e-11, "fatol": 1e-13},
        )
        any_success = any_success or bool(res.success)
    return best, per_restart, any_success


def paper_symmetric_candidate(x1: float, x2: float, x3: float, gamma1: float) -> StripCandidate:
    """Convenience constructor for the symmetric d=4 strip family."""
    diag = np.array([x1, -x1])
    e = np.array([[x2, x3], [x3, x2]], dtype=complex)
    gammas = np.array([gamma1, 1.0, 1.0 / gamma1], dtype=complex)
    return StripCandidate(d=4, k=2, d1=diag, d2=diag, e=e, gammas=gammas)


def embed_strip_candidate(c: StripCandidate) -> StripCandidate:
    """Embed a (d-2)-candidate into dimension d with a decoupled normal block.

    The added block is normal (zero coupling) and the two added Blaschke
    factors use gamma ~ 0 so they act as the identity: the objective value
    is preserved up to roundoff.
    """
    d_new, k_new = c.d + 2, c.k + 1
    d1 = np.concatenate([np.asarray(c.d1, float), [0.0]])
    d2 = np.concatenate([np.asarray(c.d2, float), [0.0]])
    e = np.zeros((k_new, d_new - k_new), dtype=complex)
    e[: c.k, : c.d - c.k] = c.e
    gammas = np.concatenate([np.asarray(c.gammas, complex), [1e-13, 1e-13]])
    return StripCandidate(d=d_new, k=k_new, d1=d1, d2=d2, e=e, gammas=gammas)


def optimize_strip(
    d: int,
    restarts: int = 24,
    seed: int = 0,
    symmetric: bool = False,
    embed_from: Optional[StripCandidate] = None,
) -> SearchResult:
    """Best-found value of the strip constant over the reduced family.

    Sweeps the block splits 1 <= k <= d/2 with Nelder-Mead multistart;
    ``symmetric`` restricts d=4 to the four-variable symmetric family
    (and even d >= 6 to the persymmetric ansatz).  ``embed_from`` seeds
    an extra start embedding a lower-dimensional candidate.
    """
    if d not in (2, 4, 6, 8):
        raise ContractViolation("optimize_strip supports even d in {2, 4, 6, 8}")
    spaces = []
    if symmetric and d == 4:
        spaces.append(_StripSymmetricSpace())
    elif symmetric and d >= 6:
        spaces.append(_StripPersymmetricSpace(d))
    else:
        spaces.extend(_StripSpace(d, k) for k in range(1, d // 2 + 1))

    overall = SearchResult(value=-math.inf, candidate=None)
    for ks, space in enumerate(spaces):
        starts = []
        if embed_from is not None and not symmetric:
            emb = embed_strip_candidate(embed_from)
            if emb.d == d and emb.k == space.k:
                starts.append(_strip_vars_from_candidate(space, emb))
        best, per_restart, ok = _multistart(
            strip_objective, space, restarts, seed_key=[seed, 101, d, ks], starts=starts
        )
        overall.per_restart.extend(per_restart)
        overall.converged = overall.converged or ok
        if best["value"] > overall.value and best["x"] is not None:
            overall.value = best["value"]
            overall.candidate = space.build(best["x"])
    return overall


def _strip_vars_from_candidate(space: _StripSpace, c: StripCandidate) -> np.ndarray:
    """Inverse of _StripSpace.build for admissible candidates (for warm starts)."""
    x = np.zeros(space.nvars)
    d, k = space.d, space.k
    pos = 0
    x[pos : pos + k] = np.real(c.d1)
    pos += k
    x[pos : pos + d - k - 1] = np.real(c.d2[: d - k - 1])
    pos += d - k - 1
    for i in range(k):
        for j in range(d - k):
            x[pos] = c.e[i, j].real
            pos += 1
            if not (i == 0 or j == d - k - 1):
                x[pos] = c.e[i, j].imag
                pos += 1
    g = np.asarray(c.gammas, dtype=complex)
    x[pos : pos + d - 1] = np.log(np.maximum(np.abs(g), 1e-300))
    x[pos + d - 1 :] = np.tan(np.angle(g))
    return x


def optimize_sector(
    alpha: float,
    d: int,
    restarts: int = 16,
    seed: int = 0,
    continuation: bool = False,
    alpha_start: Optional[float] = None,
    steps: int = 12,
) -> SearchResult:
    """Best-found value of the sector constant at half-angle ``alpha``.

    With ``continuation`` the search walks an alpha grid downward from
    ``alpha_start`` (default just below pi/2), warm-starting each step
    from the previous optimum, and records per-step branch values in the
    result trace: the d=2 family branch and (for d=4) the symmetric d=4
    family branch.  The returned value is the best found at the target.
    """
    if not 0.0 < alpha < math.pi / 2.0:
        raise ContractViolation("optimize_sector needs alpha in (0, pi/2)")
    if d not in (2, 4):
        raise ContractViolation("optimize_sector supports d in {2, 4}")
    if math.pi / (2.0 * alpha) > MAX_SECTOR_EXPONENT:
        raise InstabilityError("alpha too small: sector exponent beyond the cap")

    if not continuation:
        spaces = [_SectorSpace(alpha, d, k) for k in range(1, d // 2 + 1)]
        if d == 4:
            spaces.append(_SectorSymmetricSpace(alpha))
        overall = SearchResult(value=-math.inf, candidate=None)
        for ks, space in enumerate(spaces):
            best, per_restart, ok = _multistart(
                sector_objective, space, restarts, seed_key=[seed, 202, d, ks]
            )
            overall.per_restart.extend(per_restart)
            overall.converged = overall.converged or ok
            if best["value"] > overall.value and best["x"] is not None:
                overall.value = best["value"]
                overall.candidate = space.build(best["x"])
        return overall

    start = alpha_start if alpha_start is not None else math.pi / 2.0 - 0.12
    if start < alpha:
        raise ContractViolation("continuation needs alpha_start >= alpha")
    grid = np.linspace(start, alpha, max(2, steps))
    warm2: Optional[np.ndarray] = None
    warm4: Optional[np.ndarray] = None
    overall = SearchResult(value=-math.inf, candidate=None)
    for si, a_i in enumerate(grid):
        space2 = _SectorSpace(float(a_i), 2, 1)
        starts2 = [warm2] if warm2 is not None else []
        best2, per2, ok2 = _multistart(
            sector_objective, space2, max(4, restarts // 3),
            seed_key=[seed, 203, si], starts=starts2,
        )
        warm2 = best2["x"]
        entry = {"alpha": float(a_i), "d2": best2["value"]}
        best_here = best2
        if d == 4:
            space4 = _SectorSymmetricSpace(float(a_i))
            starts4 = [warm4] if warm4 is not None else []
            best4, per4, ok4 = _multistart(
                sector_objective, space4, max(4, restarts // 3),
                seed_key=[seed, 204, si], starts=starts4,
            )
            warm4 = best4["x"]
            entry["d4"] = best4["value"]
            if best4["value"] > best2["value"]:
                best_here = best4
            overall.per_restart.extend(per4)
            overall.converged = overall.converged or ok4
        overall.per_restart.extend(per2)
        overall.converged = overall.converged or ok2
        overall.trace.append(entry)
        if si == len(grid) - 1 and best_here["x"] is not None:
            overall.value = best_here["value"]
            space = space4 if (d == 4 and best_here is not best2) else space2
            overall.candidate = space.build(best_here["x"])
    return overall
