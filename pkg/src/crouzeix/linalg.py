"""Dense complex linear algebra kernels.

Everything here operates on plain square ``numpy`` arrays of complex
dtype.  Matrices are small (d <= 64), so the routines favour clarity and
reproducibility over asymptotic speed: LAPACK Hessenberg-QR drivers back
the eigen/Schur factorizations, while matrix functions go through the
Newton divided-difference form so that callers can supply analytic
derivatives for confluent spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

from .errors import (
    ContractViolation,
    ConvergenceError,
    DerivativeRequiredError,
    PoleError,
)

__all__ = [
    "EigenSystem",
    "as_matrix",
    "is_hermitian",
    "hermitian_eigen",
    "operator_norm",
    "schur",
    "eigenvalues",
    "function_of_matrix",
    "mobius_of_matrix",
]

# Relative Hermitian-symmetry tolerance used by the Hermitian tag.
HERMITIAN_RTOL = 1e-12

# |lam_i - lam_j| below this (times 1 + ||A||) switches the divided
# differences to the confluent/derivative branch.
CONFLUENCE_RTOL = 1e-8


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a square, finite, complex ndarray."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ContractViolation(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ContractViolation(f"{name} has non-finite entries")
    return m


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    """True when ``max|a_ij - conj(a_ji)| <= rtol * max|a_ij|``."""
    m = as_matrix(a)
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return True
    return np.max(np.abs(m - m.conj().T)) <= rtol * scale


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues with matching unit-norm eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigen(h) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, values ascending.

    Raises ContractViolation if the input is not Hermitian to the tag
    tolerance.
    """
    m = as_matrix(h, "H")
    if not is_hermitian(m):
        raise ContractViolation("hermitian_eigen requires a Hermitian matrix")
    # Symmetrize so LAPACK sees an exactly Hermitian input.
    m = 0.5 * (m + m.conj().T)
    values, vectors = np.linalg.eigh(m)
    return EigenSystem(values=values, vectors=vectors)


def operator_norm(m) -> float:
    """Largest singular value of a (possibly rectangular) block."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ContractViolation(f"operator_norm expects a 2-d array, got {a.ndim}-d")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ContractViolation("operator_norm: non-finite entries")
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def schur(a) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur factorization A = Q T Q* with Q unitary, T triangular."""
    m = as_matrix(a, "A")
    try:
        t, q = sla.schur(m, output="complex")
    except np.linalg.LinAlgError as exc:  # QR iteration failed to converge
        raise ConvergenceError(f"Schur iteration did not converge: {exc}") from exc
    scale = max(operator_norm(m), 1e-300)
    residual = operator_norm(m - q @ t @ q.conj().T) / scale
    if residual > 1e-9:
        raise ConvergenceError("Schur residual too large", residual=residual)
    return q, t


def eigenvalues(a) -> np.ndarray:
    """Eigenvalues of ``a`` read off the Schur triangular factor."""
    _, t = schur(a)
    return np.diag(t).copy()


def _cluster_nodes(nodes: np.ndarray, tol: float) -> np.ndarray:
    """Replace near-coincident nodes by their cluster mean.

    Union-find on the pairwise |lam_i - lam_j| < tol graph; every member
    of a cluster is mapped to the cluster mean so that confluent nodes
    compare exactly equal downstream.
    """
    d = len(nodes)
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if abs(nodes[i] - nodes[j]) < tol:
                parent[find(i)] = find(j)
    out = nodes.astype(complex).copy()
    for root in {find(i) for i in range(d)}:
        members = [i for i in range(d) if find(i) == root]
        if len(members) > 1:
            out[members] = np.mean(nodes[members])
    return out


def _divided_differences(
    nodes: np.ndarray,
    f: Callable[[complex], complex],
    df: Optional[Callable[[complex, int], complex]],
    tol: float,
) -> np.ndarray:
    """Newton divided-difference coefficients f[mu_0..mu_k], k = 0..d-1.

    Nodes must already be clustered: coincident nodes are exactly equal
    and sorted contiguously, so a span with equal endpoints is fully
    confluent and handled by the derivative formula.
    """
    d = len(nodes)
    table = np.empty((d, d), dtype=complex)
    fact = 1.0
    for i in range(d):
        table[i, i] = f(nodes[i])
    for span in range(1, d):
        fact *= span
        for i in range(d - span):
            j = i + span
            denom = nodes[j] - nodes[i]
            if abs(denom) >= tol:
                table[i, j] = (table[i + 1, j] - table[i, j - 1]) / denom
            else:
                if df is None:
                    raise DerivativeRequiredError(
                        "confluent eigenvalue cluster requires derivatives "
                        f"up to order {span}"
                    )
                table[i, j] = df(nodes[i], span) / fact
    return table[0, :]


def function_of_matrix(
    a,
    f: Callable[[complex], complex],
    df: Optional[Callable[[complex, int], complex]] = None,
) -> np.ndarray:
    """Evaluate f(A) through the Newton divided-difference form.

    f(A) = f[mu_1] I + f[mu_1,mu_2](A - mu_1 I) + ... with the mu_k the
    eigenvalues of A ordered so coincident clusters are contiguous.  When
    a cluster of eigenvalues is closer than the confluence threshold, the
    corresponding coefficients need derivatives of f; pass ``df(z, m)``
    returning the m-th derivative (m >= 1), otherwise a
    DerivativeRequiredError is raised.
    """
    m = as_matrix(a, "A")
    d = m.shape[0]
    _, t = schur(m)
    lam = np.diag(t)
    tol = CONFLUENCE_RTOL * (1.0 + operator_norm(m))
    nodes = _cluster_nodes(lam, tol)
    # Deterministic cluster layout: sort by (Re, Im); equal nodes stay adjacent.
    order = np.lexsort((nodes.imag, nodes.real))
    nodes = nodes[order]
    dd = _divided_differences(nodes, f, df, tol)

    eye = np.eye(d, dtype=complex)
    result = dd[0] * eye
    basis = eye
    for k in range(1, d):
        basis = basis @ (m - nodes[k - 1] * eye)
        result = result + dd[k] * basis
    return result


def mobius_of_matrix(b, zeta: complex) -> np.ndarray:
    """Single Blaschke factor of a matrix: (B - zeta I)(I - conj(zeta) B)^-1.

    Requires I - conj(zeta) B to be safely invertible; a condition number
    beyond 1e14 counts as evaluation at a pole.
    """
    m = as_matrix(b, "B")
    zeta = complex(zeta)
    if abs(zeta) > 1.0 + 1e-12:
        raise ContractViolation(f"|zeta| = {abs(zeta):.6g} exceeds 1")
    d = m.shape[0]
    eye = np.eye(d, dtype=complex)
    denom = eye - np.conj(zeta) * m
    if np.linalg.cond(denom) > 1e14:
        raise PoleError("I - conj(zeta) B is numerically singular (pole)")
    return np.linalg.solve(denom.T, (m - zeta * eye).T).T
