"""3x3 matrices with W(A) the closed unit disk and psi(A) = 2.

Two explicit families exhaust (up to unitary similarity) the 3x3
matrices with that property; the module constructs them, factors them in
the Ando form A = 2 sin(B) U cos(B), tests the flat-disk determinant
condition det(U cos B - z sin B) = 0, and produces the degree-2 Blaschke
witness that certifies psi(A) = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .linalg import (
    as_matrix,
    eigenvalues,
    hermitian_eigen,
    is_hermitian,
    operator_norm,
)
from .psi import BlaschkeProduct

__all__ = [
    "FamilySpec",
    "AndoForm",
    "make_family",
    "family_ando_form",
    "ando_compose",
    "flat_disk_condition",
    "witness_psi2",
    "zero_multiplicity_check",
]


@dataclass(frozen=True)
class FamilySpec:
    """Which of the two disk-extremal families, with its parameters."""

    variant: str  # "family1" | "family2"
    xi: complex = 0.0
    phi: float = 0.0
    phase: float = 0.0

    @classmethod
    def family1(cls, xi: complex) -> "FamilySpec":
        if abs(xi) > 1.0:
            raise ContractViolation("family1 needs |xi| <= 1")
        return cls(variant="family1", xi=complex(xi))

    @classmethod
    def family2(cls, phi: float, phase: float = 0.0) -> "FamilySpec":
        if not 0.0 <= phi <= math.pi / 2:
            raise ContractViolation("family2 needs phi in [0, pi/2]")
        return cls(variant="family2", phi=float(phi), phase=float(phase))


@dataclass(frozen=True)
class AndoForm:
    """Factors of A = 2 sin(B) U cos(B) with 0 <= B = B* <= pi/2, U unitary."""

    b: np.ndarray
    u: np.ndarray


def make_family(spec: FamilySpec) -> np.ndarray:
    if spec.variant == "family1":
        return np.array(
            [[0.0, 0.0, 2.0], [0.0, spec.xi, 0.0], [0.0, 0.0, 0.0]], dtype=complex
        )
    if spec.variant == "family2":
        c, s = math.cos(spec.phi), math.sin(spec.phi)
        core = np.array(
            [
                [0.0, math.sqrt(2.0) * c, 2.0 * s],
                [0.0, -s, math.sqrt(2.0) * c],
                [0.0, 0.0, 0.0],
            ],
            dtype=complex,
        )
        return np.exp(1j * spec.phase) * core
    raise ContractViolation(f"unknown family variant {spec.variant!r}")


def family_ando_form(spec: FamilySpec) -> AndoForm:
    """An explicit (B, U) pair whose Ando composition is the family matrix.

    Both families sit at B = diag(pi/2, pi/4, 0), so sin B = diag(1, s, 0)
    and cos B = diag(0, s, 1) with s = sqrt(2)/2; only U differs.
    """
    b = np.diag([math.pi / 2, math.pi / 4, 0.0]).astype(complex)
    if spec.variant == "family1":
        xi = spec.xi
        chi = math.sqrt(max(0.0, 1.0 - abs(xi) ** 2))
        u = np.array(
            [[0.0, 0.0, 1.0], [chi, xi, 0.0], [-np.conj(xi), chi, 0.0]], dtype=complex
        )
    else:
        ph = np.exp(1j * spec.phase)
        c, s = math.cos(spec.phi), math.sin(spec.phi)
        u = np.array(
            [[0.0, ph * c, ph * s], [0.0, -ph * s, ph * c], [1.0, 0.0, 0.0]],
            dtype=complex,
        )
    return AndoForm(b=b, u=u)


def ando_compose(form: AndoForm) -> np.ndarray:
    """A = 2 sin(B) U cos(B); W(A) is inside the closed unit disk."""
    b = as_matrix(form.b, "B")
    u = as_matrix(form.u, "U")
    if not is_hermitian(b):
        raise ContractViolation("Ando factor B must be Hermitian")
    eig = hermitian_eigen(b)
    if eig.values[0] < -1e-12 or eig.values[-1] > math.pi / 2 + 1e-12:
        raise ContractViolation("Ando factor B needs spectrum in [0, pi/2]")
    if operator_norm(u.conj().T @ u - np.eye(u.shape[0])) > 1e-10:
        raise ContractViolation("Ando factor U must be unitary")
    vecs = eig.vectors
    sin_b = (vecs * np.sin(eig.values)) @ vecs.conj().T
    cos_b = (vecs * np.cos(eig.values)) @ vecs.conj().T
    return 2.0 * sin_b @ u @ cos_b


def _ando_trig(form: AndoForm) -> tuple[np.ndarray, np.ndarray]:
    eig = hermitian_eigen(as_matrix(form.b, "B"))
    vecs = eig.vectors
    sin_b = (vecs * np.sin(eig.values)) @ vecs.conj().T
    cos_b = (vecs * np.cos(eig.values)) @ vecs.conj().T
    return sin_b, cos_b


def flat_disk_condition(form: AndoForm) -> bool:
    """True iff det(U cos B - z sin B) vanishes identically in z.

    The determinant is a polynomial of degree <= d; it is expanded by
    interpolation at d+1 points on the circle of radius 2 (well away from
    the spectrum scale) and all coefficients are thresholded.  By the
    disk characterization this is equivalent to W(A) being the full
    closed unit disk.
    """
    sin_b, cos_b = _ando_trig(form)
    u = as_matrix(form.u, "U")
    d = u.shape[0]
    count = d + 1
    zs = 2.0 * np.exp(2j * np.pi * np.arange(count) / count)
    dets = np.array([np.linalg.det(u @ cos_b - z * sin_b) for z in zs])
    coeffs = np.fft.fft(dets) / count / (2.0 ** np.arange(count))
    scale = max(1.0, (operator_norm(cos_b) + 2.0 * operator_norm(sin_b)) ** d)
    return bool(np.all(np.abs(coeffs) <= 1e-10 * scale))


def witness_psi2(spec: FamilySpec) -> tuple[BlaschkeProduct, float]:
    """Blaschke witness with ||g(A)|| >= 2 and its defining residual.

    For family2 with phi < pi/2 the witness is g(z) = z (z - alpha)/(1 -
    conj(alpha) z) with alpha = -e^{i psi} sin(phi), and the exact
    identity g(A) e3 = 2 e^{2 i psi} e1 holds (each factor applies A to
    e3 once, so the family phase enters squared).  family1 (and the phi
    = pi/2 overlap) degenerates to the single factor g(z) = z, where
    A e3 = 2 e^{i psi} e1 directly.
    """
    a = make_family(spec)
    if spec.variant == "family2" and spec.phi < math.pi / 2 - 1e-9:
        alpha = -np.exp(1j * spec.phase) * math.sin(spec.phi)
        product = BlaschkeProduct(np.array([0.0, alpha]))
        # both factors of g apply A once to e3: phase e^{2 i psi}
        phase = np.exp(2j * spec.phase)
    else:
        product = BlaschkeProduct(np.array([0.0]))
        phase = np.exp(1j * spec.phase) if spec.variant == "family2" else 1.0
    e1 = np.zeros(3, dtype=complex)
    e1[0] = 1.0
    e3 = np.zeros(3, dtype=complex)
    e3[2] = 1.0
    residual = float(np.linalg.norm(product.of_matrix(a) @ e3 - 2.0 * phase * e1))
    return product, residual


def zero_multiplicity_check(a) -> int:
    """Algebraic multiplicity of the eigenvalue 0; must be at least 2.

    Matrices whose numerical range is the full closed unit disk always
    carry 0 with multiplicity >= 2, so anything less signals the input is
    not such a matrix.
    """
    mat = as_matrix(a)
    lams = eigenvalues(mat)
    tol = 1e-8 * (1.0 + operator_norm(mat))
    count = int(np.sum(np.abs(lams) <= tol))
    if count < 2:
        raise ContractViolation(
            f"eigenvalue 0 has multiplicity {count}; expected at least 2"
        )
    return count
