"""Quantum effects and their sequential products.

An effect is a Hermitian matrix with spectrum inside [0, 1].  Two sequential
products are provided:

* the Lüders product        ``A ∘ B   = A^{1/2} B A^{1/2}``
* the phased family         ``A ∘_t B = A^{1/2} A^{it} B A^{-it} A^{1/2}``

with ``t = 0`` recovering Lüders through the identical code path.  Both are
computed from one spectral decomposition of the left operand: in the
eigenbasis of A the product is entrywise

    (A ∘_t B)_{jk} = sqrt(a_j a_k) · e^{it(ln a_j − ln a_k)} · B̃_{jk}

Eigenvalues at or below the support cutoff are treated as exactly zero.  The
scalar phase e^{it ln u} oscillates without limit as u → 0, so a hard cutoff
is the only stable choice; the product is then exact on the support of A and
annihilates the kernel block.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .linalg import (
    SpectralDecomposition,
    hermitian_eig,
    hermitize,
    support_projection,
)

__all__ = [
    "DomainError",
    "ValidationError",
    "Effect",
    "Projection",
    "DensityOperator",
    "f_z",
    "effect_power_it",
    "sqrt_effect",
    "luders_product",
    "phased_product",
    "closed_form_2d",
    "product_on_selfadjoint",
]

# Admissible excursion of an effect's spectrum outside [0, 1] at validation.
SPECTRUM_TOL = 1e-10
# Eigenvalues <= SUPPORT_CUTOFF_SCALE * max(1, ‖A‖_op) count as zero.
SUPPORT_CUTOFF_SCALE = 1e-10


class DomainError(ValueError):
    """A scalar argument lies outside its admissible domain."""


class ValidationError(ValueError):
    """A construction invariant was violated."""


def f_z(z: complex, u: float) -> complex:
    """exp(z·ln u) for u in (0, 1], and exactly 0 at u = 0."""
    if not (math.isfinite(u) and -1e-12 <= u <= 1.0 + 1e-12):
        raise DomainError(f"u = {u!r} lies outside [0, 1]")
    u = min(max(float(u), 0.0), 1.0)
    if u == 0.0:
        return 0j
    return cmath.exp(complex(z) * math.log(u))


def _require_finite(t: float, name: str = "t") -> float:
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"{name} must be finite, got {t!r}")
    return t


class Effect:
    """Hermitian matrix with spectrum in [0, 1].

    Instances are immutable by convention and carry their eigendecomposition
    (eigenvalues clamped to [0, 1]), so repeated products with the same left
    operand decompose it only once.
    """

    matrix: np.ndarray
    decomposition: SpectralDecomposition
    support_cutoff: float

    def __init__(self, matrix, *, spectrum_tol: float = SPECTRUM_TOL):
        m = hermitize(matrix)
        dec = hermitian_eig(m)
        self._finish(m, dec.eigenvalues, dec.eigenvectors, spectrum_tol)

    def _finish(self, m, w, v, tol):
        lo, hi = float(w[0]), float(w[-1])
        if lo < -tol or hi > 1.0 + tol:
            raise ValidationError(
                f"effect spectrum [{lo:.6e}, {hi:.6e}] escapes [0, 1] "
                f"by more than {tol:g}"
            )
        self.matrix = m
        self.decomposition = SpectralDecomposition(np.clip(w, 0.0, 1.0), v)
        self.support_cutoff = SUPPORT_CUTOFF_SCALE * max(1.0, abs(lo), abs(hi))

    @staticmethod
    def from_eigensystem(
        eigenvalues, eigenvectors, *, spectrum_tol: float = SPECTRUM_TOL
    ) -> "Effect":
        """Build an effect from a known eigensystem, skipping re-decomposition."""
        w = np.asarray(eigenvalues, dtype=np.float64)
        v = np.asarray(eigenvectors, dtype=np.complex128)
        if w.ndim != 1 or v.shape != (w.shape[0], w.shape[0]):
            raise ValidationError("eigensystem shapes do not match")
        if not (np.isfinite(w).all() and np.isfinite(v).all()):
            raise ValidationError("eigensystem contains NaN or Inf")
        gram = float(np.linalg.norm(v.conj().T @ v - np.eye(w.shape[0])))
        if gram > 1e-8 * w.shape[0]:
            raise ValidationError(
                f"eigenvector columns are not orthonormal (defect {gram:.3e})"
            )
        order = np.argsort(w, kind="stable")
        w = w[order]
        v = v[:, order]
        eff = object.__new__(Effect)
        eff._finish(hermitize((v * w) @ v.conj().T), w, v, spectrum_tol)
        return eff

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def support(self) -> np.ndarray:
        """Projection onto the range of the effect."""
        return support_projection(self.decomposition, self.support_cutoff)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class Projection(Effect):
    """Sharp effect: idempotent, spectrum within 1e-10 of {0, 1}."""

    def __init__(self, matrix, *, idem_tol: float = 1e-11,
                 spectrum_tol: float = SPECTRUM_TOL):
        super().__init__(matrix, spectrum_tol=spectrum_tol)
        w = self.decomposition.eigenvalues
        if float(np.abs(w - np.rint(w)).max()) > 1e-10:
            raise ValidationError("projection spectrum is not within 1e-10 of {0, 1}")
        m = self.matrix
        idem = float(np.linalg.norm(m @ m - m))
        if idem > idem_tol:
            raise ValidationError(f"matrix is not idempotent (‖P²−P‖ = {idem:.3e})")


class DensityOperator:
    """Positive semidefinite matrix of unit trace."""

    def __init__(self, matrix, *, psd_tol: float = 1e-10, trace_tol: float = 1e-10):
        m = hermitize(matrix)
        dec = hermitian_eig(m)
        if float(dec.eigenvalues[0]) < -psd_tol:
            raise ValidationError(
                f"density operator has eigenvalue {dec.eigenvalues[0]:.3e} < -{psd_tol:g}"
            )
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > trace_tol:
            raise ValidationError(f"density operator trace {tr!r} is not 1")
        self.matrix = m
        self.decomposition = dec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


def _require_same_dim(a: Effect, b) -> None:
    if a.dim != b.shape[0]:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.shape[0]}")


def _support_phases(eigenvalues: np.ndarray, cutoff: float, t: float):
    """Unit phases e^{it·ln λ} on the support, 0 at or below the cutoff.

    The angle array is built from |t| and the sign applied on the imaginary
    part, so phases for t and -t are exact complex conjugates bit for bit.
    """
    w = np.zeros(eigenvalues.shape[0], dtype=np.complex128)
    mask = eigenvalues > cutoff
    theta = abs(t) * np.log(eigenvalues[mask])
    c, s = np.cos(theta), np.sin(theta)
    w[mask] = c + 1j * s if t >= 0 else c - 1j * s
    return w, mask


def effect_power_it(a: Effect, t: float) -> np.ndarray:
    """A^{it}: the unitary-on-support phase factor of the effect.

    Returns f_{it}(A) with the kernel block mapped to zero, so that
    A^{it} A^{-it} equals the support projection and (A^{it})† = A^{-it}
    holds exactly.
    """
    t = _require_finite(t)
    dec = a.decomposition
    w, _ = _support_phases(dec.eigenvalues, a.support_cutoff, t)
    return dec.apply(w)


def sqrt_effect(a: Effect) -> Effect:
    """Positive square root; spectrum stays in [0, 1]."""
    dec = a.decomposition
    vals = np.where(
        dec.eigenvalues > a.support_cutoff, np.sqrt(dec.eigenvalues), 0.0
    )
    return Effect.from_eigensystem(vals, dec.eigenvectors)


def phased_product(a: Effect, b: Effect, t: float = 1.0) -> Effect:
    """A ∘_t B = A^{1/2} A^{it} B A^{-it} A^{1/2}.

    Computed entrywise in the eigenbasis of A from a single decomposition;
    t = 0 is the Lüders product through the same code path.
    """
    t = _require_finite(t)
    _require_same_dim(a, b.matrix)
    dec = a.decomposition
    w, mask = _support_phases(dec.eigenvalues, a.support_cutoff, t)
    u = np.zeros_like(w)
    u[mask] = np.sqrt(dec.eigenvalues[mask]) * w[mask]
    v = dec.eigenvectors
    b_eig = v.conj().T @ b.matrix @ v
    out = v @ (np.outer(u, u.conj()) * b_eig) @ v.conj().T
    return Effect(out)


def luders_product(a: Effect, b: Effect) -> Effect:
    """A ∘ B = A^{1/2} B A^{1/2} (the phased product at t = 0)."""
    return phased_product(a, b, 0.0)


def product_on_selfadjoint(b: Effect, operand, t: float = 1.0) -> np.ndarray:
    """B^{1/2} B^{it} S B^{-it} B^{1/2} for an arbitrary Hermitian S.

    This is the unique linear extension of the effect product to
    self-adjoint operands: the formula is linear in S, so differences and
    real scalings of effects are handled in one shot.
    """
    t = _require_finite(t)
    s = hermitize(operand)
    _require_same_dim(b, s)
    dec = b.decomposition
    w, mask = _support_phases(dec.eigenvalues, b.support_cutoff, t)
    u = np.zeros_like(w)
    u[mask] = np.sqrt(dec.eigenvalues[mask]) * w[mask]
    v = dec.eigenvectors
    s_eig = v.conj().T @ s @ v
    out = v @ (np.outer(u, u.conj()) * s_eig) @ v.conj().T
    return hermitize(out)


def closed_form_2d(a: float, b: float, x: float, y: complex, z: float,
                   t: float = 1.0) -> np.ndarray:
    """Product of A = diag(a², b²) with B = [[x, y], [ȳ, z]] in closed form.

    For a, b > 0 the off-diagonal entry picks up the phase e^{iθ} with
    θ = t·(ln a² − ln b²); a vanishing a or b collapses the corresponding
    row and column.  The case split is at exact zero: small positive a or b
    are *not* snapped, since the closed form is evaluated directly from the
    scalars rather than through a spectral cutoff.
    """
    t = _require_finite(t)
    for name, val in (("a", a), ("b", b)):
        if not (math.isfinite(val) and 0.0 <= val <= 1.0):
            raise DomainError(f"{name} = {val!r} lies outside [0, 1]")
    y = complex(y)
    if not all(math.isfinite(v) for v in (x, z, y.real, y.imag)):
        raise DomainError("matrix entries must be finite")
    spectrum = np.linalg.eigvalsh(
        np.array([[x, y], [y.conjugate(), z]], dtype=np.complex128)
    )
    if spectrum[0] < -1e-12 or spectrum[-1] > 1.0 + 1e-12:
        raise DomainError(
            f"[[x, y], [ȳ, z]] is not an effect "
            f"(spectrum [{spectrum[0]:.3e}, {spectrum[-1]:.3e}])"
        )
    if a > 0.0 and b > 0.0:
        theta = t * (math.log(a * a) - math.log(b * b))
        off = a * b * cmath.exp(1j * theta) * y
        return np.array(
            [[a * a * x, off], [off.conjugate(), b * b * z]], dtype=np.complex128
        )
    if a > 0.0:
        return np.array([[a * a * x, 0.0], [0.0, 0.0]], dtype=np.complex128)
    if b > 0.0:
        return np.array([[0.0, 0.0], [0.0, b * b * z]], dtype=np.complex128)
    return np.zeros((2, 2), dtype=np.complex128)
