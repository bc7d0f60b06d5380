"""Dense complex linear algebra used by every other distvar module.

The Schur kernel comes from the compiled ``_qr`` extension when it has been
built; otherwise (or with ``DISTVAR_PURE_PYTHON=1``) the numpy fallback in
``_qr_py`` is used.  ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import (
    ConvergenceFailure,
    NegativeEigenvalue,
    NonSquare,
    NotHermitian,
)
from . import _qr_py

if os.environ.get("DISTVAR_PURE_PYTHON") == "1":
    _kernel = _qr_py
    BACKEND = "python"
else:
    try:
        from . import _qr as _kernel  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _kernel = _qr_py
        BACKEND = "python"

__all__ = [
    "BACKEND",
    "Tolerances",
    "as_matrix",
    "adjoint",
    "schur",
    "eigenvalues",
    "psd_sqrt",
    "numerical_radius",
    "spectral_radius",
    "operator_norm",
]


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances for identities, eigenvalue matching and rank cutoffs."""

    structural: float = 1e-10
    spectral: float = 1e-8
    rank: float = 1e-9

    def __post_init__(self):
        if min(self.structural, self.spectral, self.rank) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.structural > self.spectral:
            raise ValueError("structural tolerance must not exceed spectral tolerance")


DEFAULT_TOL = Tolerances()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"{name} is {m.shape[0]}x{m.shape[1]}, expected square")
    return m


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def schur(a, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur decomposition ``a = q @ t @ q^H``.

    Parameters
    ----------
    a : array_like, shape (n, n)
    tol : Tolerances
        Carried for interface symmetry; deflation uses machine precision
        relative to neighbouring diagonal entries.

    Returns
    -------
    q : ndarray
        Unitary matrix.
    t : ndarray
        Upper triangular matrix whose diagonal holds the eigenvalues of ``a``.

    Raises
    ------
    NonSquare
    ConvergenceFailure
        If more than ``30 * n`` QR sweeps are needed.
    """
    h = np.ascontiguousarray(_square(a), dtype=np.complex128).copy()
    n = h.shape[0]
    q = np.eye(n, dtype=np.complex128)
    if n <= 1:
        return q, h
    sweeps = _kernel.schur_inplace(h, q, 30 * n)
    if sweeps < 0:
        raise ConvergenceFailure(f"QR iteration exceeded {30 * n} sweeps")
    return q, h


def eigenvalues(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return np.diag(schur(a, tol)[1]).copy()


def psd_sqrt(m, tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol.spectral, floor]`` are set to zero before the root
    is taken; anything more negative raises :class:`NegativeEigenvalue`.
    """
    m = _square(m)
    if m.size == 0:
        return m.copy()
    scale = max(1.0, operator_norm(m))
    if np.linalg.norm(m - m.conj().T, 2) > tol.structural * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -tol.spectral:
        raise NegativeEigenvalue(f"eigenvalue {w.min():.3e} below -{tol.spectral:g}")
    w = np.where(w <= max(floor, 0.0), 0.0, w)
    r = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def _hermitian_part_max(a: np.ndarray, theta: float) -> float:
    rot = np.exp(1j * theta) * a
    return float(np.linalg.eigvalsh(0.5 * (rot + rot.conj().T))[-1])


def numerical_radius(a, tol: Tolerances = DEFAULT_TOL, grid: int = 512) -> float:
    """Numerical radius ``max{|<Ax, x>| : |x| = 1}``.

    Evaluates the largest eigenvalue of the Hermitian part of ``e^{it} A`` on
    a ``grid``-point angle mesh, then golden-section refines the best cell.
    """
    a = _square(a)
    if a.size == 0 or not np.any(a):
        return 0.0
    thetas = 2 * np.pi * np.arange(grid) / grid
    vals = np.array([_hermitian_part_max(a, t) for t in thetas])
    k = int(np.argmax(vals))
    step = 2 * np.pi / grid
    lo, hi = thetas[k] - step, thetas[k] + step
    invphi = (np.sqrt(5.0) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = _hermitian_part_max(a, c), _hermitian_part_max(a, d)
    while hi - lo > 1e-10:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = _hermitian_part_max(a, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = _hermitian_part_max(a, d)
    return max(float(vals[k]), fc, fd, 0.0)


def spectral_radius(a, tol: Tolerances = DEFAULT_TOL) -> float:
    a = _square(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(eigenvalues(a, tol))))


def operator_norm(a) -> float:
    """Largest singular value (0 for empty matrices)."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))
