"""Symplectic spectra, physicality and logarithmic negativity of Gaussian states."""

from dataclasses import dataclass

import numpy as np

from .conventions import SNL, omega
from .gaussian import PHYSICAL_TOL, SYMMETRY_TOL, UnphysicalStateError


def _as_cov(cov):
    cov = np.asarray(getattr(cov, "matrix", cov), dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError(f"covariance must be square with even dimension, got {cov.shape}")
    if not np.allclose(cov, cov.T, atol=SYMMETRY_TOL, rtol=0):
        raise ValueError("covariance matrix is not symmetric")
    return 0.5 * (cov + cov.T)


def symplectic_eigenvalues(cov):
    """Symplectic eigenvalues of ``cov`` in ascending order.

    For a positive-definite ``cov`` these are the positive eigenvalues of the
    Hermitian matrix ``V^{1/2} (i Omega) V^{1/2}``, which share the spectrum of
    ``i Omega V``.  Indefinite input falls back to ``|eig(i Omega V)|``.
    """
    cov = _as_cov(cov)
    om = omega(cov.shape[0] // 2)
    w, U = np.linalg.eigh(cov)
    if w.min() > 0:
        root = (U * np.sqrt(w)) @ U.T
        ev = np.linalg.eigvalsh(root @ (1j * om) @ root)
    else:
        ev = np.linalg.eigvals(1j * om @ cov)
    # eigenvalues come in +-nu pairs
    return np.sort(np.abs(ev))[::2]


def is_physical(cov, tol=PHYSICAL_TOL):
    """``V + (i/4) Omega >= 0``, i.e. every symplectic eigenvalue is at least 1/4."""
    cov = _as_cov(cov)
    if np.linalg.eigvalsh(cov).min() <= 0:
        return False
    return bool(symplectic_eigenvalues(cov).min() >= SNL - tol)


def partial_transpose(cov, mode=1):
    """Flip the sign of ``mode``'s momentum in a covariance matrix."""
    cov = _as_cov(cov)
    flip = np.ones(cov.shape[0])
    flip[2 * mode + 1] = -1.0
    return cov * np.outer(flip, flip)


@dataclass(frozen=True, eq=False)
class TwoModeCovariance:
    """Two-mode covariance assembled from local blocks ``A``, ``B`` and cross block ``C``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @classmethod
    def from_matrix(cls, cov):
        cov = _as_cov(cov)
        if cov.shape != (4, 4):
            raise ValueError(f"expected a 4x4 covariance, got {cov.shape}")
        return cls(cov[:2, :2].copy(), cov[2:, 2:].copy(), cov[:2, 2:].copy())

    @property
    def matrix(self):
        return np.block([[self.A, self.C], [self.C.T, self.B]])


@dataclass(frozen=True)
class NegativityResult:
    E_N: float
    nu_tilde_minus: float

    @property
    def entangled(self):
        return self.E_N > 0


def log_negativity(cov, transpose_mode=1, tol=PHYSICAL_TOL):
    """Logarithmic negativity (natural log) of a two-mode Gaussian state.

    ``E_N = max(0, -ln(4 nu))`` where ``nu`` is the smallest symplectic
    eigenvalue of the partially transposed covariance.
    """
    cov = _as_cov(cov)
    if cov.shape != (4, 4):
        raise ValueError(f"log_negativity expects a 4x4 covariance, got {cov.shape}")
    if not is_physical(cov, tol):
        raise UnphysicalStateError("covariance violates V + (i/4) Omega >= 0")
    nu = float(symplectic_eigenvalues(partial_transpose(cov, transpose_mode))[0])
    return NegativityResult(max(0.0, -float(np.log(nu / SNL))), nu)


def qnd_negativity_analytic(r):
    """Closed-form negativity of the parallel gate output for coherent inputs."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be non-negative, got {r}")
    return max(0.0, float(-np.log(np.sqrt(2.0 * (1.0 + np.exp(-2.0 * r))) - 1.0)))


def negativity_uncertainty(cov, sigma, step=1e-6):
    """First-order propagation of independent per-entry errors into ``E_N``.

    ``sigma`` is a scalar or a symmetric 4x4 array of standard errors on the
    10 independent entries.  Derivatives are central finite differences.
    """
    cov = _as_cov(cov)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), cov.shape)
    var = 0.0
    for i in range(4):
        for j in range(i, 4):
            E = np.zeros((4, 4))
            E[i, j] = E[j, i] = step
            grad = (log_negativity(cov + E).E_N - log_negativity(cov - E).E_N) / (2 * step)
            var += (grad * sigma[i, j]) ** 2
    return float(np.sqrt(var))
