"""Phase-space conventions used throughout the package.

* Quadratures are interleaved per mode: ``(x_1, p_1, ..., x_n, p_n)``.
* ``[x_j, p_k] = i delta_jk / 2`` (hbar = 1/2), so the vacuum variance of
  every quadrature (the shot noise level, SNL) is 1/4.
* All transforms are Heisenberg matrices acting on the quadrature vector,
  ``xi -> S xi + d``.  States therefore evolve as ``mean -> S mean + d`` and
  ``cov -> S cov S^T``.
* Balanced beamsplitter on modes ``(i, j)``::

      x_i -> (x_i - x_j) / sqrt(2)      x_j -> (x_i + x_j) / sqrt(2)

  and identically for ``p``.  With this choice the EPR pair is produced by
  ``beamsplitter(1, 0)`` acting on (x-squeezed, p-squeezed) vacua, giving
  ``x_E1 - x_E2 = sqrt(2) e^{-r} x_1`` and ``p_E1 + p_E2 = sqrt(2) e^{-r} p_2``.
* Decibels of squeezing are quoted on the variance ratio:
  ``dB = 10 log10(e^{-2r})``.
"""

import numpy as np

HBAR = 0.5
SNL = HBAR / 2  # vacuum quadrature variance

QUADRATURES = ("x", "p")


def omega(n):
    """Symplectic form for ``n`` modes: direct sum of ``[[0, -1], [1, 0]]``."""
    return np.kron(np.eye(n), np.array([[0.0, -1.0], [1.0, 0.0]]))


def quad_index(mode, quadrature):
    """Position of ``quadrature`` (``"x"`` or ``"p"``) of ``mode`` in the phase-space vector."""
    if quadrature not in QUADRATURES:
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return 2 * mode + QUADRATURES.index(quadrature)


def quadrature_row(n, mode, quadrature):
    """Row vector ``h`` such that ``h @ xi`` is the requested quadrature.

    ``quadrature`` is ``"x"``, ``"p"`` or a homodyne angle ``theta`` in radians,
    for which the measured observable is ``x cos(theta) + p sin(theta)``.
    """
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for {n} modes")
    h = np.zeros(2 * n)
    if isinstance(quadrature, str):
        h[quad_index(mode, quadrature)] = 1.0
    else:
        h[2 * mode] = np.cos(quadrature)
        h[2 * mode + 1] = np.sin(quadrature)
    return h


def db_to_r(db):
    """Squeezing parameter for a squeezing level in dB (``db <= 0``)."""
    if db > 0:
        raise ValueError(f"squeezing level must be <= 0 dB, got {db}")
    return -db * np.log(10.0) / 20.0


def r_to_db(r):
    return 10.0 * np.log10(np.exp(-2.0 * r))


def to_db(power):
    """Power relative to the SNL in dB."""
    return 10.0 * np.log10(power / SNL)


def amplitude_for_power_db(db):
    """Coherent amplitude whose total power ``mean**2 + SNL`` sits ``db`` above the SNL."""
    return float(np.sqrt(SNL * (10.0 ** (db / 10.0) - 1.0)))
