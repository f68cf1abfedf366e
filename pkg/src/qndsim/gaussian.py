"""Gaussian states, symplectic transforms, homodyne conditioning and loss.

States and transforms are immutable values; every operation returns a new
object.  See :mod:`qndsim.conventions` for ordering and normalisation.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .conventions import SNL, omega, quad_index, quadrature_row, to_db

SYMMETRY_TOL = 1e-10
PHYSICAL_TOL = 1e-9
SYMPLECTIC_TOL = 1e-12
PINV_CUTOFF = 1e-12

Quadrature = Union[str, float]


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty principle."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an ``n``-mode Gaussian state.

    Parameters
    ----------
    mean : array_like
        Length ``2n`` vector ordered ``(x_1, p_1, ..., x_n, p_n)``.
    cov : array_like
        Symmetric ``2n x 2n`` covariance matrix, vacuum = ``I / 4``.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.ndim != 1 or mean.size == 0 or mean.size % 2:
            raise ValueError(f"mean must be a non-empty vector of even length, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not np.allclose(cov, cov.T, atol=SYMMETRY_TOL, rtol=0):
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def num_modes(self):
        return self.mean.size // 2

    def variance(self, mode, quadrature):
        h = quadrature_row(self.num_modes, mode, quadrature)
        return float(h @ self.cov @ h)

    def expectation(self, mode, quadrature):
        return float(quadrature_row(self.num_modes, mode, quadrature) @ self.mean)

    def reduced(self, modes):
        """Marginal state of ``modes`` (in the given order)."""
        idx = np.array([2 * m + k for m in modes for k in (0, 1)])
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def tensor(self, other):
        """Product state ``self (x) other``; ``other``'s modes come after ours."""
        n1, n2 = self.mean.size, other.mean.size
        cov = np.zeros((n1 + n2, n1 + n2))
        cov[:n1, :n1] = self.cov
        cov[n1:, n1:] = other.cov
        return GaussianState(np.concatenate([self.mean, other.mean]), cov)

    def is_physical(self, tol=PHYSICAL_TOL):
        from .entanglement import is_physical

        return is_physical(self.cov, tol)

    def to_dict(self):
        return {"modes": self.num_modes, "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, data):
        state = cls(data["mean"], data["cov"])
        if "modes" in data and int(data["modes"]) != state.num_modes:
            raise ValueError(f"'modes' is {data['modes']} but mean describes {state.num_modes} modes")
        return state

    def allclose(self, other, atol=1e-12):
        return (
            self.mean.shape == other.mean.shape
            and np.allclose(self.mean, other.mean, atol=atol, rtol=0)
            and np.allclose(self.cov, other.cov, atol=atol, rtol=0)
        )

    def __repr__(self):
        return f"GaussianState(num_modes={self.num_modes})"


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Affine phase-space map ``xi -> matrix @ xi + displacement``."""

    matrix: np.ndarray
    displacement: Optional[np.ndarray] = None

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise ValueError(f"matrix must be square with even dimension, got {matrix.shape}")
        disp = np.zeros(matrix.shape[0]) if self.displacement is None else self.displacement
        disp = _frozen(disp)
        if disp.shape != (matrix.shape[0],):
            raise ValueError("displacement length does not match matrix")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "displacement", disp)

    @property
    def num_modes(self):
        return self.matrix.shape[0] // 2

    @property
    def support(self):
        """Modes whose quadratures the transform reads or writes."""
        n = self.num_modes
        off = self.matrix - np.eye(2 * n)
        touched = set()
        for m in range(n):
            blk = slice(2 * m, 2 * m + 2)
            if np.any(off[blk, :]) or np.any(off[:, blk]) or np.any(self.displacement[blk]):
                touched.add(m)
        return frozenset(touched)

    def is_symplectic(self, tol=SYMPLECTIC_TOL):
        om = omega(self.num_modes)
        return bool(np.allclose(self.matrix @ om @ self.matrix.T, om, atol=tol, rtol=0))

    def then(self, other):
        """Compose: apply ``self`` first, then ``other``."""
        if other.num_modes != self.num_modes:
            raise ValueError("cannot compose transforms on different mode counts")
        return SymplecticTransform(
            other.matrix @ self.matrix, other.matrix @ self.displacement + other.displacement
        )

    def inverse(self):
        inv = np.linalg.inv(self.matrix)
        return SymplecticTransform(inv, -inv @ self.displacement)

    def __repr__(self):
        return f"SymplecticTransform(num_modes={self.num_modes}, support={sorted(self.support)})"


@dataclass(frozen=True)
class SqueezingSpec:
    """Single-mode squeezing ``r >= 0`` along ``axis``."""

    r: float
    axis: str = "x"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing parameter must be non-negative, got {self.r}")
        if self.axis not in ("x", "p"):
            raise ValueError(f"axis must be 'x' or 'p', got {self.axis!r}")

    @classmethod
    def from_db(cls, db, axis="x"):
        return cls(-db * np.log(10.0) / 20.0, axis)

    @property
    def db(self):
        return 10.0 * np.log10(np.exp(-2.0 * self.r))


# ---------------------------------------------------------------- states


def vacuum(n):
    if n < 1:
        raise ValueError(f"need at least one mode, got {n}")
    return GaussianState(np.zeros(2 * n), SNL * np.eye(2 * n))


def squeezed_vacuum(spec):
    small, large = np.exp(-2 * spec.r) * SNL, np.exp(2 * spec.r) * SNL
    diag = (small, large) if spec.axis == "x" else (large, small)
    return GaussianState(np.zeros(2), np.diag(diag))


def coherent(n, means):
    means = np.asarray(means, dtype=float)
    if means.shape != (2 * n,):
        raise ValueError(f"expected {2 * n} mean values for {n} modes, got {means.size}")
    return GaussianState(means, SNL * np.eye(2 * n))


# ------------------------------------------------------------ transforms


def _check_mode(mode, n):
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for {n} modes")


def _n_for(num_modes, *modes):
    n = max(modes) + 1 if num_modes is None else num_modes
    for m in modes:
        _check_mode(m, n)
    return n


def identity(n):
    return SymplecticTransform(np.eye(2 * n))


def beamsplitter(i, j, reflectivity=0.5, num_modes=None):
    """Beamsplitter between modes ``i`` and ``j``.

    ``x_i -> t x_i - s x_j`` and ``x_j -> s x_i + t x_j`` with
    ``s = sqrt(reflectivity)``, ``t = sqrt(1 - reflectivity)``; same for ``p``.
    """
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    if not 0 < reflectivity < 1:
        raise ValueError(f"reflectivity must lie in (0, 1), got {reflectivity}")
    n = _n_for(num_modes, i, j)
    s, t = np.sqrt(reflectivity), np.sqrt(1.0 - reflectivity)
    S = np.eye(2 * n)
    for k in (0, 1):
        a, b = 2 * i + k, 2 * j + k
        S[a, a], S[a, b] = t, -s
        S[b, a], S[b, b] = s, t
    return SymplecticTransform(S)


def qnd_sum(control, target, gain=1.0, num_modes=None):
    """QND sum gate: ``x_T -> x_T + G x_C`` and ``p_C -> p_C - G p_T``."""
    if control == target:
        raise ValueError("QND gate needs distinct control and target modes")
    n = _n_for(num_modes, control, target)
    S = np.eye(2 * n)
    S[quad_index(target, "x"), quad_index(control, "x")] = gain
    S[quad_index(control, "p"), quad_index(target, "p")] = -gain
    return SymplecticTransform(S)


def squeezer(mode, direction="S", num_modes=None):
    """Fixed -3 dB x-squeezer ``S`` (``x/sqrt2, sqrt2 p``) or its inverse ``S_dagger``."""
    if direction not in ("S", "S_dagger"):
        raise ValueError(f"direction must be 'S' or 'S_dagger', got {direction!r}")
    n = _n_for(num_modes, mode)
    k = np.sqrt(2.0) if direction == "S" else 1.0 / np.sqrt(2.0)
    S = np.eye(2 * n)
    S[2 * mode, 2 * mode] = 1.0 / k
    S[2 * mode + 1, 2 * mode + 1] = k
    return SymplecticTransform(S)


def squeeze(mode, r, axis="x", num_modes=None):
    """Squeezing by ``r`` along ``axis`` on one mode."""
    n = _n_for(num_modes, mode)
    S = np.eye(2 * n)
    f = np.exp(-r) if axis == "x" else np.exp(r)
    S[2 * mode, 2 * mode] = f
    S[2 * mode + 1, 2 * mode + 1] = 1.0 / f
    return SymplecticTransform(S)


def displace(mode, quadrature, s, num_modes=None):
    """Shift ``quadrature`` of ``mode`` by ``s``: ``X(s)`` for x, ``Z(s)`` for p."""
    n = _n_for(num_modes, mode)
    d = np.zeros(2 * n)
    d[quad_index(mode, quadrature)] = s
    return SymplecticTransform(np.eye(2 * n), d)


def local(matrix, modes, num_modes):
    """Embed a ``2k x 2k`` symplectic acting on ``modes`` into ``num_modes`` modes."""
    matrix = np.asarray(matrix, dtype=float)
    idx = np.array([2 * m + k for m in modes for k in (0, 1)])
    if matrix.shape != (idx.size, idx.size):
        raise ValueError("matrix size does not match the number of modes")
    for m in modes:
        _check_mode(m, num_modes)
    S = np.eye(2 * num_modes)
    S[np.ix_(idx, idx)] = matrix
    return SymplecticTransform(S)


def apply(t, st):
    if t.num_modes != st.num_modes:
        raise ValueError(f"transform acts on {t.num_modes} modes, state has {st.num_modes}")
    S = t.matrix
    return GaussianState(S @ st.mean + t.displacement, S @ st.cov @ S.T)


# ------------------------------------------------------------- measurement


def condition(mean, cov, measured, outcome):
    """Condition a joint Gaussian on the values of linear functionals.

    ``measured`` is a ``k x d`` matrix of rows ``h``; the observation is
    ``measured @ xi = outcome``.  Returns the conditional mean and covariance
    of the full vector (the measured directions collapse).  A pseudo-inverse
    with cutoff ``PINV_CUTOFF`` handles zero-variance observations.
    """
    H = np.atleast_2d(measured)
    outcome = np.atleast_1d(np.asarray(outcome, dtype=float))
    C = cov @ H.T
    Vm = H @ C
    if np.any(np.diag(Vm) < -PINV_CUTOFF):
        raise UnphysicalStateError("measured variance is negative")
    gain = C @ np.linalg.pinv(Vm, rcond=PINV_CUTOFF, hermitian=True)
    new_mean = mean + gain @ (outcome - H @ mean)
    new_cov = cov - gain @ C.T
    return new_mean, 0.5 * (new_cov + new_cov.T)


def homodyne(st, mode, quadrature, outcome=None, rng=None):
    """Homodyne measurement of one quadrature of ``mode``.

    Parameters
    ----------
    st : GaussianState
    mode : int
    quadrature : {"x", "p"} or float
        A float is read as the local-oscillator angle ``theta``.
    outcome : float, optional
        Post-select this value.  If omitted the outcome is sampled from the
        marginal distribution using ``rng`` (a ``numpy.random.Generator`` or
        seed).

    Returns
    -------
    (float, GaussianState)
        The outcome and the conditional state of the remaining modes.
    """
    n = st.num_modes
    if n < 2:
        raise ValueError("homodyne needs at least two modes to leave a remainder")
    h = quadrature_row(n, mode, quadrature)
    var = float(h @ st.cov @ h)
    if var < -PINV_CUTOFF:
        raise UnphysicalStateError(f"measured variance {var} is negative")
    if outcome is None:
        rng = np.random.default_rng(rng)
        outcome = float(h @ st.mean + np.sqrt(max(var, 0.0)) * rng.standard_normal())
    keep = np.array([2 * m + k for m in range(n) if m != mode for k in (0, 1)])
    c = st.cov[keep] @ h
    gain = c / var if var > PINV_CUTOFF else np.zeros_like(c)
    mean = st.mean[keep] + gain * (outcome - h @ st.mean)
    cov = st.cov[np.ix_(keep, keep)] - np.outer(gain, c)
    return float(outcome), GaussianState(mean, 0.5 * (cov + cov.T))


@dataclass(frozen=True)
class LossChannel:
    """Pure-loss channel of transmissivity ``eta`` on one mode.

    ``mean -> sqrt(eta) mean``; the mode's block ``-> eta block + (1 - eta) I/4``;
    its cross blocks scale by ``sqrt(eta)``.
    """

    mode: int
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.eta}")

    def __call__(self, st):
        _check_mode(self.mode, st.num_modes)
        scale = np.ones(st.mean.size)
        scale[2 * self.mode : 2 * self.mode + 2] = np.sqrt(self.eta)
        cov = st.cov * np.outer(scale, scale)
        blk = slice(2 * self.mode, 2 * self.mode + 2)
        cov[blk, blk] += (1.0 - self.eta) * SNL * np.eye(2)
        return GaussianState(st.mean * scale, cov)


def loss_channel(mode, eta):
    return LossChannel(mode, eta)


def power_db(st, mode, quadrature):
    """Total quadrature power ``mean**2 + variance`` in dB above the SNL."""
    return float(to_db(st.expectation(mode, quadrature) ** 2 + st.variance(mode, quadrature)))


__all__ = [
    "GaussianState",
    "LossChannel",
    "SqueezingSpec",
    "SymplecticTransform",
    "UnphysicalStateError",
    "apply",
    "beamsplitter",
    "coherent",
    "condition",
    "displace",
    "homodyne",
    "identity",
    "local",
    "loss_channel",
    "power_db",
    "qnd_sum",
    "squeeze",
    "squeezed_vacuum",
    "squeezer",
    "vacuum",
]
