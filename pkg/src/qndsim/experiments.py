"""Reproduction harness: output power tables and covariance tomography."""

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from . import gaussian as g
from .conventions import amplitude_for_power_db, db_to_r
from .entanglement import is_physical, log_negativity, negativity_uncertainty
from .kernels import sample_moments
from .protocol import ImperfectionConfig, parallel_gate

LABELS = ("x_alpha", "p_alpha", "x_beta", "p_beta")
INPUT_POWER_DB = {"A": 11.0, "B": 12.5}
# panel -> (index into (x_A, p_A, x_B, p_B) carrying the coherent amplitude, input node)
PANELS = {"a": None, "b": (0, "A"), "c": (1, "A"), "d": (2, "B"), "e": (3, "B")}
# homodyne angles per output mode: x, p, and the two diagonals (x +- p)/sqrt2
TOMOGRAPHY_ANGLES = (0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
MIN_SAMPLES = 1000
IDEAL_R = 20.0  # stands in for r -> infinity


@dataclass(frozen=True)
class FigureRow:
    quadrature: str
    measured_db: float
    theory_ideal_db: float
    theory_classical_db: float
    theory_resource_db: float

    def to_dict(self):
        return {
            "quadrature": self.quadrature,
            "measured_db": self.measured_db,
            "theory_ideal_db": self.theory_ideal_db,
            "theory_classical_db": self.theory_classical_db,
            "theory_resource_db": self.theory_resource_db,
        }


def panel_input(panel):
    """Two-mode input state of a power-table panel."""
    if panel not in PANELS:
        raise ValueError(f"unknown panel {panel!r}; choose from {sorted(PANELS)}")
    means = np.zeros(4)
    if PANELS[panel] is not None:
        idx, node = PANELS[panel]
        means[idx] = amplitude_for_power_db(INPUT_POWER_DB[node])
    return g.coherent(2, means)


def _powers(st):
    return [g.power_db(st, m, q) for m in (0, 1) for q in ("x", "p")]


def fig3_table(panel, resource_db=-4.0, imperfections=None):
    """Output quadrature powers (dB re SNL) for one panel.

    ``measured_db`` is the simulated reading with ``imperfections`` applied
    (identical to ``theory_resource_db`` when none are given).  The theory
    columns are the lossless gate with an ideal resource, no resource, and
    the finite resource.
    """
    st = panel_input(panel)
    r = db_to_r(resource_db)
    ideal = _powers(parallel_gate(st, IDEAL_R).output)
    classical = _powers(parallel_gate(st, 0.0).output)
    resource = _powers(parallel_gate(st, r).output)
    measured = resource if imperfections is None else _powers(parallel_gate(st, r, imperfections=imperfections).output)
    return [FigureRow(*row) for row in zip(LABELS, measured, ideal, classical, resource)]


CSV_HEADER = "# powers in dB relative to the shot noise level (variance 1/4)"


def fig3_csv(rows, decimals=2):
    lines = [CSV_HEADER, "quadrature,measured_db,theory_ideal_db,theory_classical_db,theory_resource_db"]
    for row in rows:
        vals = [row.measured_db, row.theory_ideal_db, row.theory_classical_db, row.theory_resource_db]
        lines.append(",".join([row.quadrature] + [f"{v:.{decimals}f}" for v in vals]))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ tomography


def tomography_settings():
    """Joint local-oscillator angles ``(theta_alpha, theta_beta)``."""
    return list(itertools.product(TOMOGRAPHY_ANGLES, TOMOGRAPHY_ANGLES))


def _unit(theta, mode):
    v = np.zeros(4)
    v[2 * mode], v[2 * mode + 1] = np.cos(theta), np.sin(theta)
    return v


_PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]


def _design(settings):
    """Rows mapping the 10 independent entries of V to (var u, var v, cov uv) per setting."""
    rows = []
    for ta, tb in settings:
        a, b = _unit(ta, 0), _unit(tb, 1)
        for u, w in ((a, a), (b, b), (a, b)):
            rows.append([u[i] * w[j] + (u[j] * w[i] if i != j else 0.0) for i, j in _PAIRS])
    return np.array(rows)


def _unpack(theta):
    V = np.zeros((4, 4))
    for val, (i, j) in zip(theta, _PAIRS):
        V[i, j] = V[j, i] = val
    return V


def _pack(V):
    return np.array([V[i, j] for i, j in _PAIRS])


def _moment_cov(m, n):
    """Sampling covariance of (s_uu, s_vv, s_uv) for a bivariate normal."""
    su, sv, c = m
    return np.array(
        [
            [2 * su * su, 2 * c * c, 2 * su * c],
            [2 * c * c, 2 * sv * sv, 2 * sv * c],
            [2 * su * c, 2 * sv * c, su * sv + c * c],
        ]
    ) / (n - 1)


def tomography_moments(cov, settings=None):
    """Exact (var u, var v, cov uv) for each setting: the infinite-sample limit."""
    settings = settings or tomography_settings()
    return (_design(settings) @ _pack(cov)).reshape(len(settings), 3)


@dataclass(frozen=True, eq=False)
class CovEstimate:
    matrix: np.ndarray
    stderr: np.ndarray
    physical: bool
    E_N: Optional[float]
    E_N_err: Optional[float]
    samples: Optional[int] = None
    source: str = "tomography"

    @property
    def entangled(self):
        if self.E_N is None:
            return False
        if self.E_N_err:
            return self.E_N > 2.0 * self.E_N_err
        return self.E_N > 1e-9

    @classmethod
    def from_matrix(cls, matrix, stderr=0.0, samples=None, source="file"):
        matrix = np.asarray(matrix, dtype=float)
        stderr = np.broadcast_to(np.asarray(stderr, dtype=float), matrix.shape).copy()
        physical = is_physical(matrix)
        if physical:
            e_n = log_negativity(matrix).E_N
            err = negativity_uncertainty(matrix, stderr) if np.any(stderr) else 0.0
        else:
            e_n = err = None
        return cls(matrix, stderr, physical, e_n, err, samples, source)

    def to_dict(self):
        return {
            "source": self.source,
            "samples": self.samples,
            "cov": self.matrix.tolist(),
            "stderr": self.stderr.tolist(),
            "physical": self.physical,
            "E_N": self.E_N,
            "E_N_err": self.E_N_err,
            "entangled": self.entangled,
        }


def estimate_from_moments(moments, counts, settings=None):
    """Weighted least-squares fit of the 4x4 covariance to per-setting second moments.

    ``moments`` has one row (var u, var v, cov uv) per setting and ``counts``
    the number of trajectories behind each row.  The fit is symmetric by
    construction; standard errors come from the normal-theory sampling
    covariance of the moments, evaluated at a first unweighted fit.
    """
    settings = settings or tomography_settings()
    A = _design(settings)
    y = np.asarray(moments, dtype=float).reshape(-1)
    theta = np.linalg.lstsq(A, y, rcond=None)[0]
    if not np.all(np.isfinite(counts)):
        return _unpack(theta), np.zeros((4, 4))
    pred = (A @ theta).reshape(-1, 3)
    W = np.zeros((y.size, y.size))
    for k, (m, n) in enumerate(zip(pred, counts)):
        W[3 * k : 3 * k + 3, 3 * k : 3 * k + 3] = np.linalg.pinv(_moment_cov(m, n))
    info = A.T @ W @ A
    theta = np.linalg.solve(info, A.T @ W @ y)
    err = np.sqrt(np.diag(np.linalg.inv(info)))
    return _unpack(theta), _unpack(err)


def tomography_samples(st, r, samples, seed, imperfections=None, backend=None):
    """Simulated homodyne records: one quadrature per output mode per trajectory.

    Trajectory ``t`` uses setting ``t mod 16``.  Returns ``(setting_index,
    u, v)`` arrays.
    """
    res = parallel_gate(st, r, "montecarlo", samples, seed, imperfections, backend=backend)
    settings = np.array(tomography_settings())
    idx = np.arange(samples) % len(settings)
    out = res.output_samples
    ta, tb = settings[idx, 0], settings[idx, 1]
    u = np.cos(ta) * out[:, 0] + np.sin(ta) * out[:, 1]
    v = np.cos(tb) * out[:, 2] + np.sin(tb) * out[:, 3]
    return idx, u, v


def estimate_covariance(resource_db=-4.0, samples=100_000, seed=0, st=None, imperfections=None, backend=None):
    """Reconstruct the output covariance from simulated homodyne tomography."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    st = g.vacuum(2) if st is None else st
    idx, u, v = tomography_samples(st, db_to_r(resource_db), samples, seed, imperfections, backend)
    moments, counts = [], []
    for k in range(len(tomography_settings())):
        sel = idx == k
        _, c = sample_moments(np.column_stack([u[sel], v[sel]]), backend)
        moments.append((c[0, 0], c[1, 1], c[0, 1]))
        counts.append(int(sel.sum()))
    V, err = estimate_from_moments(moments, counts)
    return CovEstimate.from_matrix(V, err, samples, "tomography")


def estimate_covariance_exact(st, r, imperfections=None):
    """Infinite-sample limit of :func:`estimate_covariance`, from analytic moments."""
    cov = parallel_gate(st, r, imperfections=imperfections).output.cov
    V, _ = estimate_from_moments(tomography_moments(cov), [np.inf] * len(tomography_settings()))
    return CovEstimate.from_matrix(V, 0.0, None, "analytic")


# ------------------------------------------------------------ fixtures


def load_json_resource(name):
    return json.loads(resources.files("qndsim.data").joinpath(name).read_text())


def measured_covariance():
    """Published output covariance for vacuum inputs, with its per-entry error bound."""
    data = load_json_resource("measured_covariance.json")
    return np.array(data["cov"]), data["entry_error"]


def illustrative_imperfections():
    """Hand-picked loss budget that moves the vacuum-input powers toward the published ones."""
    return ImperfectionConfig.from_dict(load_json_resource("illustrative_losses.json")["imperfections"])
