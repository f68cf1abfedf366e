"""JSON formats: Gaussian states, protocol run configs and results."""

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import gaussian as g
from .conventions import db_to_r
from .protocol import ImperfectionConfig


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(obj):
    """Deterministic JSON: sorted keys, fixed indentation, shortest float repr."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def load_state(path):
    """Read ``{"modes": n, "mean": [...], "cov": [[...]]}``; ``mean`` may be omitted."""
    data = read_json(path)
    if "cov" not in data:
        raise ConfigError(f"{path}: missing 'cov'")
    cov = np.asarray(data["cov"], dtype=float)
    if cov.ndim != 2:
        raise ConfigError(f"{path}: 'cov' must be a matrix")
    data = {"mean": data.get("mean", [0.0] * cov.shape[0]), **{k: v for k, v in data.items() if k != "mean"}}
    try:
        return g.GaussianState.from_dict(data)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_state(st, path):
    Path(path).write_text(dumps(st.to_dict()))


@dataclass(frozen=True)
class RunConfig:
    resource_db: float
    state: g.GaussianState
    mode: str = "analytic"
    samples: Optional[int] = None
    seed: Optional[int] = None
    imperfections: Optional[ImperfectionConfig] = None
    raw_samples: bool = False
    scheme: str = "parallel"

    @property
    def r(self):
        return db_to_r(self.resource_db)


def _input_mode(spec, k):
    kind = spec.get("type")
    if kind == "vacuum":
        return g.vacuum(1)
    if kind == "coherent":
        means = spec.get("means")
        if means is None or len(means) != 2:
            raise ConfigError(f"inputs[{k}]: coherent input needs 'means' = [x, p]")
        return g.coherent(1, means)
    raise ConfigError(f"inputs[{k}]: unknown type {kind!r} (expected 'vacuum' or 'coherent')")


def parse_run_config(data):
    """Validate a protocol run config (see README for the schema)."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        resource_db = float(data.get("resource_db", -4.0))
        db_to_r(resource_db)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"resource_db: {exc}") from exc
    inputs = data.get("inputs", [{"type": "vacuum"}, {"type": "vacuum"}])
    if len(inputs) != 2:
        raise ConfigError(f"inputs: expected two entries (A, B), got {len(inputs)}")
    state = _input_mode(inputs[0], 0).tensor(_input_mode(inputs[1], 1))
    mode = {"analytic": "analytic", "mc": "montecarlo", "montecarlo": "montecarlo"}.get(data.get("mode", "analytic"))
    if mode is None:
        raise ConfigError(f"mode: expected 'analytic' or 'mc', got {data.get('mode')!r}")
    samples = data.get("samples")
    seed = data.get("seed")
    if mode == "montecarlo":
        if not isinstance(samples, int) or samples < 2:
            raise ConfigError("samples: Monte Carlo mode needs an integer >= 2")
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed: Monte Carlo mode needs a non-negative integer seed")
    imp = None
    if "imperfections" in data:
        try:
            imp = ImperfectionConfig.from_dict(data["imperfections"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"imperfections: {exc}") from exc
    scheme = data.get("scheme", "parallel")
    if scheme not in ("parallel", "sequential"):
        raise ConfigError(f"scheme: expected 'parallel' or 'sequential', got {scheme!r}")
    return RunConfig(resource_db, state, mode, samples, seed, imp, bool(data.get("raw_samples", False)), scheme)


def samples_csv(result):
    """Raw trajectories: ``trajectory, <outcomes...>, x_alpha, p_alpha, x_beta, p_beta``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trajectory", *result.record_labels, "x_alpha", "p_alpha", "x_beta", "p_beta"])
    for t, (s, out) in enumerate(zip(result.outcomes, result.output_samples)):
        writer.writerow([t, *(repr(float(v)) for v in s), *(repr(float(v)) for v in out)])
    return buf.getvalue()
