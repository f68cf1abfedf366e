"""Command-line entry point: ``qndsim {fig3,covmatrix,negativity,compare,run}``.

Exit codes: 0 success, 2 configuration error, 3 unphysical state.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import protocol
from .config import ConfigError, dumps, load_state, parse_run_config, read_json, samples_csv
from .conventions import db_to_r
from .entanglement import is_physical, log_negativity, symplectic_eigenvalues, partial_transpose
from .protocol import ImperfectionConfig

log = logging.getLogger("qndsim")

OUT_ENV = "QNDSIM_OUT_DIR"
EXIT_CONFIG, EXIT_UNPHYSICAL = 2, 3


class Unphysical(Exception):
    pass


def _out_dir(args):
    out = Path(args.out or os.environ.get(OUT_ENV, "qndsim_out"))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"{out}: cannot create output directory ({exc.strerror})") from exc
    return out


def _write(path, text):
    try:
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot write ({exc.strerror})") from exc
    log.info("wrote %s", path)


def _imperfections(path):
    if path is None:
        return None
    data = read_json(path)
    try:
        return ImperfectionConfig.from_dict(data.get("imperfections", data))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _resource(db):
    try:
        return db_to_r(db)
    except ValueError as exc:
        raise ConfigError(f"--resource-db: {exc}") from exc


# ------------------------------------------------------------------ commands


def cmd_fig3(args):
    _resource(args.resource_db)
    imp = _imperfections(args.config)
    out = _out_dir(args)
    panels = sorted(ex.PANELS) if args.panel == "all" else [args.panel]
    for panel in panels:
        rows = ex.fig3_table(panel, args.resource_db, imp)
        text = ex.fig3_csv(rows)
        _write(out / f"fig3_{panel}.csv", text)
        print(f"panel {panel}")
        print(text, end="")


def _report_estimate(est, out):
    _write(out / "covmatrix.json", dumps(est.to_dict()))
    print(np.array2string(est.matrix, precision=4, suppress_small=True))
    if not est.physical:
        print("physical = false")
        raise Unphysical
    verdict = "entangled" if est.entangled else "not entangled"
    print(f"E_N = {est.E_N:.4f} +- {est.E_N_err:.4f} ({verdict}), physical = true")


def cmd_covmatrix(args):
    out = _out_dir(args)
    if args.cov:
        st = load_state(args.cov)
        est = ex.CovEstimate.from_matrix(st.cov, args.entry_error, source=str(args.cov))
    else:
        _resource(args.resource_db)
        if args.samples < ex.MIN_SAMPLES:
            raise ConfigError(f"--samples: need at least {ex.MIN_SAMPLES}, got {args.samples}")
        est = ex.estimate_covariance(args.resource_db, args.samples, args.seed, imperfections=_imperfections(args.config))
    _report_estimate(est, out)


def cmd_negativity(args):
    st = load_state(args.cov)
    if st.num_modes != 2:
        raise ConfigError(f"{args.cov}: negativity needs a two-mode covariance")
    physical = is_physical(st.cov)
    nu = float(symplectic_eigenvalues(partial_transpose(st.cov))[0])
    report = {"physical": physical, "nu_tilde_minus": nu, "E_N": None}
    if physical:
        report["E_N"] = log_negativity(st.cov).E_N
    print(dumps(report), end="")
    if not physical:
        raise Unphysical


def cmd_compare(args):
    r = _resource(args.resource_db)
    report = protocol.compare_schemes(ex.panel_input("a"), r, _imperfections(args.config))
    out = _out_dir(args)
    _write(out / "compare.json", dumps(report))
    print(f"{'scheme':<12}{'EPR':>5}{'reals':>7}{'rounds':>8}{'E_N':>9}")
    for name, row in report.items():
        led = row["ledger"]
        e_n = "n/a" if row["E_N"] is None else f"{row['E_N']:.4f}"
        print(
            f"{name:<12}{led['epr_pairs_consumed']:>5}{led['classical_reals_sent']:>7}"
            f"{led['communication_rounds']:>8}{e_n:>9}"
        )


def cmd_run(args):
    data = read_json(args.config)
    if args.samples is not None:
        data["samples"] = args.samples
    if args.seed is not None:
        data["seed"] = args.seed
    cfg = parse_run_config(data)
    gate = protocol.parallel_gate if cfg.scheme == "parallel" else protocol.sequential_gate
    res = gate(cfg.state, cfg.r, cfg.mode, cfg.samples, cfg.seed, cfg.imperfections)
    out = _out_dir(args)
    payload = res.to_dict()
    payload["resource_db"] = cfg.resource_db
    payload["physical"] = is_physical(res.output.cov)
    payload["E_N"] = log_negativity(res.output.cov).E_N if payload["physical"] else None
    _write(out / "result.json", dumps(payload))
    if cfg.raw_samples and res.outcomes is not None:
        _write(out / "samples.csv", samples_csv(res))
    print(dumps({k: payload[k] for k in ("scheme", "mode", "ledger", "E_N", "physical")}), end="")
    if not payload["physical"]:
        raise Unphysical


# ------------------------------------------------------------------ parser


def build_parser():
    p = argparse.ArgumentParser(prog="qndsim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, resource=True):
        sp.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./qndsim_out)")
        if resource:
            sp.add_argument("--resource-db", type=float, default=-4.0, help="resource squeezing in dB (<= 0)")

    sp = sub.add_parser("fig3", help="output power tables for vacuum / coherent inputs")
    common(sp)
    sp.add_argument("--panel", choices=sorted(ex.PANELS) + ["all"], default="all")
    sp.add_argument("--config", type=Path, help="JSON with an 'imperfections' block")
    sp.set_defaults(func=cmd_fig3)

    sp = sub.add_parser("covmatrix", help="covariance tomography from simulated homodyne data")
    common(sp)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--config", type=Path, help="JSON with an 'imperfections' block")
    sp.add_argument("--cov", type=Path, help="skip simulation and evaluate this covariance file")
    sp.add_argument("--entry-error", type=float, default=0.0, help="per-entry standard error for --cov")
    sp.set_defaults(func=cmd_covmatrix)

    sp = sub.add_parser("negativity", help="logarithmic negativity of a two-mode covariance file")
    sp.add_argument("--cov", type=Path, required=True)
    sp.set_defaults(func=cmd_negativity)

    sp = sub.add_parser("compare", help="parallel vs sequential resource ledger")
    common(sp)
    sp.add_argument("--config", type=Path, help="JSON with an 'imperfections' block")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("run", help="run one protocol configuration")
    common(sp, resource=False)
    sp.add_argument("--config", type=Path, required=True)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_run)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Unphysical:
        print("error: state violates the uncertainty principle", file=sys.stderr)
        return EXIT_UNPHYSICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
