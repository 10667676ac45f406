"""Batch front-end: JSON job configs, subcommand dispatch, CSV/JSON emission.

Every run writes its data files plus ``summary.json`` and ``manifest.json``
into the output directory.  The manifest records the full job
specification, the code version, the wall time and a sha256 digest of every
file written, so identical jobs on identical code produce byte-identical
artifacts.  Numbers are printed with 17 significant digits so the CSV files
are bit-stable golden references.

Subcommands: ``dispersion``, ``s1``, ``two-polariton-map``, ``propagate``,
``fidelity``, ``optimize``, ``sweep``, ``selftest``.  A JSON config document
may preset any of the parameter fields; command-line flags override it.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .model import GateConfig, ModelParams, RunManifest, build_grid
from . import gate as gate_mod
from . import polariton as pol
from . import single_photon as sp
from . import two_photon as tph
from . import two_polariton as tpol

FMT = "%.16e"  # 17 significant digits


def _fmt(x) -> str:
    if isinstance(x, complex):
        return f"{FMT % x.real},{FMT % x.imag}"
    return FMT % x


class OutputDir:
    """Collects output files and writes the manifest last."""

    def __init__(self, path: str, job: dict):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(
            parameters=job, grid=job.get("grid", {}), code_version=__version__
        )
        self.t0 = time.perf_counter()

    def write_text(self, name: str, text: str) -> None:
        payload = text.encode()
        (self.path / name).write_bytes(payload)
        self.manifest.add_file(name, payload)

    def write_csv(self, name: str, header: list[str], rows) -> None:
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(x) if not isinstance(x, str) else x for x in row) + "\n")
        self.write_text(name, buf.getvalue())

    def write_matrix_csv(self, name: str, row_vals, col_vals, matrix) -> None:
        """Matrix with leading header row/column of axis values."""
        buf = io.StringIO()
        buf.write("_," + ",".join(FMT % c for c in col_vals) + "\n")
        for rv, row in zip(row_vals, matrix):
            buf.write(FMT % rv + "," + ",".join(FMT % x for x in row) + "\n")
        self.write_text(name, buf.getvalue())

    def write_summary(self, summary: dict) -> None:
        self.write_text("summary.json", json.dumps(summary, indent=2, default=_json_default))

    def finish(self) -> None:
        self.manifest.wall_seconds = time.perf_counter() - self.t0
        (self.path / "manifest.json").write_text(
            json.dumps(self.manifest.as_dict(), indent=2, default=_json_default)
        )


def _json_default(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _load_job(args: argparse.Namespace) -> dict:
    """Merge the JSON config document (if any) with command-line overrides."""
    job: dict = {}
    if args.config:
        try:
            job = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise SystemExit(f"config parse error in {args.config}: {exc}") from exc
    for key in (
        "gamma_a",
        "gamma_b",
        "gamma_loss",
        "delta_k_d",
        "k0_d",
        "n_emitters",
        "inv_c",
        "sigma",
        "tau",
        "phi_ideal",
        "half_width",
        "n_points",
    ):
        val = getattr(args, key, None)
        if val is not None:
            job[key] = val
    return job


def _params_from_job(job: dict) -> ModelParams:
    fields = ("gamma_a", "gamma_b", "gamma_loss", "delta_k_d", "k0_d", "n_emitters", "inv_c")
    return ModelParams(**{k: job[k] for k in fields if k in job})


def _config_from_job(job: dict) -> GateConfig:
    fields = ("sigma", "tau", "bs_gamma_a", "bs_gamma_b", "phi_ideal", "compensate_bs_delays")
    return GateConfig(**{k: job[k] for k in fields if k in job})


def _grid_from_job(job: dict, sigma: float):
    if "half_width" in job or "n_points" in job:
        return build_grid(job.get("half_width", 2.0), job.get("n_points", 401))
    return gate_mod.default_gate_grid(sigma)


def _parse_range(text: str) -> np.ndarray:
    """``start:stop:count`` inclusive range, or a comma list of values."""
    if ":" in text:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count))
    return np.array([float(v) for v in text.split(",")])


# ---------------------------------------------------------------- subcommands


def cmd_dispersion(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    out = OutputDir(args.out, {"subcommand": "dispersion", **job})
    n_samples = job.get("n_points", args.band_points)
    points = pol.dispersion_curve(params, n_points=n_samples, exact=args.exact)
    out.write_csv(
        "dispersion.csv",
        ["q_d", "band", "omega", "v_g"],
        [(p.q_d, p.band, p.omega, p.v_g) for p in points],
    )
    tau_plus, tau_minus, tau = pol.resonant_delays(params)
    out.write_summary(
        {
            "tau_plus": tau_plus,
            "tau_minus": tau_minus,
            "initial_delay": tau,
            "rows": len(points),
        }
    )
    out.finish()
    return 0


def cmd_s1(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    grid = _grid_from_job(job, job.get("sigma", 0.05))
    out = OutputDir(args.out, {"subcommand": "s1", **job})
    rows = []
    for delta in grid.points:
        s1 = sp.unit_cell_s1(float(delta), params)
        eig = sp.transfer_eigen(float(delta), params)
        rows.append(
            (
                delta,
                s1[0, 0],
                s1[0, 1],
                s1[1, 0],
                s1[1, 1],
                complex(eig.q_plus_d),
                complex(eig.q_minus_d),
            )
        )
    out.write_csv(
        "s1.csv",
        [
            "delta",
            "s_aa_re", "s_aa_im",
            "s_ab_re", "s_ab_im",
            "s_ba_re", "s_ba_im",
            "s_bb_re", "s_bb_im",
            "q_plus_d_re", "q_plus_d_im",
            "q_minus_d_re", "q_minus_d_im",
        ],
        rows,
    )
    out.write_summary({"n_frequencies": grid.n, "half_width": grid.half_width})
    out.finish()
    return 0


def cmd_two_polariton_map(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    out = OutputDir(args.out, {"subcommand": "two-polariton-map", **job})
    deltas = _parse_range(args.delta_range)
    dks = _parse_range(args.dk_range)
    scan = tpol.resonance_scan(deltas, dks, params)
    out.write_matrix_csv("p_elastic.csv", deltas, dks, scan["p_elastic"])
    out.write_matrix_csv("arg_t_el.csv", deltas, dks, scan["arg_t_el"])
    out.write_matrix_csv("minus_im_Qprime_d.csv", deltas, dks, scan["minus_im_Qprime_d"])
    n_err = int(np.count_nonzero(scan["error"]))
    out.write_summary(
        {
            "cells": int(deltas.size * dks.size),
            "failed_cells": n_err,
            "resonant_fraction": float(np.mean(scan["label"] == "resonance")),
        }
    )
    out.finish()
    return 0


def cmd_propagate(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    config = _config_from_job(job)
    grid = _grid_from_job(job, config.sigma)
    out = OutputDir(args.out, {"subcommand": "propagate", **job, "basis": args.basis})

    if args.basis == "polariton":
        state_in = tph.plus_minus_input(config, params, grid)
        ideal = tph.plus_minus_ideal(config, params, grid)
    else:
        state_in = tph.build_input(config, params, grid)
        _, _, ideal = tph.ideal_outputs(config, params, grid)
        state_in = tph.apply_beam_splitter2(state_in, config)
    state = tph.apply_chain(state_in, params)
    if args.basis == "channel":
        state = tph.apply_beam_splitter2(state, config)

    jsd = tph.joint_spectral_density(state, ideal=ideal)
    amplitudes = {"aa": state.aa, "ab": state.ab, "bb": state.bb}
    for sector in ("aa", "ab", "bb"):
        out.write_matrix_csv(
            f"density_{sector}.csv", grid.points, grid.points, jsd["density"][sector]
        )
        out.write_matrix_csv(
            f"re_amplitude_{sector}.csv", grid.points, grid.points, jsd["real"][sector]
        )
        out.write_matrix_csv(
            f"im_amplitude_{sector}.csv", grid.points, grid.points, amplitudes[sector].imag
        )
    overlap = jsd["elastic_overlap"]
    out.write_summary(
        {
            "norm_sq": jsd["norm_sq"],
            "elastic_overlap": overlap,
            "elastic_overlap_abs": abs(overlap),
            "elastic_overlap_arg": float(np.angle(overlap)),
            "inelastic_weight": tph.inelastic_weight(state, ideal),
        }
    )
    out.finish()
    return 0


def cmd_fidelity(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    config = _config_from_job(job)
    grid = _grid_from_job(job, config.sigma)
    out = OutputDir(args.out, {"subcommand": "fidelity", **job})
    report = gate_mod.gate_fidelity(
        params, config, grid=grid, check_convergence=args.check_convergence
    )
    out.write_csv(
        "fidelity.csv",
        ["fidelity", "infidelity", "overlap_a_re", "overlap_a_im",
         "overlap_b_re", "overlap_b_im", "overlap_ab_re", "overlap_ab_im"],
        [(report.fidelity, 1 - report.fidelity, report.overlap_a,
          report.overlap_b, report.overlap_ab)],
    )
    out.write_summary(
        {
            "fidelity": report.fidelity,
            "infidelity": 1.0 - report.fidelity,
            "overlap_a": report.overlap_a,
            "overlap_b": report.overlap_b,
            "overlap_ab": report.overlap_ab,
            "grid_half_width": report.grid_half_width,
            "grid_n": report.grid_n,
            "grid_converged": report.grid_converged,
        }
    )
    out.finish()
    return 0


def cmd_optimize(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    config = _config_from_job(job)
    out = OutputDir(args.out, {"subcommand": "optimize", **job})
    n_values = [int(v) for v in _parse_range(args.n_range)]
    rows = []
    for n in n_values:
        p = params.replace(n_emitters=n)
        sigma_n, f_n = gate_mod.optimize_sigma(
            p, config, bracket=(args.sigma_min, args.sigma_max)
        )
        rows.append((float(n), sigma_n, f_n, 1.0 - f_n))
    out.write_csv("optimize.csv", ["n_emitters", "sigma_opt", "fidelity", "infidelity"], rows)
    summary: dict = {"n_values": n_values}
    if len(rows) >= 4:
        ns = [r[0] for r in rows]
        exp_s, pre_s, r2_s = gate_mod.fit_power_law(ns, [r[1] for r in rows])
        exp_f, pre_f, r2_f = gate_mod.fit_power_law(ns, [r[3] for r in rows])
        summary["sigma_scaling"] = {"exponent": exp_s, "prefactor": pre_s, "r_squared": r2_s}
        summary["infidelity_scaling"] = {"exponent": exp_f, "prefactor": pre_f, "r_squared": r2_f}
    out.write_summary(summary)
    out.finish()
    return 0


def cmd_sweep(args) -> int:
    job = _load_job(args)
    params = _params_from_job(job)
    config = _config_from_job(job)
    out = OutputDir(args.out, {"subcommand": "sweep", **job, "axes": args.axis})
    aliases = {"N": "n_emitters", "gamma": "gamma_loss", "dG": "delta_gamma", "dk": "delta_k_d"}
    axes = {}
    for spec in args.axis:
        name, _, rng = spec.partition("=")
        if not rng:
            raise SystemExit(f"malformed --axis {spec!r}; expected name=start:stop:count")
        axes[aliases.get(name, name)] = _parse_range(rng)
    table = gate_mod.sweep(
        params, config, axes, optimize_sigma_per_n=args.optimize_sigma
    )
    out.write_csv(
        "sweep.csv",
        table.columns,
        [tuple(row.get(c, "") for c in table.columns) for row in table.rows],
    )
    failed = [r for r in table.rows if r.get("error")]
    out.write_summary({"rows": len(table.rows), "failed_rows": len(failed)})
    out.finish()
    return 0


def cmd_selftest(args) -> int:
    """Run the acceptance suite via pytest (requires the repo test tree)."""
    import pytest

    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "tests" / "test_acceptance.py"
        if candidate.exists():
            extra = ["-k", args.k] if args.k else []
            return pytest.main(["-v", str(candidate), *extra])
    print("acceptance suite not found (tests/test_acceptance.py)", file=sys.stderr)
    return 2


# -------------------------------------------------------------------- parser


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON job document; flags override its fields")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--gamma-a", dest="gamma_a", type=float)
    p.add_argument("--gamma-b", dest="gamma_b", type=float)
    p.add_argument("--gamma-loss", dest="gamma_loss", type=float)
    p.add_argument("--dk", dest="delta_k_d", type=float, help="delta_k_d in radians")
    p.add_argument("--k0", dest="k0_d", type=float)
    p.add_argument("--n", dest="n_emitters", type=int)
    p.add_argument("--inv-c", dest="inv_c", type=float)
    p.add_argument("--sigma", dest="sigma", type=float)
    p.add_argument("--tau", dest="tau", type=float)
    p.add_argument("--phi", dest="phi_ideal", type=float)
    p.add_argument("--half-width", dest="half_width", type=float)
    p.add_argument("--points", dest="n_points", type=int, help="frequency grid points (odd)")


# treat tokens like "-1:1:201" as values rather than flags
_NEGATIVE_VALUE = re.compile(r"^-\d[\d.:,eE+-]*$")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralgate",
        description="chiral two-mode waveguide QED: scattering and CZ-gate fidelity",
    )
    parser._negative_number_matcher = _NEGATIVE_VALUE
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="polariton bands omega(q), v_g(q)")
    _add_param_flags(p)
    p.add_argument("--exact", action="store_true", help="solve the retarded dispersion")
    p.add_argument(
        "--band-points", type=int, default=512,
        help="samples per band (--points is an equivalent override)",
    )
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("s1", help="unit-cell S-matrix entries and eigenphases per delta")
    _add_param_flags(p)
    p.set_defaults(func=cmd_s1)

    p = sub.add_parser("two-polariton-map", help="elastic probability / phase / Im Q' maps")
    p._negative_number_matcher = _NEGATIVE_VALUE
    _add_param_flags(p)
    p.add_argument("--delta-range", default="-1:1:201", help="start:stop:count")
    p.add_argument("--dk-range", default="0.0314:6.2517:199", help="start:stop:count")
    p.set_defaults(func=cmd_two_polariton_map)

    p = sub.add_parser("propagate", help="two-photon wavepacket through the array")
    _add_param_flags(p)
    p.add_argument(
        "--basis",
        choices=("polariton", "channel"),
        default="polariton",
        help="polariton: +/- superposition input, bare array; channel: gate layout",
    )
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("fidelity", help="single CZ-gate fidelity point")
    _add_param_flags(p)
    p.add_argument("--check-convergence", action="store_true")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("optimize", help="optimal bandwidth per emitter number")
    _add_param_flags(p)
    p.add_argument("--n-range", default="10:60:6", help="start:stop:count")
    p.add_argument("--sigma-min", type=float, default=5e-3)
    p.add_argument("--sigma-max", type=float, default=0.4)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="infidelity over parameter axes")
    _add_param_flags(p)
    p.add_argument(
        "--axis",
        action="append",
        required=True,
        help="axis spec name=start:stop:count (repeatable); names: n_emitters, "
        "gamma_loss, delta_gamma, delta_k_d, sigma",
    )
    p.add_argument("--optimize-sigma", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("-k", help="pytest keyword filter")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = os.environ.get("CHIRALGATE_WORKERS")
    if workers is not None:
        os.environ.setdefault("OMP_NUM_THREADS", workers)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
