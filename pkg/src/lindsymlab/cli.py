"""Command-line front end.

Subcommands:
  simulate     one configured run -> trajectory CSV + JSON summary
  table        the 16-row classification -> text + JSON, exit 0 iff 16/16
  sweep        repeat a run over several gammas, fit the first-order
               discrepancy exponent -> CSV + JSON summary
  classify-op  print the symmetry signature of a coupling operator

Configs are single JSON documents; literal matrices are nested arrays of
[re, im] pairs. All CSV output is deterministic: 12 significant digits,
'.' decimal separator, '\\n' line endings, and files are written through a
temporary name so they appear only when complete. The environment variable
LSL_TOLERANCE_SCALE multiplies every default tolerance, for CI boxes whose
float environments differ.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import catalog, reproduce_table, run_scenario
from .lindblad import (block_identity_test, evolve_expm, evolve_rk4,
                       liouvillian_matrix, subspace_block, vec)
from .observables import (DEFAULT_COH_TOL, DEFAULT_DEC_TOL, Coherence,
                          EntropySeries, coherence_verdict,
                          von_neumann_entropy)
from .operators import (OperatorSpec, build_coupling, build_hamiltonian,
                        canonical_name, spin_matrices)
from .response import delta_rho, scaling_exponent
from .spectra import ground_subspace, normalize_subspace, subspace_density
from .symmetry import commutes_with_antiunitary, commutes_with_unitary, \
    is_hermitian, quaternion_group, time_reversal


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


def tolerance_scale() -> float:
    raw = os.environ.get("LSL_TOLERANCE_SCALE", "1")
    try:
        scale = float(raw)
    except ValueError as exc:
        raise ConfigError(f"LSL_TOLERANCE_SCALE={raw!r} is not a number") from exc
    if scale <= 0:
        raise ConfigError("LSL_TOLERANCE_SCALE must be positive")
    return scale


def _parse_complex(value, key: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(x, (int, float)) for x in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{key}: expected a number or [re, im] pair, got {value!r}")


def _parse_matrix(rows, key: str) -> np.ndarray:
    try:
        mat = np.array([[_parse_complex(x, key) for x in row] for row in rows])
    except (TypeError, ConfigError) as exc:
        raise ConfigError(f"{key}: malformed matrix literal ({exc})") from None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ConfigError(f"{key}: matrix must be square, got shape {mat.shape}")
    return mat


def _parse_operator(value, key: str, scale: float = 1.0) -> OperatorSpec:
    if isinstance(value, str):
        return OperatorSpec(name=value, scale=scale)
    if isinstance(value, dict):
        extra = scale * float(value.get("scale", 1.0))
        if "name" in value:
            return OperatorSpec(name=value["name"], scale=extra)
        if "matrix" in value:
            return OperatorSpec(matrix=_parse_matrix(value["matrix"], key),
                                scale=extra)
        raise ConfigError(f"{key}: object needs a 'name' or 'matrix' entry")
    raise ConfigError(f"{key}: expected a name or an object, got {value!r}")


@dataclass
class RunConfig:
    """One fully specified simulation."""

    hamiltonian: OperatorSpec
    coupling: OperatorSpec
    spin: float = 1.5
    gamma: float = 0.1
    e_g: float = 1.0
    t_max: float | None = None
    dt: float | None = None
    integrator: str = "expm"
    alpha: complex = complex(1 / np.sqrt(2.0))
    beta: complex = complex(1 / np.sqrt(2.0))
    n_samples: int = 201
    n_quad: int = 128
    gammas: list = field(default_factory=list)
    csv_name: str = "trajectory.csv"
    summary_name: str = "summary.json"

    def validate(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ConfigError(f"alpha/beta: |a|^2 + |b|^2 = {norm!r}, need 1")
        if self.t_max is not None and self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.integrator not in ("rk4", "expm"):
            raise ConfigError(f"integrator must be rk4 or expm, "
                              f"got {self.integrator!r}")
        if self.gamma <= 0:
            raise ConfigError("gamma must be positive")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be at least 2")


_KNOWN_KEYS = {"spin", "hamiltonian", "coupling", "gamma", "e_g", "t_max",
               "dt", "integrator", "alpha", "beta", "n_samples", "n_quad",
               "gammas", "csv", "summary"}


def load_config(path: str) -> RunConfig:
    """Parse and validate a JSON config file.

    Raises:
        ConfigError: unreadable file, JSON syntax errors (with line/column),
            unknown keys, missing operators, or violated invariants.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    for required in ("hamiltonian", "coupling"):
        if required not in doc:
            raise ConfigError(f"{path}: missing required key '{required}'")

    try:
        e_g = float(doc.get("e_g", 1.0))
        cfg = RunConfig(
            hamiltonian=_parse_operator(doc["hamiltonian"], "hamiltonian", e_g),
            coupling=_parse_operator(doc["coupling"], "coupling"),
            spin=float(doc.get("spin", 1.5)),
            gamma=float(doc.get("gamma", 0.1)),
            e_g=e_g,
            t_max=float(doc["t_max"]) if doc.get("t_max") is not None else None,
            dt=float(doc["dt"]) if doc.get("dt") is not None else None,
            integrator=str(doc.get("integrator", "expm")),
            n_samples=int(doc.get("n_samples", 201)),
            n_quad=int(doc.get("n_quad", 128)),
            gammas=[float(g) for g in doc.get("gammas", [])],
            csv_name=str(doc.get("csv", "trajectory.csv")),
            summary_name=str(doc.get("summary", "summary.json")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid value ({exc})") from None
    if "alpha" in doc:
        cfg.alpha = _parse_complex(doc["alpha"], "alpha")
    if "beta" in doc:
        cfg.beta = _parse_complex(doc["beta"], "beta")
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cfg


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return "%.11e" % (0.0 if x == 0 else x)


@dataclass
class PreparedRun:
    """Matrices and doublet data shared by simulate and sweep."""

    cfg: RunConfig
    h: np.ndarray
    o: np.ndarray
    basis: np.ndarray
    psi0: np.ndarray


def _prepare_run(cfg: RunConfig) -> PreparedRun:
    spins = spin_matrices(cfg.spin)
    try:
        h = build_hamiltonian(cfg.hamiltonian, spins)
        o = build_coupling(cfg.coupling, spins)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    trev = time_reversal(cfg.spin)
    pairing = trev if commutes_with_antiunitary(h, trev) else None
    ground = ground_subspace(h, pairing=pairing)
    if ground.dim != 2:
        raise ConfigError(
            f"ground subspace has dimension {ground.dim}; the alpha/beta "
            f"initial state needs a doublet")
    psi0 = cfg.alpha * ground.basis[:, 0] + cfg.beta * ground.basis[:, 1]
    return PreparedRun(cfg=cfg, h=h, o=o, basis=ground.basis, psi0=psi0)


def _trajectory_rows(run: PreparedRun, gamma: float, t_max: float):
    """Run one trajectory; return (csv rows, EntropySeries, final state)."""
    cfg = run.cfg
    rho0 = np.outer(run.psi0, run.psi0.conj())
    if cfg.integrator == "rk4":
        traj = evolve_rk4(rho0, run.h, run.o, gamma, t_max, dt=cfg.dt,
                          n_samples=cfg.n_samples)
    else:
        times = np.linspace(0.0, t_max, cfg.n_samples)
        traj = evolve_expm(rho0, run.h, run.o, gamma, times)
    rows = []
    s_v = np.empty(len(traj))
    trace_g = np.empty(len(traj))
    for k in range(len(traj)):
        rg = subspace_density(traj.states[k], run.basis)
        trace_g[k] = np.trace(rg).real
        s_v[k] = von_neumann_entropy(normalize_subspace(rg))
        t = traj.times[k]
        rows.append(",".join([
            _fmt(t), _fmt(gamma * t), _fmt(s_v[k]), _fmt(trace_g[k]),
            _fmt(rg[0, 0].real), _fmt(rg[0, 1].real), _fmt(rg[0, 1].imag),
            _fmt(rg[1, 1].real),
        ]))
    series = EntropySeries(times=traj.times, s_v=s_v, trace_g=trace_g)
    return rows, series, traj.states[-1]


CSV_HEADER = "t,gamma_t,s_v,trace_g,re_rho_pp,re_rho_pm,im_rho_pm,re_rho_mm"


def cmd_simulate(args) -> int:
    scale = tolerance_scale()
    cfg = load_config(args.config)
    if args.gamma is not None:
        cfg.gamma = float(args.gamma)
        cfg.validate()
    if args.integrator is not None:
        cfg.integrator = args.integrator
        cfg.validate()
    t_max = cfg.t_max
    if args.horizon is not None or t_max is None:
        horizon = args.horizon if args.horizon is not None else 20.0
        t_max = horizon / cfg.gamma

    run = _prepare_run(cfg)
    rows, series, rho_end = _trajectory_rows(run, cfg.gamma, t_max)
    verdict = coherence_verdict(series, DEFAULT_COH_TOL * scale,
                                DEFAULT_DEC_TOL * scale)
    l_mat = liouvillian_matrix(run.h, run.o, cfg.gamma)
    block = block_identity_test(subspace_block(l_mat, run.basis))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / cfg.csv_name, "\n".join([CSV_HEADER] + rows) + "\n")
    summary = {
        "gamma": cfg.gamma,
        "t_max": t_max,
        "integrator": cfg.integrator,
        "terminal_entropy": float(series.s_v[-1]),
        "peak_entropy": float(np.max(series.s_v)),
        "terminal_trace_g": float(series.trace_g[-1]),
        "verdict": verdict.value,
        "block_identity": bool(block.proportional),
        "block_residual": float(block.residual),
        "stationarity": float(np.linalg.norm(l_mat @ vec(rho_end))),
        "csv": cfg.csv_name,
    }
    _atomic_write(out_dir / cfg.summary_name,
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out_dir / cfg.csv_name} and {out_dir / cfg.summary_name} "
          f"(verdict: {verdict.value})")
    return 0


def cmd_table(args, scenarios=None) -> int:
    scale = tolerance_scale()
    gamma = float(args.gamma) if args.gamma is not None else 0.1
    horizon = args.horizon if args.horizon is not None else 20.0
    report = reproduce_table(gamma=gamma, horizon=horizon,
                             scenarios=scenarios, tol_scale=scale)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = report.text_table() + "\n"
    _atomic_write(out_dir / "table.txt", text)
    doc = {
        "gamma": report.gamma,
        "horizon": report.horizon,
        "all_pass": report.all_pass,
        "oracle_all_agree": report.oracle_all_agree,
        "rows": [
            {
                "scenario": v.name,
                "expected": v.expected_coherence.value,
                "measured": v.measured_coherence.value,
                "block_identity": v.block_identity,
                "block_residual": v.block_residual,
                "schur_proportional": v.schur_proportional,
                "schur_residual": v.schur_residual,
                "peak_entropy": v.peak_entropy,
                "terminal_entropy": v.terminal_entropy,
                "terminal_trace_g": v.terminal_trace_g,
                "oracle_agrees": report.oracle_agreement[v.name],
                "passed": v.passed,
            }
            for v in report.verdicts
        ],
    }
    _atomic_write(out_dir / "table.json",
                  json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(text, end="")
    return 0 if report.all_pass else 1


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    gammas = list(cfg.gammas)
    if args.gamma is not None:
        gammas = [float(tok) for tok in str(args.gamma).split(",") if tok]
    if len(gammas) < 2:
        raise ConfigError("sweep needs at least two gamma values "
                          "(config key 'gammas' or --gamma g1,g2,...)")
    if any(g <= 0 for g in gammas):
        raise ConfigError("sweep gammas must be positive")
    t_max = cfg.t_max if cfg.t_max is not None else 5.0

    run = _prepare_run(cfg)
    times = np.linspace(0.0, t_max, cfg.n_samples)
    rho0 = np.outer(run.psi0, run.psi0.conj())
    traj0 = evolve_expm(rho0, run.h, run.o, 0.0, times)

    rows = []
    discrepancies = []
    for gamma in gammas:
        _, series, rho_end = _trajectory_rows(run, gamma, t_max)
        delta = delta_rho(traj0, run.o, run.h, gamma, t_max, cfg.n_quad)
        disc = float(np.linalg.norm(rho_end - traj0.states[-1] - delta))
        discrepancies.append(disc)
        rows.append(",".join([_fmt(gamma), _fmt(series.s_v[-1]), _fmt(disc)]))

    exponent = scaling_exponent(gammas, discrepancies)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = cfg.csv_name if cfg.csv_name != "trajectory.csv" else "sweep.csv"
    summary_name = (cfg.summary_name if cfg.summary_name != "summary.json"
                    else "sweep_summary.json")
    _atomic_write(out_dir / csv_name,
                  "\n".join(["gamma,terminal_s_v,discrepancy"] + rows) + "\n")
    summary = {
        "gammas": gammas,
        "t_max": t_max,
        "n_quad": cfg.n_quad,
        "discrepancies": discrepancies,
        "fitted_exponent": exponent,
        "csv": csv_name,
    }
    _atomic_write(out_dir / summary_name,
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out_dir / csv_name}; fitted exponent {exponent:.3f}")
    return 0


def cmd_classify_op(args) -> int:
    spins = spin_matrices(1.5)
    if args.config is not None:
        cfg = load_config(args.config)
        spec = cfg.coupling
    else:
        if args.operator is None:
            raise ConfigError("give an operator name or --config")
        spec = OperatorSpec(name=args.operator)
    try:
        o = build_coupling(spec, spins)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    group = quaternion_group()
    trev = time_reversal(1.5)
    herm = is_hermitian(o)
    comm_t = commutes_with_antiunitary(o, trev)
    failing = [lbl for lbl, q in zip(group.labels, group.elements)
               if not commutes_with_unitary(o, q)]
    shown = spec.name if spec.name is not None else "<literal matrix>"
    if spec.name is not None:
        shown = f"{spec.name} (canonical: {canonical_name(spec.name)})"
    print(f"operator:  {shown}")
    print(f"hermitian: {'yes' if herm else 'no'}")
    print(f"[O,T]=0:   {'yes' if comm_t else 'no'}")
    if failing:
        print(f"[O,Q]=0:   no   (fails on: {', '.join(failing)})")
    else:
        print("[O,Q]=0:   yes")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindsymlab",
        description="Symmetry-protected coherence in dissipative spin models")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required,
                       help="path to a JSON run configuration")
        p.add_argument("--gamma", default=None,
                       help="dissipation rate (sweep: comma-separated list)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--integrator", choices=("rk4", "expm"), default=None)
        p.add_argument("--horizon", type=float, default=None,
                       help="dimensionless horizon gamma*t")

    p_sim = sub.add_parser("simulate", help="run one configured scenario")
    common(p_sim, config_required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_tab = sub.add_parser("table", help="reproduce the 16-row classification")
    common(p_tab, config_required=False)
    p_tab.set_defaults(func=cmd_table)

    p_sw = sub.add_parser("sweep", help="gamma sweep with first-order oracle")
    common(p_sw, config_required=True)
    p_sw.set_defaults(func=cmd_sweep)

    p_cls = sub.add_parser("classify-op",
                           help="print an operator's symmetry signature")
    p_cls.add_argument("operator", nargs="?", default=None,
                       help="catalog operator name (or use --config)")
    p_cls.add_argument("--config", default=None)
    p_cls.set_defaults(func=cmd_classify_op)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
