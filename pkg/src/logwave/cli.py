"""Run orchestration: flat-key configs, reproducible manifests, line-delimited
records, plot-ready series, and the command-line verbs

    logwave ode      - blow-up ODE trajectory and rate-ratio series
    logwave simulate - similarity-variables run with functional snapshots
    logwave verify   - verification suites over records / built-in corpora
    logwave sweep    - parameter sweep driving one of the verbs above

Records are one self-describing JSON object per line with full-precision
floats; identical manifest + seed reproduces record files byte for byte
(timestamps live only in the manifest file, outside the hashed payload).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .functionals import FunctionalConstants
from .model import ModelParams, kappa
from .ode import OdeControls, integrate_ode, rate_ratio
from .pde import (
    SimilarityRunConfig,
    TrajectoryRecord,
    initial_constant,
    initial_kappa_bump,
    initial_sign_changing,
    ode_matched_constant,
    run_similarity,
    tune_unstable_mode,
)
from .quad import RadialGrid
from .simvars import SimilarityFrame
from .verify import (
    boundary_dissipation_hierarchy,
    calibrate_theta1,
    check_blowup_criterion,
    check_boundary_dissipation,
    check_theorem1,
    check_theorem2,
    growth_monitor,
    hardy_corpus,
    identity_corpus,
)

__all__ = ["RunConfig", "load_config", "manifest_for", "emit_records", "parse_records", "main"]

ENV_OUT_DIR = "LOGWAVE_OUT"


@dataclass
class RunConfig:
    """Flat key namespace mirroring the run manifest."""

    # model
    n: int = 3
    a: float = -1.0
    theorem_mode: bool = True
    # frame
    x0: float = 0.0
    T0: float = math.exp(-14.0)
    delta0: float = 0.5
    # window and grid
    s0: float = 20.0
    s1: float = 30.0
    grid_n: int = 64
    quad_n: int = 128
    node_exponent: float = -0.5
    extrap_order: int = 4
    snapshot_ds: float = 0.25
    cfl: float = 0.5
    blowup_cap: float = 1e6
    s0_floor: float = 0.0
    # constants (theta1 <= 0 requests calibration)
    theta1: float = 4.0
    theta2: float = 8.0
    theta4: float = 8.0
    nu: float = 0.005
    eta_list: tuple = (0.1, 0.25, 0.5)
    # initial data
    data: str = "kappa_bump"  # constant | kappa_bump | sign_changing
    amp: float = 0.05
    width: float = 0.15
    center: float = 0.3
    ode_matched: bool = True
    tune: bool = True
    # ode verb
    v0: float = 10.0
    v1: float = 0.0
    ode_rtol: float = 1e-12
    ode_cap: float = 1e12
    # misc
    seed: int = 1234
    tol_rel: float = 1e-3

    def params(self) -> ModelParams:
        return ModelParams(self.n, self.a, self.theorem_mode)

    def frame(self) -> SimilarityFrame:
        return SimilarityFrame(self.x0, self.T0, self.params(), self.delta0)

    def grid(self) -> RadialGrid:
        return RadialGrid(
            self.n,
            npts=self.grid_n,
            node_exponent=self.node_exponent,
            quad_npts=self.quad_n,
            extrap_order=self.extrap_order,
        )

    def constants(self) -> FunctionalConstants:
        return FunctionalConstants(
            theta1=self.theta1,
            theta2=self.theta2,
            theta4=self.theta4,
            nu=self.nu,
            eta_list=tuple(self.eta_list),
        )

    def sim_config(self) -> SimilarityRunConfig:
        return SimilarityRunConfig(
            frame=self.frame(),
            grid=self.grid(),
            s0=self.s0,
            s1=self.s1,
            snapshot_ds=self.snapshot_ds,
            constants=self.constants(),
            cfl=self.cfl,
            blowup_cap=self.blowup_cap,
            s0_floor=self.s0_floor,
        )


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(raw: str, like):
    if isinstance(like, bool):
        low = raw.strip().lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ValueError(f"cannot parse boolean from {raw!r}")
    if isinstance(like, int) and not isinstance(like, bool):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    if isinstance(like, tuple):
        return tuple(float(x) for x in raw.split(",") if x.strip())
    return raw


def load_config(path: str | None = None, overrides=()) -> RunConfig:
    """Config from a flat key=value file plus repeatable --set overrides."""
    cfg = RunConfig()
    pairs = []
    if path:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = line.split("=", 1)
            pairs.append((key.strip(), val.strip()))
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        pairs.append((key.strip(), val.strip()))
    known = {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
    for key, val in pairs:
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        setattr(cfg, key, _coerce(val, known[key]))
    cfg.params()  # validate early
    return cfg


def manifest_for(cfg: RunConfig, extra: dict | None = None) -> dict:
    payload = dataclasses.asdict(cfg)
    payload["eta_list"] = list(cfg.eta_list)
    if extra:
        payload.update(extra)
    payload["code_version"] = __version__
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()[:16]
    payload["manifest_id"] = digest
    return payload


def _write_manifest(out: Path, manifest: dict) -> None:
    stamped = dict(manifest)
    stamped["created_unix"] = time.time()
    (out / "manifest.json").write_text(json.dumps(stamped, sort_keys=True, indent=1) + "\n")


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


def emit_records(path: Path, traj: TrajectoryRecord, manifest_id: str) -> None:
    """One self-describing JSON record per snapshot, full float precision."""
    with open(path, "w") as fh:
        header = {
            "record": "header",
            "manifest_id": manifest_id,
            "termination": traj.termination,
            "s_end": traj.s_end,
            "diss_cum": list(traj.diss_cum),
            "diss_weighted_cum": list(traj.diss_weighted_cum),
            "boundary_cum": list(traj.boundary_cum),
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for k, sn in enumerate(traj.snapshots):
            row = {
                "record": "snapshot",
                "s": sn.s,
                "converged": sn.converged,
                "values": {key: sn.values[key] for key in sorted(sn.values)},
            }
            if traj.states:
                row["w"] = list(traj.states[k].w)
                row["dw_ds"] = list(traj.states[k].dw_ds)
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def parse_records(path: Path) -> dict:
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            obj = json.loads(line)
            if obj.get("record") == "header":
                header = obj
            else:
                rows.append(obj)
    if header is None:
        raise ValueError(f"{path}: missing header record")
    return {"header": header, "snapshots": rows}


def _write_plot_series(out: Path, name: str, xs, ys) -> None:
    with open(out / f"{name}.dat", "w") as fh:
        fh.write(f"# {name}\n# s value\n")
        for x, y in zip(xs, ys):
            fh.write(f"{x!r} {y!r}\n")


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def _out_dir(args) -> Path:
    base = args.out or os.environ.get(ENV_OUT_DIR, "runs")
    out = Path(base)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _initial_state(cfg: RunConfig, sim_cfg: SimilarityRunConfig):
    params = cfg.params()
    if cfg.data == "constant":
        if cfg.ode_matched:
            w0, z0 = ode_matched_constant(params, cfg.s0)
            return initial_constant(sim_cfg.grid, sim_cfg.frame, cfg.s0, w0, z0)
        return initial_constant(sim_cfg.grid, sim_cfg.frame, cfg.s0, cfg.amp * kappa(params))
    if cfg.data == "kappa_bump":
        if cfg.ode_matched:
            w0, z0 = ode_matched_constant(params, cfg.s0)
            st = initial_kappa_bump(
                sim_cfg.grid, sim_cfg.frame, cfg.s0, cfg.amp, cfg.width, cfg.center,
                base=w0, dbase=z0,
            )
            if cfg.tune:
                st = tune_unstable_mode(sim_cfg, st)
            return st
        return initial_kappa_bump(
            sim_cfg.grid, sim_cfg.frame, cfg.s0, cfg.amp, cfg.width, cfg.center
        )
    if cfg.data == "sign_changing":
        return initial_sign_changing(sim_cfg.grid, sim_cfg.frame, cfg.s0, cfg.amp)
    raise ValueError(f"unknown data family {cfg.data!r}")


def cmd_ode(args) -> int:
    cfg = load_config(args.config, args.set or [])
    out = _out_dir(args)
    sweeps = _parse_sweep(args.sweep) if args.sweep else [{}]
    worst = 0
    for sw in sweeps:
        for k, v in sw.items():
            setattr(cfg, k, _coerce(v, getattr(cfg, k)))
        try:
            params = cfg.params()
        except ValueError as exc:
            print(f"config rejected: {exc}", file=sys.stderr)
            return 2
        tag = f"n{cfg.n}_a{cfg.a:g}"
        man = manifest_for(cfg, {"verb": "ode"})
        _write_manifest(out, man)
        traj = integrate_ode(
            cfg.v0, cfg.v1, params,
            OdeControls(rtol=cfg.ode_rtol, cap=cfg.ode_cap),
        )
        with open(out / f"ode_{tag}.dat", "w") as fh:
            fh.write("# t v dv\n")
            for t, v, dv in zip(traj.t, traj.v, traj.dv):
                fh.write(f"{t!r} {v!r} {dv!r}\n")
        if not traj.blew_up:
            print(f"[{tag}] no blow-up over the horizon")
            continue
        rr = rate_ratio(traj)
        _write_plot_series(out, f"rate_ratio_{tag}", rr[:, 0], rr[:, 1])
        dev_small = abs(rr[-1, 1] - 1.0)
        dev_large = abs(rr[np.argmin(np.abs(rr[:, 0] - 1e-4)), 1] - 1.0)
        tol = 0.01 if cfg.a == 0 else 0.1
        passed = dev_small <= tol and (cfg.a == 0 or dev_small < dev_large)
        print(
            f"[{tag}] T_est={traj.T_est!r} unc={traj.T_uncertainty:.2e} "
            f"|ratio-1|@1e-8={dev_small:.3e} @1e-4={dev_large:.3e} "
            f"{'PASS' if passed else 'FAIL'}"
        )
        if not passed:
            worst = 1
    return worst


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.set or [])
    out = _out_dir(args)
    sim_cfg = cfg.sim_config()
    man = manifest_for(cfg, {"verb": "simulate"})
    _write_manifest(out, man)
    state = _initial_state(cfg, sim_cfg)
    if cfg.theta1 <= 0:
        probe = dataclasses.replace(sim_cfg, s1=min(cfg.s1, cfg.s0 + 4.0))
        rec0 = run_similarity(probe, state)
        th1 = calibrate_theta1(rec0, tol_rel=cfg.tol_rel)
        cfg.theta1 = th1
        sim_cfg = cfg.sim_config()
        man = manifest_for(cfg, {"verb": "simulate", "theta1_calibrated": th1})
        _write_manifest(out, man)
    traj = run_similarity(sim_cfg, state)
    traj.manifest_id = man["manifest_id"]
    emit_records(out / "record.jsonl", traj, man["manifest_id"])
    sv = traj.s_values
    for key in ("E", "J", "G", "L", "E0", "h1l2", "boundary_trace_sq"):
        _write_plot_series(out, f"series_{key}", sv, traj.series(key))
    print(
        f"simulate: {len(traj.snapshots)} snapshots over s in [{cfg.s0}, {traj.s_end:.3f}], "
        f"termination={traj.termination}"
    )
    if traj.termination == "divergence-flag":
        return 1
    return 0


_SUITES = ("theorem1", "theorem2", "criterion", "identities", "hardy", "growth", "dissipation", "all")


def _rebuild_trajectory(cfg: RunConfig, rec_path: Path) -> TrajectoryRecord:
    """Re-run the manifest configuration (records store values, not states
    needed by every check; determinism makes the rerun exact)."""
    sim_cfg = cfg.sim_config()
    state = _initial_state(cfg, sim_cfg)
    return run_similarity(sim_cfg, state)


def cmd_verify(args) -> int:
    cfg = load_config(args.config, args.set or [])
    out = _out_dir(args)
    suite = args.suite
    if suite not in _SUITES:
        print(f"unknown suite {suite!r}; expected one of {_SUITES}", file=sys.stderr)
        return 2
    report: dict = {"suite": suite, "checks": {}}
    ok = True

    needs_traj = suite in ("theorem1", "theorem2", "growth", "dissipation", "all")
    traj = None
    if needs_traj:
        if args.records:
            parsed = parse_records(Path(args.records))
            cadence = np.diff([row["s"] for row in parsed["snapshots"]])
            if cadence.size and np.max(np.abs(cadence - cfg.snapshot_ds)) > 1e-9:
                print(
                    f"records cadence {cadence[0]:.4f} does not match required "
                    f"{cfg.snapshot_ds}",
                    file=sys.stderr,
                )
                return 2
        traj = _rebuild_trajectory(cfg, Path(args.records) if args.records else None)

    if suite in ("theorem1", "all"):
        rep = check_theorem1(traj, tol_rel=cfg.tol_rel)
        report["checks"]["theorem1"] = {
            "monotone": rep.monotone_ok,
            "positive": rep.positive_ok,
            "theta1": rep.theta1,
            "max_slack": float(np.max(rep.slack)),
        }
        ok &= rep.passed
    if suite in ("theorem2", "all"):
        rep = check_theorem2(traj)
        report["checks"]["theorem2"] = {
            "inf": rep.inf_norm,
            "sup": rep.sup_norm,
            "passed": rep.passed,
        }
        ok &= rep.passed
    if suite in ("criterion", "all"):
        sim_cfg = cfg.sim_config()
        crit_cfg = dataclasses.replace(sim_cfg, s1=cfg.s0 + min(8.0, cfg.s1 - cfg.s0))
        rep = check_blowup_criterion(crit_cfg, (0.5, 1.0, 2.5, 4.0))
        report["checks"]["criterion"] = {
            "verdicts": rep.verdicts,
            "blew_up": [bool(b) for b in rep.blew_up],
            "passed": rep.passed,
        }
        ok &= rep.passed
    if suite in ("identities", "all"):
        reports = identity_corpus(seed=cfg.seed)
        worst = max(max(r1.residual, r2.residual) for _, r1, r2 in reports)
        good = all(r1.passed and r2.passed for _, r1, r2 in reports)
        report["checks"]["identities"] = {"worst_residual": worst, "passed": good}
        ok &= good
    if suite in ("hardy", "all"):
        _, good = hardy_corpus(seed=cfg.seed)
        report["checks"]["hardy"] = {"passed": good}
        ok &= good
    if suite in ("growth", "all"):
        fit = growth_monitor(traj, "H1L2_avg", "const")
        report["checks"]["growth"] = {
            "model": fit.model,
            "constant": fit.fitted_constant,
            "residual_ratio": fit.residual_ratio,
            "passed": fit.passed,
        }
        ok &= fit.passed
    if suite in ("dissipation", "all"):
        fit = check_boundary_dissipation(traj)
        report["checks"]["dissipation"] = {
            "constant": fit.fitted_constant,
            "residual_ratio": fit.residual_ratio,
            "passed": fit.passed,
        }
        ok &= fit.passed

    report["passed"] = bool(ok)
    (out / f"verify_{suite}.json").write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    for name, chk in report["checks"].items():
        state = chk.get("passed", chk.get("monotone"))
        print(f"verify[{name}]: {'PASS' if state else 'FAIL'}")
    return 0 if ok else 1


def _parse_sweep(spec: str):
    key, _, vals = spec.partition("=")
    if not vals:
        raise ValueError(f"--sweep expects key=v1,v2,..., got {spec!r}")
    return [{key.strip(): v.strip()} for v in vals.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    """Run the simulate verb across a one-parameter sweep."""
    plans = _parse_sweep(args.sweep)
    worst = 0
    base_out = args.out or os.environ.get(ENV_OUT_DIR, "runs")
    for plan in plans:
        (key, val), = plan.items()
        sub = argparse.Namespace(
            config=args.config,
            set=(args.set or []) + [f"{key}={val}"],
            out=str(Path(base_out) / f"{key}_{val}"),
        )
        rc = cmd_simulate(sub)
        worst = max(worst, rc)
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logwave",
        description="numerical laboratory for log-perturbed conformal wave blow-up",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help=f"output directory (default $" + ENV_OUT_DIR + " or ./runs)")
        p.add_argument("--seed", type=int, help="override the run seed")

    p_ode = sub.add_parser("ode", help="blow-up ODE trajectory and rate check")
    common(p_ode)
    p_ode.add_argument("--sweep", help="key=v1,v2,... one-parameter sweep")
    p_ode.set_defaults(func=cmd_ode)

    p_sim = sub.add_parser("simulate", help="similarity-variables run")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="verification suites")
    common(p_ver)
    p_ver.add_argument("--suite", default="all", help=f"one of {_SUITES}")
    p_ver.add_argument("--records", help="record file produced by simulate")
    p_ver.set_defaults(func=cmd_verify)

    p_sw = sub.add_parser("sweep", help="parameter sweep of simulate")
    common(p_sw)
    p_sw.add_argument("--sweep", required=True, help="key=v1,v2,...")
    p_sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None:
        args.set = (args.set or []) + [f"seed={args.seed}"]
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
