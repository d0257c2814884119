"""Command-line front end: verification sweeps, region data, demos.

``verify`` draws seeded random states, runs every applicable relation
checker, and writes one JSON report line per (state, relation) plus a
companion slack figure.  ``region`` emits the theta-family trade-off
curve as CSV plus a companion figure.  ``demo`` prints a human-readable
walkthrough of the recovery circuit on one named state.

Determinism contract: identical configuration and seed give
byte-identical outputs.  Each state index derives its own RNG stream,
so the report set is independent of thread scheduling; lines are sorted
by state index, then relation id (lexicographic).  The environment
variable QGUESS_THREADS caps worker threads.

Exit status: 0 all pass, 1 at least one FAIL, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import LabeledState, SystemLabel, apply_operator, overlap, purify, random_pure, tensor
from .qops import ThetaFamily, ghz, max_entangled, psi_z, theta_state, u_x
from .recovery import build_recovery, circuit_fidelity, max_recovery_fidelity, q_fidelity
from .relations import (
    RelationReport,
    Verdict,
    _certified_guess,
    bipartite_reports,
    check_qubit_circle,
    clamped_acos,
    duality_point,
    tripartite_reports,
)
from .plots import render_region_figure, render_verify_figure

DEMO_STATES = ("phi", "ghz", "theta", "random")


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared by the three subcommands."""

    command: str
    d: int = 2
    dim_b: int = 2
    count: int = 20
    seed: int = 0
    tol: float = 1e-6
    output_path: str | None = None
    format: str = "json"
    solver_tol: float = 1e-7
    grid: int = 257
    state: str = "phi"
    theta: float = math.pi / 4

    def __post_init__(self):
        if self.command not in ("verify", "region", "demo"):
            raise ValueError(f"unknown command {self.command!r}")
        if self.d < 2:
            raise ValueError("--d must be at least 2")
        if self.dim_b < 1:
            raise ValueError("--dim-b must be at least 1")
        if self.count < 1:
            raise ValueError("--count must be at least 1")
        if self.seed < 0:
            raise ValueError("--seed must be nonnegative")
        if not (self.tol > 0.0 and self.solver_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.grid < 2:
            raise ValueError("--grid must be at least 2")
        if self.state not in DEMO_STATES:
            raise ValueError(f"unknown state {self.state!r}")


def _figure_path(path: str) -> str:
    return os.path.splitext(path)[0] + ".png"


def _worker_count(count: int) -> int:
    workers = min(count, os.cpu_count() or 1)
    cap = os.environ.get("QGUESS_THREADS")
    if cap is not None:
        try:
            cap_n = int(cap)
        except ValueError as err:
            raise ValueError(f"QGUESS_THREADS must be an integer, got {cap!r}") from err
        if cap_n < 1:
            raise ValueError("QGUESS_THREADS must be at least 1")
        workers = min(workers, cap_n)
    return max(1, workers)


def _state_seed(seed: int, index: int) -> int:
    # disjoint per-state streams; collision-free affine spacing
    return seed * 1_000_003 + index


def run_verify(cfg: RunConfig) -> int:
    """Seeded sweep of every checker; JSONL report plus slack figure."""
    indexed: list[tuple[int, RelationReport]] = []
    if cfg.d == 2:
        # grid identity is global, not per state; index -1 sorts first
        indexed.append((-1, check_qubit_circle(seed=cfg.seed)))

    def work(index: int) -> list[tuple[int, RelationReport]]:
        state_seed = _state_seed(cfg.seed, index)
        rng = np.random.default_rng(state_seed)
        systems = (SystemLabel("A", cfg.d), SystemLabel("B", cfg.dim_b))
        bip = random_pure(systems, seed=rng)
        tri = random_pure(systems + (SystemLabel("E", cfg.dim_b),), seed=rng)
        out = bipartite_reports(bip, cfg.tol, solver_tol=cfg.solver_tol, seed=state_seed)
        out += tripartite_reports(tri, cfg.tol, solver_tol=cfg.solver_tol, seed=state_seed)
        return [(index, rep) for rep in out]

    workers = _worker_count(cfg.count)
    if workers == 1:
        for index in range(cfg.count):
            indexed.extend(work(index))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(work, range(cfg.count)):
                indexed.extend(chunk)
    indexed.sort(key=lambda item: (item[0], item[1].relation_id.value))

    path = cfg.output_path or "qguess-verify.jsonl"
    with open(path, "w", newline="\n") as handle:
        for _, report in indexed:
            handle.write(json.dumps(report.to_json(), separators=(",", ":")) + "\n")
    render_verify_figure(indexed, cfg.tol, _figure_path(path))

    n_fail = sum(1 for _, r in indexed if r.status is Verdict.FAIL)
    n_warn = sum(1 for _, r in indexed if r.status is Verdict.INCONCLUSIVE)
    n_pass = len(indexed) - n_fail - n_warn
    print(f"[verify] states={cfg.count} reports={len(indexed)} "
          f"pass={n_pass} fail={n_fail} warnings={n_warn}")
    print(f"[verify] wrote {path} and {_figure_path(path)}")
    return 1 if n_fail else 0


def run_region(cfg: RunConfig) -> int:
    """Theta-family trade-off curve with the two-sided caps, as CSV."""
    thetas = np.linspace(0.0, math.pi / 2.0, cfg.grid)
    inv_d = 1.0 / cfg.d
    rows = []
    for theta in thetas:
        p_z, p_x = ThetaFamily(cfg.d, float(theta)).guessing_probabilities()
        rows.append((float(theta), p_z, p_x,
                     1.0 - (p_x - inv_d) ** 2, 1.0 - (p_z - inv_d) ** 2))

    path = cfg.output_path or "qguess-region.csv"
    with open(path, "w", newline="\n") as handle:
        handle.write("theta,p_z,p_x,thm3_pz_cap,thm3_px_cap\n")
        for row in rows:
            handle.write(",".join(f"{value:.12g}" for value in row) + "\n")
    render_region_figure(rows, cfg.d, _figure_path(path))
    print(f"[region] d={cfg.d} rows={cfg.grid} wrote {path} and {_figure_path(path)}")
    return 0


def _demo_state(cfg: RunConfig) -> LabeledState:
    if cfg.state == "phi":
        return max_entangled(cfg.d)
    if cfg.state == "ghz":
        return ghz(cfg.d)
    if cfg.state == "theta":
        lone = theta_state(cfg.d, cfg.theta)
        blank = LabeledState.pure(np.ones(1), (SystemLabel("B", 1),))
        return tensor(lone, blank)
    rng = np.random.default_rng(cfg.seed)
    return random_pure((SystemLabel("A", cfg.d), SystemLabel("B", cfg.dim_b)), seed=rng)


def run_demo(cfg: RunConfig) -> int:
    """Walk one state through the certificates and the recovery circuit."""
    psi = _demo_state(cfg)
    others = [name for name in psi.names if name != "A"]
    print(f"[demo] state={cfg.state} d={cfg.d} partners={','.join(others)}")

    p_z = _certified_guess(psi, "A", "Z", others, cfg.solver_tol)
    copied = psi_z(psi)
    p_xp = _certified_guess(copied, "A", "X", ["Ap", *others], cfg.solver_tol)
    print(f"  P(Z^A|partners) primal={p_z.p_primal:.6f} dual={p_z.p_dual:.6f} gap={p_z.gap:.1e}")
    print(f"  P(X^A|Ap,partners) on the value-copied state "
          f"primal={p_xp.p_primal:.6f} dual={p_xp.p_dual:.6f} gap={p_xp.gap:.1e}")

    circuit = build_recovery(psi, p_z.povm, p_xp.povm)
    value_step = apply_operator(circuit.v_z, psi)
    f_value = abs(overlap(copied, value_step))
    shifted = apply_operator(u_x(cfg.d, "A", "App"), copied)
    f_phase = abs(overlap(shifted, apply_operator(circuit.v_x, copied)))
    circ = circuit_fidelity(psi, circuit)
    bound = math.cos(clamped_acos(p_z.p_primal) + clamped_acos(p_xp.p_primal))
    enc = max_recovery_fidelity(psi, tol=cfg.solver_tol)
    print(f"  coherent value-measurement factor fidelity  {f_value:.6f}")
    print(f"  coherent phase-measurement factor fidelity  {f_phase:.6f}")
    print(f"  circuit fidelity {circ:.6f} vs constructive bound {bound:.6f}")
    print(f"  best recovery fidelity enclosure [{enc.lo:.6f}, {enc.hi:.6f}]")

    env = "E_"
    while env in psi.names:
        env += "_"
    extended = purify(psi, env)
    q_z = q_fidelity(extended, "A", "Z", [env])
    copied_ext = psi_z(extended)
    q_x = q_fidelity(copied_ext, "A", "X", ["Ap", env])
    print(f"  Q(Z^A|purifier) {q_z:.6f}  Q(X^A|Ap,purifier) {q_x:.6f}")

    if cfg.state == "ghz":
        point = duality_point(psi, solver_tol=cfg.solver_tol)
        print(f"  duality point distinguishability={point.distinguishability:.6f} "
              f"fourier_visibility={point.fourier_visibility:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qguess",
        description="Certified checks of conjugate-observable guessing games "
                    "and the entanglement recovery they imply.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--d", type=int, default=2,
                        help="dimension of the measured system (default 2)")
    shared.add_argument("--seed", type=int, default=0,
                        help="base seed for all randomness (default 0)")
    shared.add_argument("--tol", type=float, default=1e-6,
                        help="relation slack tolerance (default 1e-6)")
    shared.add_argument("--solver-tol", type=float, default=1e-7, dest="solver_tol",
                        help="solver enclosure tolerance (default 1e-7)")
    shared.add_argument("--output", "-o", dest="output_path", default=None,
                        help="output file path (default per command)")

    verify = sub.add_parser("verify", parents=[shared],
                            help="run every relation checker on seeded random states")
    verify.add_argument("--dim-b", type=int, default=2, dest="dim_b",
                        help="dimension of each partner system (default 2)")
    verify.add_argument("--count", type=int, default=20,
                        help="number of random states (default 20)")
    verify.add_argument("--format", choices=("csv", "json"), default="json",
                        help="verify reports are JSON lines")

    region = sub.add_parser("region", parents=[shared],
                            help="emit the theta-family trade-off curve")
    region.add_argument("--grid", type=int, default=257,
                        help="number of theta grid points (default 257)")
    region.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="region data is CSV")

    demo = sub.add_parser("demo", parents=[shared],
                          help="walk one state through the recovery circuit")
    demo.add_argument("--state", choices=DEMO_STATES, default="phi",
                      help="which state to demonstrate (default phi)")
    demo.add_argument("--theta", type=float, default=math.pi / 4,
                      help="angle for --state theta (default pi/4)")
    demo.add_argument("--dim-b", type=int, default=2, dest="dim_b",
                      help="partner dimension for --state random (default 2)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {
        "command": args.command,
        "d": args.d,
        "seed": args.seed,
        "tol": args.tol,
        "solver_tol": args.solver_tol,
        "output_path": args.output_path,
    }
    for name in ("dim_b", "count", "format", "grid", "state", "theta"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    try:
        cfg = RunConfig(**fields)
        if cfg.command == "verify" and cfg.format != "json":
            raise ValueError("verify writes JSON lines; --format csv is not supported")
        if cfg.command == "region" and cfg.format != "csv":
            raise ValueError("region writes CSV; --format json is not supported")
        _worker_count(1)  # surface a malformed QGUESS_THREADS as a usage error
    except ValueError as err:
        parser.error(str(err))
    try:
        if cfg.command == "verify":
            return run_verify(cfg)
        if cfg.command == "region":
            return run_region(cfg)
        return run_demo(cfg)
    except OSError as err:
        print(f"qguess: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
