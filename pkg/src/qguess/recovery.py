"""Coherent recovery circuits and fidelity-based secrecy quantities.

The recovery circuit runs two guessing measurements coherently (keeping
their outcome registers in superposition) followed by a phase
correction; its fidelity with the ideal copy-then-entangle target is the
operational payoff of being able to guess both conjugate observables.
The channel optimizations in this module return rigorous
[achieved, upper-bound] enclosures, mirroring the discrimination solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrimination import Povm
from .linalg import (
    Isometry,
    LabeledState,
    LabelError,
    Operator,
    SystemLabel,
    apply_operator,
    fidelity,
    herm,
    overlap,
    partial_trace,
    permute_systems,
    pinv_sqrt,
    psd_sqrt,
    purify,
    tensor,
)
from .qops import controlled_phase, measure_dephase, w_operator

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class RecoveryCircuit:
    """Coherent value-measurement, phase-measurement, and phase fix.

    ``composed`` maps the guessing-side labels to (register App, register
    Ap, original labels); it is built as phase * v_x * v_z.
    """

    v_z: Isometry
    v_x: Isometry
    phase: Operator
    composed: Isometry
    d: int


@dataclass(frozen=True, eq=False)
class ChannelChoi:
    """Choi operator of a channel, stored on (out, in) row-major order.

    Tracing out the output factor must leave the identity on the input
    factor (trace preservation); the residual of that check is kept.
    """

    choi: np.ndarray
    d_out: int
    d_in: int
    tp_residual: float = 0.0

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.choi, dtype=complex))
        if arr.shape != (self.d_out * self.d_in,) * 2:
            raise ValueError(f"Choi shape {arr.shape} does not match dims")
        low = float(np.linalg.eigvalsh(herm(arr)).min())
        if low < -1e-9:
            raise ValueError(f"Choi operator has eigenvalue {low:.3e}")
        tp = np.einsum("abad->bd", arr.reshape(self.d_out, self.d_in, self.d_out, self.d_in))
        res = float(np.abs(tp - np.eye(self.d_in)).max())
        if res > 1e-8:
            raise ValueError(f"trace-preservation residual {res:.3e}")
        arr.flags.writeable = False
        object.__setattr__(self, "choi", arr)
        object.__setattr__(self, "tp_residual", res)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Channel action E(rho)[i,i'] = sum_(j,j') rho[j,j'] choi[(i,j),(i',j')]."""
        arr = self.choi.reshape(self.d_out, self.d_in, self.d_out, self.d_in)
        return np.einsum("jl,ijql->iq", np.asarray(rho), arr)


@dataclass(frozen=True, eq=False)
class FidelityEnclosure:
    """Certified bracket [lo, hi] around a fidelity optimum."""

    lo: float
    hi: float
    iterations: int
    converged: bool
    channel: "ChannelChoi | None" = None

    @property
    def width(self) -> float:
        return self.hi - self.lo


def coherent_isometry(povm: Povm, register: SystemLabel) -> Isometry:
    """Run a POVM coherently: V = sum_m |m>^register (x) sqrt(Lambda_m)."""
    if register.dim != povm.n_outcomes:
        raise ValueError(
            f"register dimension {register.dim} != outcome count {povm.n_outcomes}"
        )
    for s in povm.systems:
        if s.name == register.name:
            raise LabelError(f"register label {register.name!r} collides with POVM labels")
    dim = povm.elements[0].shape[0]
    mat = np.zeros((register.dim * dim, dim), dtype=complex)
    for m, lam in enumerate(povm.elements):
        mat[m * dim:(m + 1) * dim, :] = psd_sqrt(lam)
    return Isometry(mat, tuple(povm.systems), (register,) + tuple(povm.systems))


def build_recovery(
    psi: LabeledState,
    lam: Povm,
    gamma: Povm,
    a: str = "A",
    ap: str = "Ap",
    app: str = "App",
) -> RecoveryCircuit:
    """Assemble the recovery circuit from two guessing POVMs.

    ``lam`` guesses the computational value from the non-``a`` labels of
    ``psi``; ``gamma`` guesses the Fourier value from (``ap`` + those
    labels) after the first coherent measurement.
    """
    d = psi.system(a).dim
    b_names = tuple(n for n in psi.names if n != a)
    if lam.names != b_names:
        raise LabelError(f"first POVM must act on {b_names}, got {lam.names}")
    if gamma.names != (ap,) + b_names:
        raise LabelError(f"second POVM must act on {(ap,) + b_names}, got {gamma.names}")
    v_z = coherent_isometry(lam, SystemLabel(ap, d))
    v_x = coherent_isometry(gamma, SystemLabel(app, d))
    phase = controlled_phase(d, app, ap)
    d_b = 1
    for s in lam.systems:
        d_b *= s.dim
    composed = Isometry(
        np.kron(phase.data, np.eye(d_b)) @ v_x.data @ v_z.data,
        v_z.in_systems,
        v_x.out_systems,
    )
    return RecoveryCircuit(v_z=v_z, v_x=v_x, phase=phase, composed=composed, d=d)


def circuit_fidelity(psi: LabeledState, circuit: RecoveryCircuit, a: str = "A") -> float:
    """Overlap between the circuit output and the ideal copy target.

    Mixed inputs are purified first; the purifier rides along untouched
    on both sides.
    """
    if psi.kind != "pure":
        psi = purify(psi, "_purifier")
    d = psi.system(a).dim
    ap = circuit.composed.out_systems[1].name
    app = circuit.composed.out_systems[0].name
    ideal = apply_operator(w_operator(d, a, ap, app), psi)
    actual = apply_operator(circuit.composed, psi)
    return float(min(1.0, abs(overlap(ideal, actual))))


def _trace_out_first(mat: np.ndarray, d_first: int, d_rest: int) -> np.ndarray:
    return np.einsum("abad->bd", mat.reshape(d_first, d_rest, d_first, d_rest))


def max_recovery_fidelity(
    psi: LabeledState,
    a: str = "A",
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FidelityEnclosure:
    """Best fidelity with a maximally entangled pair after any recovery map.

    The squared objective is linear in the Choi operator of the recovery
    channel, so a fixed-point ascent (warm-started at the transpose-style
    channel) plus a feasible dual operator brackets the optimum:
    F^2 = max { tr[J conj(rho)]/d : J >= 0, tr_out J = 1 }.
    """
    rho_state = psi.as_density()
    rest = [n for n in rho_state.names if n != a]
    rho_state = permute_systems(rho_state, [a] + rest)
    d = rho_state.system(a).dim
    d_b = rho_state.total_dim // d
    rho_bar = rho_state.data.conj()
    m_op = rho_bar / d
    eye_d = np.eye(d)
    eye_b = np.eye(d_b)

    # transpose-channel warm start: exact on the product and entangled anchors
    s0, proj0 = pinv_sqrt(_trace_out_first(rho_bar, d, d_b))
    big_s0 = np.kron(eye_d, s0)
    j = herm(big_s0 @ rho_bar @ big_s0) + np.kron(eye_d / d, eye_b - proj0)

    best_p = 0.0
    best_j = j
    best_dual = 1.0
    iterations = 0
    converged = False
    for it in range(max_iter + 1):
        iterations = it
        p = float(np.trace(m_op @ j).real)
        if p > best_p:
            best_p = p
            best_j = j
        y0 = herm(_trace_out_first(m_op @ j, d, d_b))
        eps = float(np.linalg.eigvalsh(herm(m_op - np.kron(eye_d, y0))).max())
        dual = float(y0.trace().real) + max(eps, 0.0) * d_b
        if dual < best_dual:
            best_dual = dual
        f_lo = np.sqrt(max(best_p, 0.0))
        f_hi = np.sqrt(min(max(best_dual, best_p), 1.0))
        if f_hi - f_lo <= tol:
            converged = True
            break
        if it == max_iter:
            break
        mid = m_op @ j @ m_op
        r = herm(_trace_out_first(mid, d, d_b))
        s, proj = pinv_sqrt(r)
        big_s = np.kron(eye_d, s)
        j = herm(big_s @ mid @ big_s) + np.kron(eye_d / d, eye_b - proj)
    return FidelityEnclosure(
        lo=float(np.sqrt(max(best_p, 0.0))),
        hi=float(np.sqrt(min(max(best_dual, best_p), 1.0))),
        iterations=iterations,
        converged=converged,
        channel=ChannelChoi(best_j, d_out=d, d_in=d_b),
    )


def q_fidelity(psi: LabeledState, measured: str, basis: str, versus) -> float:
    """Fidelity between the basis-measured state and uniform (x) reduction.

    Computes F(rho_meas^{M,versus}, 1/d (x) rho^{versus}) where rho_meas
    pinches ``measured`` in the chosen basis.  High values mean the
    measured outcome looks uniform and uncorrelated to ``versus``.
    """
    versus = list(versus)
    d = psi.system(measured).dim
    pinched = measure_dephase(psi, measured, basis)
    lhs = partial_trace(pinched, [measured] + versus)
    red = partial_trace(psi, versus)
    pi = LabeledState.density(np.eye(d) / d, (psi.system(measured),))
    return fidelity(lhs, tensor(pi, red))


def max_sigma_fidelity(
    psi: LabeledState,
    measured: str,
    basis: str,
    env: str,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FidelityEnclosure:
    """Best fidelity of the measured state with uniform (x) anything.

    Maximizes F(rho_meas^{M,env}, 1/d (x) sigma) over density operators
    sigma on ``env``.  A purification duality identifies this maximum
    with the entanglement recovery fidelity of the purifying system, so
    the certified Choi-operator ascent evaluates it with a rigorous
    enclosure instead of a bare local search.
    """
    pinched = measure_dephase(psi, measured, basis)
    rho_state = partial_trace(pinched, [measured, env])
    purifier = "R"
    while purifier in rho_state.names:
        purifier += "R"
    purified = purify(rho_state, purifier)
    reduced = partial_trace(purified, [measured, purifier])
    enc = max_recovery_fidelity(reduced, a=measured, tol=tol, max_iter=max_iter)
    return FidelityEnclosure(
        lo=enc.lo, hi=enc.hi, iterations=enc.iterations, converged=enc.converged
    )
