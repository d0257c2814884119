"""Minimum-error discrimination of subnormalized state ensembles.

The central quantity is the optimal probability of guessing which member
of an ensemble occurred, optimized over POVMs.  Two-member ensembles are
solved exactly in closed form; larger ones run a fixed-point iteration
on the optimality conditions, warm-started at the pretty good
measurement.  Every run is certified by an explicit feasible dual
operator, so results come as rigorous [achieved, upper-bound]
enclosures rather than bare floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    LabeledState,
    LabelError,
    SystemLabel,
    herm,
    permute_systems,
    pinv_sqrt,
    reduce_matrix,
)
from .qops import basis_kets, fourier_basis

POVM_PSD_TOL = -1e-10
POVM_SUM_TOL = 1e-9
ENSEMBLE_TRACE_TOL = 1e-10
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite positive operator-valued measure on labeled subsystems."""

    elements: tuple[np.ndarray, ...]
    systems: tuple[SystemLabel, ...]

    def __post_init__(self) -> None:
        elems = tuple(np.ascontiguousarray(np.asarray(e, dtype=complex)) for e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        dim = 1
        for s in self.systems:
            dim *= s.dim
        total = np.zeros((dim, dim), dtype=complex)
        for e in elems:
            if e.shape != (dim, dim):
                raise LabelError(f"element shape {e.shape} != ({dim},{dim})")
            low = float(np.linalg.eigvalsh(herm(e)).min())
            if low < POVM_PSD_TOL * max(1.0, float(np.abs(e).max())):
                raise ValueError(f"POVM element has eigenvalue {low:.3e}")
            total += e
        dev = float(np.abs(total - np.eye(dim)).max())
        if dev > POVM_SUM_TOL:
            raise ValueError(f"POVM elements sum deviates from identity by {dev:.3e}")
        for e in elems:
            e.flags.writeable = False
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "systems", tuple(self.systems))

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.systems)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Subnormalized density operators whose traces are the priors."""

    states: tuple[np.ndarray, ...]
    systems: tuple[SystemLabel, ...]

    def __post_init__(self) -> None:
        mats = tuple(np.ascontiguousarray(herm(np.asarray(m, dtype=complex))) for m in self.states)
        if not mats:
            raise ValueError("ensemble needs at least one member")
        dim = 1
        for s in self.systems:
            dim *= s.dim
        total = 0.0
        for m in mats:
            if m.shape != (dim, dim):
                raise LabelError(f"member shape {m.shape} != ({dim},{dim})")
            low = float(np.linalg.eigvalsh(m).min())
            if low < POVM_PSD_TOL * max(1.0, float(np.abs(m).max()), 1.0):
                raise ValueError(f"ensemble member has eigenvalue {low:.3e}")
            total += float(m.trace().real)
        if abs(total - 1.0) > ENSEMBLE_TRACE_TOL:
            raise ValueError(f"ensemble traces sum to {total}, expected 1")
        for m in mats:
            m.flags.writeable = False
        object.__setattr__(self, "states", mats)
        object.__setattr__(self, "systems", tuple(self.systems))

    @property
    def dim(self) -> int:
        out = 1
        for s in self.systems:
            out *= s.dim
        return out


@dataclass(frozen=True, eq=False)
class GuessCertificate:
    """Primal/dual enclosure of an optimal guessing probability.

    ``p_primal`` is achieved by ``povm``; ``dual_op`` is feasible for the
    dual program, so the true optimum lies in [p_primal, p_dual].
    ``p_dual`` is min(tr dual_op, 1); the trivial bound 1 needs no
    certificate operator.
    """

    p_primal: float
    p_dual: float
    povm: Povm
    dual_op: np.ndarray
    iterations: int
    converged: bool

    @property
    def gap(self) -> float:
        return self.p_dual - self.p_primal


class ConvergenceError(RuntimeError):
    """Solver ran out of iterations; carries the best enclosure found."""

    def __init__(self, message: str, certificate: GuessCertificate):
        super().__init__(message)
        self.certificate = certificate


def povm_value(ensemble: Ensemble, povm: Povm) -> float:
    """Success probability of answering with the POVM outcome index."""
    if len(povm.elements) != len(ensemble.states):
        raise ValueError("outcome count does not match ensemble size")
    val = sum(np.trace(l @ r).real for l, r in zip(povm.elements, ensemble.states))
    return float(val)


def _absorb_negatives(elems, n: int, eye: np.ndarray) -> list[np.ndarray]:
    """Mix with the identity just enough to absorb roundoff negatives.

    Conjugating by an ill-conditioned inverse square root can leave
    eigenvalues around -1e-9 on mathematically PSD elements.  The mix
    (E + c 1)/(1 + n c) keeps the sum exactly at the identity, restores
    positivity, and moves any strategy value by O(c) only.
    """
    low = min(float(np.linalg.eigvalsh(herm(e)).min()) for e in elems)
    if low >= 0.0:
        return [herm(e) for e in elems]
    c = -low
    scale = 1.0 / (1.0 + n * c)
    return [scale * (herm(e) + c * eye) for e in elems]


def pretty_good_measurement(ensemble: Ensemble) -> Povm:
    """Lambda_m = rho^(-1/2) rho_m rho^(-1/2), completed on the kernel."""
    total = sum(ensemble.states)
    s, proj = pinv_sqrt(total)
    dim = ensemble.dim
    kernel = np.eye(dim) - proj
    n = len(ensemble.states)
    elems = [herm(s @ m @ s + kernel / n) for m in ensemble.states]
    return Povm(tuple(_absorb_negatives(elems, n, np.eye(dim))), ensemble.systems)


def _dual_shift(rhos, y0: np.ndarray) -> float:
    eps = 0.0
    for r in rhos:
        top = float(np.linalg.eigvalsh(herm(r - y0)).max())
        eps = max(eps, top)
    return eps


def _binary_certificate(ensemble: Ensemble) -> GuessCertificate:
    """Exact two-member optimum from the weighted difference operator.

    Measuring the sign eigenspaces of delta = rho_0 - rho_1 achieves
    (tr rho_0 + tr rho_1 + ||delta||_1)/2, and Y = (rho_0 + rho_1 +
    |delta|)/2 dominates both members, so primal and dual meet up to
    roundoff.  The fixed-point iteration can stall on near-degenerate
    pairs; this construction cannot.
    """
    r0, r1 = (np.asarray(m) for m in ensemble.states)
    dim = ensemble.dim
    vals, vecs = np.linalg.eigh(herm(r0 - r1))
    pos = vecs[:, vals > 0.0]
    neg = vecs[:, vals < 0.0]
    p_plus = herm(pos @ pos.conj().T)
    p_minus = herm(neg @ neg.conj().T)
    kernel = np.eye(dim) - p_plus - p_minus
    povm = Povm((herm(p_plus + kernel / 2), herm(p_minus + kernel / 2)), ensemble.systems)
    p_primal = float(min(povm_value(ensemble, povm), 1.0))
    if p_primal < 0.5:
        # uniform answering achieves exactly 1/2 on any ensemble
        povm = Povm((np.eye(dim) / 2, np.eye(dim) / 2), ensemble.systems)
        p_primal = 0.5
    abs_delta = (vecs * np.abs(vals)) @ vecs.conj().T
    y = herm(r0 + r1 + abs_delta) / 2
    p_dual = float(min(max(float(y.trace().real), p_primal), 1.0))
    return GuessCertificate(
        p_primal=p_primal,
        p_dual=p_dual,
        povm=povm,
        dual_op=y,
        iterations=0,
        converged=True,
    )


def solve_ensemble(
    ensemble: Ensemble,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> GuessCertificate:
    """Optimal guessing probability with a certified enclosure.

    Two-member ensembles are solved exactly in closed form.  Otherwise:
    fixed-point update Lambda_m <- S rho_m Lambda_m rho_m S with
    S = (sum_m rho_m Lambda_m rho_m)^(-1/2), kernel mass spread evenly.
    Each sweep also produces a feasible dual operator
    Y = herm(sum_m Lambda_m rho_m) + eps 1, giving the upper bound.
    Raises ConvergenceError (carrying the best enclosure) if the gap is
    still above ``tol`` after ``max_iter`` sweeps.
    """
    rhos = list(ensemble.states)
    n = len(rhos)
    if n == 2:
        return _binary_certificate(ensemble)
    dim = ensemble.dim
    eye = np.eye(dim)

    lams = [np.asarray(e) for e in pretty_good_measurement(ensemble).elements]
    best_p = sum(np.trace(l @ r).real for l, r in zip(lams, rhos))
    best_elems = [l.copy() for l in lams]
    best_dual = 1.0
    best_y = eye.copy()
    iterations = 0
    converged = False

    for it in range(max_iter + 1):
        iterations = it
        y0 = herm(sum(l @ r for l, r in zip(lams, rhos)))
        eps = _dual_shift(rhos, y0)
        dual = float(y0.trace().real) + eps * dim
        if dual < best_dual:
            best_dual = dual
            best_y = y0 + eps * eye
        if min(best_dual, 1.0) - best_p <= tol:
            converged = True
            break
        if it == max_iter:
            break
        mids = [r @ l @ r for r, l in zip(rhos, lams)]
        s, _ = pinv_sqrt(herm(sum(mids)))
        lams = [herm(s @ m @ s) for m in mids]
        kernel = eye - sum(lams)
        lams = _absorb_negatives([l + kernel / n for l in lams], n, eye)
        p = sum(np.trace(l @ r).real for l, r in zip(lams, rhos))
        if p > best_p:
            best_p = p
            best_elems = [l.copy() for l in lams]

    p_primal = float(min(best_p, 1.0))
    best_povm = Povm(tuple(best_elems), ensemble.systems)
    if p_primal < 1.0 / n:
        # uniform answering achieves exactly 1/n on any ensemble
        best_povm = Povm(tuple(eye / n for _ in range(n)), ensemble.systems)
        p_primal = 1.0 / n
    p_dual = float(min(max(best_dual, p_primal), 1.0))
    cert = GuessCertificate(
        p_primal=p_primal,
        p_dual=p_dual,
        povm=best_povm,
        dual_op=best_y,
        iterations=iterations,
        converged=converged,
    )
    if not converged:
        raise ConvergenceError(
            f"gap {cert.gap:.3e} above tol {tol:.1e} after {iterations} sweeps", cert
        )
    return cert


def conditional_ensemble(
    psi: LabeledState,
    measured: str,
    basis: str,
    guess_from,
) -> Ensemble:
    """Ensemble of reduced states conditioned on a basis measurement.

    Member m is the (subnormalized) state of ``guess_from`` given outcome
    m of the chosen basis measurement on ``measured``; traces carry the
    outcome probabilities.
    """
    guess_from = list(guess_from)
    d = psi.system(measured).dim
    kets = basis_kets(d, basis)
    rest = [n for n in psi.names if n != measured]
    for g in guess_from:
        if g not in rest:
            raise LabelError(f"guess label {g!r} not among {rest}")
    s = permute_systems(psi, [measured] + rest)
    dr = psi.total_dim // d
    keep_systems = tuple(psi.system(g) for g in guess_from)
    members = []
    for m in range(d):
        ket = kets[:, m]
        if s.kind == "pure":
            vec = ket.conj() @ s.data.reshape(d, dr)
            cond = np.outer(vec, vec.conj())
        else:
            arr = s.data.reshape(d, dr, d, dr)
            cond = np.einsum("a,abcd,c->bd", ket.conj(), arr, ket)
        if rest == guess_from:
            red = cond
        else:
            red = reduce_matrix(cond, tuple(psi.system(n) for n in rest), guess_from)
        members.append(red)
    return Ensemble(tuple(members), keep_systems)


def guess_prob(
    psi: LabeledState,
    measured: str,
    basis: str,
    guess_from,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> GuessCertificate:
    """Optimal probability of guessing a basis measurement outcome."""
    return solve_ensemble(conditional_ensemble(psi, measured, basis, guess_from), tol, max_iter)


def strategy_value(psi: LabeledState, measured: str, basis: str, povm: Povm) -> float:
    """Success probability of answering with the given POVM's outcome."""
    ensemble = conditional_ensemble(psi, measured, basis, povm.names)
    return povm_value(ensemble, povm)


def helstrom(rho0: np.ndarray, rho1: np.ndarray) -> float:
    """Two-member optimum in closed form: (tr rho0 + tr rho1 + ||rho0 - rho1||_1)/2."""
    diff = herm(np.asarray(rho0, dtype=complex) - np.asarray(rho1, dtype=complex))
    t = float(np.trace(rho0).real + np.trace(rho1).real)
    return 0.5 * t + 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def shift_difference_measurement(gamma: Povm, d: int, ap: str = "Ap") -> Povm:
    """Covariant extension of a d-outcome POVM by a Fourier register.

    Xi_x = sum_{x'} P~_{x'-x} (x) Gamma_{x'}, where P~ are Fourier-basis
    projectors on the fresh ``ap`` register.  The family is covariant
    under phase shifts on ``ap`` and remains a valid POVM.
    """
    if gamma.n_outcomes != d:
        raise ValueError(f"need a {d}-outcome POVM, got {gamma.n_outcomes}")
    f = fourier_basis(d)
    projs = [np.outer(f[:, y], f[:, y].conj()) for y in range(d)]
    elems = []
    for x in range(d):
        acc = 0.0
        for xp in range(d):
            acc = acc + np.kron(projs[(xp - x) % d], gamma.elements[xp])
        elems.append(acc)
    systems = (SystemLabel(ap, d),) + tuple(gamma.systems)
    return Povm(tuple(elems), systems)
