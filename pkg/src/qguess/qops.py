"""Shift/phase operator pairs, copy isometries, and structured test states.

Everything here is dimension-generic: the computational basis plays the
role of the "which value" observable and its discrete Fourier transform
plays the complementary "which phase" observable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    Isometry,
    LabeledState,
    LabelError,
    Operator,
    SystemLabel,
    apply_operator,
    permute_systems,
    tensor,
)


def omega(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


def fourier_basis(d: int) -> np.ndarray:
    """Columns are the Fourier kets, F[z, x] = omega^(xz) / sqrt(d)."""
    z = np.arange(d)
    return np.exp(2j * np.pi * np.outer(z, z) / d) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """The two mutually unbiased reference bases in dimension d."""

    d: int
    z_basis: np.ndarray
    x_basis: np.ndarray
    omega: complex


def conjugate_pair(d: int) -> ConjugatePair:
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return ConjugatePair(d, np.eye(d, dtype=complex), fourier_basis(d), omega(d))


def basis_kets(d: int, basis: str) -> np.ndarray:
    """Columns of the requested measurement basis ('Z' or 'X')."""
    pair = conjugate_pair(d)
    if basis == "Z":
        return pair.z_basis
    if basis == "X":
        return pair.x_basis
    raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")


def pauli_z(d: int, label: str = "A") -> Operator:
    """Phase operator: diag(1, w, w^2, ...)."""
    sys = (SystemLabel(label, d),)
    return Operator(np.diag(omega(d) ** np.arange(d)), sys, sys)


def pauli_x(d: int, label: str = "A") -> Operator:
    """Cyclic shift operator: |z+1 mod d><z|."""
    sys = (SystemLabel(label, d),)
    mat = np.zeros((d, d), dtype=complex)
    mat[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    return Operator(mat, sys, sys)


def u_z(d: int, a: str = "A", ap: str = "Ap") -> Isometry:
    """Basis-copy isometry: |z>^a -> |z>^a |z>^ap."""
    mat = np.zeros((d * d, d), dtype=complex)
    for z in range(d):
        mat[z * d + z, z] = 1.0
    return Isometry(mat, (SystemLabel(a, d),), (SystemLabel(a, d), SystemLabel(ap, d)))


def u_x(d: int, a: str = "A", app: str = "App") -> Isometry:
    """Fourier-basis-copy isometry: |x~>^a -> |x~>^a |x>^app."""
    f = fourier_basis(d)
    mat = np.zeros((d * d, d), dtype=complex)
    for x in range(d):
        ket = f[:, x]
        for az in range(d):
            # row index over (a, app) with app varying fastest
            mat[az * d + x, :] += ket[az] * ket.conj()
    return Isometry(mat, (SystemLabel(a, d),), (SystemLabel(a, d), SystemLabel(app, d)))


def controlled_phase(d: int, app: str = "App", ap: str = "Ap") -> Operator:
    """Phase correction |x><x| (x) Z^x, controlled on the first label."""
    z = pauli_z(d).data
    blocks = np.zeros((d * d, d * d), dtype=complex)
    zx = np.eye(d, dtype=complex)
    for x in range(d):
        blocks[x * d:(x + 1) * d, x * d:(x + 1) * d] = zx
        zx = zx @ z
    sys = (SystemLabel(app, d), SystemLabel(ap, d))
    return Operator(blocks, sys, sys)


def w_operator(d: int, a: str = "A", ap: str = "Ap", app: str = "App") -> Isometry:
    """Both copies plus phase correction, fused into one isometry.

    Acting on any ket of ``a`` it emits a maximally entangled pair on
    (app, a) while the input moves unchanged into ``ap``:
    W|psi> = d^(-1/2) sum_x |x>^app |x~>^a (x) |psi>^ap.
    """
    f = fourier_basis(d)
    mat = np.zeros((d ** 3, d), dtype=complex)
    for z in range(d):
        for x in range(d):
            for az in range(d):
                # rows ordered (app, a, ap), ap varying fastest
                mat[(x * d + az) * d + z, z] = f[az, x] / np.sqrt(d)
    labels = (SystemLabel(app, d), SystemLabel(a, d), SystemLabel(ap, d))
    return Isometry(mat, (SystemLabel(a, d),), labels)


def psi_z(state: LabeledState, a: str = "A", ap: str = "Ap") -> LabeledState:
    """Copy the computational value of label ``a`` into a fresh register."""
    d = state.system(a).dim
    return apply_operator(u_z(d, a, ap), state)


def measure_dephase(state: LabeledState, label: str, basis: str) -> LabeledState:
    """Pinch the named subsystem in the chosen basis (classical outcome kept)."""
    d = state.system(label).dim
    kets = basis_kets(d, basis)
    rest = [n for n in state.names if n != label]
    s = permute_systems(state.as_density(), [label] + rest)
    dr = state.total_dim // d
    arr = s.data.reshape(d, dr, d, dr)
    out = np.zeros_like(arr)
    for m in range(d):
        ket = kets[:, m]
        block = np.einsum("a,abcd,c->bd", ket.conj(), arr, ket)
        out += np.einsum("a,c,bd->abcd", ket, ket.conj(), block)
    rho = out.reshape(s.total_dim, s.total_dim)
    return LabeledState.density(rho, s.systems)


def max_entangled(d: int, a: str = "A", b: str = "B") -> LabeledState:
    """d^(-1/2) sum_z |z>^a |z>^b."""
    vec = np.zeros(d * d, dtype=complex)
    vec[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return LabeledState.pure(vec, (SystemLabel(a, d), SystemLabel(b, d)))


def ghz(d: int, labels=("A", "B", "E")) -> LabeledState:
    """d^(-1/2) sum_z |zzz> over three labels."""
    a, b, e = labels
    vec = np.zeros(d ** 3, dtype=complex)
    z = np.arange(d)
    vec[(z * d + z) * d + z] = 1.0 / np.sqrt(d)
    systems = (SystemLabel(a, d), SystemLabel(b, d), SystemLabel(e, d))
    return LabeledState.pure(vec, systems)


@dataclass(frozen=True)
class ThetaFamily:
    """Interpolation between a basis ket and a Fourier ket on one system.

    The ket is (cos(theta)|0> + sin(theta)|0~>) / sqrt(N) with
    N = 1 + sin(2 theta)/sqrt(d); its two guessing probabilities trace
    the extremal trade-off curve between the conjugate observables.
    """

    d: int
    theta: float

    @property
    def normalization(self) -> float:
        return 1.0 + np.sin(2.0 * self.theta) / np.sqrt(self.d)

    def ket(self, label: str = "A") -> LabeledState:
        d = self.d
        vec = np.cos(self.theta) * np.eye(d, dtype=complex)[:, 0]
        vec = vec + np.sin(self.theta) * fourier_basis(d)[:, 0]
        vec = vec / np.sqrt(self.normalization)
        return LabeledState.pure(vec, (SystemLabel(label, d),))

    def guessing_probabilities(self) -> tuple[float, float]:
        """Deterministic-guessing success for the two bases: (p_z, p_x)."""
        amps = self.ket().data
        p_z = float(np.max(np.abs(amps) ** 2))
        x_amps = fourier_basis(self.d).conj().T @ amps
        p_x = float(np.max(np.abs(x_amps) ** 2))
        return p_z, p_x


def theta_state(d: int, theta: float, label: str = "A") -> LabeledState:
    return ThetaFamily(d, theta).ket(label)
