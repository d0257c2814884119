"""Dense linear algebra over labeled multipartite Hilbert spaces.

States and operators carry ordered subsystem labels so that higher level
code can address tensor factors by name instead of by axis arithmetic.
Coefficients are stored row-major over the ordered label list (the last
label varies fastest), which is exactly the convention of ``np.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PURE_NORM_TOL = 1e-12
HERM_TOL = 1e-12
EIG_FLOOR = -1e-10
EIG_ERROR = -1e-8
TRACE_TOL = 1e-10
ISOMETRY_TOL = 1e-12


class LabelError(ValueError):
    """A subsystem label is missing, duplicated, or dimension-mismatched."""


@dataclass(frozen=True)
class SystemLabel:
    """A named tensor factor with its local dimension."""

    name: str
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")


def _as_labels(systems) -> tuple[SystemLabel, ...]:
    labels = tuple(systems)
    names = [s.name for s in labels]
    if len(set(names)) != len(names):
        raise LabelError(f"duplicate labels in {names}")
    return labels


def _total_dim(labels: tuple[SystemLabel, ...]) -> int:
    out = 1
    for s in labels:
        out *= s.dim
    return out


def herm(x: np.ndarray) -> np.ndarray:
    """Hermitian part (x + x†)/2."""
    return 0.5 * (x + x.conj().T)


def is_hermitian(x: np.ndarray, tol: float = HERM_TOL) -> bool:
    scale = max(1.0, float(np.abs(x).max()) if x.size else 1.0)
    return bool(np.abs(x - x.conj().T).max() <= tol * scale)


@dataclass(frozen=True, eq=False)
class LabeledState:
    """A pure ket or a density operator over labeled subsystems."""

    kind: str
    data: np.ndarray
    systems: tuple[SystemLabel, ...]

    def __post_init__(self) -> None:
        labels = _as_labels(self.systems)
        object.__setattr__(self, "systems", labels)
        dim = _total_dim(labels)
        arr = np.asarray(self.data, dtype=complex)
        if self.kind == "pure":
            arr = arr.reshape(-1)
            if arr.shape != (dim,):
                raise LabelError(f"vector length {arr.shape} != label dims {dim}")
            norm = np.linalg.norm(arr)
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"pure state norm {norm} is not 1")
            if abs(norm - 1.0) > PURE_NORM_TOL:
                arr = arr / norm
        elif self.kind == "density":
            if arr.shape != (dim, dim):
                raise LabelError(f"matrix shape {arr.shape} != label dims ({dim},{dim})")
            if not is_hermitian(arr, HERM_TOL):
                raise ValueError("density matrix is not Hermitian within 1e-12")
            arr = herm(arr)
            eigs = np.linalg.eigvalsh(arr)
            if eigs.min() < EIG_FLOOR:
                raise ValueError(f"density matrix has eigenvalue {eigs.min():.3e} < -1e-10")
            tr = arr.trace().real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} is not 1")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def pure(cls, data, systems) -> "LabeledState":
        return cls("pure", data, tuple(systems))

    @classmethod
    def density(cls, data, systems) -> "LabeledState":
        return cls("density", data, tuple(systems))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.systems)

    @property
    def total_dim(self) -> int:
        return _total_dim(self.systems)

    def system(self, name: str) -> SystemLabel:
        for s in self.systems:
            if s.name == name:
                return s
        raise LabelError(f"no subsystem named {name!r} in {self.names}")

    def as_density(self) -> "LabeledState":
        if self.kind == "density":
            return self
        return LabeledState.density(np.outer(self.data, self.data.conj()), self.systems)


@dataclass(frozen=True, eq=False)
class Operator:
    """A matrix mapping the ordered ``in_systems`` factors to ``out_systems``."""

    data: np.ndarray
    in_systems: tuple[SystemLabel, ...]
    out_systems: tuple[SystemLabel, ...]

    def __post_init__(self) -> None:
        ins = _as_labels(self.in_systems)
        outs = _as_labels(self.out_systems)
        object.__setattr__(self, "in_systems", ins)
        object.__setattr__(self, "out_systems", outs)
        arr = np.asarray(self.data, dtype=complex)
        shape = (_total_dim(outs), _total_dim(ins))
        if arr.shape != shape:
            raise LabelError(f"operator shape {arr.shape} != label dims {shape}")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.in_systems)

    @property
    def out_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.out_systems)

    def dagger(self) -> "Operator":
        return Operator(self.data.conj().T, self.out_systems, self.in_systems)


class Isometry(Operator):
    """An Operator V with V†V = 1 on its input space."""

    def __post_init__(self) -> None:
        super().__post_init__()
        gram = self.data.conj().T @ self.data
        dev = np.abs(gram - np.eye(gram.shape[0])).max()
        if dev > 1e-10:
            raise ValueError(f"V†V deviates from identity by {dev:.3e}")


def tensor(a, b):
    """Kronecker product of two states or two operators, concatenating labels."""
    if isinstance(a, LabeledState) and isinstance(b, LabeledState):
        systems = _as_labels(a.systems + b.systems)
        if a.kind == "pure" and b.kind == "pure":
            return LabeledState.pure(np.kron(a.data, b.data), systems)
        return LabeledState.density(
            np.kron(a.as_density().data, b.as_density().data), systems
        )
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(
            np.kron(a.data, b.data),
            _as_labels(a.in_systems + b.in_systems),
            _as_labels(a.out_systems + b.out_systems),
        )
    raise TypeError("tensor expects two LabeledStates or two Operators")


def _perm_indices(state: LabeledState, order) -> list[int]:
    order = list(order)
    names = list(state.names)
    if sorted(order) != sorted(names):
        raise LabelError(f"order {order} is not a permutation of {names}")
    return [names.index(n) for n in order]


def permute_systems(state: LabeledState, order) -> LabeledState:
    """Reorder the tensor factors to the given label-name order."""
    perm = _perm_indices(state, order)
    if perm == list(range(len(perm))):
        return state
    dims = state.dims
    systems = tuple(state.systems[i] for i in perm)
    if state.kind == "pure":
        arr = state.data.reshape(dims).transpose(perm).reshape(-1)
        return LabeledState.pure(arr, systems)
    n = len(dims)
    arr = state.data.reshape(dims + dims)
    arr = arr.transpose(perm + [n + i for i in perm])
    d = state.total_dim
    return LabeledState.density(arr.reshape(d, d), systems)


def partial_trace(state: LabeledState, keep) -> LabeledState:
    """Reduced density operator on the kept labels, in the order given."""
    keep = list(keep)
    for n in keep:
        state.system(n)
    if len(set(keep)) != len(keep):
        raise LabelError(f"duplicate labels in keep={keep}")
    rest = [n for n in state.names if n not in keep]
    s = permute_systems(state, keep + rest)
    dk = 1
    for n in keep:
        dk *= state.system(n).dim
    dr = state.total_dim // dk
    systems = tuple(s.systems[: len(keep)])
    if state.kind == "pure":
        mat = s.data.reshape(dk, dr)
        rho = mat @ mat.conj().T
    else:
        arr = s.data.reshape(dk, dr, dk, dr)
        rho = np.einsum("arbr->ab", arr)
    return LabeledState.density(rho, systems)


def reduce_matrix(mat: np.ndarray, systems, keep) -> np.ndarray:
    """Partial trace of a raw (possibly subnormalized) matrix over labels.

    ``systems`` orders the factors of ``mat``; the result keeps the labels
    named in ``keep``, in that order.
    """
    labels = _as_labels(systems)
    names = [s.name for s in labels]
    keep = list(keep)
    for n in keep:
        if n not in names:
            raise LabelError(f"no subsystem named {n!r} in {names}")
    if len(set(keep)) != len(keep):
        raise LabelError(f"duplicate labels in keep={keep}")
    dims = [s.dim for s in labels]
    n = len(dims)
    perm = [names.index(k) for k in keep] + [i for i, nm in enumerate(names) if nm not in keep]
    arr = mat.reshape(dims + dims).transpose(perm + [n + i for i in perm])
    dk = 1
    for k in keep:
        dk *= dims[names.index(k)]
    dr = _total_dim(labels) // dk
    return np.einsum("arbr->ab", arr.reshape(dk, dr, dk, dr))


def apply_operator(op: Operator, state: LabeledState) -> LabeledState:
    """Apply a labeled operator to the matching subsystems of a state.

    The operator input labels are consumed and replaced by its output
    labels; untouched factors keep their order after the new ones.  Pure
    states stay pure (the operator should be an isometry for the result
    to remain normalized).
    """
    for lab in op.in_systems:
        if state.system(lab.name).dim != lab.dim:
            raise LabelError(f"dimension mismatch on label {lab.name!r}")
    rest = [n for n in state.names if n not in op.in_names]
    for lab in op.out_systems:
        if lab.name in rest:
            raise LabelError(f"output label {lab.name!r} collides with {rest}")
    s = permute_systems(state, list(op.in_names) + rest)
    d_in = _total_dim(op.in_systems)
    d_rest = state.total_dim // d_in
    rest_systems = tuple(s.systems[len(op.in_systems):])
    systems = op.out_systems + rest_systems
    if state.kind == "pure":
        mat = s.data.reshape(d_in, d_rest)
        return LabeledState.pure((op.data @ mat).reshape(-1), systems)
    big = np.kron(op.data, np.eye(d_rest))
    return LabeledState.density(big @ s.data @ big.conj().T, systems)


def overlap(a: LabeledState, b: LabeledState) -> complex:
    """Inner product <a|b> of two pure states, aligned by label names."""
    if a.kind != "pure" or b.kind != "pure":
        raise ValueError("overlap requires two pure states")
    bb = permute_systems(b, a.names)
    if a.dims != bb.dims:
        raise LabelError(f"dimension mismatch {a.dims} vs {bb.dims}")
    return complex(np.vdot(a.data, bb.data))


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    mat = h.data if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    if not is_hermitian(mat, 1e-10):
        raise ValueError("matrix is not Hermitian within 1e-10")
    w, v = np.linalg.eigh(herm(mat))
    return w, v


def psd_sqrt(p) -> np.ndarray:
    """Principal square root of a PSD matrix, clamping tiny negative modes."""
    mat = p.data if isinstance(p, Operator) else np.asarray(p, dtype=complex)
    w, v = herm_eig(mat)
    scale = max(1.0, float(w.max()) if w.size else 1.0)
    if w.min() < EIG_ERROR * scale:
        raise ValueError(f"matrix has significantly negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    out = (v * np.sqrt(w)) @ v.conj().T
    if isinstance(p, Operator):
        return Operator(out, p.in_systems, p.out_systems)
    return out


def pinv_sqrt(p: np.ndarray, rel_cutoff: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse square root of a PSD matrix and its support projector."""
    w, v = herm_eig(p)
    cutoff = rel_cutoff * max(float(w.max()), 0.0) if w.size else 0.0
    inv = np.where(w > cutoff, 1.0 / np.sqrt(np.clip(w, 1e-300, None)), 0.0)
    support = np.where(w > cutoff, 1.0, 0.0)
    s = (v * inv) @ v.conj().T
    proj = (v * support) @ v.conj().T
    return s, proj


def trace_norm(x: np.ndarray) -> float:
    return float(np.linalg.svd(x, compute_uv=False).sum())


def _aligned_density_pair(rho: LabeledState, sigma: LabeledState):
    s = permute_systems(sigma, rho.names)
    if rho.dims != s.dims:
        raise LabelError(f"dimension mismatch {rho.dims} vs {s.dims}")
    return rho, s


def fidelity(rho: LabeledState, sigma: LabeledState) -> float:
    """Root fidelity ||sqrt(rho) sqrt(sigma)||_1, in [0, 1]."""
    rho, sigma = _aligned_density_pair(rho, sigma)
    if rho.kind == "pure" and sigma.kind == "pure":
        return float(min(1.0, abs(np.vdot(rho.data, sigma.data))))
    if rho.kind == "pure":
        val = np.vdot(rho.data, sigma.data @ rho.data).real
        return float(min(1.0, np.sqrt(max(val, 0.0))))
    if sigma.kind == "pure":
        return fidelity(sigma, rho)
    a = psd_sqrt(rho.data)
    b = psd_sqrt(sigma.data)
    return float(min(1.0, trace_norm(a @ b)))


def trace_distance(rho: LabeledState, sigma: LabeledState) -> float:
    """Half the trace norm of the difference, in [0, 1]."""
    rho, sigma = _aligned_density_pair(rho, sigma)
    diff = rho.as_density().data - sigma.as_density().data
    w = np.linalg.eigvalsh(herm(diff))
    return float(0.5 * np.abs(w).sum())


def purify(state: LabeledState, new_name: str = "R") -> LabeledState:
    """A pure state on systems + one ancilla whose reduction is the input.

    The ancilla always gets the full state dimension; a pure input comes
    back as itself tensored with the ancilla ground ket.
    """
    if new_name in state.names:
        raise LabelError(f"label {new_name!r} already present")
    d = state.total_dim
    anc = SystemLabel(new_name, d)
    if state.kind == "pure":
        ground = np.zeros(d)
        ground[0] = 1.0
        return LabeledState.pure(np.kron(state.data, ground), state.systems + (anc,))
    w, v = herm_eig(state.data)
    w = np.clip(w, 0.0, None)
    vec = (v * np.sqrt(w)).reshape(-1)
    # vec[(i, k)] = sqrt(w_k) v[i, k] row-major: system index first, ancilla last
    return LabeledState.pure(vec, state.systems + (anc,))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure(systems, seed) -> LabeledState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    labels = _as_labels(systems)
    rng = _as_rng(seed)
    d = _total_dim(labels)
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return LabeledState.pure(vec / np.linalg.norm(vec), labels)


def random_density(systems, rank, seed) -> LabeledState:
    """Random density operator: trace an ancilla of dimension ``rank``."""
    labels = _as_labels(systems)
    d = _total_dim(labels)
    if not 1 <= rank <= d * d:
        raise ValueError(f"rank {rank} out of range for dimension {d}")
    anc = SystemLabel("_anc", rank)
    psi = random_pure(labels + (anc,), seed)
    return partial_trace(psi, [s.name for s in labels])
