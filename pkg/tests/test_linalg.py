import numpy as np
import pytest

from qguess.linalg import (
    Isometry,
    LabeledState,
    LabelError,
    Operator,
    SystemLabel,
    apply_operator,
    fidelity,
    herm,
    herm_eig,
    is_hermitian,
    overlap,
    partial_trace,
    permute_systems,
    pinv_sqrt,
    psd_sqrt,
    purify,
    random_density,
    random_pure,
    reduce_matrix,
    tensor,
    trace_distance,
    trace_norm,
)

A2 = SystemLabel("A", 2)
B2 = SystemLabel("B", 2)
B3 = SystemLabel("B", 3)


def ket(vec, *systems):
    return LabeledState.pure(np.asarray(vec, dtype=complex), systems)


def test_system_label_rejects_dimension_zero():
    with pytest.raises(ValueError):
        SystemLabel("A", 0)


def test_duplicate_labels_rejected():
    with pytest.raises(LabelError):
        LabeledState.pure(np.eye(4)[:, 0], (SystemLabel("A", 2), SystemLabel("A", 2)))


def test_pure_norm_validation():
    with pytest.raises(ValueError):
        ket([0.5, 0.0], A2)
    # deviations below the hard threshold are renormalized
    amp = (1.0 + 1e-10) / np.sqrt(2.0)
    state = ket([amp, amp], A2)
    assert abs(np.linalg.norm(state.data) - 1.0) < 1e-14


def test_pure_shape_validation():
    with pytest.raises(LabelError):
        ket([1.0, 0.0, 0.0], A2)


def test_density_validation():
    bad_herm = np.array([[0.5, 0.5], [-0.5, 0.5]])
    with pytest.raises(ValueError):
        LabeledState.density(bad_herm, (A2,))
    bad_eig = np.diag([1.5, -0.5])
    with pytest.raises(ValueError):
        LabeledState.density(bad_eig, (A2,))
    bad_trace = np.diag([0.8, 0.8])
    with pytest.raises(ValueError):
        LabeledState.density(bad_trace, (A2,))
    # eigenvalue at -1e-11 sits above the floor and is accepted
    ok = LabeledState.density(np.diag([1.0 + 1e-11, -1e-11]), (A2,))
    assert ok.kind == "density"


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        LabeledState("vector", np.array([1.0, 0.0]), (A2,))


def test_as_density_projector():
    psi = ket([1.0, 0.0], A2)
    rho = psi.as_density()
    assert np.allclose(rho.data, np.diag([1.0, 0.0]))
    assert rho.as_density() is rho


def test_tensor_concatenates_labels():
    v = ket([1.0, 0.0], A2)
    w = ket([0.0, 1.0, 0.0], B3)
    prod = tensor(v, w)
    assert prod.names == ("A", "B")
    assert prod.dims == (2, 3)
    expect = np.kron(v.data, w.data)
    assert np.allclose(prod.data, expect)
    with pytest.raises(LabelError):
        tensor(v, ket([1.0, 0.0], SystemLabel("A", 2)))
    with pytest.raises(TypeError):
        tensor(v, np.eye(2))


def test_tensor_operators():
    z = Operator(np.diag([1.0, -1.0]), (A2,), (A2,))
    x = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), (B2,), (B2,))
    zx = tensor(z, x)
    assert zx.in_names == ("A", "B")
    assert np.allclose(zx.data, np.kron(z.data, x.data))


def test_permute_round_trip():
    rng = np.random.default_rng(7)
    psi = random_pure((A2, B3, SystemLabel("C", 2)), seed=rng)
    flipped = permute_systems(psi, ["C", "A", "B"])
    assert flipped.names == ("C", "A", "B")
    back = permute_systems(flipped, ["A", "B", "C"])
    assert np.allclose(back.data, psi.data)
    assert abs(overlap(psi, flipped)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(LabelError):
        permute_systems(psi, ["A", "B"])


def test_permute_density_matches_pure():
    rng = np.random.default_rng(8)
    psi = random_pure((A2, B3), seed=rng)
    rho = psi.as_density()
    flipped_rho = permute_systems(rho, ["B", "A"])
    flipped_psi = permute_systems(psi, ["B", "A"]).as_density()
    assert np.allclose(flipped_rho.data, flipped_psi.data)


def test_partial_trace_of_entangled_pair():
    phi = ket(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0), A2, B2)
    red_a = partial_trace(phi, ["A"])
    red_b = partial_trace(phi, ["B"])
    assert np.allclose(red_a.data, np.eye(2) / 2.0)
    assert np.allclose(red_b.data, np.eye(2) / 2.0)


def test_partial_trace_consistency():
    rng = np.random.default_rng(9)
    psi = random_pure((A2, B3, SystemLabel("E", 2)), seed=rng)
    direct = partial_trace(psi, ["A"])
    staged = partial_trace(partial_trace(psi, ["A", "B"]), ["A"])
    assert np.allclose(direct.data, staged.data, atol=1e-12)
    assert partial_trace(psi, ["B", "E"]).data.trace().real == pytest.approx(1.0)
    with pytest.raises(LabelError):
        partial_trace(psi, ["A", "A"])
    with pytest.raises(LabelError):
        partial_trace(psi, ["Q"])


def test_reduce_matrix_matches_partial_trace():
    rng = np.random.default_rng(10)
    psi = random_pure((A2, B3), seed=rng)
    rho = psi.as_density()
    red = reduce_matrix(rho.data, rho.systems, ["B"])
    assert np.allclose(red, partial_trace(psi, ["B"]).data, atol=1e-12)
    with pytest.raises(LabelError):
        reduce_matrix(rho.data, rho.systems, ["Q"])


def test_apply_operator_alignment():
    # X on B leaves A untouched regardless of the stored factor order
    x = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), (B2,), (B2,))
    psi = ket([0.0, 1.0, 0.0, 0.0], A2, B2)  # |0>|1>
    out = apply_operator(x, psi)
    assert out.names == ("B", "A")
    aligned = permute_systems(out, ["A", "B"])
    assert np.allclose(aligned.data, [1.0, 0.0, 0.0, 0.0])


def test_apply_operator_validation():
    x = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), (B2,), (B2,))
    with pytest.raises(LabelError):
        apply_operator(x, ket([1.0, 0.0, 0.0], B3))
    grow = Operator(np.eye(4)[:, :2], (A2,), (B2, SystemLabel("C", 2)))
    with pytest.raises(LabelError):
        apply_operator(grow, ket(np.ones(4) / 2.0, A2, SystemLabel("C", 2)))


def test_operator_shape_and_isometry_validation():
    with pytest.raises(LabelError):
        Operator(np.eye(3), (A2,), (A2,))
    with pytest.raises(ValueError):
        Isometry(np.array([[1.0, 0.0], [0.0, 0.5]]), (A2,), (A2,))
    v = Isometry(np.eye(4)[:, :2], (A2,), (A2, B2))
    assert np.allclose(v.dagger().data @ v.data, np.eye(2))


def test_overlap_oracle():
    zero = ket([1.0, 0.0], A2)
    plus = ket(np.array([1.0, 1.0]) / np.sqrt(2.0), A2)
    assert abs(overlap(zero, plus)) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)
    with pytest.raises(ValueError):
        overlap(zero, plus.as_density())


def test_herm_eig_recomposes():
    rng = np.random.default_rng(11)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = herm(g)
    w, v = herm_eig(h)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose((v * w) @ v.conj().T, h, atol=1e-12)
    with pytest.raises(ValueError):
        herm_eig(g + 10.0 * np.eye(4))


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(12)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p = g @ g.conj().T
    r = psd_sqrt(p)
    assert np.allclose(r @ r, p, atol=1e-10)
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -0.1]))


def test_pinv_sqrt_support():
    p = np.diag([4.0, 0.0, 1.0])
    s, proj = pinv_sqrt(p)
    assert np.allclose(np.diag(s), [0.5, 0.0, 1.0])
    assert np.allclose(np.diag(proj), [1.0, 0.0, 1.0])
    assert np.allclose(s @ p @ s, proj, atol=1e-12)


def test_trace_norm_value():
    assert trace_norm(np.diag([3.0, -4.0])) == pytest.approx(7.0)


def test_fidelity_oracles():
    zero = ket([1.0, 0.0], A2)
    plus = ket(np.array([1.0, 1.0]) / np.sqrt(2.0), A2)
    assert fidelity(zero, plus) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)
    assert fidelity(zero, zero.as_density()) == pytest.approx(1.0, abs=1e-12)
    # commuting diagonal states: F = sum_i sqrt(p_i q_i)
    p = LabeledState.density(np.diag([0.7, 0.3]), (A2,))
    q = LabeledState.density(np.diag([0.2, 0.8]), (A2,))
    expect = np.sqrt(0.7 * 0.2) + np.sqrt(0.3 * 0.8)
    assert fidelity(p, q) == pytest.approx(expect, abs=1e-12)
    assert fidelity(p, zero) == pytest.approx(np.sqrt(0.7), abs=1e-12)


def test_fidelity_symmetric_and_aligned():
    rng = np.random.default_rng(13)
    rho = random_density((A2, B2), rank=2, seed=rng)
    sig = random_density((A2, B2), rank=3, seed=rng)
    swapped = permute_systems(sig, ["B", "A"])
    assert fidelity(rho, sig) == pytest.approx(fidelity(sig, rho), abs=1e-10)
    assert fidelity(rho, swapped) == pytest.approx(fidelity(rho, sig), abs=1e-10)


def test_trace_distance_extremes():
    zero = ket([1.0, 0.0], A2)
    one = ket([0.0, 1.0], A2)
    assert trace_distance(zero, one) == pytest.approx(1.0, abs=1e-12)
    assert trace_distance(zero, zero) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_trace_distance_inequalities():
    # 1 - F <= T <= sqrt(1 - F^2) on random density pairs
    rng = np.random.default_rng(14)
    for _ in range(20):
        rho = random_density((A2, B2), rank=int(rng.integers(1, 5)), seed=rng)
        sig = random_density((A2, B2), rank=int(rng.integers(1, 5)), seed=rng)
        f = fidelity(rho, sig)
        t = trace_distance(rho, sig)
        assert 1.0 - f <= t + 1e-9
        assert t * t + f * f <= 1.0 + 1e-9


def test_fidelity_monotone_under_partial_trace():
    rng = np.random.default_rng(15)
    for _ in range(10):
        rho = random_density((A2, B3), rank=2, seed=rng)
        sig = random_density((A2, B3), rank=3, seed=rng)
        f_joint = fidelity(rho, sig)
        f_red = fidelity(partial_trace(rho, ["A"]), partial_trace(sig, ["A"]))
        assert f_red >= f_joint - 1e-9


def test_purify_round_trip():
    rng = np.random.default_rng(16)
    rho = random_density((A2, B2), rank=3, seed=rng)
    psi = purify(rho, "R")
    assert psi.kind == "pure"
    assert psi.names == ("A", "B", "R")
    back = partial_trace(psi, ["A", "B"])
    assert np.abs(back.data - rho.data).max() < 1e-9
    with pytest.raises(LabelError):
        purify(rho, "B")


def test_purify_pure_input_appends_ground_ket():
    psi = ket([1.0, 0.0], A2)
    ext = purify(psi, "R")
    assert ext.names == ("A", "R")
    assert np.allclose(ext.data, [1.0, 0.0, 0.0, 0.0])


def test_random_pure_reproducible():
    a = random_pure((A2, B3), seed=321)
    b = random_pure((A2, B3), seed=321)
    c = random_pure((A2, B3), seed=322)
    assert np.array_equal(a.data, b.data)
    assert not np.allclose(a.data, c.data)
    assert np.linalg.norm(a.data) == pytest.approx(1.0, abs=1e-12)


def test_random_pure_purity_moment():
    # Haar 2x2: E[tr rho_A^2] = (dA + dB) / (dA dB + 1) = 4/5
    rng = np.random.default_rng(17)
    total = 0.0
    n = 2000
    for _ in range(n):
        psi = random_pure((A2, B2), seed=rng)
        red = partial_trace(psi, ["A"])
        total += float(np.trace(red.data @ red.data).real)
    assert abs(total / n - 0.8) < 0.02


def test_random_density_rank_control():
    rng = np.random.default_rng(18)
    rho = random_density((A2, B2), rank=2, seed=rng)
    eigs = np.linalg.eigvalsh(rho.data)
    assert (eigs > 1e-12).sum() == 2
    with pytest.raises(ValueError):
        random_density((A2,), rank=0, seed=rng)
    with pytest.raises(ValueError):
        random_density((A2,), rank=5, seed=rng)


def test_is_hermitian_scale_relative():
    big = 1e6 * np.eye(2)
    big[0, 1] = 1e-8
    big[1, 0] = 1e-8
    assert is_hermitian(big)
    assert not is_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
