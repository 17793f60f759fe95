import numpy as np
import pytest

from chanfold.channels import ChoiState, KrausChannel, choi_to_kraus, kraus_to_choi, random_channel, unitary_channel
from chanfold.decomposition import (
    DecompositionDeadlock,
    caratheodory_reduce,
    decompose_extreme,
    dependence_residual,
    find_dependence,
    split_once,
)
from chanfold.errors import InputError, NumericalError
from chanfold.extremality import is_extreme
from chanfold.linalg import haar_unitary, numerical_rank

from conftest import I2, X, Y, Z

BITFLIP = KrausChannel.from_ops([I2 / np.sqrt(2), X / np.sqrt(2)])
DEPOL = KrausChannel.from_ops([I2 / 2, X / 2, Y / 2, Z / 2])


def non_extreme_channel(seed):
    s, t, r = [(2, 2, 3), (2, 2, 4), (2, 3, 3), (3, 2, 4)][seed % 4]
    return random_channel(s, t, r, seed)


def test_no_dependence_for_extreme():
    assert find_dependence(unitary_channel(haar_unitary(2, seed=0))) is None
    assert find_dependence(random_channel(2, 2, 2, seed=1)) is None


def test_bitflip_dependence():
    K = choi_to_kraus(kraus_to_choi(BITFLIP))
    lam = find_dependence(K)
    assert lam is not None and np.linalg.norm(lam) == pytest.approx(1)
    assert np.abs(lam - lam.conj().T).max() < 1e-15
    assert dependence_residual(K.stacked(), lam) <= 1e-10


def test_depolarizing_dependence():
    lam = find_dependence(DEPOL)
    assert lam is not None
    assert dependence_residual(DEPOL.stacked(), lam) <= 1e-10


def test_find_dependence_rejects_non_minimal():
    with pytest.raises(InputError):
        find_dependence(KrausChannel.from_ops([I2 / np.sqrt(2), I2 / np.sqrt(2)]))


def test_split_bitflip_into_unitaries():
    C = kraus_to_choi(BITFLIP)
    lam = find_dependence(choi_to_kraus(C))
    p, C1, C2, cert = split_once(C, lam)
    assert p == pytest.approx(0.5, abs=1e-12)
    assert np.linalg.norm(p * C1.matrix + (1 - p) * C2.matrix - C.matrix) <= 1e-11
    assert cert.child_ranks == (1, 1)
    # each child is a unitary channel in span{I, X}; e.g. (I +- iX)/sqrt2 is
    # as valid as {I, X}, so only the shape of the answer is checked
    for child in (C1, C2):
        (U,) = choi_to_kraus(child).ops
        assert np.abs(U.conj().T @ U - I2).max() < 1e-12
        coeffs = [np.trace(P.conj().T @ U) / 2 for P in (I2, X)]
        assert np.linalg.norm(U - coeffs[0] * I2 - coeffs[1] * X) < 1e-12


def test_split_reconstruction_and_ranks():
    for seed in range(50):
        C = kraus_to_choi(non_extreme_channel(seed))
        K = choi_to_kraus(C)
        lam = find_dependence(K)
        p, C1, C2, cert = split_once(C, lam)
        assert 0 < p < 1
        assert np.linalg.norm(p * C1.matrix + (1 - p) * C2.matrix - C.matrix) <= 1e-11
        assert max(cert.child_ranks) < K.r
        assert numerical_rank(C1.matrix).rank < K.r and numerical_rank(C2.matrix).rank < K.r
        C1.validate(1e-9)
        C2.validate(1e-9)


def test_split_rejects_bad_witness():
    C = kraus_to_choi(BITFLIP)
    with pytest.raises(InputError):
        split_once(C, np.eye(2))


def test_decompose_extreme_input():
    C = kraus_to_choi(random_channel(2, 2, 2, seed=3))
    res = decompose_extreme(C)
    assert len(res.terms) == 1 and res.terms[0][0] == 1.0
    assert res.split_tree_depth == 0 and res.certificates == []


def test_decompose_depolarizing():
    C = kraus_to_choi(DEPOL)
    res = decompose_extreme(C)
    assert res.pre_reduction_count <= 8
    assert res.residual <= 1e-9
    assert abs(res.weights.sum() - 1) <= 1e-12
    for w, leaf in res.terms:
        assert w > 0
        assert is_extreme(choi_to_kraus(leaf)).is_extreme
        leaf.validate(1e-9)


def test_four_pauli_answer_is_valid():
    # the uniform Pauli mixture is a valid 4-term decomposition
    terms = [(0.25, kraus_to_choi(unitary_channel(P))) for P in (I2, X, Y, Z)]
    mix = sum(w * C.matrix for w, C in terms)
    assert np.abs(mix - np.eye(4) / 4).max() < 1e-15
    assert all(is_extreme(choi_to_kraus(C)).is_extreme for _, C in terms)


def test_decompose_random_full_rank():
    for seed in range(20):
        C = kraus_to_choi(random_channel(2, 2, 4, seed))
        res = decompose_extreme(C)
        assert res.residual <= 1e-9
        assert len(res.terms) <= 33
        assert res.split_tree_depth <= 3


def test_mixture_conserved_at_every_node():
    for seed in range(10):
        C = kraus_to_choi(non_extreme_channel(seed))
        res = decompose_extreme(C)
        for cert in res.certificates:
            assert cert.mixture_error <= 1e-11
            assert max(cert.child_ranks) < cert.parent_rank


def test_decompose_deterministic():
    C = kraus_to_choi(random_channel(2, 3, 4, seed=9))
    a, b = decompose_extreme(C), decompose_extreme(C)
    assert len(a.terms) == len(b.terms)
    for (w1, C1), (w2, C2) in zip(a.terms, b.terms):
        assert w1 == w2 and np.array_equal(C1.matrix, C2.matrix)


def test_max_depth_enforced():
    with pytest.raises(NumericalError):
        decompose_extreme(kraus_to_choi(random_channel(2, 2, 4, seed=0)), max_depth=1)


def _channel_with_margin(target, rel_tol):
    """Extreme qubit channel whose criterion margin just drops below ``target``.

    Kraus operators diag(1, sqrt(1-d)) and sqrt(d)|0><1|: the products span
    all four matrix units, with the |1><1| direction scaled by d.
    """
    for d in np.geomspace(1e-1, 1e-9, 400):
        A1 = np.array([[1, 0], [0, np.sqrt(1 - d)]], dtype=complex)
        A2 = np.array([[0, np.sqrt(d)], [0, 0]], dtype=complex)
        K = KrausChannel.from_ops([A1, A2])
        rep = is_extreme(choi_to_kraus(kraus_to_choi(K), rel_tol), rel_tol)
        if rep.margin < target:
            return K, rep
    raise AssertionError("no channel found")


def test_ambiguous_band_raises():
    rel_tol = 1e-6
    K, rep = _channel_with_margin(5 * rel_tol, rel_tol)
    assert rep.is_extreme and rel_tol < rep.margin < 10 * rel_tol
    with pytest.raises(DecompositionDeadlock) as info:
        decompose_extreme(kraus_to_choi(K), rel_tol)
    assert rel_tol <= info.value.criterion_margin <= 10 * rel_tol
    assert info.value.leaf is not None


def _choi_of_unitary(U):
    return kraus_to_choi(unitary_channel(U))


def test_caratheodory_unchanged_when_independent():
    terms = [(0.25, _choi_of_unitary(P)) for P in (I2, X, Y, Z)]
    out = caratheodory_reduce(terms)
    assert len(out) == 4
    assert [w for w, _ in out] == pytest.approx([0.25] * 4)
    single = caratheodory_reduce([(1.0, _choi_of_unitary(I2))])
    assert len(single) == 1


def test_caratheodory_collinear_triple():
    C1 = _choi_of_unitary(I2)
    C3 = _choi_of_unitary(X)
    C2 = ChoiState(2, 2, (C1.matrix + C3.matrix) / 2)
    terms = [(0.25, C1), (0.25, C2), (0.5, C3)]
    target = sum(w * C.matrix for w, C in terms)
    out = caratheodory_reduce(terms)
    assert len(out) == 2
    assert np.linalg.norm(sum(w * C.matrix for w, C in out) - target) <= 1e-11


def test_caratheodory_random_mixture_invariance():
    rng = np.random.default_rng(0)
    for _ in range(10):
        states = [kraus_to_choi(random_channel(1, 2, 1, rng)) for _ in range(6)]
        w = rng.dirichlet(np.ones(6))
        target = sum(wi * C.matrix for wi, C in zip(w, states))
        out = caratheodory_reduce(list(zip(w, states)))
        # pure qubit states live in a 3-dimensional affine space: at most 4 terms
        assert len(out) <= 4
        assert np.linalg.norm(sum(wi * C.matrix for wi, C in out) - target) <= 1e-10
        assert abs(sum(wi for wi, _ in out) - 1) <= 1e-12


def test_caratheodory_validation():
    C = _choi_of_unitary(I2)
    with pytest.raises(InputError):
        caratheodory_reduce([(0.5, C)])
    with pytest.raises(InputError):
        caratheodory_reduce([(1.5, C), (-0.5, C)])
