from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_hermitian(rng, n):
    A = rand_complex(rng, n, n)
    return (A + A.conj().T) / 2


def choi_by_definition(ops):
    """(1/s) sum_{k,l} |k><l| (x) E(|k><l|), summed entry by entry."""
    ops = [np.asarray(A) for A in ops]
    t, s = ops[0].shape
    out = np.zeros((s * t, s * t), dtype=complex)
    for k in range(s):
        for l in range(s):
            Ekl = np.zeros((s, s))
            Ekl[k, l] = 1
            out += np.kron(Ekl, sum(A @ Ekl @ A.conj().T for A in ops))
    return out / s


def choi_by_trace(V, t):
    """(1/s) tr_C[(I (x) V) gamma gamma^dag (I (x) V)^dag] with explicit Kronecker products."""
    n, s = V.shape
    r = n // t
    gamma = np.eye(s).reshape(-1)
    big = np.kron(np.eye(s), V) @ gamma
    rho = np.outer(big, big.conj()).reshape(s, r, t, s, r, t) / s
    out = np.zeros((s, t, s, t), dtype=complex)
    for c in range(r):
        out += rho[:, c, :, :, c, :]
    return out.reshape(s * t, s * t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
