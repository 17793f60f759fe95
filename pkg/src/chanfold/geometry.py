"""Dimension counts for channel manifolds and their numerical verification.

The Choi states of Kraus rank r form a manifold of real dimension
``2*s*t*r - s**2 - r**2``. It is checked here by pushing an orthonormal basis
of the Stiefel tangent space at a random isometry through the exact
differential of V -> Choi(V) and taking the rank of the result.
"""

from dataclasses import dataclass

import numpy as np

from .channels import Isometry, choi_bilinear, gram_rank
from .errors import InputError, NumericalError
from .linalg import DEFAULT_REL_TOL, haar_isometry, numerical_rank, realvec

MAX_RETRIES = 16
MAX_CONDITION = 1e6


@dataclass(frozen=True)
class DimensionReport:
    s: int
    t: int
    r: int
    formula_dim: int
    numeric_dim: int
    point_seed: int
    margin: float

    def to_dict(self):
        return dict(self.__dict__)


def _check_dims(s, t, r):
    if min(s, t, r) < 1:
        raise InputError("dimensions must be positive")
    if s > r * t:
        raise InputError(f"s={s} exceeds r*t={r * t}")
    if r > s * t:
        raise InputError(f"r={r} exceeds s*t={s * t}")


def manifold_dim(s, t, r):
    _check_dims(s, t, r)
    return 2 * s * t * r - s * s - r * r


def _complex_basis(shape):
    """Real basis of C^shape: unit real entries, then unit imaginary entries."""
    n = int(np.prod(shape))
    eye = np.eye(n)
    return np.concatenate([eye, 1j * eye]).reshape((2 * n,) + tuple(shape))


def stiefel_tangent_basis(V):
    """Real-orthonormal basis of ``{X : V^dag X + X^dag V = 0}``.

    Returned as an array of shape ``(k, rt, s)`` with ``k = 2*s*rt - s**2``.
    """
    V.validate()
    M = np.asarray(V.matrix)
    n, s = M.shape
    basis = _complex_basis((n, s))
    images = np.einsum("ns,knu->ksu", M.conj(), basis)
    images = images + images.conj().transpose(0, 2, 1)
    constraint = np.stack([realvec(H) for H in images], axis=1)
    _, sv, Vh = np.linalg.svd(constraint)
    rank = int(np.count_nonzero(sv > DEFAULT_REL_TOL * sv[0]))
    kernel = Vh[rank:]
    expected = 2 * s * n - s * s
    if kernel.shape[0] != expected:
        raise NumericalError(f"tangent space has dimension {kernel.shape[0]}, expected {expected}")
    return np.einsum("kj,jns->kns", kernel, basis)


def choi_of_blocks(V):
    blocks = V.blocks()
    return choi_bilinear(blocks, blocks, V.s)


def pushforward_T(V, X):
    """Differential of V -> Choi(V) at V in direction X (exact, bilinear)."""
    X = np.asarray(X, dtype=complex)
    if X.shape != V.matrix.shape:
        raise InputError(f"direction has shape {X.shape}, expected {V.matrix.shape}")
    Xb = X.reshape(V.r, V.t, V.s)
    Vb = V.blocks()
    D = choi_bilinear(Xb, Vb, V.s)
    return D + D.conj().T


def random_minimal_isometry(s, t, r, rng):
    for _ in range(MAX_RETRIES):
        V = Isometry(s, t, r, haar_isometry(s, r * t, rng))
        if gram_rank(V.to_kraus()).rank == r:
            return V
    raise NumericalError(f"no rank-{r} isometry in {MAX_RETRIES} draws")


def pushforward_matrix(V):
    """Real matrix whose columns are realvec(dT(X_k)) over the tangent basis."""
    cols = [realvec(pushforward_T(V, X)) for X in stiefel_tangent_basis(V)]
    return np.stack(cols, axis=1)


def numeric_choi_manifold_dim(s, t, r, seed=0, rel_tol=DEFAULT_REL_TOL):
    formula = manifold_dim(s, t, r)
    V = random_minimal_isometry(s, t, r, np.random.default_rng(seed))
    # unit tangent directions at an isometry: entries of dT are O(1)
    report = numerical_rank(pushforward_matrix(V), rel_tol, scale=1.0)
    return DimensionReport(s, t, r, formula, report.rank, seed, report.margin)


def gauge_directions(V):
    """Directions (iH (x) I) V for a real basis of Hermitian r x r matrices H."""
    r = V.r
    dirs = []
    for a in range(r):
        for b in range(r):
            H = np.zeros((r, r), dtype=complex)
            if a == b:
                H[a, a] = 1
            elif a < b:
                H[a, b] = H[b, a] = 1
            else:
                H[a, b], H[b, a] = 1j, -1j
            dirs.append(np.kron(1j * H, np.eye(V.t)) @ V.matrix)
    return np.array(dirs)


def psd_tangent_dim(s, r, seed=0, rel_tol=DEFAULT_REL_TOL):
    """Numerical dimension of the tangent space of rank-r PSD s x s matrices.

    Samples p = A E_r A^dag with random invertible A and spans
    ``Delta E_r A^dag + A E_r Delta^dag`` over 2 s^2 random Delta.
    """
    if not 1 <= r <= s:
        raise InputError(f"need 1 <= r <= s, got r={r}, s={s}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        A = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
        if np.linalg.cond(A) <= MAX_CONDITION:
            break
    else:
        raise NumericalError("could not draw a well-conditioned base point")
    E = np.diag([1.0] * r + [0.0] * (s - r))
    cols = []
    for _ in range(2 * s * s):
        D = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
        cols.append(realvec(D @ E @ A.conj().T + A @ E @ D.conj().T))
    return numerical_rank(np.stack(cols, axis=1), rel_tol).rank
