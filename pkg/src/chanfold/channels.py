"""Kraus, Choi and Stinespring representations of quantum channels.

Choi states are stored normalized, ``C = Gamma / s``, so that ``tr C = 1`` and
``tr_B C = I_s / s``. The composite index of a Choi state is ``(A', B)``
row-major. A Stinespring isometry stacks the Kraus operators as blocks,
``V = [A_1; ...; A_r]``, i.e. its output index is ``(C, B)`` with the
environment first.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import (
    DEFAULT_REL_TOL,
    as_matrix,
    haar_isometry,
    herm_eig,
    numerical_rank,
    partial_trace,
)

TP_TOL = 1e-10
CHOI_TOL = 1e-10
MAX_RESAMPLES = 16


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class KrausChannel:
    s: int
    t: int
    ops: tuple

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(A, "Kraus operator")) for A in self.ops)
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_ops(cls, ops, tp_tol=TP_TOL):
        """Build and validate a channel; dimensions are read off the operators."""
        ops = [as_matrix(A, "Kraus operator") for A in ops]
        if not ops:
            raise InputError("a channel needs at least one Kraus operator")
        t, s = ops[0].shape
        chan = cls(s, t, tuple(ops))
        chan.validate(tp_tol)
        return chan

    @property
    def r(self):
        return len(self.ops)

    def stacked(self):
        return np.stack(self.ops)

    def validate(self, tp_tol=TP_TOL):
        if self.r < 1:
            raise InputError("a channel needs at least one Kraus operator")
        for k, A in enumerate(self.ops):
            if A.shape != (self.t, self.s):
                raise InputError(
                    f"Kraus operator {k} has shape {A.shape}, expected {(self.t, self.s)}",
                    path=f"ops[{k}]",
                )
        gram = sum(A.conj().T @ A for A in self.ops)
        if np.linalg.norm(gram - np.eye(self.s)) > tp_tol:
            raise InputError("Kraus operators are not trace preserving (sum A^dag A != I)")
        return self

    def apply(self, X):
        return sum(A @ X @ A.conj().T for A in self.ops)

    def mixed(self, U):
        """Kraus list ``B_j = sum_i U[j, i] A_i`` (the (U (x) I) action on V)."""
        B = np.einsum("ji,ibs->jbs", U, self.stacked())
        return KrausChannel(self.s, self.t, tuple(B))


@dataclass(frozen=True, eq=False)
class ChoiState:
    s: int
    t: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(as_matrix(self.matrix, "Choi matrix")))

    @classmethod
    def from_matrix(cls, s, t, matrix, tol=CHOI_TOL):
        state = cls(s, t, matrix)
        state.validate(tol)
        return state

    def validate(self, tol=CHOI_TOL):
        n = self.s * self.t
        C = self.matrix
        if C.shape != (n, n):
            raise InputError(f"Choi matrix must be {n}x{n}, got {C.shape}")
        scale = max(np.linalg.norm(C), 1.0)
        if np.linalg.norm(C - C.conj().T) > tol * scale:
            raise InputError("Choi matrix is not Hermitian")
        if np.linalg.eigvalsh((C + C.conj().T) / 2)[0] < -tol * scale:
            raise InputError("Choi matrix is not positive semidefinite")
        if abs(np.trace(C) - 1) > tol:
            raise InputError("Choi matrix does not have unit trace")
        marginal = partial_trace(C, self.s, self.t, "second")
        if np.linalg.norm(marginal - np.eye(self.s) / self.s) > tol:
            raise InputError("Choi matrix marginal tr_B C differs from I/s")
        return self

    def rank(self, rel_tol=DEFAULT_REL_TOL):
        return numerical_rank(self.matrix, rel_tol).rank


@dataclass(frozen=True, eq=False)
class Isometry:
    s: int
    t: int
    r: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(as_matrix(self.matrix, "isometry")))

    @classmethod
    def from_matrix(cls, V, t, tol=TP_TOL):
        V = as_matrix(V, "isometry")
        n, s = V.shape
        if n % t:
            raise InputError(f"isometry row count {n} is not a multiple of t={t}")
        iso = cls(s, t, n // t, V)
        iso.validate(tol)
        return iso

    @classmethod
    def from_kraus(cls, K):
        return cls(K.s, K.t, K.r, np.vstack(K.ops))

    def validate(self, tol=TP_TOL):
        if self.matrix.shape != (self.r * self.t, self.s):
            raise InputError(f"isometry must be {(self.r * self.t, self.s)}, got {self.matrix.shape}")
        V = self.matrix
        if np.linalg.norm(V.conj().T @ V - np.eye(self.s)) > tol:
            raise InputError("V^dag V != I: not an isometry")
        return self

    def blocks(self):
        return self.matrix.reshape(self.r, self.t, self.s)

    def to_kraus(self):
        return KrausChannel(self.s, self.t, tuple(self.blocks()))


def frame_vectors(ops):
    """Rows ``w_i`` with ``w_i[k*t + b] = A_i[b, k]``, i.e. ``sum_k e_k (x) A_i e_k``."""
    ops = np.asarray(ops)
    r, t, s = ops.shape
    return ops.transpose(0, 2, 1).reshape(r, s * t)


def choi_bilinear(X_ops, Y_ops, s):
    """``(1/s) sum_i x_i y_i^dag`` for Kraus-shaped stacks X, Y."""
    x = frame_vectors(X_ops)
    y = frame_vectors(Y_ops)
    return x.T @ y.conj() / s


def kraus_to_choi(K):
    K.validate()
    ops = K.stacked()
    return ChoiState(K.s, K.t, choi_bilinear(ops, ops, K.s))


def choi_to_kraus(C, rel_tol=DEFAULT_REL_TOL):
    """Minimal (eigen-)Kraus representation of a Choi state.

    Eigenvalues of ``s*C`` below ``rel_tol * lambda_max`` are dropped; slightly
    negative ones in that band are clamped, more negative ones are rejected.
    """
    s, t = C.s, C.t
    evals, evecs = herm_eig(s * np.asarray(C.matrix))
    top = evals[-1]
    if top <= 0:
        raise InputError("Choi matrix has no positive eigenvalue")
    if evals[0] < -rel_tol * top:
        raise InputError(f"Choi matrix is not PSD (min eigenvalue {evals[0]:.3e})")
    keep = evals > rel_tol * top
    ops = []
    for lam, v in zip(evals[keep][::-1], evecs[:, keep][:, ::-1].T):
        w = np.sqrt(lam) * v
        ops.append(w.reshape(s, t).T)
    return KrausChannel(s, t, tuple(ops))


def stinespring_to_choi(V):
    V.validate()
    blocks = V.blocks()
    return ChoiState(V.s, V.t, choi_bilinear(blocks, blocks, V.s))


@dataclass(frozen=True)
class AdjointMap:
    """Kraus list of the dual (unital) map, ``{A_i^dag}``: t -> s."""

    ops: tuple
    unitality_error: float

    @property
    def is_unital(self):
        return self.unitality_error <= TP_TOL

    def apply(self, Y):
        return sum(B @ Y @ B.conj().T for B in self.ops)


def adjoint_channel(K):
    K.validate()
    ops = tuple(A.conj().T for A in K.ops)
    unit = sum(B @ B.conj().T for B in ops)
    return AdjointMap(ops, float(np.linalg.norm(unit - np.eye(K.s))))


def gram_rank(K, rel_tol=DEFAULT_REL_TOL):
    """Numerical rank of the s*t x r matrix whose columns are vec(A_i)."""
    return numerical_rank(frame_vectors(K.stacked()).T, rel_tol)


def random_channel(s, t, r, seed=None):
    """Random channel of Kraus rank exactly ``r`` from a Haar Stinespring isometry."""
    if min(s, t, r) < 1:
        raise InputError("dimensions must be positive")
    if r > s * t:
        raise InputError(f"Kraus rank r={r} exceeds s*t={s * t}")
    if s > r * t:
        raise InputError(f"no isometry exists: s={s} > r*t={r * t}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RESAMPLES):
        V = haar_isometry(s, r * t, rng)
        K = Isometry(s, t, r, V).to_kraus()
        if gram_rank(K).rank == r:
            return K
    raise InputError(f"could not sample a rank-{r} channel in {MAX_RESAMPLES} draws")


def extreme_example(s, t, psi):
    """Channel with Kraus operators ``|psi><i|``, i = 1..s."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != t:
        raise InputError(f"psi must have length t={t}")
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise InputError("psi must be a unit vector")
    ops = tuple(np.outer(psi, np.eye(s)[i]) for i in range(s))
    return KrausChannel(s, t, ops)


def identity_channel(d):
    return KrausChannel(d, d, (np.eye(d),))


def unitary_channel(U):
    U = as_matrix(U)
    return KrausChannel(U.shape[1], U.shape[0], (U,))


def choi_distance(K1, K2):
    if (K1.s, K1.t) != (K2.s, K2.t):
        raise InputError(f"dimension mismatch: {(K1.s, K1.t)} vs {(K2.s, K2.t)}")
    return float(np.linalg.norm(kraus_to_choi(K1).matrix - kraus_to_choi(K2).matrix))


def channels_equal(K1, K2, tol=1e-9):
    return choi_distance(K1, K2) <= tol


def recover_mixing_unitary(K1, K2, tol=1e-9, rel_tol=DEFAULT_REL_TOL):
    """Unitary U with ``B_j = sum_i U[j, i] A_i``, or None if the channels differ."""
    for name, K in (("first", K1), ("second", K2)):
        if gram_rank(K, rel_tol).rank < K.r:
            raise InputError(f"{name} Kraus list is not minimal")
    if K1.r != K2.r or not channels_equal(K1, K2, tol):
        return None
    W1 = frame_vectors(K1.stacked()).T
    W2 = frame_vectors(K2.stacked()).T
    U = (np.linalg.pinv(W1) @ W2).T
    if np.linalg.norm(U.conj().T @ U - np.eye(K1.r)) > tol:
        return None
    if np.linalg.norm(W1 @ U.T - W2) > tol:
        return None
    return U
