"""Dense complex linear algebra used throughout the package.

Composite indices are row-major over (factor1, factor2): index ``i*d2 + b``
addresses ``|i> (x) |b>``. Every tensor-product and partial-trace routine in
the package follows this convention.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError

DEFAULT_REL_TOL = 1e-10


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray
    threshold: float
    margin: float

    def to_dict(self):
        return {
            "rank": self.rank,
            "singular_values": [float(x) for x in self.singular_values],
            "threshold": self.threshold,
            "margin": self.margin,
        }


def as_matrix(M, name="matrix"):
    """Coerce to a finite 2-D complex128 array or raise InputError."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise InputError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def numerical_rank(M, rel_tol=DEFAULT_REL_TOL, scale=0.0):
    """Rank of ``M`` by relative SVD threshold ``rel_tol * sigma_1``.

    The full singular spectrum is returned so borderline decisions can be
    audited. ``margin`` is the smallest retained singular value divided by the
    largest (0 when nothing is retained).

    ``scale`` sets a floor under sigma_1 in the threshold, for matrices with a
    known natural magnitude that may be pure roundoff (e.g. the differential
    of a constant map).
    """
    if rel_tol <= 0:
        raise InputError("rel_tol must be positive")
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise InputError(f"rank needs a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    sv = np.linalg.svd(A, compute_uv=False)
    top = sv[0] if sv.size else 0.0
    threshold = rel_tol * max(top, scale)
    if top <= threshold or top == 0.0:
        return RankReport(0, sv, rel_tol, 0.0)
    rank = int(np.count_nonzero(sv > threshold))
    margin = float(sv[rank - 1] / top) if rank else 0.0
    return RankReport(rank, sv, rel_tol, margin)


def partial_trace(M, d1, d2, which="second"):
    """Trace out one factor of a (d1*d2)-dimensional square matrix."""
    A = as_matrix(M)
    if A.shape != (d1 * d2, d1 * d2):
        raise InputError(f"expected a {d1 * d2}x{d1 * d2} matrix, got {A.shape}")
    T = A.reshape(d1, d2, d1, d2)
    if which == "second":
        return np.einsum("ibjb->ij", T)
    if which == "first":
        return np.einsum("ibic->bc", T)
    raise InputError(f"which must be 'first' or 'second', not {which!r}")


def haar_isometry(in_dim, out_dim, seed=None):
    """Haar-distributed ``out_dim x in_dim`` isometry.

    QR of a complex Ginibre matrix, with the columns of Q rotated by the
    phases of diag(R) so that the factorization is unique.
    """
    if in_dim < 1 or out_dim < in_dim:
        raise InputError(f"need 1 <= in_dim <= out_dim, got {in_dim}, {out_dim}")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((out_dim, in_dim)) + 1j * rng.standard_normal((out_dim, in_dim))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def haar_unitary(dim, seed=None):
    return haar_isometry(dim, dim, seed)


def herm_eig(M, herm_tol=1e-10):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"matrix must be square, got {A.shape}")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > herm_tol * max(scale, np.finfo(float).tiny):
        raise InputError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh((A + A.conj().T) / 2)


def vec(M):
    """Column-stacking vectorization: ``vec(M)[j*rows + i] == M[i, j]``."""
    return as_matrix(M).reshape(-1, order="F")


def unvec(v, rows, cols):
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != rows * cols:
        raise InputError(f"cannot reshape {v.size} entries into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def realvec(M):
    """Identify C^n with R^2n: real parts followed by imaginary parts."""
    v = np.asarray(M, dtype=complex).reshape(-1)
    return np.concatenate([v.real, v.imag])


def null_vector(A):
    """Deterministic unit null-space direction of ``A``.

    Right singular vector of the smallest singular value, phase-fixed so the
    first entry of significant modulus is real and positive. Returns the
    vector and its singular value.
    """
    A = np.asarray(A)
    _, sv, Vh = np.linalg.svd(A)
    n = A.shape[1]
    if sv.size < n:
        sigma = 0.0
    else:
        sigma = float(sv[-1])
    v = Vh[-1].conj()
    lead = np.flatnonzero(np.abs(v) > 1e-8 * np.abs(v).max())[0]
    v = v * (abs(v[lead]) / v[lead])
    v[lead] = abs(v[lead])
    if np.isrealobj(A):
        v = v.real
    return v, sigma
