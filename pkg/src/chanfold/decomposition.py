"""Convex decomposition of channels into extreme channels.

A non-extreme Choi state is split along a traceless direction ``D`` built from
a linear dependence among the products A_j^dag A_i, walking in both directions
until the boundary of the PSD cone. Both endpoints have strictly smaller rank,
so recursion terminates at extreme leaves. The leaf list is then shrunk by
Caratheodory elimination of affine dependences.
"""

from dataclasses import dataclass, field

import numpy as np

from .channels import ChoiState, choi_to_kraus, frame_vectors, gram_rank
from .errors import InputError, NumericalError
from .extremality import criterion_matrix, is_extreme
from .io import encode_matrix
from .linalg import DEFAULT_REL_TOL, herm_eig, null_vector, numerical_rank, partial_trace, realvec

WITNESS_TOL = 1e-10
AMBIGUOUS_FACTOR = 10.0


@dataclass(frozen=True)
class SplitCertificate:
    lam: np.ndarray
    t_plus: float
    t_minus: float
    parent_rank: int
    child_ranks: tuple
    weight: float
    mixture_error: float

    def to_dict(self):
        return {
            "lambda": encode_matrix(self.lam),
            "t_plus": self.t_plus,
            "t_minus": self.t_minus,
            "parent_rank": self.parent_rank,
            "child_ranks": list(self.child_ranks),
            "weight": self.weight,
            "mixture_error": self.mixture_error,
        }


@dataclass
class DecompositionResult:
    terms: list
    residual: float
    split_tree_depth: int
    certificates: list = field(default_factory=list)
    leaf_margins: list = field(default_factory=list)
    pre_reduction_count: int = 0

    @property
    def weights(self):
        return np.array([w for w, _ in self.terms])


class DecompositionDeadlock(NumericalError):
    """A leaf is neither certifiably extreme nor splittable."""

    code = "decomposition_deadlock"

    def __init__(self, message, leaf, criterion_margin, minimality_margin):
        super().__init__(message)
        self.leaf = leaf
        self.criterion_margin = criterion_margin
        self.minimality_margin = minimality_margin


def dependence_residual(ops, lam):
    """Frobenius norm of ``sum_ij lam[i, j] A_j^dag A_i``."""
    ops = np.asarray(ops)
    rel = np.einsum("ij,jbs,ibu->su", lam, ops.conj(), ops)
    return float(np.linalg.norm(rel))


def find_dependence(K, rel_tol=DEFAULT_REL_TOL):
    """Hermitian ``lam`` with ``sum_ij lam_ij A_j^dag A_i = 0``, or None.

    The null vector ``mu`` (coefficient of A_i^dag A_j at ``i*r + j``) gives
    ``lam = mu^T``. The solution set is closed under ``dagger``, so both
    Hermitian parts solve the relation; the one with larger norm is kept.
    """
    if gram_rank(K, rel_tol).rank < K.r:
        raise InputError("find_dependence needs a minimal Kraus list")
    r = K.r
    M = criterion_matrix(K.stacked())
    if numerical_rank(M, rel_tol).rank == r * r:
        return None
    mu, _ = null_vector(M)
    lam = mu.reshape(r, r).T
    herm = (lam + lam.conj().T) / 2
    anti = (lam - lam.conj().T) / 2j
    lam = herm if np.linalg.norm(herm) >= np.linalg.norm(anti) else anti
    return lam / np.linalg.norm(lam)


def split_once(C, lam, rel_tol=DEFAULT_REL_TOL):
    """Split ``C = p*C1 + (1-p)*C2`` along the dependence ``lam``.

    ``lam`` must come from :func:`find_dependence` applied to
    ``choi_to_kraus(C, rel_tol)``.
    """
    K = choi_to_kraus(C, rel_tol)
    ops = K.stacked()
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (K.r, K.r):
        raise InputError(f"lambda must be {K.r}x{K.r}, got {lam.shape}")
    norm = np.linalg.norm(lam)
    if norm == 0 or dependence_residual(ops, lam) > WITNESS_TOL * norm:
        raise InputError("lambda is not a dependence witness for this Choi state")

    s, t = C.s, C.t
    w = frame_vectors(ops)
    D = w.T @ lam @ w.conj() / s
    D = (D + D.conj().T) / 2
    scale = np.linalg.norm(C.matrix)
    if abs(np.trace(D)) > 1e-10 * norm or np.linalg.norm(partial_trace(D, s, t)) > 1e-10 * norm:
        raise NumericalError("split direction is not traceless on the input system")

    # generalized eigenvalues of D relative to C on the support of C
    evals, evecs = herm_eig(C.matrix)
    keep = evals > rel_tol * evals[-1]
    P = evecs[:, keep]
    inv_sqrt = 1 / np.sqrt(evals[keep])
    G = inv_sqrt[:, None] * (P.conj().T @ D @ P) * inv_sqrt[None, :]
    off = D - P @ (P.conj().T @ D @ P) @ P.conj().T
    if np.linalg.norm(off) > 1e-9 * max(np.linalg.norm(D), scale):
        raise NumericalError("split direction leaves the support of the Choi state")
    mu = np.linalg.eigvalsh((G + G.conj().T) / 2)
    if mu[0] >= 0 or mu[-1] <= 0:
        raise NumericalError("split direction is semidefinite on the support")
    t_plus = -1 / mu[0]
    t_minus = 1 / mu[-1]
    C1 = np.asarray(C.matrix) + t_plus * D
    C2 = np.asarray(C.matrix) - t_minus * D
    C1 = (C1 + C1.conj().T) / 2
    C2 = (C2 + C2.conj().T) / 2
    p = t_minus / (t_plus + t_minus)
    mix_err = float(np.linalg.norm(p * C1 + (1 - p) * C2 - C.matrix))

    parent_rank = K.r
    ranks = (numerical_rank(C1, rel_tol).rank, numerical_rank(C2, rel_tol).rank)
    if max(ranks) >= parent_rank:
        raise NumericalError(f"split did not lower the rank: {parent_rank} -> {ranks}")
    cert = SplitCertificate(lam, float(t_plus), float(t_minus), parent_rank, ranks, float(p), mix_err)
    return float(p), ChoiState(s, t, C1), ChoiState(s, t, C2), cert


def _classify_leaf(C, rel_tol):
    """Return (is_extreme, lam, kraus, report) for a node of the split tree."""
    K = choi_to_kraus(C, rel_tol)
    report = is_extreme(K, rel_tol)
    if report.is_extreme:
        if report.margin <= AMBIGUOUS_FACTOR * rel_tol:
            raise DecompositionDeadlock(
                f"leaf of rank {K.r} has criterion margin {report.margin:.3e} inside the "
                f"ambiguous band [{rel_tol:g}, {AMBIGUOUS_FACTOR * rel_tol:g}]",
                C, report.margin, report.minimality.margin,
            )
        return True, None, K, report
    lam = find_dependence(K, rel_tol)
    if lam is None:
        raise DecompositionDeadlock(
            "leaf failed the criterion but no dependence was found",
            C, report.margin, report.minimality.margin,
        )
    return False, lam, K, report


def caratheodory_reduce(terms, ambient_real_dim=None, rel_tol=DEFAULT_REL_TOL):
    """Remove affine dependences among weighted Choi states.

    Each step moves weight along an affine null direction until one weight
    vanishes, preserving the mixture. Stops once the remaining states are
    affinely independent, hence at most ``ambient_real_dim + 1`` of them.
    """
    terms = [(float(w), C) for w, C in terms]
    if not terms:
        return terms
    if any(w <= 0 for w, _ in terms):
        raise InputError("weights must be positive")
    if abs(sum(w for w, _ in terms) - 1) > 1e-9:
        raise InputError("weights must sum to 1")
    dims = {(C.s, C.t) for _, C in terms}
    if len(dims) != 1:
        raise InputError(f"terms have mixed dimensions {sorted(dims)}")
    (s, t), = dims
    if ambient_real_dim is None:
        ambient_real_dim = 2 * s * s * t * t

    weights = np.array([w for w, _ in terms])
    states = [C for _, C in terms]
    while len(states) > 1:
        A = np.stack([realvec(C.matrix) for C in states], axis=1)
        A = np.vstack([A, np.ones((1, len(states)))])
        if numerical_rank(A, rel_tol).rank == len(states):
            break
        c, _ = null_vector(A)
        if c.max() <= 0:
            c = -c
        pos = c > 0
        ratios = np.full(c.shape, np.inf)
        ratios[pos] = weights[pos] / c[pos]
        k = int(np.argmin(ratios))
        weights = weights - ratios[k] * c
        weights[k] = 0.0
        alive = weights > 1e-15
        weights = weights[alive]
        states = [C for C, a in zip(states, alive) if a]
    if len(states) > ambient_real_dim + 1:
        raise NumericalError(
            f"{len(states)} terms remain above the bound {ambient_real_dim + 1}; "
            "check the rank tolerance"
        )
    weights = weights / weights.sum()
    return list(zip(weights.tolist(), states))


def decompose_extreme(C, rel_tol=DEFAULT_REL_TOL, max_depth=None, reduce=True):
    """Write ``C`` as a convex combination of extreme channels.

    Leaves and certificates are produced in left-to-right tree order, so the
    result is deterministic for fixed inputs and tolerances.
    """
    C.validate(1e-9)
    leaves, certs, margins = [], [], []
    depth_seen = 0

    def visit(node, weight, depth):
        nonlocal depth_seen
        depth_seen = max(depth_seen, depth)
        if max_depth is not None and depth > max_depth:
            raise NumericalError(f"split tree exceeded max depth {max_depth}")
        extreme, lam, _, report = _classify_leaf(node, rel_tol)
        if extreme:
            leaves.append((weight, node))
            margins.append(report.margin)
            return
        p, left, right, cert = split_once(node, lam, rel_tol)
        certs.append(cert)
        visit(left, weight * p, depth + 1)
        visit(right, weight * (1 - p), depth + 1)

    visit(C, 1.0, 0)
    pre_count = len(leaves)
    terms = caratheodory_reduce(leaves, 2 * C.s ** 2 * C.t ** 2, rel_tol) if reduce else leaves
    if reduce:
        # reduction only drops leaves; map surviving margins back by identity
        index = {id(node): m for (_, node), m in zip(leaves, margins)}
        margins = [index[id(node)] for _, node in terms]
    recon = sum(w * np.asarray(node.matrix) for w, node in terms)
    residual = float(np.linalg.norm(recon - C.matrix))
    return DecompositionResult(
        terms=terms,
        residual=residual,
        split_tree_depth=depth_seen,
        certificates=certs,
        leaf_margins=margins,
        pre_reduction_count=pre_count,
    )
