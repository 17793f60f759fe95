"""Minimality and extremality tests for Kraus representations.

A channel with minimal Kraus operators {A_i} is extreme iff the r^2 products
A_i^dag A_j are linearly independent in C^{s x s}; in particular r > s rules
extremality out. Decisions are made by SVD rank with a relative threshold and
always come with the singular spectrum.
"""

from dataclasses import dataclass

import numpy as np

from .channels import gram_rank, random_channel
from .errors import InputError
from .linalg import DEFAULT_REL_TOL, RankReport, numerical_rank

CRITERION_RANK = "criterion_rank"
RANK_EXCEEDS_INPUT_DIM = "rank_exceeds_input_dim"
NOT_MINIMAL = "not_minimal"


@dataclass(frozen=True)
class ExtremalityReport:
    is_extreme: bool
    reason: str
    products_rank: RankReport
    margin: float
    minimality: RankReport

    def to_dict(self):
        return {
            "is_extreme": self.is_extreme,
            "reason": self.reason,
            "margin": self.margin,
            "products_rank": self.products_rank.to_dict(),
            "minimality": self.minimality.to_dict(),
        }


def is_minimal(K, rel_tol=DEFAULT_REL_TOL):
    report = gram_rank(K, rel_tol)
    return report.rank == K.r, report


def criterion_matrix(ops):
    """s^2 x r^2 matrix with column ``i*r + j`` equal to vec(A_i^dag A_j)."""
    ops = np.asarray(ops)
    r, _, s = ops.shape
    prods = np.einsum("ibs,jbu->ijsu", ops.conj(), ops)
    # vec is column stacking: entry (row, col) of A_i^dag A_j lands at col*s + row
    return prods.transpose(0, 1, 3, 2).reshape(r * r, s * s).T


def _decisive_ratio(report, n):
    """sigma_n / sigma_1 of a criterion matrix, 0 if it has fewer than n values."""
    sv = report.singular_values
    if n > sv.size or sv.size == 0 or sv[0] == 0:
        return 0.0
    return float(sv[n - 1] / sv[0])


def is_extreme(K, rel_tol=DEFAULT_REL_TOL):
    """Extremality of ``K`` in the set of s -> t channels.

    ``margin`` is sigma_{r^2} / sigma_1 of the criterion matrix: for an extreme
    channel the smallest retained singular value, otherwise how far the
    decisive singular value sits below the threshold.
    """
    minimal, min_report = is_minimal(K, rel_tol)
    products = numerical_rank(criterion_matrix(K.stacked()), rel_tol)
    margin = _decisive_ratio(products, K.r * K.r)
    if not minimal:
        return ExtremalityReport(False, NOT_MINIMAL, products, margin, min_report)
    if K.r > K.s:
        return ExtremalityReport(False, RANK_EXCEEDS_INPUT_DIM, products, margin, min_report)
    extreme = products.rank == K.r * K.r
    return ExtremalityReport(extreme, CRITERION_RANK, products, margin, min_report)


@dataclass(frozen=True)
class MarginSweep:
    s: int
    t: int
    r: int
    n_samples: int
    fraction_extreme: float
    margin_min: float
    margin_median: float
    margin_max: float
    margins: tuple

    def to_dict(self):
        d = dict(self.__dict__)
        d["margins"] = list(self.margins)
        return d


def extremality_margin_sweep(s, t, r, n_samples, seed=0, rel_tol=DEFAULT_REL_TOL):
    if r > s:
        raise InputError(f"sweep needs r <= s, got r={r}, s={s}")
    rng = np.random.default_rng(seed)
    flags, margins = [], []
    for _ in range(n_samples):
        rep = is_extreme(random_channel(s, t, r, rng), rel_tol)
        flags.append(rep.is_extreme)
        margins.append(rep.margin)
    m = np.array(margins)
    return MarginSweep(
        s, t, r, n_samples,
        fraction_extreme=float(np.mean(flags)),
        margin_min=float(m.min()),
        margin_median=float(np.median(m)),
        margin_max=float(m.max()),
        margins=tuple(float(x) for x in m),
    )
