"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import time

import numpy as np

from chanfold.channels import (
    Isometry,
    KrausChannel,
    channels_equal,
    choi_distance,
    choi_to_kraus,
    extreme_example,
    kraus_to_choi,
    random_channel,
    recover_mixing_unitary,
)
from chanfold.circuits import audit_topology, parse_topology, required_params
from chanfold.decomposition import decompose_extreme, dependence_residual, find_dependence
from chanfold.extremality import RANK_EXCEEDS_INPUT_DIM, is_extreme
from chanfold.geometry import (
    choi_of_blocks,
    gauge_directions,
    numeric_choi_manifold_dim,
    psd_tangent_dim,
    pushforward_T,
    random_minimal_isometry,
)
from chanfold.io import load_json
from chanfold.linalg import DEFAULT_REL_TOL, haar_unitary, numerical_rank, partial_trace

from conftest import FIXTURES, I2, X, Y, Z

TOL = DEFAULT_REL_TOL


def report(n, name, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} [{n}] {name}: {detail}")
    assert ok, detail


def test_1_dimension_formula():
    start = time.perf_counter()
    bad, cases = [], 0
    for s in (1, 2, 3):
        for t in (1, 2, 3):
            for r in range(1, min(s * t, 4) + 1):
                if s > r * t:
                    continue
                for seed in range(5):
                    rep = numeric_choi_manifold_dim(s, t, r, seed)
                    cases += 1
                    if rep.numeric_dim != 2 * s * t * r - s * s - r * r:
                        bad.append((s, t, r, seed, rep.numeric_dim))
    elapsed = time.perf_counter() - start
    report(1, "dimension formula", not bad and elapsed < 60,
           f"{cases} cases, {len(bad)} mismatches {bad[:3]}, {elapsed:.2f} s")


def test_2_psd_tangent_dimension():
    start = time.perf_counter()
    bad = [(s, r, seed) for s in range(1, 5) for r in range(1, s + 1) for seed in range(5)
           if psd_tangent_dim(s, r, seed) != 2 * s * r - r * r]
    elapsed = time.perf_counter() - start
    report(2, "psd tangent dimension", not bad and elapsed < 10,
           f"{len(bad)} mismatches, {elapsed:.2f} s")


def test_3_extremality_ground_truths():
    rng = np.random.default_rng(0)
    examples = []
    for s, t in [(2, 2), (2, 3), (3, 3)]:
        psi = rng.standard_normal(t) + 1j * rng.standard_normal(t)
        examples.append(is_extreme(extreme_example(s, t, psi / np.linalg.norm(psi))).is_extreme)
    depol = is_extreme(KrausChannel.from_ops([I2 / 2, X / 2, Y / 2, Z / 2]))
    bitflip = KrausChannel.from_ops([I2 / np.sqrt(2), X / np.sqrt(2)])
    lam = find_dependence(bitflip)
    residual = dependence_residual(bitflip.stacked(), lam) if lam is not None else np.inf
    ok = (all(examples) and not depol.is_extreme and depol.reason == RANK_EXCEEDS_INPUT_DIM
          and not is_extreme(bitflip).is_extreme and residual <= 1e-10)
    report(3, "extremality ground truths", ok,
           f"examples {examples}, depolarizing reason {depol.reason}, bitflip witness residual {residual:.1e}")


def test_4_genericity():
    details, ok = [], True
    for s, t, r in [(2, 2, 2), (3, 3, 3)]:
        rng = np.random.default_rng(s)
        hits, confident_misses = 0, 0
        margins = []
        for _ in range(200):
            rep = is_extreme(random_channel(s, t, r, rng))
            margins.append(rep.margin)
            if rep.is_extreme:
                hits += 1
            elif rep.margin >= 10 * TOL:
                confident_misses += 1
        ok &= hits >= 199 and confident_misses == 0
        details.append(f"({s},{t},{r}) {hits}/200 extreme, min margin {min(margins):.2e}")
    report(4, "genericity", ok, "; ".join(details))


def test_5_conversions():
    rng = np.random.default_rng(5)
    grid = [(s, t, r) for s in (1, 2, 3) for t in (1, 2, 3) for r in range(1, min(s * t, 4) + 1) if s <= r * t]
    worst_dist = worst_trace = 0.0
    rank_ok = True
    for k in range(100):
        s, t, r = grid[k % len(grid)]
        K = random_channel(s, t, r, rng)
        C = kraus_to_choi(K)
        worst_dist = max(worst_dist, choi_distance(K, choi_to_kraus(C)))
        worst_trace = max(worst_trace, np.abs(partial_trace(C.matrix, s, t) - np.eye(s) / s).max())
        rank_ok &= numerical_rank(C.matrix).rank == K.r
    report(5, "conversions", worst_dist <= 1e-9 and worst_trace <= 1e-10 and rank_ok,
           f"max round-trip distance {worst_dist:.1e}, max tr_B error {worst_trace:.1e}, ranks equal {rank_ok}")


def test_6_unitary_freedom():
    rng = np.random.default_rng(6)
    worst, ok = 0.0, True
    for k in range(50):
        s, t, r = [(2, 2, 2), (2, 3, 3), (3, 2, 4), (2, 2, 4)][k % 4]
        K = random_channel(s, t, r, rng)
        U = haar_unitary(r, rng)
        mixed = K.mixed(U)
        found = recover_mixing_unitary(K, mixed)
        ok &= channels_equal(K, mixed) and found is not None
        if found is not None:
            worst = max(worst, np.abs(found - U).max())
    report(6, "unitary freedom", ok and worst <= 1e-9, f"50 trials, max |U_found - U| {worst:.1e}")


def test_7_decomposition_certificates():
    start = time.perf_counter()
    worst_w = worst_res = 0.0
    min_margin, max_terms, ok = np.inf, 0, True
    for r in (3, 4):
        for seed in range(20):
            res = decompose_extreme(kraus_to_choi(random_channel(2, 2, r, 100 * r + seed)))
            worst_w = max(worst_w, abs(res.weights.sum() - 1))
            worst_res = max(worst_res, res.residual)
            max_terms = max(max_terms, len(res.terms))
            ok &= res.split_tree_depth <= r - 1
            for _, leaf in res.terms:
                rep = is_extreme(choi_to_kraus(leaf))
                ok &= rep.is_extreme
                min_margin = min(min_margin, rep.margin)
    elapsed = time.perf_counter() - start
    ok &= worst_w <= 1e-12 and worst_res <= 1e-9 and min_margin > 10 * TOL and max_terms <= 33 and elapsed < 120
    report(7, "decomposition certificates", ok,
           f"weight error {worst_w:.1e}, residual {worst_res:.1e}, min leaf margin {min_margin:.2e}, "
           f"max terms {max_terms}, {elapsed:.2f} s")


def test_8_audit_thresholds():
    counts = (required_params(2, 2), required_params(2, 4), required_params(3, 3))
    rep = audit_topology(parse_topology(load_json(FIXTURES / "topology_3param.json")), seed=0)
    ok = counts == (8, 24, 36) and all(type(c) is int for c in counts)
    ok &= rep.p == 3 and rep.estimated_generated_dim <= 3 < 8 == rep.target_dim
    report(8, "audit thresholds", ok,
           f"required_params {counts}, 3-param fixture dim {rep.estimated_generated_dim} of target {rep.target_dim}")


def test_9_pushforward():
    rng = np.random.default_rng(9)
    eps, worst_fd, worst_gauge = 1e-5, 0.0, 0.0
    for k in range(20):
        s, t, r = [(2, 2, 2), (2, 3, 2), (3, 2, 3), (1, 2, 2)][k % 4]
        V = random_minimal_isometry(s, t, r, rng)
        dX = rng.standard_normal(V.matrix.shape) + 1j * rng.standard_normal(V.matrix.shape)
        dX /= np.linalg.norm(dX)
        fd = (choi_of_blocks(Isometry(s, t, r, V.matrix + eps * dX))
              - choi_of_blocks(Isometry(s, t, r, V.matrix - eps * dX))) / (2 * eps)
        worst_fd = max(worst_fd, np.linalg.norm(fd - pushforward_T(V, dX)))
        for G in gauge_directions(V):
            worst_gauge = max(worst_gauge, np.abs(pushforward_T(V, G)).max())
    report(9, "pushforward", worst_fd <= 1e-8 and worst_gauge <= 1e-10,
           f"max FD error {worst_fd:.1e}, max gauge image {worst_gauge:.1e}")
