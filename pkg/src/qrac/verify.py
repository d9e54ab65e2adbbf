"""Cross-validation suites: closed forms vs the sphere-search oracle, and
Monte Carlo vs exact evaluation.

Also home to the random instance generators the check suites share: valid
Bell diagonal states drawn uniformly from the positivity tetrahedron and
decoding sets kept away from the degenerate configurations (parallel pairs,
coplanar triads, vanishing correlation entries) where the closed forms
switch to their fallback conventions.
"""

from __future__ import annotations

import sys
from typing import TextIO

import numpy as np

from .bloch import BellDiagonal
from .optimal import equal_projection_residual, orthogonal_min_2to1, pmax_2to1, pmax_3to1
from .oracle import SphereSearchConfig, oracle_orthogonal_min, oracle_pmax
from .rac import DecodingSet, RacTask, evaluate, simulate


def random_bell_diagonal(rng: np.random.Generator, min_t3: float = 0.0) -> BellDiagonal:
    """Uniform draw from the positivity tetrahedron, axes relabeled so that
    |T1| >= |T2| >= |T3|; optionally rejects |T3| < min_t3 (singular-ish T)."""
    while True:
        t = rng.uniform(-1.0, 1.0, size=3)
        eigs = (
            0.25 * (1 - t[0] - t[1] - t[2]),
            0.25 * (1 - t[0] + t[1] + t[2]),
            0.25 * (1 + t[0] - t[1] + t[2]),
            0.25 * (1 + t[0] + t[1] - t[2]),
        )
        if min(eigs) < 0.0:
            continue
        t = sorted(t, key=abs, reverse=True)
        if abs(t[2]) < min_t3:
            continue
        return BellDiagonal(t[0], t[1], t[2])


def random_unit(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm


def random_decodings(rng: np.random.Generator, n: int) -> DecodingSet:
    """Random decodings with |B0.B1| <= 0.95 (n=2) or triad volume >= 0.1 (n=3)."""
    while True:
        dirs = np.array([random_unit(rng) for _ in range(n)])
        if n == 2:
            if abs(float(dirs[0] @ dirs[1])) <= 0.95:
                return DecodingSet(dirs)
        else:
            if abs(float(np.cross(dirs[0], dirs[1]) @ dirs[2])) >= 0.1:
                return DecodingSet(dirs)


def closed_vs_oracle(
    n: int,
    cases: int,
    seed: int,
    sphere: SphereSearchConfig | None = None,
    min_t3: float = 0.05,
) -> tuple[float, float]:
    """Max |closed form - oracle| and max equal-projection residual over
    random non-degenerate instances."""
    rng = np.random.Generator(np.random.PCG64(seed))
    sphere = sphere or SphereSearchConfig()
    max_dev = 0.0
    max_residual = 0.0
    for _ in range(cases):
        state = random_bell_diagonal(rng, min_t3=min_t3).to_bloch()
        dec = random_decodings(rng, n)
        closed = pmax_2to1(state, dec) if n == 2 else pmax_3to1(state, dec)
        numeric = oracle_pmax(RacTask(n), state, dec, sphere)
        max_dev = max(max_dev, abs(closed.p_max - numeric.p_max))
        if closed.method == "closed_form":
            max_residual = max(
                max_residual, equal_projection_residual(state, closed.encodings, dec)
            )
    return max_dev, max_residual


def orthogonal_law(
    cases: int, seed: int, sphere: SphereSearchConfig | None = None
) -> float:
    """Max |oracle orthogonal minimum - (1/2)(1 + |T3|/sqrt(2))| over random
    Bell diagonal states."""
    rng = np.random.Generator(np.random.PCG64(seed))
    max_dev = 0.0
    for _ in range(cases):
        state = random_bell_diagonal(rng).to_bloch()
        closed = orthogonal_min_2to1(state)
        numeric = oracle_orthogonal_min(state, sphere)
        max_dev = max(max_dev, abs(closed - numeric))
    return max_dev


def simulate_vs_evaluate(
    trials: int, seed: int, n: int = 2
) -> tuple[float, float]:
    """(max |simulated - exact| per pair, max allowed 5-sigma band) on the
    benchmark state T = diag(1/2, 1/2, 0) with axis decodings."""
    state = BellDiagonal(0.5, 0.5, 0.0).to_bloch()
    dec = DecodingSet(np.eye(3)[:n])
    result = pmax_2to1(state, dec) if n == 2 else pmax_3to1(state, dec)
    enc = result.encodings
    task = RacTask(n)
    exact = evaluate(task, state, enc, dec)
    sampled = simulate(task, state, enc, dec, trials=trials, seed=seed)
    per_pair = trials // (task.num_strings * n)
    p = exact.per_pair
    sigma = np.sqrt(p * (1.0 - p) / per_pair)
    dev = np.abs(sampled.per_pair - exact.per_pair)
    return float(dev.max()), float((5.0 * sigma).max())


def run_verification(
    cases: int = 20,
    seed: int = 0,
    tol: float = 1e-4,
    sphere: SphereSearchConfig | None = None,
    trials: int = 200_000,
    out: TextIO = sys.stdout,
) -> int:
    """Run all suites, print one line per check, return the failure count."""
    failures = 0

    def report(name: str, dev: float, bound: float) -> None:
        nonlocal failures
        ok = dev <= bound
        if not ok:
            failures += 1
        print(f"{name}: max deviation {dev:.3e} (allowed {bound:.3e}) "
              f"{'ok' if ok else 'FAIL'}", file=out)

    for n in (2, 3):
        dev, residual = closed_vs_oracle(n, cases, seed + n, sphere)
        report(f"closed-form vs oracle, n={n}", dev, tol)
        report(f"equal-projection residual, n={n}", residual, 1e-9)
    dev = orthogonal_law(max(4, cases // 4), seed + 17, sphere)
    report("orthogonal-decoding law", dev, tol)
    dev, bound = simulate_vs_evaluate(trials, seed + 29)
    report("simulate vs evaluate (5 sigma)", dev, bound)
    return failures
