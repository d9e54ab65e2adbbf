"""Brute-force verification of the optimal worst-case success probability.

For each string x the quantity to maximize over Alice's unit direction a is

    f_x(a) = min_k (1/2) (1 + (-1)^(x_k) a . T B_k),

a minimum of linear forms on the sphere.  The search is a coarse spherical
grid followed by derivative-free compass refinement in (theta, phi); the
function is piecewise smooth with corners where two forms cross, so the
refinement avoids gradients on purpose.  The overall optimum is the minimum
over x of the per-x maxima (each x is maximized independently), and
f_x(-a) = f_xbar(a) halves the work: only strings with x_0 = 0 are searched
and complements reuse the mirrored direction.

Deterministic throughout: fixed grid ordering, first maximizer wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import TwoQubitBloch
from .errors import FrameError, SizeMismatch, UnsupportedN
from .optimal import OptimalResult
from .rac import DecodingSet, EncodingSet, RacTask, bits, complement


@dataclass(frozen=True)
class SphereSearchConfig:
    coarse_grid: int = 180      # grid points per angle
    refine_iters: int = 200     # compass-search iterations
    refine_shrink: float = 0.7  # step shrink factor on a stalled iteration
    tolerance: float = 1e-6     # step floor; refinement stops below it

    def __post_init__(self):
        if self.coarse_grid < 8:
            raise ValueError("coarse_grid must be >= 8")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")
        if self.refine_iters < 1:
            raise ValueError("refine_iters must be >= 1")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


def _sphere_grid(g: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic (theta, phi) grid avoiding duplicate poles."""
    theta = (np.arange(g) + 0.5) * np.pi / g
    phi = np.arange(g) * 2.0 * np.pi / g
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    tt = tt.ravel()
    pp = pp.ravel()
    dirs = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=1
    )
    return dirs, tt, pp


def _direction(theta: float, phi: float) -> np.ndarray:
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])

# The maximizer of a min of linear forms sits on a ridge or corner where the
# active forms cross; a fixed compass can stall there because the improving
# cone narrows as the point approaches the optimum.  Rotating the direction
# set by a deterministic irrational turn each iteration keeps the search
# escaping until the step floor is reached.
_GOLDEN_TURN = 2.0 * np.pi * 0.3819660112501051


def _refine_max(v: np.ndarray, theta: float, phi: float, f0: float, cfg: SphereSearchConfig):
    """Pattern-search a maximum of g(a) = min over rows of a . v from (theta, phi).

    Expands the step on success so the walk can travel along a ridge whose
    along-ridge gradient is weak (the coarse grid may start far from the
    maximizer in that direction), and shrinks it on a stalled sweep.
    """
    step = np.pi / cfg.coarse_grid
    best = f0
    for it in range(cfg.refine_iters):
        if step < cfg.tolerance:
            break
        base = it * _GOLDEN_TURN
        improved = False
        for j in range(8):
            ang = base + j * (np.pi / 4.0)
            t2 = theta + np.cos(ang) * step
            p2 = phi + np.sin(ang) * step
            val = float(np.min(_direction(t2, p2) @ v.T))
            if val > best:
                best, theta, phi, improved = val, t2, p2, True
        if improved:
            step = min(step / cfg.refine_shrink, np.pi / 8.0)
        else:
            step *= cfg.refine_shrink
    return best, _direction(theta, phi)


def oracle_pmax(
    task: RacTask,
    s: TwoQubitBloch,
    dec: DecodingSet,
    cfg: SphereSearchConfig | None = None,
) -> OptimalResult:
    """Maximize the worst-case success probability by direct search.

    Never consults the closed forms; intended as their independent check.
    """
    cfg = cfg or SphereSearchConfig()
    if s.frame != "diagonal":
        raise FrameError("oracle_pmax requires the diagonal frame; canonicalize first")
    n = task.n
    if len(dec) != n:
        raise SizeMismatch(f"need {n} decodings for n={n}, got {len(dec)}")

    tb = dec.directions @ s.T  # row k = T B_k
    dirs, thetas, phis = _sphere_grid(cfg.coarse_grid)
    dots = dirs @ tb.T  # (grid, n)

    num_strings = 1 << n
    maxima = np.empty(num_strings)
    encodings = np.zeros((num_strings, 3))
    for x in range(num_strings >> 1):  # x_0 = 0; complements by symmetry
        signs = np.array([1.0 if b == 0 else -1.0 for b in bits(x, n)])
        g = np.min(dots * signs, axis=1)
        idx = int(np.argmax(g))  # first maximizer wins
        fmax, a = _refine_max(tb * signs[:, None], thetas[idx], phis[idx], float(g[idx]), cfg)
        xc = complement(x, n)
        maxima[x] = fmax
        maxima[xc] = fmax
        encodings[x] = a
        encodings[xc] = -a
    p_max = 0.5 * (1.0 + float(maxima.min()))
    return OptimalResult(p_max, EncodingSet(encodings), "oracle_fallback", False)


def _pair_pmax_grid(dots0: np.ndarray, dots1: np.ndarray) -> np.ndarray:
    """Vectorized coarse estimate of the 2->1 optimum for many decoding pairs.

    dots0/dots1 are grid-direction dot products with T B0 / T B1 per pair,
    shape (grid, npairs).  Returns (1/2)(1 + min over the two independent
    sign patterns of the per-pattern grid maxima).
    """
    m00 = np.max(np.minimum(dots0, dots1), axis=0)
    m01 = np.max(np.minimum(dots0, -dots1), axis=0)
    return 0.5 * (1.0 + np.minimum(m00, m01))


def _pair_pmax_refined(
    tb0: np.ndarray, tb1: np.ndarray, dirs: np.ndarray, inner: SphereSearchConfig
) -> float:
    """High-accuracy 2->1 optimum for one decoding pair (both sign patterns)."""
    worst = np.inf
    for s1 in (1.0, -1.0):
        v = np.stack([tb0, s1 * tb1])
        g = np.min(dirs @ v.T, axis=1)
        idx = int(np.argmax(g))
        theta = np.arccos(np.clip(dirs[idx, 2], -1.0, 1.0))
        phi = np.arctan2(dirs[idx, 1], dirs[idx, 0])
        fmax, _ = _refine_max(v, theta, phi, float(g[idx]), inner)
        worst = min(worst, fmax)
    return 0.5 * (1.0 + worst)


def _orthogonal_pair(alpha: float, beta: float, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal decoding pair from plane angles (alpha, beta) and an
    in-plane rotation gamma of the pair within span{B+, B-}."""
    sa, ca = np.sin(alpha), np.cos(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    bp = np.array([sa * cb, sa * sb, ca])
    bm = np.array([-ca * cb, -ca * sb, sa])
    cg, sg = np.cos(gamma), np.sin(gamma)
    return cg * bp + sg * bm, -sg * bp + cg * bm


def oracle_orthogonal_min(s: TwoQubitBloch, cfg: SphereSearchConfig | None = None) -> float:
    """Minimize the 2->1 optimum over all orthogonal decoding pairs.

    The pair is parameterized by the plane angles (alpha, beta) of the
    sum/difference directions and an in-plane rotation gamma; a coarse
    3-angle grid (evaluated with the vectorized sphere-grid oracle) seeds
    compass refinements from the best few cells.  Each refined objective
    call runs the full grid-plus-refinement sphere search, so the result is
    independent of the closed forms it is meant to check.
    """
    cfg = cfg or SphereSearchConfig()
    if s.frame != "diagonal":
        raise FrameError("oracle_orthogonal_min requires the diagonal frame")
    tdiag = np.diag(s.T).copy()
    tmat = np.diag(tdiag)

    # stage 1: coarse scan, shared sphere grid across all candidate pairs
    coarse_sphere = min(cfg.coarse_grid, 64)
    dirs, _, _ = _sphere_grid(coarse_sphere)
    alphas = np.linspace(0.0, np.pi, 15)
    betas = np.linspace(0.0, 2.0 * np.pi, 29, endpoint=False)
    gammas = np.linspace(0.0, np.pi / 2.0, 9, endpoint=False)
    aa, bb, gg = np.meshgrid(alphas, betas, gammas, indexing="ij")
    angles = np.stack([aa.ravel(), bb.ravel(), gg.ravel()], axis=1)

    sa, ca = np.sin(angles[:, 0]), np.cos(angles[:, 0])
    cb, sb = np.cos(angles[:, 1]), np.sin(angles[:, 1])
    cg, sg = np.cos(angles[:, 2]), np.sin(angles[:, 2])
    bp = np.stack([sa * cb, sa * sb, ca], axis=1)
    bm = np.stack([-ca * cb, -ca * sb, sa], axis=1)
    b0 = cg[:, None] * bp + sg[:, None] * bm
    b1 = -sg[:, None] * bp + cg[:, None] * bm

    values = np.empty(angles.shape[0])
    chunk = 512
    for lo in range(0, angles.shape[0], chunk):
        hi = min(lo + chunk, angles.shape[0])
        d0 = dirs @ (b0[lo:hi] @ tmat).T
        d1 = dirs @ (b1[lo:hi] @ tmat).T
        values[lo:hi] = _pair_pmax_grid(d0, d1)

    # stage 2: compass walks from the best coarse cells with a cheap inner
    # solve; only the final winner is re-evaluated at full accuracy (the walk
    # needs ranking, not tight values)
    walk_inner = SphereSearchConfig(
        coarse_grid=coarse_sphere,
        refine_iters=80,
        refine_shrink=cfg.refine_shrink,
        tolerance=1e-5,
    )
    final_inner = SphereSearchConfig(
        coarse_grid=coarse_sphere,
        refine_iters=max(cfg.refine_iters, 400),
        refine_shrink=cfg.refine_shrink,
        tolerance=min(cfg.tolerance, 1e-7),
    )

    def objective(a: float, b: float, g: float, inner: SphereSearchConfig) -> float:
        v0, v1 = _orthogonal_pair(a, b, g)
        return _pair_pmax_refined(tmat @ v0, tmat @ v1, dirs, inner)

    order = np.argsort(values, kind="stable")
    best = np.inf
    for idx in order[:3]:
        a, b, g = (float(v) for v in angles[idx])
        val = objective(a, b, g, walk_inner)
        step = float(max(np.pi / 14, 0.15))
        for _ in range(cfg.refine_iters):
            if step < 1e-3:
                break
            improved = False
            for axis in range(3):
                for sgn in (1.0, -1.0):
                    trial = [a, b, g]
                    trial[axis] += sgn * step
                    cand = objective(trial[0], trial[1], trial[2], walk_inner)
                    if cand < val - 1e-12:
                        val, (a, b, g), improved = cand, tuple(trial), True
            if not improved:
                step *= cfg.refine_shrink
        best = min(best, objective(a, b, g, final_inner))
    return float(best)
