"""Closed-form optimal encodings and worst-case success probabilities.

Both results assume the canonical diagonal frame.  Writing s_k = (-1)^(x_k)
and B_k for the decoding directions:

  2 -> 1:  p = (1/2) [1 + min over (x0, x1) of
               (1 + s0 s1 B0.B1) / || T^-1 (s0 B0 + s1 B1) || ]
           with optimal encodings A_x = T^-1 (s0 B0 + s1 B1), normalized.

  3 -> 1:  p = (1/2) [1 + |(B0 x B1).B2| / max over (x0, x1, x2) of
               || T^-1 (s0 B1xB2 + s1 B2xB0 + s2 B0xB1) || ]
           with encodings A_x = T^-1 (s0 B1xB2 + s1 B2xB0 + s2 B0xB1),
           normalized and sign-fixed so that projections are positive.

The symmetric 3 -> 1 encoding above makes the projections of A_x onto all
three vectors s_k T B_k equal (the optimality condition); the common value
is the signed decoding-triad volume divided by the norm in the denominator.

Singular T convention: if the bracketed vector has a nonzero component
along an axis with T_i = 0, the norm is treated as infinite and that term
contributes 0; such results are flagged degenerate and their encodings are
produced by the brute-force sphere search instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bloch import TwoQubitBloch
from .errors import (
    CoplanarDecodings,
    DegenerateDecodings,
    FrameError,
    QracError,
    SizeMismatch,
)
from .rac import DecodingSet, EncodingSet, RacTask, bits

EPS_COPLANAR = 1e-9   # |triple product| below this counts as coplanar
EPS_COMPONENT = 1e-12  # component along a null axis below this counts as zero

Method = Literal["closed_form", "oracle_fallback"]


@dataclass(frozen=True)
class OptimalResult:
    """Best worst-case success probability and an achieving encoding set."""

    p_max: float
    encodings: EncodingSet
    method: Method
    degenerate: bool


def _require_diagonal(s: TwoQubitBloch) -> np.ndarray:
    if s.frame != "diagonal":
        raise FrameError("closed forms require the diagonal frame; canonicalize first")
    return np.diag(s.T).copy()


def _inverse_apply(tdiag: np.ndarray, w: np.ndarray) -> np.ndarray | None:
    """T^-1 w for diagonal T, or None when w leaks onto a null axis."""
    zero = tdiag == 0.0
    if np.any(np.abs(w[zero]) > EPS_COMPONENT):
        return None
    out = np.zeros(3)
    nz = ~zero
    out[nz] = w[nz] / tdiag[nz]
    return out


def _oracle_encodings(task: RacTask, s: TwoQubitBloch, dec: DecodingSet) -> EncodingSet:
    from .oracle import oracle_pmax  # deferred: oracle depends on this module

    return oracle_pmax(task, s, dec).encodings


def pmax_2to1(s: TwoQubitBloch, dec: DecodingSet) -> OptimalResult:
    """Optimal 2 -> 1 worst-case success probability for fixed decodings."""
    tdiag = _require_diagonal(s)
    if len(dec) != 2:
        raise SizeMismatch(f"2->1 needs 2 decodings, got {len(dec)}")
    b0, b1 = dec[0], dec[1]
    dot = float(b0 @ b1)
    if min(np.linalg.norm(b0 + b1), np.linalg.norm(b0 - b1)) < 1e-9:
        raise DegenerateDecodings("decoding directions coincide up to sign")

    terms = np.empty(4)
    encodings = np.zeros((4, 3))
    degenerate = False
    for x in range(4):
        x0, x1 = bits(x, 2)
        s0 = 1.0 if x0 == 0 else -1.0
        s1 = 1.0 if x1 == 0 else -1.0
        w = s0 * b0 + s1 * b1
        num = 1.0 + s0 * s1 * dot
        y = _inverse_apply(tdiag, w)
        if y is None:
            terms[x] = 0.0
            degenerate = True
        else:
            norm = float(np.linalg.norm(y))
            terms[x] = num / norm
            encodings[x] = y / norm
    p_max = 0.5 * (1.0 + float(terms.min()))
    if degenerate:
        enc = _oracle_encodings(RacTask(2), s, dec)
        return OptimalResult(p_max, enc, "oracle_fallback", True)
    return OptimalResult(p_max, EncodingSet(encodings), "closed_form", False)


def pmax_3to1(
    s: TwoQubitBloch, dec: DecodingSet, allow_oracle_fallback: bool = False
) -> OptimalResult:
    """Optimal 3 -> 1 worst-case success probability for fixed decodings.

    Raises CoplanarDecodings when the decoding triad has (near-)zero volume;
    pass allow_oracle_fallback=True to answer with the sphere search instead.
    """
    tdiag = _require_diagonal(s)
    if len(dec) != 3:
        raise SizeMismatch(f"3->1 needs 3 decodings, got {len(dec)}")
    b0, b1, b2 = dec[0], dec[1], dec[2]
    crosses = (np.cross(b1, b2), np.cross(b2, b0), np.cross(b0, b1))
    volume = float(crosses[2] @ b2)  # = (B0 x B1).B2
    if abs(volume) <= EPS_COPLANAR:
        if not allow_oracle_fallback:
            raise CoplanarDecodings("decoding directions are coplanar")
        from .oracle import oracle_pmax

        result = oracle_pmax(RacTask(3), s, dec)
        return OptimalResult(result.p_max, result.encodings, "oracle_fallback", True)

    sign = 1.0 if volume > 0 else -1.0
    terms = np.empty(8)
    encodings = np.zeros((8, 3))
    degenerate = False
    for x in range(8):
        xb = bits(x, 3)
        w = np.zeros(3)
        for k in range(3):
            w += (1.0 if xb[k] == 0 else -1.0) * crosses[k]
        y = _inverse_apply(tdiag, w)
        if y is None:
            terms[x] = 0.0
            degenerate = True
        else:
            norm = float(np.linalg.norm(y))
            terms[x] = abs(volume) / norm
            encodings[x] = sign * y / norm
    p_max = 0.5 * (1.0 + float(terms.min()))
    if degenerate:
        enc = _oracle_encodings(RacTask(3), s, dec)
        return OptimalResult(p_max, enc, "oracle_fallback", True)
    return OptimalResult(p_max, EncodingSet(encodings), "closed_form", False)


def equal_projection_residual(s: TwoQubitBloch, enc: EncodingSet, dec: DecodingSet) -> float:
    """How far the encodings are from projecting equally onto all s_k T B_k.

    Returns max over x of (max_k - min_k) of (-1)^(x_k) A_x . (T B_k);
    zero means the optimality condition holds exactly.
    """
    _require_diagonal(s)
    n = len(dec)
    if len(enc) != 1 << n:
        raise SizeMismatch(f"need {1 << n} encodings for n={n}, got {len(enc)}")
    tb = dec.directions @ s.T  # row k = T B_k (T symmetric)
    worst = 0.0
    for x in range(1 << n):
        xb = bits(x, n)
        projs = [
            (1.0 if xb[k] == 0 else -1.0) * float(enc[x] @ tb[k]) for k in range(n)
        ]
        worst = max(worst, max(projs) - min(projs))
    return worst


def orthogonal_min_2to1(s: TwoQubitBloch, verify: bool = False, verify_tol: float = 1e-6) -> float:
    """Worst 2 -> 1 optimum over all orthogonal decoding pairs.

    Equals (1/2)(1 + |T3| / sqrt(2)) with T3 the smallest-magnitude diagonal
    entry.  With verify=True the value is re-derived numerically: the pair is
    written through its sum/difference directions B+- = (B0 +- B1)/sqrt(2),
    for which the four sign patterns give max norm sqrt(2) max_(+,-)
    ||T^-1 B+-||, and the minimum over the two-angle family

        B+ = (sin a cos b, sin a sin b, cos a)
        B- = (-cos a cos b, -cos a sin b, sin a)

    is located by grid search plus local refinement and compared against the
    closed form to verify_tol.
    """
    tdiag = _require_diagonal(s)
    t3 = abs(float(tdiag[2]))
    closed = 0.5 * (1.0 + t3 / np.sqrt(2.0))
    if not verify:
        return closed

    inv_sq = np.zeros(3)
    nonzero = tdiag != 0.0
    inv_sq[nonzero] = 1.0 / tdiag[nonzero] ** 2
    has_null = bool(np.any(~nonzero))

    def value(alpha: float, beta: float) -> float:
        sa, ca = np.sin(alpha), np.cos(alpha)
        cb, sb = np.cos(beta), np.sin(beta)
        bp = np.array([sa * cb, sa * sb, ca])
        bm = np.array([-ca * cb, -ca * sb, sa])
        worst = 0.0
        for v in (bp, bm):
            if has_null and np.any(np.abs(v[~nonzero]) > EPS_COMPONENT):
                return 0.5  # infinite norm: no advantage from this pair
            worst = max(worst, float(v**2 @ inv_sq))
        return 0.5 * (1.0 + 1.0 / (np.sqrt(2.0) * np.sqrt(worst)))

    grid = 60
    best = (np.inf, 0.0, 0.0)
    for i in range(grid + 1):
        alpha = np.pi * i / grid
        for j in range(2 * grid):
            beta = np.pi * j / grid
            v = value(alpha, beta)
            if v < best[0]:
                best = (v, alpha, beta)
    v, alpha, beta = best
    step = np.pi / grid
    while step > 1e-9:
        moved = False
        for da, db in ((step, 0), (-step, 0), (0, step), (0, -step)):
            cand = value(alpha + da, beta + db)
            if cand < v - 1e-15:
                v, alpha, beta = cand, alpha + da, beta + db
                moved = True
        if not moved:
            step *= 0.5
    if abs(v - closed) > verify_tol:
        raise QracError(
            f"orthogonal-decoding minimum verification failed: numeric {v!r} vs closed {closed!r}"
        )
    return closed
