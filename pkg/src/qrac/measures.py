"""Correlation measures tied to random-access performance.

For Bell diagonal states with |T1| >= |T2| >= |T3| the relevant quantities
are simple functions of the correlation entries:

  s2 = |T2|, s3 = |T3|          steering-based nonclassicality (2/3 settings)
  q3 = 1 - h((1 + |T3|) / 2)    simultaneous correlation in three mutually
                                unbiased bases, h = binary entropy
  p_orth = (1/2)(1 + |T3|/sqrt(2))   2->1 optimum minimized over all
                                     orthogonal decodings

s3, q3 and p_orth are strictly increasing in |T3|, so any of them ranks
states identically.  The normalized geometric discord is defined for any
state; the normalization sqrt(2 D_HS) is chosen so that maximally entangled
states score 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import BellDiagonal, TwoQubitBloch, density_from_bloch
from .errors import NotOrdered


def _binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _require_ordered(bd: BellDiagonal) -> None:
    if not bd.ordered:
        raise NotOrdered(
            f"need |T1| >= |T2| >= |T3|, got ({bd.t1}, {bd.t2}, {bd.t3})"
        )


def geometric_discord(s: TwoQubitBloch) -> float:
    """Normalized geometric discord sqrt(2 D_HS) with

        D_HS = (1/4) (||M||^2 + ||T||_F^2 - lambda_max(M M^T + T T^T)).
    """
    density_from_bloch(s)  # raises NotAState on unphysical input
    k = np.outer(s.M, s.M) + s.T @ s.T.T
    lam = float(np.linalg.eigvalsh(k)[-1])
    d_hs = 0.25 * (float(s.M @ s.M) + float(np.sum(s.T * s.T)) - lam)
    return math.sqrt(2.0 * max(d_hs, 0.0))


def superunsteerability(bd: BellDiagonal) -> tuple[float, float]:
    """(s2, s3) = (|T2|, |T3|); requires ordered entries."""
    _require_ordered(bd)
    return abs(bd.t2), abs(bd.t3)


def q3(bd: BellDiagonal) -> float:
    """1 - h((1 + |T3|)/2); requires ordered entries."""
    _require_ordered(bd)
    return 1.0 - _binary_entropy((1.0 + abs(bd.t3)) / 2.0)


def orthogonal_performance(bd: BellDiagonal) -> float:
    """(1/2)(1 + |T3|/sqrt(2)); requires ordered entries."""
    _require_ordered(bd)
    return 0.5 * (1.0 + abs(bd.t3) / math.sqrt(2.0))


@dataclass(frozen=True)
class AdvantageFlags:
    """Quantum-advantage predicates for a Bell diagonal state.

    necessary_all_decodings: the smallest |T_i| is nonzero (T invertible),
        necessary for advantage with arbitrary decodings.
    all_orthogonal_2to1: the orthogonal-decoding optimum beats the classical
        1/2 bound that applies under Bob-side maximally mixed marginals.
    exists_decoding_2to1: some principal-axis decoding pair beats 1/2,
        i.e. max over axis pairs of (1/2)(1 + |Tj Tk|/sqrt(Tj^2+Tk^2)) > 1/2.
    """

    necessary_all_decodings: bool
    all_orthogonal_2to1: bool
    exists_decoding_2to1: bool

    def to_json_dict(self) -> dict:
        return {
            "necessary_all_decodings": self.necessary_all_decodings,
            "all_orthogonal_2to1": self.all_orthogonal_2to1,
            "exists_decoding_2to1": self.exists_decoding_2to1,
        }


def advantage_predicates(bd: BellDiagonal) -> AdvantageFlags:
    """Advantage flags; accepts unordered entries (uses magnitudes)."""
    mags = sorted((abs(bd.t1), abs(bd.t2), abs(bd.t3)), reverse=True)
    smallest = mags[2]
    p_orth = 0.5 * (1.0 + smallest / math.sqrt(2.0))
    return AdvantageFlags(
        necessary_all_decodings=smallest != 0.0,
        all_orthogonal_2to1=p_orth > 0.5,
        exists_decoding_2to1=mags[1] != 0.0,  # two nonzero entries suffice
    )


@dataclass(frozen=True)
class MeasureSet:
    d_geom: float
    s2: float
    s3: float
    q3: float
    p_orth: float

    def to_json_dict(self) -> dict:
        return {
            "d_geom": self.d_geom,
            "s2": self.s2,
            "s3": self.s3,
            "q3": self.q3,
            "p_orth": self.p_orth,
        }


def measure_set(bd: BellDiagonal) -> MeasureSet:
    """All measures for an ordered Bell diagonal state."""
    s2, s3 = superunsteerability(bd)
    return MeasureSet(
        d_geom=geometric_discord(bd.to_bloch()),
        s2=s2,
        s3=s3,
        q3=q3(bd),
        p_orth=orthogonal_performance(bd),
    )
