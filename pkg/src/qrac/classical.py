"""Exact classical baselines: one communicated bit plus two correlated bits.

Model: a source deals bits (r_a, r_b) ~ p to Alice and Bob.  Alice sends
c = e(x, r_a); Bob answers query k with d_k(c, r_b).  The worst-case score
of a strategy is

    min over (x, k) of  sum_{ra, rb} p(ra, rb) [d_k(e(x, ra), rb) = x_k].

classical_maxmin computes the exact optimum of this model: it enumerates
the deterministic table quadruples (E_0, E_1, D_0, D_1) and solves, for
each, the small linear program over p that maximizes the worst-case score.
All linear programming is done in exact rational arithmetic, so the
returned values are exact (2/3 for n=2; 1/2 for n=3, and 1/2 for n=2 when
Bob's marginal is forced uniform).

Two reductions keep the n=3 enumeration fast without changing the result:

* encoder pairs are enumerated up to relabelings that the decoder
  enumeration and the LP absorb anyway (permuting bit positions, XOR-ing
  the dataset, negating the communicated bit, swapping r_a values);
* the LP value depends only on the set of per-(x, k) success masks over
  the four (ra, rb) source values, so values are memoized by that set
  (reduced to its minimal antichain: a superset mask is a slack row).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import SizeMismatch, UnsupportedN

Constraint = Literal["unrestricted", "bob_maximally_mixed"]

# decoder atoms: guess as a function of the communicated bit c
# 0: always 0, 1: copy c, 2: negate c, 3: always 1
_DECODER_ATOMS = ((0, 0), (0, 1), (1, 0), (1, 1))

# _MATCH[o, c, target] = 1 iff atom o maps c to target
_MATCH = np.array(
    [[[1 if atom[c] == t else 0 for t in (0, 1)] for c in (0, 1)] for atom in _DECODER_ATOMS],
    dtype=np.uint8,
)


def _bit(x: int, k: int, n: int) -> int:
    return (x >> (n - 1 - k)) & 1


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic tables over a correlated two-bit source.

    encoder[x][ra] is the communicated bit; decoders[k][c][rb] the guess;
    source[2*ra + rb] the probability p(ra, rb) as an exact Fraction.
    """

    encoder: tuple[tuple[int, int], ...]
    decoders: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    source: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        if sum(self.source) != 1 or any(p < 0 for p in self.source):
            raise SizeMismatch("source must be a probability distribution over {0,1}^2")

    @property
    def n(self) -> int:
        return (len(self.encoder) - 1).bit_length()

    def to_json_dict(self) -> dict:
        return {
            "encoder": [list(row) for row in self.encoder],
            "decoders": [[list(col) for col in dk] for dk in self.decoders],
            "source": [str(p) for p in self.source],
            "source_float": [float(p) for p in self.source],
        }


@dataclass(frozen=True)
class LpResult:
    """Optimal worst-case score with an achieving strategy and certificate."""

    value: Fraction
    witness: ClassicalStrategy
    constraint_set: Constraint
    certified: bool

    @property
    def value_float(self) -> float:
        return float(self.value)


def strategy_worstcase(n: int, strat: ClassicalStrategy) -> Fraction:
    """min over (x, k) of the success probability of the given strategy."""
    if n not in (2, 3):
        raise UnsupportedN(f"n must be 2 or 3, got {n}")
    if len(strat.encoder) != 1 << n or len(strat.decoders) != n:
        raise SizeMismatch(
            f"strategy tables sized for n={strat.n}, task has n={n}"
        )
    worst = None
    for x in range(1 << n):
        for k in range(n):
            target = _bit(x, k, n)
            score = Fraction(0)
            for ra in (0, 1):
                c = strat.encoder[x][ra]
                for rb in (0, 1):
                    if strat.decoders[k][c][rb] == target:
                        score += strat.source[2 * ra + rb]
            worst = score if worst is None else min(worst, score)
    return worst


# --- exact simplex -----------------------------------------------------------


def _simplex_max(c: list[Fraction], a: list[list[Fraction]], b: list[Fraction]):
    """Maximize c.z subject to a z = b, z >= 0, in exact rationals.

    Big-M single phase with Bland's rule (anti-cycling).  Returns
    (value, z).  Requires b >= 0.  Raises ValueError if infeasible.
    """
    m, nv = len(a), len(c)
    big = Fraction(10**9)
    # tableau columns: nv structural + m artificial, then rhs
    tab = [list(a[i]) + [Fraction(0)] * m + [b[i]] for i in range(m)]
    for i in range(m):
        tab[i][nv + i] = Fraction(1)
    cost = list(c) + [-big] * m
    basis = [nv + i for i in range(m)]

    # reduced costs: z_j - c_j style bookkeeping via explicit recompute is too
    # slow; keep an objective row updated by pivoting instead
    obj = [-cj for cj in cost] + [Fraction(0)]
    for i in range(m):
        fac = cost[basis[i]]
        if fac:
            for j in range(nv + m + 1):
                obj[j] += fac * tab[i][j]

    while True:
        enter = -1
        for j in range(nv + m):  # Bland: first improving column
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave < 0:
            raise ValueError("LP is unbounded")
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter]:
                fac = tab[i][enter]
                tab[i] = [v - fac * w for v, w in zip(tab[i], tab[leave])]
        if obj[enter]:
            fac = obj[enter]
            obj = [v - fac * w for v, w in zip(obj, tab[leave])]
        basis[leave] = enter

    z = [Fraction(0)] * (nv + m)
    for i in range(m):
        z[basis[i]] = tab[i][-1]
    if any(z[nv + i] != 0 for i in range(m)):
        raise ValueError("LP is infeasible")
    value = sum(ci * zi for ci, zi in zip(c, z[:nv]))
    return value, z[:nv]


def _solve_fraction_system(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Fractions for a square system."""
    m = len(a)
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    for col in range(m):
        piv = next(r for r in range(col, m) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                fac = aug[r][col]
                aug[r] = [v - fac * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][m] for r in range(m)]


def _game_lp_rows(masks: tuple[int, ...], bob_mixed: bool):
    """Equality rows for: max t s.t. p(mask) >= t per mask, sum p = 1
    (optionally p(.,rb=0) = 1/2), with surplus variables; vars are
    (p0..p3, t, s_1..s_R)."""
    rows_a, rows_b = [], []
    nv = 5 + len(masks)
    for i, mask in enumerate(masks):
        row = [Fraction(1) if (mask >> j) & 1 else Fraction(0) for j in range(4)]
        row += [Fraction(-1)] + [Fraction(0)] * len(masks)
        row[5 + i] = Fraction(-1)
        rows_a.append(row)
        rows_b.append(Fraction(0))
    rows_a.append([Fraction(1)] * 4 + [Fraction(0)] * (nv - 4))
    rows_b.append(Fraction(1))
    if bob_mixed:
        row = [Fraction(0)] * nv
        row[0] = row[2] = Fraction(1)  # p(0,0) + p(1,0), source index 2*ra + rb
        rows_a.append(row)
        rows_b.append(Fraction(1, 2))
    c = [Fraction(0)] * nv
    c[4] = Fraction(1)
    return c, rows_a, rows_b


def _minimal_masks(masks) -> tuple[int, ...]:
    """Drop duplicate and superset masks; the minimum only sees minimal rows."""
    uniq = sorted(set(int(m) for m in masks))
    return tuple(
        m for m in uniq if not any(o != m and (o & m) == o for o in uniq)
    )


# canonical column relabelings of the source values: identity, swap ra,
# swap rb, swap both (bit j of a mask indexes (ra, rb) = divmod(j, 2))
_COLUMN_PERMS = ((0, 1, 2, 3), (2, 3, 0, 1), (1, 0, 3, 2), (3, 2, 1, 0))
_MASK_MAPS = []
for perm in _COLUMN_PERMS:
    _MASK_MAPS.append(
        tuple(
            sum(((m >> perm[j]) & 1) << j for j in range(4)) for m in range(16)
        )
    )


class _GameCache:
    """Exact max-min values memoized by the canonical minimal mask set."""

    def __init__(self, bob_mixed: bool):
        self.bob_mixed = bob_mixed
        self.values: dict[tuple[int, ...], Fraction] = {}
        self.by_raw: dict[bytes, Fraction] = {}

    def value_for_sorted_bytes(self, raw: bytes) -> Fraction:
        cached = self.by_raw.get(raw)
        if cached is not None:
            return cached
        masks = _minimal_masks(raw)
        if 0 in masks:
            val = Fraction(0)
        else:
            # every column relabeling preserves the bob constraint too,
            # since it only swaps p rows / Bob-marginal labels
            key = min(tuple(sorted(mp[m] for m in masks)) for mp in _MASK_MAPS)
            val = self.values.get(key)
            if val is None:
                c, rows_a, rows_b = _game_lp_rows(key, self.bob_mixed)
                val, _ = _simplex_max(c, rows_a, rows_b)
                self.values[key] = val
        self.by_raw[raw] = val
        return val


def _encoder_tables(n: int) -> np.ndarray:
    """Truth tables of all maps {0,1}^n -> {0,1} as an array (count, 2^n)."""
    nx = 1 << n
    idx = np.arange(1 << nx, dtype=np.int64)
    return ((idx[:, None] >> np.arange(nx)[None, :]) & 1).astype(np.uint8)


@lru_cache(maxsize=None)
def _encoder_pair_reps(n: int) -> tuple[tuple[int, int], ...]:
    """Representative (E0, E1) table pairs, one per relabeling orbit."""
    nx = 1 << n
    ne = 1 << nx
    ev = _encoder_tables(n)
    if n == 2:
        return tuple((a, b) for a in range(ne) for b in range(a, ne))

    transforms = []
    for perm in itertools.permutations(range(n)):
        for sigma in range(nx):
            src = np.empty(nx, dtype=np.int64)
            for x in range(nx):
                xb = [_bit(x, k, n) for k in range(n)]
                px = 0
                for k in range(n):
                    px = (px << 1) | xb[perm[k]]
                src[x] = px ^ sigma
            for gamma in (0, 1):
                tbl = ev[:, src] ^ gamma
                tE = np.zeros(ne, dtype=np.int64)
                for x in range(nx):
                    tE |= tbl[:, x].astype(np.int64) << x
                transforms.append(tE)
    gidx = np.array(transforms)  # (96, ne)

    e0, e1 = np.meshgrid(np.arange(ne), np.arange(ne), indexing="ij")
    e0 = e0.ravel()
    e1 = e1.ravel()
    a = gidx[:, e0]
    b = gidx[:, e1]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    canon = ((hi << np.int64(nx)) | lo).min(axis=0)
    _, first = np.unique(canon, return_index=True)
    return tuple((int(e0[i]), int(e1[i])) for i in sorted(first))


def _success_rows(n: int, e0_tbl: np.ndarray, e1_tbl: np.ndarray) -> np.ndarray:
    """Per-(x, k) success masks for every decoder pair.

    Returns an array (16^n, n * 2^n) of 4-bit masks; decoder pair index
    decomposes per k as slot = 4*o(rb=0) + o(rb=1) over the decoder atoms.
    """
    nx = 1 << n
    xbits = np.array([[_bit(x, k, n) for x in range(nx)] for k in range(n)], dtype=np.intp)
    slot_masks = []
    for k in range(n):
        a0 = _MATCH[:, e0_tbl, xbits[k]]  # (atom, x): ra=0 success vs target
        b0 = _MATCH[:, e1_tbl, xbits[k]]  # ra=1
        u = a0 + (b0 << 2)        # rb=0 atom choice -> mask bits 0 and 2
        w = (a0 << 1) + (b0 << 3)  # rb=1 atom choice -> mask bits 1 and 3
        sm = u[:, None, :] + w[None, :, :]  # (atom_rb0, atom_rb1, x)
        slot_masks.append(sm.reshape(16, nx))
    slot_ids = np.indices((16,) * n).reshape(n, -1)
    blocks = [slot_masks[k][slot_ids[k]] for k in range(n)]
    return np.concatenate(blocks, axis=1).astype(np.uint8)


def _strategy_from_combo(
    n: int, e0: int, e1: int, slots: tuple[int, ...], source: tuple[Fraction, ...]
) -> ClassicalStrategy:
    nx = 1 << n
    encoder = tuple(((e0 >> x) & 1, (e1 >> x) & 1) for x in range(nx))
    decoders = []
    for s in slots:
        o_rb0, o_rb1 = divmod(s, 4)
        decoders.append(
            tuple(
                (_DECODER_ATOMS[o_rb0][c], _DECODER_ATOMS[o_rb1][c]) for c in (0, 1)
            )
        )
    return ClassicalStrategy(encoder=encoder, decoders=tuple(decoders), source=tuple(source))


def _certified_solve(masks: tuple[int, ...], bob_mixed: bool):
    """Solve one game LP and verify a dual certificate exactly.

    For max c.z, A z = b, z >= 0 the dual is min y.b, A^T y >= c; the basis
    solution y of B^T y = c_B is checked for feasibility and matching
    objective, all in rationals.
    """
    c, rows_a, rows_b = _game_lp_rows(masks, bob_mixed)
    value, z = _simplex_max(c, rows_a, rows_b)

    m, nv = len(rows_a), len(c)
    # rebuild a basis from the support of z (pad with surplus columns)
    support = [j for j in range(nv) if z[j] != 0]
    cols = support + [j for j in range(nv) if j not in support]
    basis = None
    for combo in itertools.combinations(cols, m):
        if not set(support) <= set(combo):
            continue
        mat = [[rows_a[i][j] for j in combo] for i in range(m)]
        try:
            y = _solve_fraction_system(
                [[mat[i][jj] for i in range(m)] for jj in range(m)],
                [c[j] for j in combo],
            )
        except StopIteration:  # singular basis candidate
            continue
        # dual feasibility: A^T y >= c on every column
        if all(
            sum(rows_a[i][j] * y[i] for i in range(m)) >= c[j] for j in range(nv)
        ) and sum(yi * bi for yi, bi in zip(y, rows_b)) == value:
            basis = combo
            break
    certified = basis is not None
    return value, z, certified


def classical_maxmin(n: int, constraint: Constraint = "unrestricted") -> LpResult:
    """Exact optimum of the two-correlated-bit classical model.

    Enumerates deterministic table quadruples (encoder pair, decoder pair)
    and maximizes the per-quadruple LP value over the source distribution;
    the reported witness achieves the value exactly and the final LP is
    certified by an exact dual solution.
    """
    if n not in (2, 3):
        raise UnsupportedN(f"n must be 2 or 3, got {n}")
    if constraint not in ("unrestricted", "bob_maximally_mixed"):
        raise ValueError(f"unknown constraint {constraint!r}")
    bob_mixed = constraint == "bob_maximally_mixed"
    cache = _GameCache(bob_mixed)
    ev = _encoder_tables(n)

    best = Fraction(-1)
    best_combo = None
    slot_ids = np.indices((16,) * n).reshape(n, -1)
    for e0, e1 in _encoder_pair_reps(n):
        rows = _success_rows(n, ev[e0], ev[e1])
        rows_sorted = np.sort(rows, axis=1)
        uniq, inverse = np.unique(rows_sorted, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        for ui in range(uniq.shape[0]):
            val = cache.value_for_sorted_bytes(uniq[ui].tobytes())
            if val > best:
                best = val
                combo_idx = int(np.nonzero(inverse == ui)[0][0])
                slots = tuple(int(slot_ids[k][combo_idx]) for k in range(n))
                best_combo = (e0, e1, slots, tuple(rows[combo_idx].tolist()))

    e0, e1, slots, raw_masks = best_combo
    masks = _minimal_masks(raw_masks)
    value, z, certified = _certified_solve(masks, bob_mixed)
    assert value == best
    source = tuple(z[:4])
    witness = _strategy_from_combo(n, e0, e1, slots, source)
    assert strategy_worstcase(n, witness) == value
    return LpResult(value=value, witness=witness, constraint_set=constraint, certified=certified)
