"""Random access task statistics: exact parity probabilities and Monte Carlo.

The task: Alice holds an n-bit string x (n in {2, 3}, uniform), measures her
qubit along a direction chosen by x and sends the outcome bit; Bob is asked
for bit k (uniform), measures along his k-th direction and guesses the XOR
of the communicated bit and his outcome.  The per-pair success probability
is P(A xor B = x_k) and the figures of merit are its minimum and mean over
all (x, k).
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bloch import TwoQubitBloch, joint_outcome_prob, parity_prob, unit3, _frozen
from .errors import SizeMismatch, UnsupportedN


def bits(x: int, n: int) -> tuple[int, ...]:
    """Bits (x_0, ..., x_{n-1}) of the index x, most significant first."""
    return tuple((x >> (n - 1 - k)) & 1 for k in range(n))


def bitstring(x: int, n: int) -> str:
    return format(x, f"0{n}b")


def complement(x: int, n: int) -> int:
    return ((1 << n) - 1) ^ x


@dataclass(frozen=True)
class RacTask:
    """Dataset length n in {2, 3}; inputs x and k are uniformly distributed."""

    n: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise UnsupportedN(f"n must be 2 or 3, got {self.n}")

    @property
    def num_strings(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class EncodingSet:
    """Alice's 2^n unit measurement directions, indexed by the string x."""

    directions: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.directions, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise SizeMismatch(f"encodings must have shape (2^n, 3), got {arr.shape}")
        object.__setattr__(self, "directions", _frozen(np.array([unit3(r) for r in arr])))

    def __len__(self) -> int:
        return self.directions.shape[0]

    def __getitem__(self, x: int) -> np.ndarray:
        return self.directions[x]


@dataclass(frozen=True)
class DecodingSet:
    """Bob's n unit measurement directions, indexed by the requested bit k."""

    directions: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.directions, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] not in (2, 3):
            raise SizeMismatch(f"decodings must have shape (n, 3) with n in {{2,3}}, got {arr.shape}")
        object.__setattr__(self, "directions", _frozen(np.array([unit3(r) for r in arr])))

    def __len__(self) -> int:
        return self.directions.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.directions[k]

    @property
    def orthogonal(self) -> bool:
        """True iff B_i . B_j = delta_ij within 1e-9."""
        g = self.directions @ self.directions.T
        return bool(np.max(np.abs(g - np.eye(len(self)))) <= 1e-9)


@dataclass(frozen=True)
class RacReport:
    """Success probabilities P(A xor B = x_k) for every (x, k).

    p_min is the worst entry, p_avg the uniform mean (weights 1/(n 2^n)),
    worst_pair the first (x, k) attaining p_min in row-major order.
    """

    n: int
    per_pair: np.ndarray  # shape (2^n, n)
    p_min: float
    p_avg: float
    worst_pair: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "per_pair", _frozen(np.asarray(self.per_pair, dtype=float)))

    @classmethod
    def from_table(cls, n: int, table: np.ndarray) -> "RacReport":
        table = np.asarray(table, dtype=float)
        flat = int(np.argmin(table))
        worst = (flat // n, flat % n)
        return cls(
            n=n,
            per_pair=table,
            p_min=float(table.min()),
            p_avg=float(table.mean()),
            worst_pair=worst,
        )

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "per_pair": [
                {"x": bitstring(x, self.n), "k": k, "p": float(self.per_pair[x, k])}
                for x in range(1 << self.n)
                for k in range(self.n)
            ],
            "p_min": self.p_min,
            "p_avg": self.p_avg,
            "worst_pair": {"x": bitstring(self.worst_pair[0], self.n), "k": self.worst_pair[1]},
        }

    def csv_rows(self) -> list[tuple[str, int, float]]:
        """One row per (x, k): x as a bit string, k, probability."""
        return [
            (bitstring(x, self.n), k, float(self.per_pair[x, k]))
            for x in range(1 << self.n)
            for k in range(self.n)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "k", "p"])
        writer.writerows(self.csv_rows())
        return buf.getvalue()


def _check_sizes(task: RacTask, enc: EncodingSet, dec: DecodingSet) -> None:
    if len(enc) != task.num_strings:
        raise SizeMismatch(f"need {task.num_strings} encodings for n={task.n}, got {len(enc)}")
    if len(dec) != task.n:
        raise SizeMismatch(f"need {task.n} decodings for n={task.n}, got {len(dec)}")


def evaluate(task: RacTask, s: TwoQubitBloch, enc: EncodingSet, dec: DecodingSet) -> RacReport:
    """Exact per-pair success probabilities for the given direction sets."""
    _check_sizes(task, enc, dec)
    table = np.empty((task.num_strings, task.n))
    for x in range(task.num_strings):
        xb = bits(x, task.n)
        for k in range(task.n):
            table[x, k] = parity_prob(s, enc[x], dec[k], xb[k])
    return RacReport.from_table(task.n, table)


def _pair_frequency(s, a_dir, b_dir, xk, trials, seed_seq) -> float:
    """Empirical success frequency from `trials` Born-rule outcome draws."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    p = np.array([joint_outcome_prob(s, a_dir, b_dir, a, b) for a in (0, 1) for b in (0, 1)])
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    counts = rng.multinomial(trials, p)  # outcomes (a,b) = 00, 01, 10, 11
    if xk == 0:
        successes = counts[0] + counts[3]
    else:
        successes = counts[1] + counts[2]
    return float(successes) / float(trials)


def simulate(
    task: RacTask,
    s: TwoQubitBloch,
    enc: EncodingSet,
    dec: DecodingSet,
    trials: int,
    seed: int,
    workers: int = 1,
) -> RacReport:
    """Monte Carlo estimate of the per-pair success probabilities.

    Trials are stratified: split as evenly as possible over the n*2^n pairs
    (earlier pairs in row-major (x, k) order absorb the remainder).  Each
    pair samples its joint (a, b) outcomes from an independent PCG64 stream
    spawned from `seed` via SeedSequence, so results are reproducible and
    independent of `workers`.
    """
    _check_sizes(task, enc, dec)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    num_pairs = task.num_strings * task.n
    base, rem = divmod(trials, num_pairs)
    alloc = [base + (1 if i < rem else 0) for i in range(num_pairs)]
    if min(alloc) == 0:
        raise ValueError(f"need at least {num_pairs} trials for n={task.n}")
    children = np.random.SeedSequence(seed).spawn(num_pairs)

    jobs = []
    for x in range(task.num_strings):
        xb = bits(x, task.n)
        for k in range(task.n):
            i = x * task.n + k
            jobs.append((s, enc[x], dec[k], xb[k], alloc[i], children[i]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            freqs = list(pool.map(lambda j: _pair_frequency(*j), jobs))
    else:
        freqs = [_pair_frequency(*j) for j in jobs]
    table = np.array(freqs).reshape(task.num_strings, task.n)
    return RacReport.from_table(task.n, table)
