"""Two-qubit states as local Bloch vectors plus a 3x3 correlation tensor.

A 4x4 density matrix and its Pauli decomposition

    rho = (1/4) [ I(x)I + sum_i M_i sigma_i(x)I + sum_j N_j I(x)sigma_j
                  + sum_ij T_ij sigma_i(x)sigma_j ]

are two views of the same state.  This module converts between them,
validates physicality, canonicalizes the local frames so that T becomes
diagonal with |T1| >= |T2| >= |T3|, and evaluates Born-rule outcome
probabilities for projective spin measurements along unit directions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import FrameError, NotAState

EPS_STATE = 1e-9   # Hermiticity / trace / positivity tolerance
EPS_UNIT = 1e-12   # unit-vector norm tolerance after construction
EPS_DIAG = 1e-12   # off-diagonal tolerance for the diagonal-frame flag

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY2 = np.eye(2, dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


def unit3(v) -> np.ndarray:
    """Normalize a 3-vector to unit Euclidean norm.

    Raises ValueError on (near-)zero input.  The result deviates from unit
    norm by at most EPS_UNIT.
    """
    arr = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(arr))
    if norm < 1e-15:
        raise ValueError("cannot normalize a zero 3-vector")
    return _frozen(arr / norm)


@dataclass(frozen=True)
class DensityMatrix4:
    """A physical two-qubit density matrix in the |00>,|01>,|10>,|11> basis.

    Construction validates Hermiticity, unit trace and positivity within
    EPS_STATE and raises NotAState otherwise.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise NotAState(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > EPS_STATE:
            raise NotAState("matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > EPS_STATE or abs(np.trace(m).imag) > EPS_STATE:
            raise NotAState(f"trace is {np.trace(m)}, expected 1")
        if np.min(np.linalg.eigvalsh(m)) < -EPS_STATE:
            raise NotAState("matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", _frozen(m))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return np.linalg.eigvalsh(self.matrix)


Frame = Literal["raw", "diagonal"]


@dataclass(frozen=True)
class TwoQubitBloch:
    """Bloch picture of a two-qubit state: local vectors M, N and tensor T.

    frame="diagonal" asserts that T is diagonal with |T1| >= |T2| >= |T3|;
    constructing with that flag on a non-conforming T raises FrameError.
    The closed-form optimizers require the diagonal frame.
    """

    M: np.ndarray
    N: np.ndarray
    T: np.ndarray
    frame: Frame = "raw"

    def __post_init__(self):
        m = np.asarray(self.M, dtype=float).reshape(3)
        n = np.asarray(self.N, dtype=float).reshape(3)
        t = np.asarray(self.T, dtype=float)
        if t.shape != (3, 3):
            raise NotAState(f"correlation tensor must be 3x3, got {t.shape}")
        if self.frame == "diagonal":
            off = t - np.diag(np.diag(t))
            if np.max(np.abs(off)) > EPS_DIAG:
                raise FrameError("frame='diagonal' but T has off-diagonal entries")
            d = np.abs(np.diag(t))
            if d[0] + EPS_DIAG < d[1] or d[1] + EPS_DIAG < d[2]:
                raise FrameError("frame='diagonal' but |T1| >= |T2| >= |T3| fails")
        elif self.frame != "raw":
            raise FrameError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "M", _frozen(m))
        object.__setattr__(self, "N", _frozen(n))
        object.__setattr__(self, "T", _frozen(t))

    @property
    def t_diag(self) -> np.ndarray:
        return np.diag(self.T)


@dataclass(frozen=True)
class BellDiagonal:
    """State with vanishing local Bloch vectors, determined by (T1, T2, T3).

    The four eigenvalues of the density matrix are
        (1 - T1 - T2 - T3)/4, (1 - T1 + T2 + T3)/4,
        (1 + T1 - T2 + T3)/4, (1 + T1 + T2 - T3)/4
    and validity is exactly their nonnegativity (a tetrahedron in T-space).
    """

    t1: float
    t2: float
    t3: float

    def __post_init__(self):
        if min(self.eigenvalues()) < -EPS_STATE:
            raise NotAState(
                f"({self.t1}, {self.t2}, {self.t3}) lies outside the positivity tetrahedron"
            )

    def eigenvalues(self) -> tuple[float, float, float, float]:
        t1, t2, t3 = self.t1, self.t2, self.t3
        return (
            0.25 * (1 - t1 - t2 - t3),
            0.25 * (1 - t1 + t2 + t3),
            0.25 * (1 + t1 - t2 + t3),
            0.25 * (1 + t1 + t2 - t3),
        )

    @property
    def ordered(self) -> bool:
        return (
            abs(self.t1) + EPS_DIAG >= abs(self.t2)
            and abs(self.t2) + EPS_DIAG >= abs(self.t3)
        )

    def to_bloch(self) -> TwoQubitBloch:
        frame = "diagonal" if self.ordered else "raw"
        return TwoQubitBloch(
            M=np.zeros(3), N=np.zeros(3), T=np.diag([self.t1, self.t2, self.t3]), frame=frame
        )


@dataclass(frozen=True)
class RotationPair:
    """Proper rotations (o_a, o_b) with T_raw = o_a @ diag(T') @ o_b.T.

    Maps measurement directions between the raw and diagonal frames:
    Alice's raw direction a corresponds to o_a.T @ a in the diagonal frame.
    """

    o_a: np.ndarray
    o_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "o_a", _frozen(np.asarray(self.o_a, dtype=float)))
        object.__setattr__(self, "o_b", _frozen(np.asarray(self.o_b, dtype=float)))

    def to_diagonal_a(self, v) -> np.ndarray:
        return self.o_a.T @ np.asarray(v, dtype=float)

    def to_diagonal_b(self, v) -> np.ndarray:
        return self.o_b.T @ np.asarray(v, dtype=float)

    def from_diagonal_a(self, v) -> np.ndarray:
        return self.o_a @ np.asarray(v, dtype=float)

    def from_diagonal_b(self, v) -> np.ndarray:
        return self.o_b @ np.asarray(v, dtype=float)


def bloch_from_density(rho: DensityMatrix4 | np.ndarray) -> TwoQubitBloch:
    """Extract M_i = Tr[rho (sigma_i x I)], N_i = Tr[rho (I x sigma_i)] and
    T_ij = Tr[rho (sigma_i x sigma_j)]."""
    if not isinstance(rho, DensityMatrix4):
        rho = DensityMatrix4(rho)
    m = rho.matrix
    M = np.array([np.trace(m @ np.kron(s, IDENTITY2)).real for s in PAULIS])
    N = np.array([np.trace(m @ np.kron(IDENTITY2, s)).real for s in PAULIS])
    T = np.array(
        [[np.trace(m @ np.kron(si, sj)).real for sj in PAULIS] for si in PAULIS]
    )
    return TwoQubitBloch(M=M, N=N, T=T, frame="raw")


def density_from_bloch(s: TwoQubitBloch) -> DensityMatrix4:
    """Rebuild the 4x4 density matrix; raises NotAState if the Bloch data
    does not correspond to a positive matrix."""
    m = np.kron(IDENTITY2, IDENTITY2).astype(complex)
    for i in range(3):
        m += s.M[i] * np.kron(PAULIS[i], IDENTITY2)
        m += s.N[i] * np.kron(IDENTITY2, PAULIS[i])
        for j in range(3):
            m += s.T[i, j] * np.kron(PAULIS[i], PAULIS[j])
    m *= 0.25
    if np.min(np.linalg.eigvalsh(m)) < -EPS_STATE:
        raise NotAState("Bloch data does not describe a positive matrix")
    return DensityMatrix4(m)


def _canonicalize_diagonal(s: TwoQubitBloch) -> tuple[TwoQubitBloch, RotationPair]:
    """Exactly diagonal T: reorder axes by |T_ii| with a stable sort, applying
    the same permutation on both sides so all diagonal signs survive."""
    d = np.diag(s.T)
    order = np.argsort(-np.abs(d), kind="stable")
    perm = np.zeros((3, 3))
    perm[order, np.arange(3)] = 1.0
    if np.linalg.det(perm) < 0:
        perm[:, 2] = -perm[:, 2]  # same flip on both sides keeps D intact
    new_t = np.diag(d[order])
    out = TwoQubitBloch(M=perm.T @ s.M, N=perm.T @ s.N, T=new_t, frame="diagonal")
    return out, RotationPair(perm, perm)


def canonicalize(s: TwoQubitBloch) -> tuple[TwoQubitBloch, RotationPair]:
    """Rotate the local frames so T becomes diagonal, |T1| >= |T2| >= |T3|.

    Uses a signed singular value decomposition T = o_a @ D @ o_b.T with
    o_a, o_b proper rotations; any reflection is absorbed as a sign on the
    smallest-magnitude diagonal entry.  Exactly diagonal inputs are only
    permuted (stable in |T_ii|), so an already-canonical state returns
    unchanged with identity rotations.
    """
    off = s.T - np.diag(np.diag(s.T))
    if not off.any():
        return _canonicalize_diagonal(s)
    u, sv, vt = np.linalg.svd(s.T)
    v = vt.T
    du = 1.0 if np.linalg.det(u) > 0 else -1.0
    dv = 1.0 if np.linalg.det(v) > 0 else -1.0
    o_a = u @ np.diag([1.0, 1.0, du])
    o_b = v @ np.diag([1.0, 1.0, dv])
    d = np.diag([sv[0], sv[1], du * dv * sv[2]])
    out = TwoQubitBloch(M=o_a.T @ s.M, N=o_b.T @ s.N, T=d, frame="diagonal")
    return out, RotationPair(o_a, o_b)


def joint_outcome_prob(s: TwoQubitBloch, a_dir, b_dir, a: int, b: int) -> float:
    """P(a, b) for projective measurements along a_dir (Alice) and b_dir (Bob):

        (1/4) [1 + (-1)^a M.a_dir + (-1)^b N.b_dir + (-1)^(a xor b) a_dir.T.b_dir]
    """
    av = np.asarray(a_dir, dtype=float)
    bv = np.asarray(b_dir, dtype=float)
    sa = 1.0 if a == 0 else -1.0
    sb = 1.0 if b == 0 else -1.0
    return 0.25 * (
        1.0 + sa * float(s.M @ av) + sb * float(s.N @ bv) + sa * sb * float(av @ s.T @ bv)
    )


def parity_prob(s: TwoQubitBloch, a_dir, b_dir, xk: int) -> float:
    """P(A xor B = xk) = (1/2)(1 + (-1)^xk a_dir.T.b_dir).

    Equals the sum of the two matching joint outcome probabilities; the
    local Bloch terms cancel, so only the correlation tensor enters.
    """
    av = np.asarray(a_dir, dtype=float)
    bv = np.asarray(b_dir, dtype=float)
    sign = 1.0 if xk == 0 else -1.0
    return 0.5 * (1.0 + sign * float(av @ s.T @ bv))


# --- JSON state schema -------------------------------------------------------
#
# {"density": [[[re, im] x4] x4]}                      full matrix
# {"bloch": {"M": [...], "N": [...], "T": [[...] x3]}} Pauli decomposition
# {"bell_diagonal": [T1, T2, T3]}                      Bell diagonal state


def state_from_json_dict(data: dict) -> TwoQubitBloch:
    """Parse one of the three state encodings into the Bloch picture."""
    if not isinstance(data, dict):
        raise NotAState("state JSON must be an object")
    if "density" in data:
        entries = np.asarray(data["density"], dtype=float)
        if entries.shape != (4, 4, 2):
            raise NotAState("'density' must be a 4x4 array of [re, im] pairs")
        return bloch_from_density(entries[..., 0] + 1j * entries[..., 1])
    if "bloch" in data:
        b = data["bloch"]
        try:
            return TwoQubitBloch(
                M=np.asarray(b["M"], dtype=float),
                N=np.asarray(b["N"], dtype=float),
                T=np.asarray(b["T"], dtype=float),
            )
        except KeyError as exc:
            raise NotAState(f"'bloch' object is missing field {exc}") from exc
    if "bell_diagonal" in data:
        t1, t2, t3 = (float(t) for t in data["bell_diagonal"])
        return BellDiagonal(t1, t2, t3).to_bloch()
    raise NotAState("state JSON needs one of 'density', 'bloch', 'bell_diagonal'")


def state_to_json_dict(s: TwoQubitBloch) -> dict:
    """Serialize in the 'bloch' encoding (lossless for the Bloch picture)."""
    return {
        "bloch": {
            "M": [float(x) for x in s.M],
            "N": [float(x) for x in s.N],
            "T": [[float(x) for x in row] for row in s.T],
        }
    }


def load_state(text_or_path: str) -> TwoQubitBloch:
    """Load a state from inline JSON text or from a JSON file path."""
    text = text_or_path.strip()
    if not text.startswith("{"):
        with open(text_or_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return state_from_json_dict(json.loads(text))
