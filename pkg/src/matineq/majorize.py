"""Majorization predicates and the constructive certificate pipeline.

The pipeline realizes `a majorized by b` as an explicit object:

    T-transform chain  ->  doubly stochastic D with a = D b
    Birkhoff step      ->  D = sum_j w_j P_j  (permutation matrices)
    mixture step       ->  S = sum_j w_j V_j T V_j*  (unitary conjugates)

Also hosts the weight-pair constructions (scalar, commuting normal,
bi-isometric) and the block pinching map Phi they induce on 2n x 2n
Hermitian matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hermat
from .errors import (
    DimensionMismatch,
    NoPerfectMatching,
    NotMajorized,
    PreconditionViolation,
)
from .hermat import HermitianMatrix, eigh, eigvals_desc, haar_unitary, hermitian, symmetrize

MAJ_RTOL = 1e-10
WEIGHT_TOL = 1e-10

# ---------------------------------------------------------------------------
# Predicates


def _desc_spectrum(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim == 2:
        return eigvals_desc(hermitian(arr))
    if isinstance(x, HermitianMatrix):
        return eigvals_desc(x)
    return np.sort(np.asarray(x, dtype=np.float64))[::-1]


def weakly_majorizes(B, A, tol: float = MAJ_RTOL) -> bool:
    """True iff A is weakly majorized by B: every partial sum of the
    descending spectrum of A is bounded by the matching partial sum of B."""
    a, b = _desc_spectrum(A), _desc_spectrum(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"size {a.size} vs {b.size}")
    scale = 1.0 + max(np.sum(np.abs(a)), np.sum(np.abs(b)))
    gaps = np.cumsum(b) - np.cumsum(a)
    return bool(np.min(gaps) >= -tol * scale)


def majorizes(B, A, tol: float = MAJ_RTOL) -> bool:
    """True iff A is majorized by B (weak majorization plus equal traces)."""
    a, b = _desc_spectrum(A), _desc_spectrum(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"size {a.size} vs {b.size}")
    scale = 1.0 + max(np.sum(np.abs(a)), np.sum(np.abs(b)))
    if abs(a.sum() - b.sum()) > tol * scale:
        return False
    gaps = np.cumsum(b) - np.cumsum(a)
    return bool(np.min(gaps) >= -tol * scale)


def majorization_gaps(B, A) -> np.ndarray:
    """Partial-sum gaps sum_k b - sum_k a of the descending spectra."""
    a, b = _desc_spectrum(A), _desc_spectrum(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"size {a.size} vs {b.size}")
    return np.cumsum(b) - np.cumsum(a)


# ---------------------------------------------------------------------------
# Certificates


@dataclass
class MajorizationCert:
    """Constructive witness that ``source`` is majorized by ``target``.

    dstoch carries source = dstoch @ target; weights/perms give its
    Birkhoff decomposition (perm p encodes the matrix P with
    P[i, p[i]] = 1); unitaries, when filled, reconstruct the source
    matrix as sum_j weights[j] * U_j T U_j*.
    """

    source: np.ndarray
    target: np.ndarray
    dstoch: np.ndarray
    perms: list[np.ndarray] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)
    unitaries: Optional[list[np.ndarray]] = None
    residual: Optional[float] = None

    def validate(self, tol: float = MAJ_RTOL) -> None:
        d = self.dstoch
        n = d.shape[0]
        if np.min(d) < -1e-14:
            raise ValueError(f"dstoch has negative entry {np.min(d):.3e}")
        if np.max(np.abs(d.sum(axis=0) - 1.0)) > 1e-12 or \
           np.max(np.abs(d.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("dstoch row/column sums deviate from 1")
        err = np.linalg.norm(self.source - d @ self.target)
        if err > tol * (1.0 + np.linalg.norm(self.target)):
            raise ValueError(f"source != dstoch @ target (error {err:.3e})")
        if self.weights:
            if abs(sum(self.weights) - 1.0) > 1e-12:
                raise ValueError("Birkhoff weights do not sum to 1")
            if len(self.perms) > (n - 1) ** 2 + 1:
                raise ValueError(f"{len(self.perms)} Birkhoff terms exceed bound")
            recon = np.zeros_like(d)
            for w, p in zip(self.weights, self.perms):
                recon[np.arange(n), p] += w
            if np.max(np.abs(recon - d)) > tol:
                raise ValueError("Birkhoff terms do not reconstruct dstoch")

    def to_json(self) -> dict:
        out = {
            "weights": [float(w) for w in self.weights],
            "perms": [np.asarray(p).tolist() for p in self.perms],
            "residual": self.residual,
        }
        return out

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)


def perm_matrix(p: np.ndarray) -> np.ndarray:
    """Permutation matrix P with P[i, p[i]] = 1, so (P v)[i] = v[p[i]]."""
    n = len(p)
    out = np.zeros((n, n))
    out[np.arange(n), p] = 1.0
    return out


def hlp_chain(a, b) -> MajorizationCert:
    """Doubly stochastic D with a = D b, built as a chain of T-transforms.

    Classical construction: with both vectors sorted descending, repeatedly
    take the first surplus index j (current[j] > a[j]) and the first deficit
    index k > j (current[k] < a[k]) and mix the pair with
    t = min(surplus, deficit) / (current[j] - current[k]), which pins at
    least one coordinate per step; at most n - 1 transforms.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))[::-1]
    b = np.sort(np.asarray(b, dtype=np.float64))[::-1]
    if a.shape != b.shape:
        raise DimensionMismatch(f"size {a.size} vs {b.size}")
    if not majorizes(b, a):
        raise NotMajorized("first argument is not majorized by second")
    n = a.size
    d = np.eye(n)
    cur = b.copy()
    scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
    for _ in range(n - 1):
        surplus = cur - a
        js = np.nonzero(surplus > MAJ_RTOL * scale)[0]
        if js.size == 0:
            break
        j = int(js[0])
        ks = np.nonzero(surplus[j + 1:] < -MAJ_RTOL * scale)[0]
        if ks.size == 0:
            break
        k = j + 1 + int(ks[0])
        t = min(surplus[j], -surplus[k]) / (cur[j] - cur[k])
        trans = np.eye(n)
        trans[j, j] = trans[k, k] = 1.0 - t
        trans[j, k] = trans[k, j] = t
        cur = trans @ cur
        d = trans @ d
    err = np.linalg.norm(a - d @ b)
    if err > MAJ_RTOL * (1.0 + np.linalg.norm(b)):
        raise NotMajorized(f"T-transform chain failed to reach target ({err:.3e})")
    cert = MajorizationCert(source=a, target=b, dstoch=d)
    return cert


def _augment(support: np.ndarray, row: int, match_col: np.ndarray,
             seen: np.ndarray) -> bool:
    # Kuhn's augmenting path over the boolean support graph.
    for col in np.nonzero(support[row])[0]:
        if seen[col]:
            continue
        seen[col] = True
        if match_col[col] < 0 or _augment(support, match_col[col], match_col, seen):
            match_col[col] = row
            return True
    return False


def perfect_matching(support: np.ndarray) -> np.ndarray:
    """Row -> column perfect matching of a boolean support matrix.

    Raises NoPerfectMatching when none exists.
    """
    n = support.shape[0]
    match_col = np.full(n, -1, dtype=np.int64)
    for row in range(n):
        seen = np.zeros(n, dtype=bool)
        if not _augment(support, row, match_col, seen):
            raise NoPerfectMatching(
                f"no perfect matching covers row {row}; "
                "support may contain numerical dust (threshold 1e-12)"
            )
    perm = np.empty(n, dtype=np.int64)
    for col, row in enumerate(match_col):
        perm[row] = col
    return perm


def birkhoff(D, support_tol: float = 1e-12):
    """Decompose a doubly stochastic matrix into sum_j w_j P_j.

    Greedy Birkhoff: find a perfect matching on entries above the support
    threshold, peel off the minimal entry along it, repeat. At most
    (n-1)^2 + 1 terms; weights are renormalized to sum exactly to 1.
    """
    d = np.array(D, dtype=np.float64)
    n = d.shape[0]
    if d.shape != (n, n):
        raise DimensionMismatch(f"expected square matrix, got {d.shape}")
    if np.min(d) < -WEIGHT_TOL or \
       np.max(np.abs(d.sum(axis=0) - 1.0)) > WEIGHT_TOL or \
       np.max(np.abs(d.sum(axis=1) - 1.0)) > WEIGHT_TOL:
        raise PreconditionViolation("matrix is not doubly stochastic")
    d = np.clip(d, 0.0, None)
    weights: list[float] = []
    perms: list[np.ndarray] = []
    max_terms = (n - 1) ** 2 + 1
    for _ in range(max_terms):
        if np.max(d) <= support_tol:
            break
        perm = perfect_matching(d > support_tol)
        rows = np.arange(n)
        w = float(np.min(d[rows, perm]))
        weights.append(w)
        d[rows, perm] -= w
        np.clip(d, 0.0, None, out=d)
    else:
        if np.max(d) > support_tol:
            raise NoPerfectMatching(
                f"residual mass {np.max(d):.3e} after {max_terms} terms"
            )
    total = sum(weights)
    if abs(total - 1.0) > 1e-10:
        raise NoPerfectMatching(f"weights sum to {total!r}, expected 1")
    weights = [w / total for w in weights]
    return weights, perms


def uhlmann_mixture(S: HermitianMatrix, T: HermitianMatrix) -> MajorizationCert:
    """Express S as a convex mixture of unitary conjugates of T.

    Requires S majorized by T. The unitaries are V_j = U_S P_j U_T* with
    U_S, U_T the eigenbases and P_j the Birkhoff permutations of the
    T-transform chain connecting the spectra; then
    S = sum_j w_j V_j T V_j* exactly (up to roundoff, reported as the
    certificate residual).
    """
    S, T = hermitian(S), hermitian(T)
    if S.dim != T.dim:
        raise DimensionMismatch(f"dim {S.dim} vs {T.dim}")
    es, et = eigh(S), eigh(T)
    if not majorizes(et.values, es.values):
        raise NotMajorized("S is not majorized by T")
    cert = hlp_chain(es.values, et.values)
    weights, perms = birkhoff(cert.dstoch)
    cert.weights = weights
    cert.perms = perms
    us, ut = es.vectors.mat, et.vectors.mat
    unitaries = []
    recon = np.zeros_like(S.mat)
    for w, p in zip(weights, perms):
        v = us @ perm_matrix(p) @ ut.conj().T
        unitaries.append(v)
        recon = recon + w * (v @ T.mat @ v.conj().T)
    cert.unitaries = unitaries
    cert.residual = float(np.linalg.norm(S.mat - recon))
    if cert.residual > 1e-9 * (1.0 + np.linalg.norm(T.mat)):
        raise NotMajorized(
            f"mixture reconstruction residual {cert.residual:.3e} too large"
        )
    return cert


# ---------------------------------------------------------------------------
# Weight pairs and the induced block map


@dataclass(frozen=True)
class WeightPair:
    """Pair (X, Y) with X*X + Y*Y = I: scalar sqrt(1-x)I/sqrt(x)I,
    commuting normal, or bi-isometric (which also has XX* + YY* = I)."""

    kind: str
    X: np.ndarray
    Y: np.ndarray
    x: Optional[float] = None

    _KINDS = ("scalar", "commuting_normal", "bi_isometric")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown weight kind '{self.kind}'")
        X = np.asarray(self.X, dtype=np.complex128)
        Y = np.asarray(self.Y, dtype=np.complex128)
        if X.shape != Y.shape or X.shape[0] != X.shape[1]:
            raise DimensionMismatch("X and Y must be square of equal size")
        object.__setattr__(self, "X", hermat._freeze(X))
        object.__setattr__(self, "Y", hermat._freeze(Y))
        eye = np.eye(X.shape[0])
        if np.linalg.norm(X.conj().T @ X + Y.conj().T @ Y - eye) > WEIGHT_TOL:
            raise ValueError("X*X + Y*Y != I")
        if self.kind == "scalar":
            if self.x is None or not (0.0 < self.x < 1.0):
                raise ValueError("scalar weight needs x in (0, 1)")
            if np.linalg.norm(X - np.sqrt(1.0 - self.x) * eye) > WEIGHT_TOL or \
               np.linalg.norm(Y - np.sqrt(self.x) * eye) > WEIGHT_TOL:
                raise ValueError("scalar pair must be sqrt(1-x) I, sqrt(x) I")
        if self.kind == "commuting_normal":
            if np.linalg.norm(X @ Y - Y @ X) > WEIGHT_TOL:
                raise ValueError("weights do not commute")
            for m, tag in ((X, "X"), (Y, "Y")):
                if np.linalg.norm(m @ m.conj().T - m.conj().T @ m) > WEIGHT_TOL:
                    raise ValueError(f"{tag} is not normal")
        if self.kind == "bi_isometric":
            if np.linalg.norm(X @ X.conj().T + Y @ Y.conj().T - eye) > WEIGHT_TOL:
                raise ValueError("XX* + YY* != I")

    @property
    def dim(self) -> int:
        return self.X.shape[0]

    def co_isometric(self) -> bool:
        """Whether XX* + YY* = I also holds (always for the built kinds)."""
        eye = np.eye(self.dim)
        return bool(np.linalg.norm(self.X @ self.X.conj().T
                                   + self.Y @ self.Y.conj().T - eye) <= WEIGHT_TOL)

    def combine(self, A: HermitianMatrix, B: HermitianMatrix):
        """The two weighted combinations (X*AX + Y*BY, Y*AY + X*BX)."""
        A, B = hermitian(A), hermitian(B)
        X, Y = self.X, self.Y
        W1 = X.conj().T @ A.mat @ X + Y.conj().T @ B.mat @ Y
        W2 = Y.conj().T @ A.mat @ Y + X.conj().T @ B.mat @ X
        return symmetrize(W1), symmetrize(W2)

    def describe(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.x is not None:
            out["x"] = self.x
        return out


def scalar_pair(x: float, dim: int) -> WeightPair:
    eye = np.eye(dim)
    return WeightPair("scalar", np.sqrt(1.0 - x) * eye, np.sqrt(x) * eye, x=x)


def projection_pair(P) -> WeightPair:
    """Weight pair (P, I - P) from an orthogonal projection P."""
    P = np.asarray(P, dtype=np.complex128)
    eye = np.eye(P.shape[0])
    if np.linalg.norm(P @ P - P) > WEIGHT_TOL or np.linalg.norm(P - P.conj().T) > WEIGHT_TOL:
        raise ValueError("argument is not an orthogonal projection")
    return WeightPair("commuting_normal", P, eye - P)


def gen_weight_pair(kind: str, dim: int, seed, x: float = 0.5) -> WeightPair:
    """Random weight pair of the requested kind.

    commuting_normal: X = W Dx W*, Y = W Dy W* with Haar W and complex
    diagonals obeying |dx|^2 + |dy|^2 = 1 entrywise. bi_isometric:
    X = U C W*, Y = U S W* with independent Haar U, W and nonnegative
    diagonal C, S with C^2 + S^2 = I.
    """
    rng = np.random.default_rng(seed)
    if kind == "scalar":
        return scalar_pair(x, dim)
    theta = rng.uniform(0.1, np.pi / 2 - 0.1, size=dim)
    if kind == "commuting_normal":
        w = haar_unitary(dim, rng)
        dx = np.cos(theta) * np.exp(1j * rng.uniform(0, 2 * np.pi, dim))
        dy = np.sin(theta) * np.exp(1j * rng.uniform(0, 2 * np.pi, dim))
        X = (w * dx) @ w.conj().T
        Y = (w * dy) @ w.conj().T
        return WeightPair("commuting_normal", X, Y)
    if kind == "bi_isometric":
        u = haar_unitary(dim, rng)
        w = haar_unitary(dim, rng)
        c, s = np.cos(theta), np.sin(theta)
        X = (u * c) @ w.conj().T
        Y = (u * s) @ w.conj().T
        return WeightPair("bi_isometric", X, Y)
    raise ValueError(f"unknown weight kind '{kind}'")


def embedding_unitary(pair: WeightPair) -> np.ndarray:
    """The 2n x 2n block matrix [[X, Y], [Y, -X]] (unitary when the pair is
    commuting normal)."""
    X, Y = pair.X, pair.Y
    return np.block([[X, Y], [Y, -X]])


def phi_map(pair: WeightPair, M: HermitianMatrix) -> HermitianMatrix:
    """Block map Phi(M) = (X*AX + Y*BY) (+) (Y*AY + X*BX) on 2n x 2n input,
    where A, B are the diagonal n x n blocks of M.

    Unital and trace preserving whenever X*X + Y*Y = XX* + YY* = I, hence
    Phi(M) is majorized by M for Hermitian M.
    """
    M = hermitian(M)
    n = pair.dim
    if M.dim != 2 * n:
        raise DimensionMismatch(f"need a {2 * n} x {2 * n} input, got {M.dim}")
    if not pair.co_isometric():
        raise PreconditionViolation("weight pair must satisfy XX* + YY* = I")
    A = symmetrize(M.mat[:n, :n])
    B = symmetrize(M.mat[n:, n:])
    W1, W2 = pair.combine(A, B)
    return hermat.direct_sum(W1, W2)
