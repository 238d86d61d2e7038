"""Dense complex matrix substrate.

Immutable Hermitian containers, descending eigendecomposition, spectral
calculus f(A), direct sums, Schatten/Ky Fan norms and their antinorm
counterparts on the positive semidefinite cone. Everything here is a pure
function over frozen values, so concurrent callers need no locking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    AntinormOnIndefinite,
    DomainViolation,
    NonConvergence,
)

# Relative tolerance accepted when ingesting a nominally Hermitian matrix.
HERMITIAN_RTOL = 1e-12
# Eigendecomposition residual / orthonormality tolerance.
EIG_RTOL = 1e-10
# Relative slack below which a slightly negative spectrum still counts as PSD.
PSD_RTOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def frob(a) -> float:
    """Frobenius norm of an array-like."""
    return float(np.linalg.norm(np.asarray(a)))


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


@dataclass(frozen=True)
class CMatrix:
    """Dense complex matrix with finite entries, stored row-major."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=np.complex128)
        if m.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {m.shape}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "mat", _freeze(m))

    @property
    def rows(self) -> int:
        return self.mat.shape[0]

    @property
    def cols(self) -> int:
        return self.mat.shape[1]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.mat.astype(dtype)
        return self.mat


@dataclass(frozen=True)
class HermitianMatrix:
    """Square complex matrix kept in exactly symmetrized form (A + A*)/2.

    Construction rejects inputs whose anti-Hermitian part exceeds
    ``HERMITIAN_RTOL`` relative to the Frobenius norm.
    """

    underlying: CMatrix

    def __post_init__(self):
        u = self.underlying
        if not isinstance(u, CMatrix):
            u = CMatrix(np.asarray(u))
        m = u.mat
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"Hermitian matrix must be square, got {m.shape}")
        drift = np.linalg.norm(m - m.conj().T)
        if drift > HERMITIAN_RTOL * (1.0 + np.linalg.norm(m)):
            raise ValueError(
                f"matrix is not Hermitian: ||A - A*||_F = {drift:.3e}"
            )
        object.__setattr__(self, "underlying", CMatrix((m + m.conj().T) / 2.0))

    @property
    def mat(self) -> np.ndarray:
        return self.underlying.mat

    @property
    def dim(self) -> int:
        return self.underlying.rows

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.mat.astype(dtype)
        return self.mat


def hermitian(a) -> HermitianMatrix:
    """Wrap an array-like as a HermitianMatrix (validating Hermiticity)."""
    if isinstance(a, HermitianMatrix):
        return a
    return HermitianMatrix(CMatrix(np.asarray(a, dtype=np.complex128)))


def symmetrize(a) -> HermitianMatrix:
    """Force-symmetrize (A + A*)/2 and wrap; accepts any square matrix."""
    m = np.asarray(a, dtype=np.complex128)
    return HermitianMatrix(CMatrix((m + m.conj().T) / 2.0))


@dataclass(frozen=True)
class EigenSystem:
    """Spectral data: eigenvalues sorted nonincreasing, orthonormal columns."""

    values: np.ndarray
    vectors: CMatrix

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if np.any(np.diff(v) > 0):
            raise ValueError("eigenvalues must be sorted nonincreasing")
        object.__setattr__(self, "values", _freeze(v))
        if not isinstance(self.vectors, CMatrix):
            object.__setattr__(self, "vectors", CMatrix(np.asarray(self.vectors)))
        u = self.vectors.mat
        gram = u.conj().T @ u
        if np.linalg.norm(gram - np.eye(u.shape[1])) > EIG_RTOL:
            raise ValueError("eigenvector columns are not orthonormal")

    def reconstruct(self) -> np.ndarray:
        u = self.vectors.mat
        return (u * self.values) @ u.conj().T


def eigvals_desc(A) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted nonincreasing."""
    return np.linalg.eigvalsh(np.asarray(A))[::-1].copy()


def _sorted_system(values: np.ndarray, vectors: np.ndarray) -> EigenSystem:
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values[order], CMatrix(vectors[:, order]))


def eigh(A: HermitianMatrix) -> EigenSystem:
    """Full eigendecomposition with eigenvalues in nonincreasing order.

    Backed by LAPACK; raises NonConvergence if the solver fails. The
    reconstruction residual is checked against EIG_RTOL before returning.
    """
    A = hermitian(A)
    try:
        w, u = np.linalg.eigh(A.mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NonConvergence(str(exc)) from exc
    es = _sorted_system(w, u)
    resid = np.linalg.norm(A.mat - es.reconstruct())
    if resid > EIG_RTOL * (1.0 + np.linalg.norm(A.mat)):
        raise NonConvergence(f"reconstruction residual {resid:.3e} too large")
    return es


def eigh_jacobi(A: HermitianMatrix, max_sweeps: int = 30,
                tol: float = 1e-13) -> EigenSystem:
    """Cyclic Jacobi eigendecomposition with complex Givens rotations.

    Self-contained alternative to the LAPACK path, converging when the
    off-diagonal Frobenius mass drops below ``tol * ||A||_F``. Used as an
    independent cross-check of :func:`eigh`; raises NonConvergence after
    ``max_sweeps`` full sweeps.
    """
    A = hermitian(A)
    n = A.dim
    m = A.mat.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(m)
    if n == 1 or scale == 0.0:
        return _sorted_system(m.diagonal().real.copy(), v)

    def offmass(x):
        return math.sqrt(max(0.0, np.linalg.norm(x) ** 2
                             - np.linalg.norm(x.diagonal()) ** 2))

    for _ in range(max_sweeps):
        if offmass(m) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = m[p, q]
                if abs(g) <= 1e-300:
                    continue
                # Phase-align so the 2x2 block is real symmetric, then rotate.
                d = g / abs(g)
                alpha = m[p, p].real
                beta = m[q, q].real
                tau = (beta - alpha) / (2.0 * abs(g))
                if tau >= 0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # Column rotation J restricted to columns (p, q):
                # J[:, p] = (c, -s*conj(d)), J[:, q] = (s, c*conj(d)).
                col_p = c * m[:, p] - s * np.conj(d) * m[:, q]
                col_q = s * m[:, p] + c * np.conj(d) * m[:, q]
                m[:, p], m[:, q] = col_p, col_q
                row_p = c * m[p, :] - s * d * m[q, :]
                row_q = s * m[p, :] + c * d * m[q, :]
                m[p, :], m[q, :] = row_p, row_q
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                vcol_p = c * v[:, p] - s * np.conj(d) * v[:, q]
                vcol_q = s * v[:, p] + c * np.conj(d) * v[:, q]
                v[:, p], v[:, q] = vcol_p, vcol_q
    else:
        raise NonConvergence(
            f"off-diagonal mass {offmass(m):.3e} above {tol * scale:.3e} "
            f"after {max_sweeps} sweeps"
        )
    return _sorted_system(m.diagonal().real.copy(), v)


# ---------------------------------------------------------------------------
# Spectral calculus


def spectrum_in_domain(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Indices of eigenvalues violating [lo, hi] beyond relative tolerance."""
    tol = 1e-10 * (1.0 + float(np.max(np.abs(values), initial=0.0)))
    bad = (values < lo - tol) | (values > hi + tol)
    return np.nonzero(bad)[0]


def apply_fn(A: HermitianMatrix, fn) -> HermitianMatrix:
    """Functional calculus f(A) = U diag(f(lambda_j)) U*.

    ``fn`` is a ScalarFn (see :mod:`matineq.scalarfn`). Eigenvalues are
    clamped into the function's domain once they pass the relative domain
    check; in particular negative dust is clamped to 0 before fractional
    powers.
    """
    A = hermitian(A)
    es = eigh(A)
    lo, hi = fn.domain
    bad = spectrum_in_domain(es.values, lo, hi)
    if bad.size:
        raise DomainViolation(
            f"eigenvalues {es.values[bad]} of input lie outside "
            f"domain [{lo}, {hi}] of '{fn.name}'",
            offending=es.values[bad],
        )
    lam = np.clip(es.values, lo, hi)
    fl = np.asarray(fn(lam), dtype=np.float64)
    u = es.vectors.mat
    return symmetrize((u * fl) @ u.conj().T)


def direct_sum(A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    """Block diagonal A (+) B."""
    A, B = hermitian(A), hermitian(B)
    n, m = A.dim, B.dim
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = A.mat
    out[n:, n:] = B.mat
    return HermitianMatrix(CMatrix(out))


def trace(A) -> float:
    """Real trace of a Hermitian matrix."""
    return float(np.trace(np.asarray(A)).real)


def is_psd(A: HermitianMatrix, tol: float = PSD_RTOL) -> bool:
    """Positive semidefiniteness up to relative eigenvalue tolerance."""
    lam = eigvals_desc(hermitian(A))
    top = float(np.max(np.abs(lam), initial=0.0))
    return bool(lam[-1] >= -tol * (1.0 + top))


# ---------------------------------------------------------------------------
# Norms and antinorms


@dataclass(frozen=True)
class NormSpec:
    """Unitarily invariant norm (schatten p>=1, kyfan k) or antinorm
    (schatten_quasi 0<q<1, minkowski det^(1/n)) selector."""

    kind: str
    param: Optional[float] = None

    _NORMS = ("schatten", "kyfan")
    _ANTINORMS = ("schatten_quasi", "minkowski")

    def __post_init__(self):
        if self.kind == "schatten":
            if self.param is None or (self.param < 1 and not math.isinf(self.param)):
                raise ValueError("schatten norm needs p >= 1 (or inf)")
        elif self.kind == "kyfan":
            if self.param is None or int(self.param) < 1 or self.param != int(self.param):
                raise ValueError("kyfan norm needs integer k >= 1")
        elif self.kind == "schatten_quasi":
            if self.param is None or not (0.0 < self.param < 1.0):
                raise ValueError("schatten quasi-norm needs 0 < q < 1")
        elif self.kind == "minkowski":
            if self.param is not None:
                raise ValueError("minkowski antinorm takes no parameter")
        else:
            raise ValueError(f"unknown norm kind '{self.kind}'")

    @property
    def is_antinorm(self) -> bool:
        return self.kind in self._ANTINORMS

    def label(self) -> str:
        if self.kind == "minkowski":
            return "minkowski"
        p = self.param
        if self.kind == "kyfan":
            return f"kyfan({int(p)})"
        return f"{self.kind}({p:g})"


def schatten(p: float) -> NormSpec:
    return NormSpec("schatten", float(p))


def kyfan(k: int) -> NormSpec:
    return NormSpec("kyfan", int(k))


def schatten_quasi(q: float) -> NormSpec:
    return NormSpec("schatten_quasi", float(q))


def minkowski_antinorm() -> NormSpec:
    return NormSpec("minkowski")


def norm(A: HermitianMatrix, spec: NormSpec) -> float:
    """Evaluate a norm or antinorm on a Hermitian matrix.

    Antinorms require A to be PSD up to relative dust, which is clamped
    to 0 before fractional powers; otherwise AntinormOnIndefinite.
    """
    A = hermitian(A)
    lam = eigvals_desc(A)
    sv = np.abs(lam)
    if spec.is_antinorm:
        top = float(np.max(sv, initial=0.0))
        if lam[-1] < -PSD_RTOL * (1.0 + top):
            raise AntinormOnIndefinite(
                f"{spec.label()} needs a PSD argument; "
                f"smallest eigenvalue {lam[-1]:.3e}"
            )
        vals = np.clip(lam, 0.0, None)
        if spec.kind == "schatten_quasi":
            q = spec.param
            return float(np.sum(vals ** q) ** (1.0 / q))
        return float(np.prod(vals) ** (1.0 / A.dim))
    if spec.kind == "schatten":
        p = spec.param
        if math.isinf(p):
            return float(np.max(sv, initial=0.0))
        return float(np.sum(np.sort(sv) ** p) ** (1.0 / p))
    k = int(spec.param)
    if k > A.dim:
        raise ValueError(f"kyfan({k}) undefined for dimension {A.dim}")
    return float(np.sum(np.sort(sv)[::-1][:k]))


# ---------------------------------------------------------------------------
# Random unitaries and JSON interchange


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R-diagonal phase normalization makes the QR factorization unique,
    which is what gives the Haar measure.
    """
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def matrix_to_json(A: HermitianMatrix) -> dict:
    """Serialize to the interchange schema {"dim", "re", "im"} (row-major)."""
    A = hermitian(A)
    return {
        "dim": A.dim,
        "re": A.mat.real.tolist(),
        "im": A.mat.imag.tolist(),
    }


def hermitian_from_json(obj: dict) -> HermitianMatrix:
    """Load from the interchange schema; symmetrization is applied."""
    n = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=np.float64)
    im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=np.float64)
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"expected {n}x{n} re/im blocks, got {re.shape}/{im.shape}")
    return symmetrize(re + 1j * im)


def save_matrix(path, A: HermitianMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(A), fh)


def load_matrix(path) -> HermitianMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return hermitian_from_json(json.load(fh))


MatrixLike = Union[HermitianMatrix, np.ndarray]
