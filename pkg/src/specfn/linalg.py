"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` complex arrays of shape ``(n, n)`` and vectors
are complex arrays of shape ``(n,)``.  The inner product is linear in the
first argument and conjugate-linear in the second, so that ``x (x) f`` is
the linear map ``z -> <z, f> x``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "DimensionError", "DomainError", "BackendError",
    "as_matrix", "as_vector", "inner", "adjoint",
    "RankOne", "rank_one", "rank_one_apply", "skew_product",
    "conjugate_matrix", "Operator", "Schatten", "KyFan", "Trace",
    "Frobenius", "NormKind", "parse_norm", "unitary_invariant_norm",
    "PartialIsometry", "right_support_partial_isometry", "compact_svd",
    "spectral_data", "SpectralData", "haar_unitary", "random_matrix",
    "random_vector", "random_unit_vector", "random_normal_matrix", "is_unitary", "is_normal",
    "matrix_to_json", "matrix_from_json", "vector_to_json",
    "vector_from_json", "load_matrix", "save_matrix", "basis_vector",
    "matrix_unit",
]

RANK_CUT = 1e-12


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class BackendError(RuntimeError):
    """The eigen/SVD backend failed to deliver a trustworthy result."""


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DimensionError(f"expected a vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("vector has non-finite entries")
    return x


def inner(x, y) -> complex:
    """``<x, y>``: linear in ``x``, conjugate-linear in ``y``."""
    return complex(np.vdot(y, x))


def adjoint(A) -> np.ndarray:
    return np.conj(np.asarray(A)).T


def basis_vector(n: int, i: int) -> np.ndarray:
    """Standard basis vector ``e_{i+1}`` of C^n (zero based ``i``)."""
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """``E_ij`` with zero based indices."""
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


@dataclass(frozen=True)
class RankOne:
    """The operator ``left (x) right``, i.e. ``z -> <z, right> left``."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        x = as_vector(self.left)
        f = as_vector(self.right)
        if x.shape != f.shape:
            raise DimensionError("rank-one factors differ in length")
        object.__setattr__(self, "left", x)
        object.__setattr__(self, "right", f)

    @property
    def dim(self) -> int:
        return self.left.shape[0]

    def to_matrix(self) -> np.ndarray:
        return np.outer(self.left, np.conj(self.right))

    def apply(self, z) -> np.ndarray:
        return rank_one_apply(self, z)

    def adjoint(self) -> "RankOne":
        return RankOne(self.right, self.left)


def rank_one(x, f) -> np.ndarray:
    """Matrix of ``x (x) f`` with entries ``x_i conj(f_j)``."""
    return RankOne(x, f).to_matrix()


def rank_one_apply(r: RankOne, z) -> np.ndarray:
    z = as_vector(z)
    if z.shape != r.right.shape:
        raise DimensionError("vector length does not match the operator")
    return inner(z, r.right) * r.left


def skew_product(A, B) -> np.ndarray:
    """``A* B``."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shapes {A.shape} and {B.shape} differ")
    return adjoint(A) @ B


def conjugate_matrix(A) -> np.ndarray:
    """``JAJ`` for the standard basis, i.e. the entrywise conjugate."""
    return np.conj(as_matrix(A))


# -- unitarily invariant norms ------------------------------------------------

@dataclass(frozen=True)
class Operator:
    pass


@dataclass(frozen=True)
class Schatten:
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError("Schatten index must satisfy p >= 1")


@dataclass(frozen=True)
class KyFan:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError("Ky Fan index must be a positive integer")


@dataclass(frozen=True)
class Trace:
    pass


@dataclass(frozen=True)
class Frobenius:
    pass


NormKind = Union[Operator, Schatten, KyFan, Trace, Frobenius]


def parse_norm(text: str) -> NormKind:
    """Parse ``operator``, ``trace``, ``frobenius``, ``schatten:p``, ``kyfan:k``."""
    name, _, arg = text.strip().lower().partition(":")
    if name in ("operator", "spectral"):
        return Operator()
    if name in ("trace", "nuclear"):
        return Trace()
    if name == "frobenius":
        return Frobenius()
    if name == "schatten":
        return Schatten(float(arg))
    if name in ("kyfan", "ky-fan"):
        return KyFan(int(arg))
    raise DomainError(f"unknown norm {text!r}")


def unitary_invariant_norm(A, kind: NormKind = Operator()) -> float:
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    if isinstance(kind, Operator):
        return float(s[0])
    if isinstance(kind, Schatten):
        if math.isinf(kind.p):
            return float(s[0])
        if s[0] == 0:
            return 0.0
        # scale first; large p overflows otherwise
        return float(s[0] * np.sum((s / s[0]) ** kind.p) ** (1.0 / kind.p))
    if isinstance(kind, KyFan):
        return float(np.sum(s[: kind.k]))
    if isinstance(kind, Trace):
        return float(np.sum(s))
    if isinstance(kind, Frobenius):
        return float(np.sqrt(np.sum(s**2)))
    raise DomainError(f"unsupported norm kind {kind!r}")


# -- decompositions -----------------------------------------------------------

def compact_svd(A, cut: float = RANK_CUT):
    """Return ``(P, s, Q)`` with ``A = P diag(s) Q*`` and only the
    singular values above ``cut * s_max`` retained."""
    A = as_matrix(A)
    P, s, Qh = np.linalg.svd(A)
    if s[0] == 0:
        r = 0
    else:
        r = int(np.sum(s > cut * s[0]))
    return P[:, :r], s[:r], adjoint(Qh[:r])


@dataclass(frozen=True)
class PartialIsometry:
    matrix: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.matrix, dtype=complex)
        P = adjoint(W) @ W
        scale = max(1.0, float(np.abs(P).max(initial=0.0)))
        if not (np.allclose(P, adjoint(P), atol=1e-10 * scale)
                and np.allclose(P @ P, P, atol=1e-10 * scale)):
            raise DomainError("W*W is not an orthogonal projection")
        object.__setattr__(self, "matrix", W)

    @property
    def initial_projection(self) -> np.ndarray:
        return adjoint(self.matrix) @ self.matrix


def right_support_partial_isometry(A, target_isometry) -> PartialIsometry:
    """Partial isometry ``V_A = W Q*`` whose initial space is ``ran A*``.

    ``A = P S Q*`` is a compact SVD of rank ``r`` and ``W`` holds the first
    ``r`` columns of ``target_isometry``.
    """
    A = as_matrix(A)
    T = np.asarray(target_isometry, dtype=complex)
    if T.ndim != 2 or T.shape[0] != A.shape[0]:
        raise DimensionError("target isometry has the wrong number of rows")
    if not np.allclose(adjoint(T) @ T, np.eye(T.shape[1]), atol=1e-10):
        raise DomainError("target columns are not orthonormal")
    _, s, Q = compact_svd(A)
    r = s.shape[0]
    if T.shape[1] < r:
        raise DomainError(f"target spans {T.shape[1]} dimensions, rank(A) = {r}")
    return PartialIsometry(T[:, :r] @ adjoint(Q))


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    singular_values: np.ndarray


def spectral_data(A) -> SpectralData:
    """Eigenvalues and descending singular values, with a residual check."""
    A = as_matrix(A)
    try:
        lam, V = np.linalg.eig(A)
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise BackendError(str(exc)) from exc
    scale = max(float(s[0]), 1e-300)
    norms = np.linalg.norm(V, axis=0)
    res = np.linalg.norm(A @ V - V * lam, axis=0) / np.where(norms > 0, norms, 1)
    if np.any(res > 1e-9 * scale) and s[0] > 0:
        raise BackendError(f"eigen residual {res.max():.3e} exceeds 1e-9 * ||A||")
    return SpectralData(lam, s)


# -- random matrices ----------------------------------------------------------

def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar distributed unitary: QR of a Ginibre matrix with R's diagonal
    phases moved into Q."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if rank is not None and rank < n:
        L = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
        R = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
        G = L @ R / math.sqrt(rank)
    return G / math.sqrt(2 * n)


def random_normal_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """``U diag(d) U*`` with Haar ``U`` and complex Gaussian ``d``."""
    d = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    U = haar_unitary(n, rng)
    return (U * d) @ adjoint(U)


def random_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    x = random_vector(n, rng)
    return x / np.linalg.norm(x)


def is_unitary(U, tol: float = 1e-10) -> bool:
    U = np.asarray(U)
    return U.ndim == 2 and U.shape[0] == U.shape[1] and np.allclose(
        adjoint(U) @ U, np.eye(U.shape[0]), atol=tol)


def is_normal(A, tol: float = 1e-10) -> bool:
    A = np.asarray(A)
    return float(np.linalg.norm(A @ adjoint(A) - adjoint(A) @ A, 2)) <= tol


# -- JSON file format ---------------------------------------------------------
#
# {"dim": n, "rows": [[[re, im], ...], ...]} for matrices and
# {"dim": n, "entries": [[re, im], ...]} for vectors.

def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"dim": A.shape[0],
            "rows": [[[float(z.real), float(z.imag)] for z in row] for row in A]}


def _pairs_to_complex(pairs, where: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape[-1:] != (2,):
        raise DomainError(f"{where}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        A = _pairs_to_complex(obj["rows"], "rows")
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix object: {exc}") from exc
    if A.shape != (n, n):
        raise DimensionError(f"declared dim {n} but rows have shape {A.shape}")
    return as_matrix(A)


def vector_to_json(x) -> dict:
    x = as_vector(x)
    return {"dim": x.shape[0], "entries": [[float(z.real), float(z.imag)] for z in x]}


def vector_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        x = _pairs_to_complex(obj["entries"], "entries")
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed vector object: {exc}") from exc
    if x.shape != (n,):
        raise DimensionError(f"declared dim {n} but got {x.shape[0]} entries")
    return as_vector(x)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(obj)


def save_matrix(path, A) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(A)) + "\n")
