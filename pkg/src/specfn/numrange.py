"""Classical, k-, q- and C-numerical ranges and radii.

For a convex compact set the largest modulus equals the maximum over
``theta`` of its support function, and the support function of ``W_C(A)``
for Hermitian ``C`` is ``sum_i lambda_i(C) lambda_i(Re(e^{-i theta} A))``
with both spectra sorted decreasingly.  That gives exact-to-sweep values
for ``w``, ``w_k`` and Hermitian ``w_C``.  Everything else goes through the
batched ascent in :mod:`specfn._optim`, whose results are lower bounds.

The q-numerical range is handled through its disc-union description:
``W_q(C)`` is the union over unit ``x`` of the closed discs centred at
``q x*Cx`` with radius ``sqrt(1-q^2) sqrt(||Cx||^2 - |x*Cx|^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize, spatial

from ._optim import sphere_ascent, unitary_ascent
from .linalg import (DimensionError, DomainError, adjoint, as_matrix, as_vector,
                     conjugate_matrix, haar_unitary, is_normal, random_unit_vector,
                     rank_one)
from .regions import Disc, Region, hausdorff_distance, nearest_spacing
from .reports import Report

__all__ = [
    "normalize_q", "CWeight", "QProfile", "Condition", "numerical_radius",
    "k_numerical_radius", "q_disc", "q_numerical_radius", "q_member",
    "q_region", "c_numerical_radius", "CRadius", "q_profile",
    "classify_theorem41_condition", "check_lwq", "check_hausdorff_bound",
    "check_midpoint_convexity", "conjugation_symmetry_wc",
    "check_constancy_lemma", "support_sweep", "conjugation_hypothesis",
]

HERMITIAN_TOL = 1e-10


def normalize_q(q) -> tuple[float, complex]:
    """Split ``q`` into ``|q|`` in ``[0, 1]`` and its phase.

    ``W_{qz}(C) = z W_q(C)`` for unimodular ``z``, so only ``|q|`` matters for
    radii.
    """
    q = complex(q)
    a = abs(q)
    if a > 1 + 1e-12 or not math.isfinite(a):
        raise DomainError(f"|q| = {a} lies outside [0, 1]")
    phase = q / a if a > 0 else 1.0 + 0j
    return min(a, 1.0), phase


@dataclass(frozen=True)
class CWeight:
    matrix: np.ndarray
    hermitian: bool = field(init=False)

    def __post_init__(self):
        C = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", C)
        object.__setattr__(self, "hermitian",
                           bool(np.linalg.norm(C - adjoint(C), 2) <= HERMITIAN_TOL))


def _as_weight(C) -> CWeight:
    return C if isinstance(C, CWeight) else CWeight(C)


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


# -- support-function sweeps --------------------------------------------------

def support_sweep(A, weights, n_angles: int = 1024, tol: float = 1e-10) -> float:
    """``max_theta sum_i weights_i lambda_i(Re(e^{-i theta} A))``.

    ``weights`` are paired with the eigenvalues in decreasing order.
    """
    A = as_matrix(A)
    n = A.shape[0]
    wts = np.zeros(n)
    wv = np.sort(np.asarray(weights, dtype=float))[::-1][:n]
    wts[:wv.size] = wv

    def h(theta):
        th = np.atleast_1d(theta)
        M = np.exp(-1j * th)[:, None, None] * A
        H = 0.5 * (M + np.conj(np.swapaxes(M, 1, 2)))
        lam = np.linalg.eigvalsh(H)[:, ::-1]
        return lam @ wts

    thetas = 2 * np.pi * np.arange(n_angles) / n_angles
    vals = h(thetas)
    step = thetas[1]
    best = float(vals.max())
    for j in np.argsort(-vals, kind="stable")[:3]:
        res = optimize.minimize_scalar(lambda t: -h(t)[0],
                                       bounds=(thetas[j] - step, thetas[j] + step),
                                       method="bounded", options={"xatol": tol})
        best = max(best, -float(res.fun))
    return best


def numerical_radius(A) -> float:
    """``w(A) = max |x*Ax|`` over unit ``x``."""
    return k_numerical_radius(A, 1)


def k_numerical_radius(A, k: int) -> float:
    A = as_matrix(A)
    n = A.shape[0]
    if int(k) != k or not 1 <= k <= n:
        raise DomainError(f"k = {k} must lie in 1..{n}")
    if k == n:
        return float(abs(np.trace(A)))
    return max(support_sweep(A, np.ones(int(k))), 0.0)


# -- q-numerical range ----------------------------------------------------------

def q_disc(C, x, q) -> Disc:
    C = as_matrix(C)
    x = as_vector(x)
    if x.shape[0] != C.shape[0]:
        raise DimensionError("vector length does not match C")
    if abs(np.linalg.norm(x) - 1) > 1e-12:
        raise DomainError("x must be a unit vector")
    q, _ = normalize_q(q)
    Cx = C @ x
    a = np.vdot(x, Cx)
    d = max(0.0, float(np.vdot(Cx, Cx).real - abs(a) ** 2))
    return Disc(complex(q * a), math.sqrt(max(0.0, 1 - q * q)) * math.sqrt(d))


def _disc_parts(C, X):
    CX = C @ X
    ChX = adjoint(C) @ X
    a = np.sum(np.conj(X) * CX, axis=0)
    b = np.sum(np.abs(CX) ** 2, axis=0)
    d = np.maximum(b - np.abs(a) ** 2, 0.0)
    rho = np.sqrt(d)
    # d/dx of |a|^2 and ||Cx||^2 for the real inner product Re<u, v>
    g_a2 = 2 * (np.conj(a) * CX + a * ChX)
    g_b = 2 * (adjoint(C) @ CX)
    tiny = 1e-300
    g_rho = np.where(rho > 1e-14, (g_b - g_a2) / (2 * np.maximum(rho, tiny)), 0.0)
    return CX, ChX, a, rho, g_rho


def _wq_objective(C, q):
    kappa = math.sqrt(max(0.0, 1 - q * q))

    def fun(X):
        CX, ChX, a, rho, g_rho = _disc_parts(C, X)
        mod = np.abs(a)
        g_mod = np.where(mod > 1e-14,
                         (np.conj(a) * CX + a * ChX) / np.maximum(mod, 1e-300), 0.0)
        return q * mod + kappa * rho, q * g_mod + kappa * g_rho

    return fun


def _start_points(n, rng, restarts, extra=None):
    X = rng.standard_normal((n, restarts)) + 1j * rng.standard_normal((n, restarts))
    if extra is not None:
        X = np.concatenate([np.asarray(extra, dtype=complex).reshape(n, -1), X], axis=1)
    return X / np.linalg.norm(X, axis=0)


def q_numerical_radius(C, q, rng=None, restarts: int = 64, gtol: float = 1e-7,
                       return_point: bool = False):
    """``w_q(C) = max`` over unit ``x`` of ``|center(x)| + radius(x)``.

    ``|q| = 1`` is the classical numerical radius and is computed by the
    exact sweep instead.
    """
    C = as_matrix(C)
    q, _ = normalize_q(q)
    rng = _rng(rng)
    n = C.shape[0]
    if np.linalg.norm(C) == 0:
        return (0.0, np.eye(n)[:, 0]) if return_point else 0.0
    # eigenvectors of the Hermitian part are cheap, often good, starts
    _, V = np.linalg.eigh(0.5 * (C + adjoint(C)))
    X0 = _start_points(n, rng, restarts, extra=V)
    res = sphere_ascent(_wq_objective(C, q), X0, gtol=gtol)
    value = res.value
    if q == 1.0:
        value = max(value, numerical_radius(C))
    return (value, res.point) if return_point else value


def q_member(C, q, z, rng=None, restarts: int = 32, tol: float = 1e-6):
    """Return ``(is_member, margin)`` for ``z`` in ``W_q(C)``.

    ``margin`` is the best ``radius(x) - |z - center(x)|`` found; ``z`` is a
    member iff ``margin >= -tol``.
    """
    C = as_matrix(C)
    q, phase = normalize_q(q)
    z = complex(z) / phase
    rng = _rng(rng)
    n = C.shape[0]
    kappa = math.sqrt(max(0.0, 1 - q * q))

    def fun(X):
        CX, ChX, a, rho, g_rho = _disc_parts(C, X)
        w = z - q * a
        mw = np.abs(w)
        g_w = np.where(mw > 1e-14, (np.conj(w) * CX + w * ChX) / np.maximum(mw, 1e-300), 0.0)
        return kappa * rho - mw, kappa * g_rho + q * g_w

    _, V = np.linalg.eigh(0.5 * (C + adjoint(C)))
    res = sphere_ascent(fun, _start_points(n, rng, restarts, extra=V), gtol=1e-9)
    margin = res.value
    return margin >= -tol, margin


def q_region(C, q, rng=None, n_discs: int = 2000, per_disc: int = 8,
             X: np.ndarray | None = None) -> Region:
    """Sample ``W_q(C)`` as a union of discs from random unit vectors."""
    C = as_matrix(C)
    qa, phase = normalize_q(q)
    rng = _rng(rng)
    n = C.shape[0]
    if X is None:
        X = _start_points(n, rng, n_discs)
    CX, _, a, rho, _ = _disc_parts(C, X)
    kappa = math.sqrt(max(0.0, 1 - qa * qa))
    centers = phase * qa * a
    radii = kappa * rho
    ang = 2 * np.pi * np.arange(per_disc) / per_disc
    rim = centers[:, None] + radii[:, None] * np.exp(1j * ang)[None, :]
    pts = np.concatenate([centers, rim.ravel()])
    return Region(pts, boundary=_hull_boundary(pts))


def _hull_boundary(pts) -> list:
    """Closed convex-hull polyline; ``W_q(C)`` is convex."""
    xy = np.column_stack([pts.real, pts.imag])
    try:
        hull = spatial.ConvexHull(xy)
    except spatial.QhullError:
        return []
    ring = pts[hull.vertices]
    return [np.append(ring, ring[0])]


# -- C-numerical radius -----------------------------------------------------------

@dataclass(frozen=True)
class CRadius:
    value: float
    method: str
    lower_bound_only: bool


def _wc_objective(A, C):
    def fun(U):
        Uh = np.conj(np.swapaxes(U, 1, 2))
        M = U @ A @ Uh
        tau = np.einsum("ij,mji->m", C, M)
        mod = np.abs(tau)
        comm = M @ C - C @ M
        X = (np.conj(tau) / np.maximum(mod, 1e-300))[:, None, None] * comm
        G = -0.5 * (X - np.conj(np.swapaxes(X, 1, 2)))
        G = np.where(mod[:, None, None] > 1e-14, G, 0.0)
        return mod, G

    return fun


def c_numerical_radius(A, C, rng=None, restarts: int = 32, method: str = "auto",
                       return_info: bool = False):
    """``w_C(A) = max |tr(C U A U*)|`` over unitary ``U``.

    ``method`` is ``"auto"`` (sweep for Hermitian ``C``, ascent otherwise),
    ``"sweep"`` or ``"ascent"``.
    """
    A = as_matrix(A)
    cw = _as_weight(C)
    if cw.matrix.shape != A.shape:
        raise DimensionError("A and C differ in size")
    if method == "auto":
        method = "sweep" if cw.hermitian else "ascent"
    if method == "sweep":
        if not cw.hermitian:
            raise DomainError("the eigenvalue sweep needs a Hermitian C")
        lam = np.linalg.eigvalsh(0.5 * (cw.matrix + adjoint(cw.matrix)))
        value = max(support_sweep(A, lam), 0.0)
        info = CRadius(value, "sweep", False)
    elif method == "ascent":
        rng = _rng(rng)
        n = A.shape[0]
        if np.linalg.norm(A) == 0 or np.linalg.norm(cw.matrix) == 0:
            info = CRadius(0.0, "ascent", True)
        else:
            U0 = np.stack([haar_unitary(n, rng) for _ in range(restarts)])
            res = unitary_ascent(_wc_objective(A, cw.matrix), U0)
            info = CRadius(res.value, "ascent", True)
    else:
        raise DomainError(f"unknown method {method!r}")
    return info if return_info else info.value


# -- q-profiles and the two-condition classification ---------------------------------------

@dataclass
class QProfile:
    q: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.q.size < 21 or self.q[0] != 0 or self.q[-1] != 1:
            raise DomainError("a profile needs >= 21 points covering [0, 1]")

    @property
    def argmin(self) -> float:
        return float(self.q[int(np.argmin(self.values))])

    @property
    def argmax(self) -> float:
        return float(self.q[int(np.argmax(self.values))])

    @property
    def w0(self) -> float:
        return float(self.values[0])

    @property
    def w1(self) -> float:
        return float(self.values[-1])

    def monotonicity(self, tol: float = 1e-9) -> str:
        d = np.diff(self.values)
        if np.all(d > tol):
            return "increasing"
        if np.all(d < -tol):
            return "decreasing"
        if np.all(np.abs(d) <= tol):
            return "constant"
        return "mixed"

    def to_csv(self) -> str:
        return "q,w_q\n" + "".join(f"{float(q)!r},{float(v)!r}\n"
                                    for q, v in zip(self.q, self.values))


def q_profile(C, grid_size: int = 21, rng=None, restarts: int = 64) -> QProfile:
    if grid_size < 21:
        raise DomainError("grid_size must be at least 21")
    rng = _rng(rng)
    qs = np.linspace(0.0, 1.0, grid_size)
    vals = [q_numerical_radius(C, q, rng=rng, restarts=restarts) for q in qs]
    return QProfile(qs, vals)


class Condition(str, Enum):
    ONE = "1"
    TWO = "2"
    NEITHER = "neither"


def classify_theorem41_condition(profile: QProfile, tol: float = 1e-6) -> Condition:
    """Either the endpoint values differ, or they agree and every interior
    value strictly exceeds them; anything else is ``NEITHER``."""
    w0, w1 = profile.w0, profile.w1
    if abs(w0 - w1) > tol:
        return Condition.ONE
    interior = profile.values[1:-1]
    if interior.size and np.all(interior > w0 + tol):
        return Condition.TWO
    return Condition.NEITHER


# -- lemma checks ------------------------------------------------------------------

def check_lwq(C, q, r, rng=None, w0: float | None = None, restarts: int = 64) -> Report:
    """``w_q(C) >= min(w_0(C), w_r(C))`` for ``0 < q < r <= 1``, strict when
    ``w_0 != w_r``."""
    q, _ = normalize_q(q)
    r, _ = normalize_q(r)
    if not 0 < q < r <= 1:
        raise DomainError("need 0 < q < r <= 1")
    rng = _rng(rng)
    C = as_matrix(C)
    if w0 is None:
        w0 = q_numerical_radius(C, 0.0, rng=rng, restarts=restarts)
    wr = q_numerical_radius(C, r, rng=rng, restarts=restarts)
    wq = q_numerical_radius(C, q, rng=rng, restarts=restarts)
    low = min(w0, wr)
    violation = low - wq
    rep = Report("lwq", dims=[C.shape[0]], trials=1)
    rep.add_check("lower_bound", violation <= 1e-6, max(0.0, violation),
                  q=q, r=r, w0=w0, wr=wr, wq=wq)
    if abs(w0 - wr) > 1e-4:
        strict = wq > low + 1e-6
        rep.add_check("strict", strict, 0.0 if strict else low + 1e-6 - wq,
                      excess=wq - low)
    else:
        rep.add_check("strict", True, 0.0, asserted=False,
                      note="|w0 - wr| <= 1e-4, strictness not tested")
    if not rep.passed:
        rep.witnesses.append({"C": C, "q": q, "r": r, "w0": w0, "wr": wr, "wq": wq})
    return rep


def check_hausdorff_bound(C, q1, q2, rng=None, n_discs: int = 2000,
                          per_disc: int = 8) -> Report:
    """Sampled ``d_H(W_q1(C), W_q2(C))`` against ``||C|| sqrt(d^2 + 2d)``,
    ``d = |q1 - q2|``, both ranges built from the same unit vectors."""
    C = as_matrix(C)
    rng = _rng(rng)
    q1, _ = normalize_q(q1)
    q2, _ = normalize_q(q2)
    X = _start_points(C.shape[0], rng, n_discs)
    R1 = q_region(C, q1, X=X, per_disc=per_disc)
    R2 = q_region(C, q2, X=X, per_disc=per_disc)
    est = hausdorff_distance(R1, R2)
    d = abs(q1 - q2)
    bound = float(np.linalg.norm(C, 2)) * math.sqrt(d * d + 2 * d)
    slack = 2 * max(nearest_spacing(R1.points), nearest_spacing(R2.points))
    rep = Report("hausdorff", dims=[C.shape[0]], trials=n_discs)
    excess = est - (bound + slack)
    rep.add_check("hausdorff_bound", excess <= 0, max(0.0, excess), q1=q1, q2=q2,
                  estimate=est, bound=bound, slack=slack)
    if not rep.passed:
        rep.witnesses.append({"C": C, "q1": q1, "q2": q2, "estimate": est, "bound": bound})
    return rep


def _draw_from_range(C, q, rng):
    x = random_unit_vector(C.shape[0], rng)
    disc = q_disc(C, x, q)
    # mix of interior and rim points so that boundary cases are exercised
    if rng.random() < 0.5:
        return complex(disc.sample(rng, 1)[0])
    return complex(disc.center + disc.radius * np.exp(2j * np.pi * rng.random()))


def check_midpoint_convexity(C, q1, q2, rng=None, draws: int = 10,
                             ts=(0.25, 0.5, 0.75), tol: float = 1e-4,
                             points=None) -> Report:
    """``t z1 + (1-t) z2 in W_{t q1 + (1-t) q2}(C)`` for ``z_i in W_{q_i}(C)``."""
    C = as_matrix(C)
    rng = _rng(rng)
    q1, _ = normalize_q(q1)
    q2, _ = normalize_q(q2)
    rep = Report("midpoint", dims=[C.shape[0]], trials=draws * len(ts))
    worst = -math.inf
    fails = 0
    pairs = points if points is not None else [
        (_draw_from_range(C, q1, rng), _draw_from_range(C, q2, rng)) for _ in range(draws)]
    for z1, z2 in pairs:
        for t in ts:
            qt = t * q1 + (1 - t) * q2
            z = t * z1 + (1 - t) * z2
            _, margin = q_member(C, qt, z, rng=rng, tol=tol)
            worst = max(worst, -margin)
            if margin < -tol:
                fails += 1
                rep.witnesses.append({"z1": z1, "z2": z2, "t": t, "q": qt, "margin": margin})
    rep.add_check("membership", fails == 0, max(0.0, worst - tol), failures=fails,
                  worst_margin=-worst if math.isfinite(worst) else None)
    return rep


def conjugation_hypothesis(C) -> str | None:
    C = as_matrix(C)
    s = np.linalg.svd(C, compute_uv=False)
    rank = int(np.sum(s > 1e-12 * max(s[0], 1e-300)))
    normal = is_normal(C, 1e-10 * max(1.0, float(s[0])))
    if rank == 1 and normal:
        return "rank-one normal"
    if normal:
        lam = np.linalg.eigvals(C)
        conj = np.conj(lam)
        # multiset equality via greedy matching
        remaining = list(conj)
        for z in lam:
            j = int(np.argmin(np.abs(np.asarray(remaining) - z)))
            if abs(remaining[j] - z) > 1e-8 * max(1.0, float(s[0])):
                return None
            remaining.pop(j)
        return "normal, spectrum closed under conjugation"
    return None


def conjugation_symmetry_wc(C, X, rng=None) -> Report:
    """Compare ``w_C(X)`` with ``w_C(conj X)``.

    Asserted only when ``C`` is rank-one normal or a normal matrix unitarily
    similar to its conjugate.
    """
    rng = _rng(rng)
    C = as_matrix(C)
    X = as_matrix(X)
    a = c_numerical_radius(X, C, rng=rng)
    b = c_numerical_radius(conjugate_matrix(X), C, rng=rng)
    hyp = conjugation_hypothesis(C)
    diff = abs(a - b)
    rep = Report("conjugation-symmetry", dims=[C.shape[0]], trials=1)
    rep.add_check("w_C(X) = w_C(conj X)", diff <= 1e-6, diff,
                  asserted=hyp is not None, hypothesis=hyp or "not detected",
                  w_X=a, w_conjX=b)
    return rep


def check_constancy_lemma(C, rng=None, n_h: int = 200, tol: float = 2e-5,
                          restarts: int = 8) -> Report:
    """Rank-one constancy: if ``w_C(u (x) h) = w_C(v (x) h)`` on sampled
    ``h`` for independent unit ``u, v``, the unit rank-one profile must be
    constant.  The premise is evaluated on the sampled ``h`` only.
    """
    rng = _rng(rng)
    C = as_matrix(C)
    n = C.shape[0]
    u = random_unit_vector(n, rng)
    v = random_unit_vector(n, rng)
    dev = 0.0
    for _ in range(n_h):
        h = random_unit_vector(n, rng)
        a = c_numerical_radius(rank_one(u, h), C, rng=rng, restarts=restarts)
        b = c_numerical_radius(rank_one(v, h), C, rng=rng, restarts=restarts)
        dev = max(dev, abs(a - b))
    premise = dev <= tol
    rep = Report("constancy", dims=[n], trials=n_h)
    rep.add_check("premise", True, 0.0, asserted=False, holds=premise, deviation=dev)
    prof = q_profile(C, rng=rng)
    spread = float(prof.values.max() - prof.values.min())
    if premise:
        rep.add_check("profile_constant", spread <= tol, max(0.0, spread - tol), spread=spread)
    else:
        rep.add_check("profile_constant", True, 0.0, asserted=False,
                      note="premise fails on sampled h", spread=spread)
    return rep
