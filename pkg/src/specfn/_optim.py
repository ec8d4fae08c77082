"""Batched first-order ascent on the complex unit sphere and on U(n).

Every routine runs all restarts at once: the iterate is a stack of
candidates, each with its own Armijo step length.  Values returned are
attained objective values, hence certified lower bounds for a maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ARMIJO = 1e-4
# a column whose value stops moving for this many steps is treated as converged
STALL_STEPS = 8
STALL_RTOL = 1e-15


@dataclass
class AscentResult:
    value: float
    point: np.ndarray
    grad_norm: float
    iterations: int
    values: np.ndarray


def _normalize_cols(X):
    return X / np.linalg.norm(X, axis=0, keepdims=True)


def _update_stall(stall, done, act, gain, base):
    small = gain <= STALL_RTOL * np.maximum(1.0, np.abs(base))
    stall[act] = np.where(small, stall[act] + 1, 0)
    done[act[stall[act] >= STALL_STEPS]] = True


def _bb_step(dx, dg, fallback):
    """Long Barzilai-Borwein step ``|dx|^2 / |Re <dx, dg>|`` per column."""
    num = np.sum(np.abs(dx) ** 2, axis=0)
    den = np.abs(np.real(np.sum(np.conj(dx) * dg, axis=0)))
    ok = den > 1e-300
    out = fallback.copy()
    out[ok] = num[ok] / den[ok]
    return np.clip(out, 1e-10, 1e6)


def sphere_ascent(fun, X0: np.ndarray, gtol: float = 1e-7, maxiter: int = 3000,
                  screen_after: int = 60, keep: int = 6) -> AscentResult:
    """Maximise ``fun`` over unit vectors, one column of ``X0`` per restart.

    ``fun(X)`` returns ``(values, grads)`` where ``grads[:, j]`` is the
    Euclidean gradient (for the real inner product ``Re <u, v>``) at column
    ``j``.  Steps are Barzilai-Borwein lengths safeguarded by Armijo
    backtracking.  After ``screen_after`` iterations only the ``keep`` best
    columns continue, which is where almost all of the work would otherwise go.
    """
    X = _normalize_cols(np.array(X0, dtype=complex))
    f, G = fun(X)
    m = X.shape[1]
    step = np.ones(m)
    done = np.zeros(m, dtype=bool)
    stall = np.zeros(m, dtype=int)
    prev_X = prev_Gr = None
    it = 0
    gn = np.zeros(m)
    for it in range(1, maxiter + 1):
        radial = np.real(np.sum(np.conj(X) * G, axis=0))
        Gr = G - X * radial
        gn = np.linalg.norm(Gr, axis=0)
        done |= gn <= gtol
        if prev_X is not None:
            step = _bb_step(X - prev_X, Gr - prev_Gr, step)
        if it == screen_after and X.shape[1] > keep:
            best = np.argsort(-f, kind="stable")[:keep]
            X, f, G, Gr, gn, step, done, stall = (
                X[:, best], f[best], G[:, best], Gr[:, best], gn[best], step[best],
                done[best], stall[best])
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        s = step[act].copy()
        Xa, fa, Ga, ga = X[:, act], f[act], Gr[:, act], gn[act]
        accepted = np.zeros(act.size, dtype=bool)
        Xn = Xa.copy()
        fn = fa.copy()
        Gn = G[:, act].copy()
        for _ in range(60):
            todo = np.flatnonzero(~accepted)
            if todo.size == 0:
                break
            trial = _normalize_cols(Xa[:, todo] + s[todo] * Ga[:, todo])
            ft, gt = fun(trial)
            ok = ft >= fa[todo] + ARMIJO * s[todo] * ga[todo] ** 2
            idx = todo[ok]
            Xn[:, idx], fn[idx], Gn[:, idx] = trial[:, ok], ft[ok], gt[:, ok]
            accepted[idx] = True
            s[todo[~ok]] *= 0.5
        # columns where no step of any size increases f are stationary to
        # working precision
        done[act[~accepted]] = True
        _update_stall(stall, done, act, fn - fa, fa)
        prev_X, prev_Gr = X.copy(), Gr.copy()
        X[:, act], f[act], G[:, act] = Xn, fn, Gn
        step[act] = s
    j = int(np.argmax(f))
    return AscentResult(float(f[j]), X[:, j], float(gn[j]), it, f)


def skew_expm(S: np.ndarray) -> np.ndarray:
    """``exp(S)`` for a stack of skew-Hermitian matrices via ``eigh``."""
    H = -1j * S
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    mu, V = np.linalg.eigh(H)
    return (V * np.exp(1j * mu)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def unitary_ascent(fun, U0: np.ndarray, gtol: float = 1e-7, maxiter: int = 3000,
                   screen_after: int = 60, keep: int = 6) -> AscentResult:
    """Maximise ``fun`` over unitaries with geodesic steps ``U <- exp(sG) U``.

    ``fun(U)`` takes a stack ``(m, n, n)`` and returns ``(values, G)`` with
    ``G`` the skew-Hermitian Riemannian gradients in the left-translated
    frame.  Step lengths follow the same Barzilai-Borwein rule as
    :func:`sphere_ascent`, with gradients compared in the Lie algebra.
    """
    U = np.array(U0, dtype=complex)
    f, G = fun(U)
    m = U.shape[0]
    step = np.full(m, 0.5)
    done = np.zeros(m, dtype=bool)
    stall = np.zeros(m, dtype=int)
    moved = prev_G = None
    gn = np.linalg.norm(G, axis=(1, 2))
    it = 0
    for it in range(1, maxiter + 1):
        gn = np.linalg.norm(G, axis=(1, 2))
        done |= gn <= gtol
        if moved is not None:
            flat = lambda T: T.reshape(T.shape[0], -1).T
            step = _bb_step(flat(moved), flat(G - prev_G), step)
        if it == screen_after and U.shape[0] > keep:
            best = np.argsort(-f, kind="stable")[:keep]
            U, f, G, gn, step, done, stall = (U[best], f[best], G[best], gn[best], step[best],
                                              done[best], stall[best])
            if moved is not None:
                moved, prev_G = moved[best], prev_G[best]
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        s = step[act].copy()
        Ua, fa, Ga, ga = U[act], f[act], G[act], gn[act]
        accepted = np.zeros(act.size, dtype=bool)
        Un, fn, Gn = Ua.copy(), fa.copy(), Ga.copy()
        for _ in range(60):
            todo = np.flatnonzero(~accepted)
            if todo.size == 0:
                break
            trial = skew_expm(s[todo, None, None] * Ga[todo]) @ Ua[todo]
            ft, gt = fun(trial)
            ok = ft >= fa[todo] + ARMIJO * s[todo] * ga[todo] ** 2
            idx = todo[ok]
            Un[idx], fn[idx], Gn[idx] = trial[ok], ft[ok], gt[ok]
            accepted[idx] = True
            s[todo[~ok]] *= 0.5
        done[act[~accepted]] = True
        _update_stall(stall, done, act, fn - fa, fa)
        moved = np.zeros_like(G)
        moved[act] = np.where(accepted[:, None, None], s[:, None, None] * Ga, 0.0)
        prev_G = G.copy()
        U[act], f[act], G[act] = Un, fn, Gn
        step[act] = s
    j = int(np.argmax(f))
    return AscentResult(float(f[j]), U[j], float(gn[j]), it, f)
