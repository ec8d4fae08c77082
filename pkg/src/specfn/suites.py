"""Verification suites behind ``specfn verify``.

Each suite expands into a list of independent tasks.  Task ``i`` receives a
generator seeded from ``SeedSequence(seed).spawn(...)[i]``, and results are
merged in task order, so a report depends only on the configuration and
never on the number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import numrange as nr
from . import preserver as pv
from . import pseudospec as ps
from .linalg import (DomainError, KyFan, Operator, Schatten, Trace, Frobenius, haar_unitary,
                     matrix_unit, random_matrix, random_normal_matrix, random_vector)
from .reports import Report

__all__ = ["RunConfig", "SUITES", "run_suite", "worker_count"]


@dataclass
class RunConfig:
    seed: int = 0
    dims: list[int] | None = None
    trials: int | None = None
    tol: dict = field(default_factory=dict)
    out: Path | None = None
    n: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.dims is not None:
            self.dims = [int(d) for d in self.dims]
            if not self.dims or min(self.dims) < 3:
                raise DomainError("dimensions must all be at least 3")
        if self.trials is not None and self.trials < 1:
            raise DomainError("trials must be at least 1")

    def dims_or(self, default):
        return self.dims if self.dims is not None else list(default)

    def trials_or(self, default: int) -> int:
        return self.trials if self.trials is not None else default

    def tol_or(self, name: str, default: float) -> float:
        return float(self.tol.get(name, default))


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("SPECFN_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise DomainError(f"SPECFN_THREADS must be an integer, got {cap!r}") from exc
    return max(1, n)


def _call(task, seed_seq):
    fn, kwargs = task
    return fn(rng=np.random.default_rng(seed_seq), **kwargs)


def run_tasks(tasks: list, seed: int, workers: int | None = None) -> list:
    seeds = np.random.SeedSequence(int(seed)).spawn(len(tasks))
    n = min(worker_count(workers), len(tasks))
    if n <= 1:
        return [_call(t, s) for t, s in zip(tasks, seeds)]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_call, tasks, seeds))


def _merge(suite: str, cfg: RunConfig, dims, parts: list[tuple[str, Report]],
           trials: int) -> Report:
    """Fold sub-reports into one; each sub-check keeps its label prefix."""
    rep = Report(suite, seed=int(cfg.seed), dims=list(dims), trials=trials)
    for label, sub in parts:
        for name, chk in sub.checks.items():
            info = {k: v for k, v in chk.items() if k not in ("pass", "max_violation", "asserted")}
            rep.add_check(f"{label}/{name}" if label else name, chk["pass"],
                          chk["max_violation"], chk["asserted"], **info)
        for w in sub.witnesses:
            rep.witnesses.append({"where": label, **w} if isinstance(w, dict) else w)
    return rep


# -- pseudospectra -------------------------------------------------------------------

def _rank_one_psr_trial(rng, n, eps, count):
    worst, wit = 0.0, None
    for _ in range(count):
        x = random_vector(n, rng) * math.exp(rng.normal())
        f = random_vector(n, rng) * math.exp(rng.normal())
        sweep = ps.pseudo_spectral_radius(np.outer(x, np.conj(f)), eps)
        closed = ps.rank_one_psr_closed_form(x, f, eps)
        d = abs(sweep - closed) / (1 + closed)
        if d > worst:
            worst, wit = d, {"x": x, "f": f, "sweep": sweep, "closed_form": closed}
    return worst, wit


def suite_rank_one_psr(cfg: RunConfig) -> Report:
    dims = cfg.dims_or(range(3, 9))
    count = cfg.trials_or(200)
    eps_list = [0.1, 1.0]
    tol = cfg.tol_or("rank_one_psr", 1e-6)
    keys = [(n, e) for n in dims for e in eps_list]
    tasks = [(_rank_one_psr_trial, {"n": n, "eps": e, "count": count}) for n, e in keys]
    results = run_tasks(tasks, cfg.seed, cfg.workers)
    rep = Report("rank-one-psr", seed=int(cfg.seed), dims=dims, trials=count * len(keys))
    for (n, e), (worst, wit) in zip(keys, results):
        rep.add_check(f"n={n}/eps={e}", worst <= tol, max(0.0, worst - tol),
                      relative_error=worst, tolerance=tol)
        if worst > tol:
            rep.witnesses.append({"n": n, "eps": e, **wit})
    return rep


def _normal_trial(rng, n, eps, c, tol):
    A = random_normal_matrix(n, rng)
    lam = np.linalg.eigvals(A)
    r_eps = ps.pseudo_spectral_radius(A, eps)
    expected = float(np.abs(lam).max()) + eps
    sub = ps.check_pseudo_properties(A, eps, c, rng)
    d = abs(r_eps - expected)
    sub.add_check("normal_radius", d <= tol, max(0.0, d - tol), deviation=d)
    shifted = sub.check("translation")["radius_shifted"]
    d2 = abs(shifted - (float(np.abs(lam + c).max()) + eps))
    sub.add_check("translated_radius", d2 <= tol, max(0.0, d2 - tol), deviation=d2)
    if not sub.passed:
        sub.witnesses.append({"A": A, "eps": eps, "c": c})
    return sub


def suite_pseudo_properties(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(100)
    tol = cfg.tol_or("pseudo_properties", 1e-6)
    tasks = []
    for t in range(trials):
        n = dims[t % len(dims)]
        eps = (0.1, 0.5, 1.0)[t % 3]
        c = (2.0, 1.5 - 0.5j, -0.7j)[(t // 3) % 3]
        tasks.append((_normal_trial, {"n": n, "eps": eps, "c": c, "tol": tol}))
    subs = run_tasks(tasks, cfg.seed, cfg.workers)
    return _fold_max("pseudo-properties", cfg, dims, subs, trials)


def _fold_max(suite, cfg, dims, subs, trials) -> Report:
    """Keep one entry per check name holding the worst violation across trials."""
    rep = Report(suite, seed=int(cfg.seed), dims=list(dims), trials=trials)
    agg: dict[str, dict] = {}
    for i, sub in enumerate(subs):
        for name, chk in sub.checks.items():
            cur = agg.setdefault(name, {"pass": True, "max_violation": 0.0,
                                        "asserted": False, "failures": 0})
            if chk["asserted"]:
                cur["asserted"] = True
                if not chk["pass"]:
                    cur["pass"] = False
                    cur["failures"] += 1
                cur["max_violation"] = max(cur["max_violation"], chk["max_violation"])
        for w in sub.witnesses:
            if len(rep.witnesses) < 10:
                rep.witnesses.append({"trial": i, **w})
    for name, cur in agg.items():
        rep.add_check(name, cur["pass"], cur["max_violation"], cur["asserted"],
                      failures=cur["failures"])
    return rep


# -- numerical ranges ----------------------------------------------------------------

def _random_C(rng, dims, max_rank=3):
    n = int(rng.choice(dims))
    rank = int(rng.integers(1, min(max_rank, n) + 1))
    return random_matrix(n, rng, rank=rank)


def _lwq_trial(rng, dims, pairs):
    C = _random_C(rng, dims)
    w0 = nr.q_numerical_radius(C, 0.0, rng=rng)
    subs = []
    for j in range(pairs):
        r = 1.0 if j == 0 else float(rng.uniform(0.05, 1.0))
        q = float(rng.uniform(0.0, r))
        q = max(q, 1e-3 * r)
        subs.append(nr.check_lwq(C, q, r, rng=rng, w0=w0))
    return subs


def suite_lwq(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(50)
    pairs = int(cfg.tol.get("pairs", 10))
    results = run_tasks([(_lwq_trial, {"dims": dims, "pairs": pairs})] * trials,
                        cfg.seed, cfg.workers)
    subs = [s for group in results for s in group]
    rep = _fold_max("lwq", cfg, dims, subs, trials * pairs)
    strict_tested = sum(1 for s in subs if s.check("strict")["asserted"])
    rep.checks["strict"]["tested"] = strict_tested
    return rep


def _hausdorff_trial(rng, dims, draws):
    C = _random_C(rng, dims)
    out = []
    for j in range(draws):
        q1 = float(rng.random())
        q2 = q1 if j == 0 else float(rng.random())
        out.append(nr.check_hausdorff_bound(C, q1, q2, rng=rng))
    return out


def suite_hausdorff(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(20)
    draws = int(cfg.tol.get("draws", 10))
    results = run_tasks([(_hausdorff_trial, {"dims": dims, "draws": draws})] * trials,
                        cfg.seed, cfg.workers)
    subs = [s for g in results for s in g]
    rep = _fold_max("hausdorff", cfg, dims, subs, trials * draws)
    ratios = [s.check("hausdorff_bound")["estimate"] / (s.check("hausdorff_bound")["bound"]
              + s.check("hausdorff_bound")["slack"]) for s in subs]
    rep.checks["hausdorff_bound"]["worst_estimate_over_allowance"] = max(ratios)
    return rep


def _midpoint_trial(rng, dims, draws, tol):
    C = _random_C(rng, dims)
    q1, q2 = sorted(rng.random(2))
    return nr.check_midpoint_convexity(C, q1, q2, rng=rng, draws=draws, tol=tol)


def suite_midpoint(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(20)
    draws = int(cfg.tol.get("draws", 10))
    tol = cfg.tol_or("midpoint", 1e-4)
    subs = run_tasks([(_midpoint_trial, {"dims": dims, "draws": draws, "tol": tol})] * trials,
                     cfg.seed, cfg.workers)
    return _fold_max("midpoint", cfg, dims, subs, trials * draws * 3)


# the two classical anchors plus matrices whose class is known in closed form
def _classify_anchors(n):
    E = matrix_unit(n, 0, 1)
    D = np.zeros((n, n), dtype=complex)
    D[0, 0], D[1, 1] = 1, -1
    return [("E12", E, nr.Condition.ONE), ("I", np.eye(n), nr.Condition.ONE),
            ("zero", np.zeros((n, n)), nr.Condition.NEITHER),
            ("diag(1,-1,0...)", D, nr.Condition.NEITHER)]


def _classify_trial(rng, C, expected, label):
    prof = nr.q_profile(C, rng=rng)
    got = nr.classify_theorem41_condition(prof)
    return label, got, expected, prof


def suite_classify_c(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3])
    trials = cfg.trials_or(10)
    n = dims[0]
    tasks = [(_classify_trial, {"C": C, "expected": e, "label": lab})
             for lab, C, e in _classify_anchors(n)]
    seed_rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 1]))
    for t in range(trials):
        tasks.append((_classify_trial, {"C": _random_C(seed_rng, dims), "expected": None,
                                        "label": f"random-{t}"}))
    results = run_tasks(tasks, cfg.seed, cfg.workers)
    rep = Report("classify-c", seed=int(cfg.seed), dims=dims, trials=len(tasks))
    counts = {c.value: 0 for c in nr.Condition}
    for (label, got, expected, prof), (fn, kw) in zip(results, tasks):
        if expected is not None:
            rep.add_check(label, got == expected, 0.0 if got == expected else 1.0,
                          condition=got.value, expected=expected.value)
        else:
            counts[got.value] += 1
            if got is nr.Condition.NEITHER:
                rep.witnesses.append({"kind": "neither-class C", "C": kw["C"],
                                      "profile": prof.values})
    rep.add_check("random_census", True, 0.0, asserted=False, **counts)
    return rep


# -- preservers ----------------------------------------------------------------------

def _axioms_task(rng, F, n, expect):
    sub = pv.check_axioms(F, n, rng)
    out = Report("axioms", dims=[n])
    for name, want in expect.items():
        chk = sub.check(name)
        ok = chk["pass"] == want
        if name == "F2'" and want:
            ok = ok and chk["g_is_identity"]
        # an axiom that should fail but holds has no natural size; count it as 1
        violation = 0.0 if ok else (max(chk["max_violation"],
                                        chk.get("g_identity_deviation", 0.0)) if want else 1.0)
        out.add_check(name, ok, violation,
                      expected_pass=want, observed_pass=chk["pass"],
                      deviation=chk.get("deviation", chk.get("g_identity_deviation")))
    if "F3" in expect:
        out.add_check("profile_constant", True, 0.0, asserted=False,
                      constant=sub.check("F3")["constant_profile"])
    out.witnesses = sub.witnesses
    return out


def _axiom_cases():
    C = np.diag([1.0, 0.0, 0.0]).astype(complex)
    yes = True
    return [
        ("pseudo_spectral_radius(eps=1)", pv.PseudoSpectralRadius(1.0),
         {"F1": yes, "F2": yes, "F3": yes, "F1''": False}),
        ("c_numerical_radius(C=diag(1,0,0))", pv.CNumericalRadius(C),
         {"F1": yes, "F2": yes, "F3": yes}),
        ("schatten(1)", pv.UnitaryInvariantNorm(Schatten(1)),
         {"F1''": yes, "F2''": yes, "F2'": yes, "F3'": yes}),
        ("schatten(2)", pv.UnitaryInvariantNorm(Schatten(2)),
         {"F1''": yes, "F2''": yes, "F2'": yes, "F3'": yes}),
        ("schatten(3.5)", pv.UnitaryInvariantNorm(Schatten(3.5)),
         {"F1''": yes, "F2''": yes, "F2'": yes, "F3'": yes}),
        ("kyfan(2)", pv.UnitaryInvariantNorm(KyFan(2)),
         {"F1''": yes, "F2''": yes, "F2'": yes, "F3'": yes}),
    ]


def suite_axioms(cfg: RunConfig) -> Report:
    n = cfg.dims_or([3])[0]
    cases = _axiom_cases()
    tasks = [(_axioms_task, {"F": F, "n": n, "expect": exp}) for _, F, exp in cases]
    subs = run_tasks(tasks, cfg.seed, cfg.workers)
    return _merge("axioms", cfg, [n], [(lab, s) for (lab, _, _), s in zip(cases, subs)],
                  len(cases))


def _maps_for(n, rng, forms=("tsu", "tsu-conj", "poi", "poi-conj")):
    U, V, T = haar_unitary(n, rng), haar_unitary(n, rng), haar_unitary(n, rng)
    h = pv.SeededRandomPhase(int(rng.integers(2**32)))
    table = {
        "tsu": lambda: pv.TwoSidedUnitary(U, V, h),
        "tsu-conj": lambda: pv.TwoSidedUnitary(U, V, h, conjugate=True),
        "tsu-const": lambda: pv.TwoSidedUnitary(U, V, pv.ConstantPhase(np.exp(1j * rng.random()))),
        "poi": lambda: pv.PerOperatorIsometry(U, T),
        "poi-conj": lambda: pv.PerOperatorIsometry(U, T, conjugate=True),
    }
    return {k: table[k]() for k in forms}


def _zero_product_task(rng, n, form, trials):
    m = _maps_for(n, rng, (form,))[form]
    return pv.check_zero_product_equivalence(m, trials, rng)


def suite_zero_product(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(200)
    forms = ("tsu", "tsu-conj", "poi", "poi-conj")
    keys = [(n, f) for n in dims for f in forms]
    subs = run_tasks([(_zero_product_task, {"n": n, "form": f, "trials": trials})
                      for n, f in keys], cfg.seed, cfg.workers)
    return _merge("zero-product", cfg, dims,
                  [(f"n={n}/{f}", s) for (n, f), s in zip(keys, subs)], trials * len(keys))


def invariance_functionals(n: int):
    """Functionals exercised by the invariance suite, with their labels."""
    C_herm = np.diag(np.linspace(1.0, -0.5, n)).astype(complex)
    return [
        ("r_eps(0.5)", pv.PseudoSpectralRadius(0.5)),
        ("r_eps(1)", pv.PseudoSpectralRadius(1.0)),
        ("w_q(0.6)", pv.QNumericalRadius(0.6)),
        ("w_k(2)", pv.KNumericalRadius(2)),
        ("w_C(e1 e1*)", pv.CNumericalRadius(matrix_unit(n, 0, 0))),
        ("w_C(real diag)", pv.CNumericalRadius(C_herm)),
        ("operator", pv.UnitaryInvariantNorm(Operator())),
        ("trace", pv.UnitaryInvariantNorm(Trace())),
        ("frobenius", pv.UnitaryInvariantNorm(Frobenius())),
        ("schatten(3)", pv.UnitaryInvariantNorm(Schatten(3))),
        ("kyfan(2)", pv.UnitaryInvariantNorm(KyFan(2))),
        ("sigma_eps(0.5)", pv.PseudoSpectrumRegion(0.5, grid=96)),
    ]


def _invariance_task(rng, n, form, label, F, trials, tol):
    m = _maps_for(n, rng, (form,))[form]
    return pv.check_invariance(m, F, trials, rng, tol=tol)


def suite_invariance(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(200)
    tasks, labels = [], []
    for n in dims:
        for label, F in invariance_functionals(n):
            region = isinstance(F, pv.PseudoSpectrumRegion)
            norm = isinstance(F, pv.UnitaryInvariantNorm)
            forms = ["tsu-const"] if region else ["tsu", "tsu-conj"]
            if norm:
                forms += ["poi", "poi-conj"]
            for form in forms:
                tol = cfg.tol_or("invariance_norm", 1e-8) if norm else \
                    cfg.tol_or("invariance", 1e-6)
                tasks.append((_invariance_task, {"n": n, "form": form, "label": label,
                                                 "F": F, "trials": trials, "tol": tol}))
                labels.append(f"n={n}/{form}/{label}")
    subs = run_tasks(tasks, cfg.seed, cfg.workers)
    rep = _merge("invariance", cfg, dims, list(zip(labels, [_relabel(s) for s in subs])),
                 trials * len(tasks))
    return rep


def _relabel(sub: Report) -> Report:
    """Invariance reports key their single check by functional repr; flatten it."""
    out = Report(sub.suite, dims=sub.dims, trials=sub.trials)
    for chk in sub.checks.values():
        info = {k: v for k, v in chk.items() if k not in ("pass", "max_violation", "asserted")}
        out.add_check("deviation", chk["pass"], chk["max_violation"], chk["asserted"], **info)
    out.witnesses = sub.witnesses
    return out


def _norm_identity_task(rng, n, form, trials):
    m = _maps_for(n, rng, (form,))[form]
    return pv.check_norm_identity(m, trials, rng)


def suite_norm_identity(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(100)
    forms = ("tsu", "tsu-conj", "poi", "poi-conj")
    keys = [(n, f) for n in dims for f in forms]
    subs = run_tasks([(_norm_identity_task, {"n": n, "form": f, "trials": trials})
                      for n, f in keys], cfg.seed, cfg.workers)
    return _merge("norm-identity", cfg, dims,
                  [(f"n={n}/{f}", s) for (n, f), s in zip(keys, subs)], trials * len(keys))


def _orthogonality_task(rng, n, kind, trials):
    U, V = haar_unitary(n, rng), haar_unitary(n, rng)
    hmap = {"unitary": pv.hmap_unitary(V), "phased": pv.hmap_phased_unitary(V),
            "cyclic": pv.hmap_cyclic_by_peak(n)}[kind]
    sub = pv.check_orthogonality_transfer(pv.RankOneCanonical(U, hmap), trials, rng)
    if kind != "cyclic":
        return sub
    # the x-dependent permutation is a negative control: violations must appear
    chk = sub.check("orthogonality_transfer")
    found = chk["violations"] > 0
    out = Report(sub.suite, dims=sub.dims, trials=trials)
    out.add_check("violations_detected", found, 0.0 if found else 1.0,
                  violations=chk["violations"])
    out.witnesses = sub.witnesses[:1]
    return out


def suite_orthogonality(cfg: RunConfig) -> Report:
    dims = cfg.dims_or([3, 4, 5])
    trials = cfg.trials_or(200)
    kinds = ("unitary", "phased", "cyclic")
    keys = [(n, k) for n in dims for k in kinds]
    subs = run_tasks([(_orthogonality_task, {"n": n, "kind": k, "trials": trials})
                      for n, k in keys], cfg.seed, cfg.workers)
    return _merge("orthogonality", cfg, dims,
                  [(f"n={n}/{k}", s) for (n, k), s in zip(keys, subs)], trials * len(keys))


def _shift_task(rng, n, pairs):
    return pv.shift_example_demo(n, pairs, rng)


def suite_shift_demo(cfg: RunConfig) -> Report:
    n = cfg.n or cfg.dims_or([8])[0]
    pairs = cfg.trials_or(500)
    (sub,) = run_tasks([(_shift_task, {"n": n, "pairs": pairs})], cfg.seed, cfg.workers)
    sub.seed = int(cfg.seed)
    return sub


def _distinguisher_task(rng, eps, n, grid):
    return pv.conjugate_form_distinguisher(eps=eps, n=n, grid=grid)


def suite_distinguisher(cfg: RunConfig) -> Report:
    n = cfg.n or cfg.dims_or([3])[0]
    eps = cfg.tol_or("eps", 0.5)
    grid = int(cfg.tol.get("grid", 200))
    (sub,) = run_tasks([(_distinguisher_task, {"eps": eps, "n": n, "grid": grid})],
                       cfg.seed, cfg.workers)
    sub.seed = int(cfg.seed)
    return sub


SUITES: dict[str, Callable[[RunConfig], Report]] = {
    "rank-one-psr": suite_rank_one_psr,
    "pseudo-properties": suite_pseudo_properties,
    "lwq": suite_lwq,
    "hausdorff": suite_hausdorff,
    "midpoint": suite_midpoint,
    "axioms": suite_axioms,
    "zero-product": suite_zero_product,
    "invariance": suite_invariance,
    "norm-identity": suite_norm_identity,
    "orthogonality": suite_orthogonality,
    "shift-demo": suite_shift_demo,
    "classify-c": suite_classify_c,
    "distinguisher": suite_distinguisher,
}


def run_suite(name: str, cfg: RunConfig | None = None) -> Report:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](cfg or RunConfig())
