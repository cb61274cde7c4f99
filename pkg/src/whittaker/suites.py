"""Verification suites: each compares two independent evaluations of one
identity over a fixed set of cases and reports one row per case.

Cases are generated deterministically from a seed and evaluated in order;
with ``threads > 1`` they are farmed out to a thread pool but the rows are
still collected in case order, so the report does not depend on the thread
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import arch_whittaker as aw
from . import padic_whittaker as pw
from . import special_fn as sf
from .asai_zeta import AsaiInput, asai_lhs_mellin, asai_rhs
from .errors import UnsupportedRank
from .mb_engine import barnes_check, barnes_integrand, eval_mb, find_contour, max_slack, min_slack

# acceptance tolerance of each suite when none is given
DEFAULT_TOL = {
    "gamma": 1e-12,
    "barnes": 1e-8,
    "shintani": 0.0,
    "lemmas": 1e-7,
    "gl3r": 1e-6,
    "glnc": None,  # 1e-8 for n = 2, 1e-5 for n = 3
    "ishii-stade": 1e-7,
    "asai": None,  # 1e-8 for n = 2, 1e-3 for n = 3
}
SUITES = tuple(DEFAULT_TOL)


@dataclass
class SuiteReport:
    name: str
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.rows)

    @property
    def max_rel_err(self) -> float:
        return max((r["rel_err"] for r in self.rows), default=0.0)


def ordered_map(fn: Callable, items: Iterable, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _row(case: str, lhs, rhs, tol: float, rel: float | None = None) -> dict:
    if rel is None:
        rel = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs - rhs)
    return {"case": case, "lhs": lhs, "rhs": rhs, "rel_err": float(rel), "pass": bool(rel <= tol)}


# --------------------------------------------------------------------------


def gamma_suite(cases: int = 1000, seed: int = 0, tol: float | None = None,
                threads: int = 1) -> SuiteReport:
    """Gamma(z+1) = z Gamma(z) and Gamma_C(s) = Gamma_R(s) Gamma_R(s+1)."""
    tol = DEFAULT_TOL["gamma"] if tol is None else tol
    rng = np.random.default_rng(seed)
    z = rng.uniform(-20, 20, cases) + 1j * rng.uniform(-50, 50, cases)
    rec = sf.loggamma(z + 1) - sf.loggamma(z) - np.log(z)
    dup = sf.loggamma_c(z) - sf.loggamma_r(z) - sf.loggamma_r(z + 1)
    # the identities hold modulo 2 pi i in log form
    rec_err = np.abs(np.expm1(rec))
    dup_err = np.abs(np.expm1(dup))
    rep = SuiteReport("gamma")
    for zz, e1, e2 in zip(z, rec_err, dup_err):
        rep.rows.append(_row(f"recurrence z={zz!r}", 1.0, 1.0, tol, e1))
        rep.rows.append(_row(f"duplication s={zz!r}", 1.0, 1.0, tol, e2))
    return rep


def barnes_suite(cases: int = 20, seed: int = 0, tol: float | None = None,
                 threads: int = 1) -> SuiteReport:
    """Barnes' first lemma in Gamma_C form on random admissible tuples."""
    tol = DEFAULT_TOL["barnes"] if tol is None else tol
    rng = np.random.default_rng(seed)
    tuples = [tuple(complex(x, y) for x, y in zip(rng.uniform(0.2, 2.0, 4), rng.uniform(-1, 1, 4)))
              for _ in range(cases)]
    pairs = ordered_map(lambda t: barnes_check(*t), tuples, threads)
    rep = SuiteReport("barnes")
    for t, (lhs, rhs) in zip(tuples, pairs):
        rep.rows.append(_row(f"a,b,c,d={t!r}", lhs, rhs, tol))
    return rep


def _random_distinct(rng, n: int) -> tuple:
    while True:
        al = tuple(Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 13))) for _ in range(n))
        if 0 not in al and len(set(al)) == n:
            return al


def shintani_suite(max_entry: int = 3, max_n: int = 4, tuples: int = 50, seed: int = 0,
                   tol: float | None = None, threads: int = 1) -> SuiteReport:
    """Exact agreement of the two Schur evaluators and the branching recursion."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("shintani")

    def agree(job):
        lam, al = job
        return pw.schur_branching(lam, al) == pw.schur_bialternant(lam, al)

    for n in range(1, max_n + 1):
        alphas = [_random_distinct(rng, n) for _ in range(tuples)]
        lams = list(pw.weights_up_to(n, max_entry))
        jobs = [(lam, al) for lam in lams for al in alphas]
        ok = ordered_map(agree, jobs, threads)
        for lam in lams:
            good = all(ok[i] for i, (l2, _) in enumerate(jobs) if l2 == lam)
            rep.rows.append({"case": f"evaluators n={n} lam={lam.entries}", "lhs": "exact",
                             "rhs": "exact", "rel_err": 0.0 if good else 1.0, "pass": good})
    for n in range(2, max_n + 1):
        al = _random_distinct(rng, n - 1)
        for lam in pw.weights_up_to(n, max_entry):
            good = pw.verify_shintani_recursion(lam, al)
            rep.rows.append({"case": f"recursion lam={lam.entries} alpha={tuple(map(str, al))}",
                             "lhs": "exact", "rhs": "exact", "rel_err": 0.0 if good else 1.0,
                             "pass": good})
    return rep


def lemma_suite(cases: int = 4, seed: int = 0, tol: float | None = None,
                threads: int = 1) -> SuiteReport:
    """The Fourier and Mellin transform lemmas against independent quadrature."""
    tol = DEFAULT_TOL["lemmas"] if tol is None else tol
    rep = SuiteReport("lemmas")
    for name, entry in aw.lemma_checks(seed=seed, cases=cases).items():
        for params, lhs, rhs, err in entry["cases"]:
            rep.rows.append(_row(f"{name} {params!r}", lhs, rhs, tol, err))
    return rep


GL3R_CASES = [(k, w, a) for k in (2, 3) for w in (0.0, 0.3 + 0.1j)
              for a in ((1.0, 1.0), (0.5, 1.5))]


def gl3r_suite(tol: float | None = None, threads: int = 1) -> SuiteReport:
    """GL_3(R) contour formula against the direct two-dimensional integrals."""
    tol = DEFAULT_TOL["gl3r"] if tol is None else tol

    def run(case):
        k, w, (a1, a2) = case
        p = aw.MiyazakiParams(k, w)
        return aw.miyazaki_mb(p, a1, a2), aw.miyazaki_direct(p, a1, a2)

    rep = SuiteReport("gl3r")
    for case, (mb, direct) in zip(GL3R_CASES, ordered_map(run, GL3R_CASES, threads)):
        k, w, a = case
        for mono in mb:
            rep.rows.append(_row(f"kappa={k} w={w!r} a={a} monomial={mono}",
                                 mb[mono], direct[mono], tol))
    return rep


GLNC_N3 = ((0.1, 0.2j, -0.1), ((1.0, 1.0), (0.5, 2.0), (2.0, 0.5)))
GLNC_N2 = (((0.1, 0.2j), (0.2, -0.2), (0.3, -0.1j)), ((0.5,), (1.0,), (2.0,)))


def glnc_cases() -> list:
    out = []
    nu, points = GLNC_N3
    for k in range(3):
        for ell in aw.WeightIndexC.all_for(3, k):
            out += [(nu, k, ell.ell, a) for a in points]
    nus, points = GLNC_N2
    for nu in nus:
        for k in range(3):
            for ell in aw.WeightIndexC.all_for(2, k):
                out += [(nu, k, ell.ell, a) for a in points]
    return out


def glnc_suite(tol: float | None = None, threads: int = 1) -> SuiteReport:
    """GL_n(C) minimal K-type formula against the reduced propagation integral."""

    def run(case):
        nu, k, ell, a = case
        p, w, t = aw.MinimalTypeParamsC(nu, k), aw.WeightIndexC(ell), aw.TorusPointC(a)
        return aw.evaluate_minimal(p, w, t).value, aw.evaluate_direct(p, w, t).value

    cases = glnc_cases()
    rep = SuiteReport("glnc")
    for case, (mb, direct) in zip(cases, ordered_map(run, cases, threads)):
        nu, k, ell, a = case
        bound = tol if tol is not None else (1e-5 if len(nu) == 3 else 1e-8)
        rep.rows.append(_row(f"n={len(nu)} nu={nu!r} kappa={k} ell={ell} a={a}", mb, direct, bound))
    return rep


ISHII_STADE_CASES = [((0.3, -0.3), 2.0, (1.0, 1.7)), ((0.1 + 0.2j, -0.2), 2.5 + 0.5j, (1.2, 2.0))]


def ishii_stade_suite(tol: float | None = None, threads: int = 1) -> SuiteReport:
    """Rank-2 Mellin transform against its integral expression, two sigma each."""
    tol = DEFAULT_TOL["ishii-stade"] if tol is None else tol
    rep = SuiteReport("ishii-stade")
    for mu, w, sigmas in ISHII_STADE_CASES:
        rhs_values = []
        for sigma in sigmas:
            lhs, rhs = aw.ishii_stade_consistency(mu, w, sigma)
            rhs_values.append(rhs)
            rep.rows.append(_row(f"mu={mu!r} w={w!r} sigma={sigma!r}", lhs, rhs, tol))
        rep.rows.append(_row(f"mu={mu!r} w={w!r} sigma-independence {sigmas!r}",
                             rhs_values[0], rhs_values[1], tol))
    return rep


ASAI_N2 = [(nu, k, s) for nu in ((0.0, 0.0), (0.2, -0.2), (0.1j, -0.1j))
           for k in (0, 1, 2) for s in (1.2, 1.5, 2.0)]
ASAI_N3 = [((0.2, 0.0, -0.2), 0, 1.5), ((0.1, 0.0, -0.1), 1, 1.3)]


def asai_suite(n: int | None = None, tol: float | None = None, threads: int = 1,
               mb_step: float | None = None, mb_height: float | None = None,
               window: float | None = None) -> SuiteReport:
    """The Asai zeta integral from the Mellin transform against the closed form."""
    cases = {2: ASAI_N2, 3: ASAI_N3}
    ns = (2, 3) if n is None else (n,)
    kw = {k: v for k, v in (("mb_step", mb_step), ("mb_height", mb_height), ("window", window))
          if v is not None}
    jobs = [AsaiInput(nu, k, s) for m in ns for nu, k, s in cases.get(m, [])]
    if n is not None and n not in cases:
        raise UnsupportedRank("the Asai suite covers n in {2, 3}")

    def run(inp):
        rhs = asai_rhs(inp)
        return asai_lhs_mellin(inp, **kw).value, rhs

    rep = SuiteReport("asai")
    for inp, (lhs, rhs) in zip(jobs, ordered_map(run, jobs, threads)):
        bound = tol if tol is not None else (1e-8 if inp.n == 2 else 1e-3)
        rep.rows.append(_row(f"n={inp.n} nu={inp.nu!r} kappa={inp.kappa} s={inp.s!r}",
                             lhs, rhs, bound))
    return rep


def run_suite(name: str, tol: float | None = None, threads: int = 1, cases: int | None = None,
              n: int | None = None, seed: int = 0, **mb) -> SuiteReport:
    if name == "gamma":
        return gamma_suite(cases or 1000, seed, tol, threads)
    if name == "barnes":
        return barnes_suite(cases or 20, seed, tol, threads)
    if name == "shintani":
        return shintani_suite(seed=seed, threads=threads)
    if name == "lemmas":
        return lemma_suite(cases or 4, seed, tol, threads)
    if name == "gl3r":
        return gl3r_suite(tol, threads)
    if name == "glnc":
        return glnc_suite(tol, threads)
    if name == "ishii-stade":
        return ishii_stade_suite(tol, threads)
    if name == "asai":
        return asai_suite(n, tol, threads, **mb)
    raise KeyError(name)



# --------------------------------------------------------------------------
# engine properties


def integrand_corpus() -> list:
    """(name, integrand) for every family of contour integrands built here."""
    rng = np.random.default_rng(7)
    out = []
    for j in range(3):
        t = [complex(x, y) for x, y in zip(rng.uniform(0.3, 1.5, 4), rng.uniform(-0.5, 0.5, 4))]
        out.append((f"barnes {j}", barnes_integrand(*t)))
    out.append(("ishii-stade rank 2", aw.ishii_stade_rhs_integrand((0.3, -0.3), 2.0, 1.0)))
    out.append(("mellin rank 3", aw.mellin_integrand((0.1, 0.05j, -0.1), (2.0, 2.5))))
    out.append(("spherical n=3", aw.ishii_stade_integrand(
        aw.SphericalParamsC((0.2, 0.0, -0.2)), aw.TorusPointC((1.0, 1.0)))))
    for n, nu, a in ((2, (0.1, 0.2j), (1.0,)), (3, (0.1, 0.2j, -0.1), (1.0, 1.0))):
        for k in range(3):
            for ell in aw.WeightIndexC.all_for(n, k):
                out.append((f"minimal n={n} kappa={k} ell={ell.ell}", aw.whittaker_c_integrand(
                    aw.MinimalTypeParamsC(nu, k), ell, aw.TorusPointC(a))))
    p = aw.MiyazakiParams(2, 0.3 + 0.1j)
    for n1, n2, n3 in p.monomials():
        out.append((f"gl3r monomial {(n1, n2, n3)}", aw.miyazaki_integrand(p, n1, n3, 1.0, 1.0)))
    return out


def _contour(integrand):
    # narrow admissible strips get a proportionally smaller margin
    return find_contour(integrand, margin=min(0.5, 0.8 * max_slack(integrand)), strategy="saddle")


def _shifted_contour(integrand, contour, rng, reach: float = 0.3, keep: float | None = None):
    """A second admissible contour: a random shift shrunk until it stays clear of poles."""
    if keep is None:
        keep = 0.5 * min_slack(integrand, contour.sigma)
    d = rng.normal(size=integrand.nvars)
    d = reach * d / np.linalg.norm(d)
    for _ in range(30):
        other = contour.shifted(d)
        if min_slack(integrand, other.sigma) >= keep:
            return other
        d = d / 2
    return contour.shifted(-d)


def contour_shift_suite(tol: float = 1e-9, threads: int = 1, seed: int = 0) -> SuiteReport:
    """The value of every corpus integrand is the same on two admissible contours."""
    rng = np.random.default_rng(seed)
    jobs = []
    for name, integrand in integrand_corpus():
        c = _contour(integrand)
        jobs.append((name, integrand, c, _shifted_contour(integrand, c, rng)))

    def run(job):
        _, integrand, c1, c2 = job
        return eval_mb(integrand, c1).value, eval_mb(integrand, c2).value

    rep = SuiteReport("contour-shift")
    for (name, _, c1, c2), (v1, v2) in zip(jobs, ordered_map(run, jobs, threads)):
        rep.rows.append(_row(f"{name} sigma={c1.sigma} -> {c2.sigma}", v2, v1, tol))
    return rep


def corpus_digest(threads: int = 1) -> str:
    """Full-precision text of every corpus value, for byte comparisons."""
    corpus = integrand_corpus()

    def run(item):
        name, integrand = item
        return eval_mb(integrand, _contour(integrand))

    lines = [f"{name}\t{r.value!r}\t{r.error_estimate!r}"
             for (name, _), r in zip(corpus, ordered_map(run, corpus, threads))]
    return "\n".join(lines) + "\n"
