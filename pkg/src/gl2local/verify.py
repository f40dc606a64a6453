"""Numerical checks shared by ``gl2local verify-all`` and the acceptance tests.

Each ``check_*`` function returns a :class:`CheckResult`.  ``quick=True``
shrinks grids and draw counts so the whole suite runs in seconds; the full
mode uses the acceptance grids and enforces the runtime budgets.
"""

from __future__ import annotations

import cmath
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import amplify, dualkirillov as dk, gauss, spherical, su2, whittaker as wh
from .localfield import AddChar, FiniteLocalField, MultChar, UnitChar, all_unit_chars

JOBS_ENV = "GL2LOCAL_JOBS"


@dataclass
class CheckResult:
    id: int
    name: str
    passed: bool
    residual: float
    tolerance: float
    elapsed: float = 0.0
    budget: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _timed(cid: int, name: str, default_tol: float, budget: float | None):
    """Decorator: time the body, fold the runtime budget into ``passed``."""

    def wrap(fn: Callable[..., tuple[bool, float, dict]]):
        def run(quick: bool = False, seed: int = 0, tol: float | None = None) -> CheckResult:
            t = default_tol if tol is None else tol
            t0 = time.perf_counter()
            ok, res, detail = fn(quick=quick, seed=seed, tol=t)
            dt = time.perf_counter() - t0
            b = None if quick else budget
            if b is not None and dt >= b:
                ok = False
                detail["over_budget"] = True
            return CheckResult(cid, name, bool(ok), float(res), t, round(dt, 3), b, detail)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _u(th: float) -> complex:
    return cmath.exp(1j * th)


def sample_representations(q: int) -> dict[str, object]:
    """Fixed family covering every branch of the classical-vector formulas."""
    return {
        "unr": wh.Unramified(_u(0.4), _u(1.9), q),
        "eq": wh.Unramified(_u(0.4), _u(0.4), q),
        "ram1": wh.PrincipalOrComplementary(MultChar(UnitChar.make(q, 1, 1), _u(0.3)),
                                            MultChar.unramified(q, _u(1.1))),
        "ram2": wh.PrincipalOrComplementary(MultChar.unramified(q, _u(1.1)),
                                            MultChar(UnitChar.make(q, 2, 1), _u(0.3))),
        "ramboth": wh.PrincipalOrComplementary(MultChar(UnitChar.make(q, 1, 1), _u(0.3)),
                                               MultChar(UnitChar.make(q, 2, 1), _u(2.0))),
        "sp0": wh.Special(MultChar.unramified(q, _u(0.8))),
        "sp1": wh.Special(MultChar(UnitChar.make(q, 1, 1), _u(0.8))),
        "comp": wh.Unramified(q**0.2 * _u(0.5), q**-0.2 * _u(0.5), q),
    }


NON_TEMPERED = {"comp"}


# ---------------------------------------------------------------------------


@_timed(1, "gauss_sum_modulus_law", 1e-10, 5.0)
def check_gauss(quick: bool = False, seed: int = 0, tol: float = 0.0):
    qs = (3, 5) if quick else (3, 5, 7, 11)
    worst, count = 0.0, 0
    for q in qs:
        psi = AddChar(FiniteLocalField(q, 0, 4))
        for chi in all_unit_chars(q, 2):
            r = chi.level
            for lev in range(0, 4):
                g = abs(gauss.gauss_sum(chi, psi, lev).value)
                worst = max(worst, abs(g - gauss.gauss_modulus_law(q, r, lev)))
                count += 1
    return worst <= tol, worst, {"cases": count}


@_timed(2, "unramified_zeta_equals_L", 1e-9, 2.0)
def check_zeta(quick: bool = False, seed: int = 0, tol: float = 0.0):
    rng = np.random.default_rng(seed)
    draws = 10 if quick else 50
    worst_closed = worst_brute = 0.0
    for _ in range(draws):
        q = int(rng.choice([3, 5, 7, 11]))
        rho = q ** rng.uniform(-0.2, 0.2)
        a1 = rho * _u(rng.uniform(0, 2 * math.pi))
        a2 = _u(rng.uniform(0, 2 * math.pi)) / rho
        s = complex(rng.uniform(0.05, 1.5), rng.uniform(-10, 10))
        chi = MultChar.unramified(q, _u(rng.uniform(0, 2 * math.pi)))
        psi = AddChar(FiniteLocalField(q, 0, 4))
        W = wh.WhittakerSeq.unramified(a1, a2, q)
        L = wh.l_factor(a1, a2, chi.at_uniformizer, q, s)
        worst_closed = max(worst_closed, abs(wh.local_zeta(W, chi, psi, s) - L))
        worst_brute = max(worst_brute, abs(wh.local_zeta_bruteforce(W, chi, psi, s, 0, 1) - L))
    worst = max(worst_closed, worst_brute)
    return worst <= tol, worst, {"draws": draws, "closed": worst_closed, "bruteforce": worst_brute}


@_timed(3, "sigma_v_closed_forms_and_tempered_bounds", 1e-8, 10.0)
def check_sigma(quick: bool = False, seed: int = 0, tol: float = 0.0):
    rng = np.random.default_rng(seed)
    draws = 10 if quick else 50
    worst = 0.0
    worst_ratio = 0.0
    for case in range(1, 9):
        for _ in range(draws):
            q = int(rng.choice([3, 5, 7, 11]))
            rho = q ** rng.uniform(0, 0.2)
            rep = wh.Unramified(rho * _u(rng.uniform(0, 2 * math.pi)), _u(rng.uniform(0, 2 * math.pi)) / rho, q)
            s = complex(rng.uniform(0.05, 1), rng.uniform(-10, 10))
            d = int(rng.integers(0, 3))
            worst = max(worst, abs(wh.sigma_v(case, rep, s, d) - wh.sigma_v_bruteforce(case, rep, s, d)))
            trep = wh.Unramified(_u(rng.uniform(0, 2 * math.pi)), _u(rng.uniform(0, 2 * math.pi)), q)
            st = complex(0.05, rng.uniform(-20, 20))
            ratio = abs(wh.sigma_v(case, trep, st, d)) / wh.sigma_v_tempered_bound(case, trep, 0.05, d)
            worst_ratio = max(worst_ratio, ratio)
    ok = worst <= tol and worst_ratio <= 1 + 1e-12
    return ok, worst, {"draws_per_case": draws, "max_bound_ratio": worst_ratio}


def _supercuspidal_probe(q: int) -> object:
    triv = UnitChar.trivial(q)
    return wh.SupercuspidalInterface(n_nu={triv: -2}, C0={triv: 1.0}, central=MultChar.unramified(q, 1.0))


@_timed(4, "matrix_coefficients_vs_dual_kirillov", 1e-8, 30.0)
def check_matcoef(quick: bool = False, seed: int = 0, tol: float = 0.0):
    qs = (3,) if quick else (3, 5, 7)
    jmax = 4 if quick else 6
    worst, worst_xi, cases = 0.0, 0.0, 0
    for q in qs:
        reps = sample_representations(q)
        reps["sc"] = _supercuspidal_probe(q)
        for name, rep in reps.items():
            c = dk.conductor_of(rep)
            for N in range(c, c + 3):
                for j in range(-jmax, jmax + 1):
                    oracle = abs(dk.matrix_coefficient(rep, N, j, oracle=True))
                    closed = dk.matrix_coefficient_closed(rep, N, j)
                    worst = max(worst, abs(oracle - closed))
                    if name not in NON_TEMPERED:
                        worst_xi = max(worst_xi, closed / dk.xi_finite(j, q))
                    cases += 1
    ok = worst <= tol and worst_xi <= 1 + 1e-12
    return ok, worst, {"cases": cases, "max_ratio_to_xi": worst_xi}


@_timed(5, "branching_dimension", 0.0, 5.0)
def check_branching(quick: bool = False, seed: int = 0, tol: float = 0.0):
    Nmax = 2 if quick else 3
    bad, cases = [], 0
    for N in range(1, Nmax + 1):
        for c1, c2 in dk.character_pairs(3, 2):
            if max(c1.level, c2.level) > N:
                continue
            o = dk.branching_oracle(c1, c2, N, check_mass=True)
            d = dk.branching_dimension(MultChar(c1), MultChar(c2), N)
            cases += 1
            if o["dimension"] != d or not o["mass_ok"]:
                bad.append([N, c1.level, c2.level, o["dimension"], d])
    return len(bad) <= tol, float(len(bad)), {"cases": cases, "mismatches": bad}


@_timed(6, "macdonald_identity_exact", 0.0, 1.0)
def check_macdonald(quick: bool = False, seed: int = 0, tol: float = 0.0):
    mmax = 20 if quick else 50
    bad = [(q, m) for q in (2, 3, 5, 7, 11) for m in range(mmax + 1) if not spherical.macdonald_check(m, q)]
    return len(bad) <= tol, float(len(bad)), {"m_max": mmax, "failures": bad}


@_timed(7, "translated_xi_integral", 1e-8, 60.0)
def check_xi_integral(quick: bool = False, seed: int = 0, tol: float = 0.0):
    dmax = 2 if quick else 3
    qs = (3,) if quick else (3, 5)
    worst, worst_series, worst_display = 0.0, 0.0, 0.0
    display_d0 = []
    for q in qs:
        for theta in (0.0, 0.1, 0.25):
            a = 1 - 2 * theta
            for d in range(dmax + 1):
                spec = spherical.TranslatedTorusSpec(-d, theta)
                closed = spherical.xi_integral_finite(spec, q).mass_one
                brute = spherical.xi_integral_finite_bruteforce(spec, q)
                worst = max(worst, abs(closed - brute))
                disp = spherical.xi_integral_finite_display(spec, q)
                if d == 0:
                    # independent summation of 2 sum_{n>0} Xi(n)^a + 1
                    n = np.arange(1, 4000)
                    series = 2 * float(np.sum(spherical.xi_finite(n, q) ** a)) + 1
                    worst_series = max(worst_series, abs(closed - series))
                    display_d0.append(disp - brute)
                else:
                    worst_display = max(worst_display, abs(disp - brute))
    res = max(worst, worst_series, worst_display)
    return res <= tol, res, {
        "closed_vs_bruteforce": worst, "d0_vs_series": worst_series,
        "display_vs_bruteforce_d_ge_1": worst_display,
        "display_minus_bruteforce_d0": sorted(set(round(x, 9) for x in display_d0)),
    }


@_timed(8, "intertwining_eigenvalues", 1e-8, 5.0)
def check_intertwining(quick: bool = False, seed: int = 0, tol: float = 0.0):
    svals = (0.3, 0.7, 1.4)
    exact = 0.0
    for s in svals:
        exact = max(exact, abs(su2.intertwining_eigenvalue(s, 0) - math.pi / s))
        exact = max(exact, abs(su2.intertwining_eigenvalue(s, 2, 1) + math.pi * (s - 1) / (s * (s + 1))))
    oracle = max(abs(su2.intertwining_eigenvalue(s, n) - su2.intertwining_oracle(s, n))
                 for s in svals for n in range(0, 9, 2))
    rec = max(su2.intertwining_recurrence_residual(s, k) for s in svals for k in range(1, 4))
    ok = exact < 1e-12 and oracle <= tol and rec < 1e-10
    return ok, max(exact, oracle), {"exact": exact, "oracle": oracle, "recurrence": rec}


def _rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@_timed(9, "exponent_optimizer", 0.0, 1.0)
def check_optimizer(quick: bool = False, seed: int = 0, tol: float = 0.0):
    thetas = [Fraction(i, 40) for i in range(20)]
    bad = []
    for th in thetas:
        rep = amplify.optimize_exponents(th)
        if rep.delta != (1 - 2 * th) / 8 or not rep.witness_optimal:
            bad.append(_rat(th))
    r0 = amplify.optimize_exponents(0)
    r7 = amplify.optimize_exponents(Fraction(7, 64))
    anchors = r0.delta == Fraction(1, 8) and r7.delta == Fraction(25, 256)
    return len(bad) <= tol and anchors, float(len(bad)), {
        "thetas": len(thetas), "failures": bad,
        "delta_0": _rat(r0.delta), "delta_7_64": _rat(r7.delta),
    }


@_timed(10, "archimedean_gauss_scan", 0.0, 120.0)
def check_arch_gauss(quick: bool = False, seed: int = 0, tol: float = 0.0):
    Cs = (20, 50) if quick else (20, 50, 100, 200)
    points = 60 if quick else 200
    detail, ok = {}, True
    for C in Cs:
        phase = 2.0 * (C - 2)
        ts, vals = gauss.arch_gauss_grid(phase, 0, 0.1, points)
        mags = np.abs(vals)
        i = int(np.argmax(mags))
        lower = gauss.lower_envelope(C)
        upper = np.array([gauss.upper_envelope(C, t) for t in ts])
        loose = gauss.UPPER_K * np.minimum(C, ts) ** -0.4
        row = {
            "t_star": float(ts[i]), "best": float(mags[i]), "lower": lower,
            "upper_ratio": float(np.max(mags / upper)), "loose_ratio": float(np.max(mags / loose)),
        }
        row["ok"] = bool(mags[i] >= lower and row["upper_ratio"] <= 1 and row["loose_ratio"] <= 1)
        ok &= row["ok"]
        detail[str(C)] = row
    return ok, 0.0 if ok else 1.0, detail


@_timed(11, "tuple_classification", 0.0, 1.0)
def check_tuples(quick: bool = False, seed: int = 0, tol: float = 0.0):
    brute = amplify.count_tuples_bruteforce(5)
    formula_ok = all(brute[t] == amplify.count_tuples(5, t) for t in amplify.TupleType)
    sums_ok = all(sum(amplify.count_tuples(M, t) for t in amplify.TupleType) == M**4 for M in range(1, 13))
    return formula_ok and sums_ok, 0.0, {
        "classified": sum(brute.values()), "formula_matches_M5": formula_ok, "sums_M_le_12": sums_ok,
    }


CHECKS: dict[int, Callable[..., CheckResult]] = {
    1: check_gauss, 2: check_zeta, 3: check_sigma, 4: check_matcoef, 5: check_branching,
    6: check_macdonald, 7: check_xi_integral, 8: check_intertwining, 9: check_optimizer,
    10: check_arch_gauss, 11: check_tuples,
}


def _run_one(args: tuple[int, bool, int, float | None]) -> CheckResult:
    cid, quick, seed, tol = args
    return CHECKS[cid](quick=quick, seed=seed, tol=tol)


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ValueError(f"{JOBS_ENV} must be an integer, got {raw!r}") from exc


def run_all(quick: bool = False, seed: int = 0, jobs: int | None = None,
            only: list[int] | None = None, tols: dict[int, float] | None = None) -> list[CheckResult]:
    """Run the checks in id order, optionally in parallel processes.

    ``tols`` overrides the pass tolerance of individual checks by id.
    """
    ids = sorted(only) if only else sorted(CHECKS)
    unknown = set(ids) - set(CHECKS) | set(tols or {}) - set(CHECKS)
    if unknown:
        raise KeyError(f"unknown check ids: {sorted(unknown)}")
    jobs = default_jobs() if jobs is None else jobs
    args = [(i, quick, seed, (tols or {}).get(i)) for i in ids]
    if jobs <= 1:
        return [_run_one(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run_one, args))
