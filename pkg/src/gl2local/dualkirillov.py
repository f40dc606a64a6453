"""Dual Kirillov model: C-functions, Weyl action, classical vectors, matrix coefficients.

Characters nu of O^x are extended to F^x by nu(p) = 1.  A C-function is kept
in the factored form ``c * t^(-n_C) * Q(1/t) / P(t)`` with Q(0) = P(0) = 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .gauss import root_number
from .localfield import (AddChar, FiniteLocalField, MultChar, UnitChar, all_unit_chars,
                         totient_pk, unit_rep_ints)
from .whittaker import (PrincipalOrComplementary, Special, SupercuspidalInterface, Unramified,
                        complete_h)

DEFAULT_WINDOW = (-20, 200)


# ---------------------------------------------------------------------------
# Laurent polynomials


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentPoly:
    """sum_n coeffs[n - lo] t^n; ``truncated`` marks a cut-off infinite series."""

    coeffs: np.ndarray
    lo: int = 0
    truncated: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly":
        if not d:
            return cls(np.zeros(1, dtype=complex), 0)
        lo, hi = min(d), max(d)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in d.items():
            c[k - lo] = v
        return cls(c, lo)

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "LaurentPoly":
        return cls(np.array([c], dtype=complex), n)

    @classmethod
    def rational(cls, num: list, den: list, hi: int, shift: int = 0) -> "LaurentPoly":
        """t^shift * num(t) / den(t) expanded up to degree ``hi`` (den(0) != 0)."""
        n = hi - shift + 1
        if n <= 0:
            return cls(np.zeros(1, dtype=complex), hi, True)
        out = np.zeros(n, dtype=complex)
        num = np.asarray(num, dtype=complex)
        den = np.asarray(den, dtype=complex)
        out[: min(n, len(num))] = num[:n]
        for k in range(n):
            acc = out[k]
            for i in range(1, min(k, len(den) - 1) + 1):
                acc -= den[i] * out[k - i]
            out[k] = acc / den[0]
        return cls(out, shift, len(den) > 1)

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def __getitem__(self, n: int) -> complex:
        i = n - self.lo
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def to_dict(self, tol: float = 0.0) -> dict:
        return {self.lo + i: complex(c) for i, c in enumerate(self.coeffs) if abs(c) > tol}

    def dense(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo: b - lo + 1] = self.coeffs[a - self.lo: b - self.lo + 1]
        return out

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return LaurentPoly(self.dense(lo, hi) + other.dense(lo, hi), lo,
                           self.truncated or other.truncated)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "LaurentPoly":
        return LaurentPoly(self.coeffs * c, self.lo, self.truncated)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t^k."""
        return LaurentPoly(self.coeffs, self.lo + k, self.truncated)

    def mul(self, other: "LaurentPoly", window: tuple[int, int] | None = None) -> "LaurentPoly":
        c = np.convolve(self.coeffs, other.coeffs)
        out = LaurentPoly(c, self.lo + other.lo, self.truncated or other.truncated)
        return out.clip(*window) if window else out

    __mul__ = mul

    def clip(self, lo: int, hi: int) -> "LaurentPoly":
        cut = self.lo < lo or self.hi > hi
        return LaurentPoly(self.dense(lo, hi), lo, self.truncated or cut)

    def substitute_inverse(self, z: complex) -> "LaurentPoly":
        """F(z / t) = sum F_n z^n t^-n."""
        n = np.arange(self.lo, self.hi + 1)
        return LaurentPoly((self.coeffs * complex(z) ** n)[::-1], -self.hi, self.truncated)

    def evaluate(self, t: complex) -> complex:
        n = np.arange(self.lo, self.hi + 1)
        return complex(np.sum(self.coeffs * complex(t) ** n))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True)
class DKVector:
    components: dict  # UnitChar -> LaurentPoly

    def norm_sq(self) -> float:
        return sum(F.norm_sq() for F in self.components.values())

    def scale(self, c: complex) -> "DKVector":
        return DKVector({k: F.scale(c) for k, F in self.components.items()})

    def __getitem__(self, nu: UnitChar) -> LaurentPoly:
        return self.components.get(nu, LaurentPoly.from_dict({}))

    def inner(self, other: "DKVector") -> complex:
        total = 0j
        for nu, F in self.components.items():
            G = other[nu]
            lo, hi = min(F.lo, G.lo), max(F.hi, G.hi)
            total += complex(np.sum(F.dense(lo, hi) * np.conj(G.dense(lo, hi))))
        return total


def diag_action(F: DKVector, delta: int, l: int) -> DKVector:
    """a(delta p^l): F(nu, t) -> t^-l nu(delta)^-1 F(nu, t)."""
    return DKVector({nu: G.shift(-l).scale(1 / nu(delta)) for nu, G in F.components.items()})


# ---------------------------------------------------------------------------
# representation data


def _as_ps(rep):
    if isinstance(rep, Unramified):
        return PrincipalOrComplementary(MultChar.unramified(rep.q, rep.alpha1),
                                        MultChar.unramified(rep.q, rep.alpha2))
    return rep


def rep_prime(rep) -> int:
    rep = _as_ps(rep)
    if isinstance(rep, PrincipalOrComplementary):
        return rep.mu1.p
    if isinstance(rep, Special):
        return rep.mu.p
    return rep.central.p


def central_char(rep) -> MultChar:
    return _as_ps(rep).central


def conductor_of(rep) -> int:
    return _as_ps(rep).conductor


@dataclass(frozen=True)
class CData:
    """C(nu, t) = c t^(-nC) Q(1/t) / P(t)."""

    c: complex
    nC: int
    Q: tuple
    P: tuple

    def evaluate(self, t: complex) -> complex:
        qv = sum(a * t ** (-i) for i, a in enumerate(self.Q))
        pv = sum(a * t**i for i, a in enumerate(self.P))
        return self.c * t ** (-self.nC) * qv / pv

    def laurent(self, window: tuple[int, int] = DEFAULT_WINDOW) -> LaurentPoly:
        lo, hi = window
        qpoly = LaurentPoly(np.array(self.Q[::-1], dtype=complex), -(len(self.Q) - 1))
        inv_p = LaurentPoly.rational([1.0], list(self.P), hi + self.nC + len(self.Q))
        out = qpoly.mul(inv_p).shift(-self.nC).scale(self.c)
        if out.lo < lo:
            raise WindowError("window does not reach the lowest degree of C")
        return out.clip(lo, hi)


def _root(rho: MultChar) -> complex:
    f = FiniteLocalField(rho.p, 0, max(rho.level, 1))
    return root_number(rho, AddChar(f))


def c_data(rep, nu: UnitChar) -> CData:
    """Factored C-function of the representation at the unit character nu."""
    rep = _as_ps(rep)
    if isinstance(rep, SupercuspidalInterface):
        if nu not in rep.n_nu:
            raise KeyError(f"no C-function data for {nu}")
        return CData(complex(rep.C0[nu]), -rep.n_nu[nu], (1.0,), (1.0,))
    p = rep_prime(rep)
    x = p**-0.5
    nu_inv = MultChar(nu.inverse(), 1.0)
    if isinstance(rep, Special):
        mu = rep.mu
        rho = nu_inv * mu.inverse()
        if rho.level > 0:
            return CData(_root(rho) ** 2, 2 * rho.level, (1.0,), (1.0,))
        m = complex(mu.at_uniformizer)
        return CData(-1 / m, 1, (1.0, -1 / (m * p)), (1.0, -m / p))
    mu1, mu2 = rep.mu1, rep.mu2
    r1, r2 = nu_inv * mu1.inverse(), nu_inv * mu2.inverse()
    n1, n2 = r1.level, r2.level
    c, nC, Q, P = 1.0 + 0j, 0, [1.0], [1.0]
    for rho, n, mu in ((r1, n1, mu1), (r2, n2, mu2)):
        if n > 0:
            c *= _root(rho)
            nC += n
        else:
            m = complex(mu.at_uniformizer)
            Q = np.convolve(Q, [1.0, -x / m])
            P = np.convolve(P, [1.0, -m * x])
    return CData(c, nC, tuple(complex(v) for v in Q), tuple(complex(v) for v in P))


def c_function(rep, nu: UnitChar, window: tuple[int, int] = DEFAULT_WINDOW) -> LaurentPoly:
    return c_data(rep, nu).laurent(window)


def weyl_partner(rep, nu: UnitChar) -> UnitChar:
    """nu^-1 eps0^-1."""
    return (nu * central_char(rep).unit_part).inverse()


def weyl_action(F: DKVector, rep, window: tuple[int, int] = (-200, 200)) -> DKVector:
    """w.F(nu, t) = C(nu, t) F(nu^-1 eps0^-1, 1 / (z0 t))."""
    z0 = complex(central_char(rep).at_uniformizer)
    lo, hi = window
    out = {}
    for mu, G in F.components.items():
        nu = weyl_partner(rep, mu)
        C = c_function(rep, nu, (lo - 40, hi + 40))
        out[nu] = C.mul(G.substitute_inverse(1 / z0), window)
    return DKVector(out)


# ---------------------------------------------------------------------------
# classical vectors


def _unit_normalize(G: LaurentPoly) -> LaurentPoly:
    return G.scale(1 / math.sqrt(G.norm_sq()))


def classical_vector_oracle(rep, N: int, hi: int = DEFAULT_WINDOW[1]) -> LaurentPoly:
    """Unit vector of V_N orthogonal to V_(N-1), V_N = {S(z0 t) / Q(z0 t) : deg S <= N - n_C}.

    Q and n_C come from the C-function at the trivial character, the Weyl
    partner of eps0^-1.  Built by QR on the truncated coefficient columns.
    """
    p = rep_prime(rep)
    cd = c_data(rep, UnitChar.trivial(p))
    K = N - cd.nC
    if K < 0:
        raise ValueError(f"N = {N} is below the conductor {cd.nC}")
    z0 = complex(central_char(rep).at_uniformizer)
    zq = [a * z0**i for i, a in enumerate(cd.Q)]
    cols = [LaurentPoly.rational([1.0], zq, hi, shift=k).dense(0, hi) for k in range(K + 1)]
    Qm, _ = np.linalg.qr(np.array(cols).T)
    return _unit_normalize(LaurentPoly(Qm[:, K], 0, True))


def _geom(a: complex, hi: int, shift: int = 0) -> LaurentPoly:
    return LaurentPoly.rational([1.0], [1.0, -a], hi, shift)


def _geom2(a: complex, hi: int, shift: int = 0) -> LaurentPoly:
    return LaurentPoly.rational([1.0], [1.0, -2 * a, a * a], hi, shift)


def classical_vector_display(rep, N: int, hi: int = DEFAULT_WINDOW[1], literal: bool = False) -> LaurentPoly:
    """Closed-form classical vector on the eps0^-1 component, unit norm.

    ``literal`` keeps the printed constant for one ramified and one unramified
    character at N > c; otherwise the corrected constant is used.
    """
    rep = _as_ps(rep)
    c = conductor_of(rep)
    if N < c:
        raise ValueError(f"N = {N} is below the conductor {c}")
    if isinstance(rep, SupercuspidalInterface):
        return LaurentPoly.monomial(N - c)
    p = rep_prime(rep)
    x = p**-0.5
    if isinstance(rep, Special):
        l = rep.mu.level
        if l > 0:
            return LaurentPoly.monomial(N - 2 * l)
        m = complex(rep.mu.at_uniformizer)
        if N == 1:
            return _unit_normalize(_geom(m / p, hi))
        head = LaurentPoly.monomial(N - 2, -(1 / m) / p / (1 - p**-2.0))
        return _unit_normalize(head + _geom(m / p, hi, N - 1))
    a, b = rep.mu1.level, rep.mu2.level
    m1, m2 = complex(rep.mu1.at_uniformizer), complex(rep.mu2.at_uniformizer)
    if a > 0 and b > 0:
        return LaurentPoly.monomial(N - a - b)
    if a > 0 or b > 0:
        m, n = (m1, a) if a > 0 else (m2, b)
        if N == n:
            return _unit_normalize(_geom(m * x, hi))
        if literal:
            k = (1 - np.conj(m) * x) / (1 - abs(m) ** 2 / p)
        else:
            k = np.conj(m) * x / (1 - abs(m) ** 2 / p)
        return _unit_normalize(LaurentPoly.monomial(N - n - 1, -k) + _geom(m * x, hi, N - n))
    if abs(m1 - m2) > 1e-12:
        A, B = 1 - abs(m1) ** 2 / p, 1 - abs(m2) ** 2 / p
        C = 1 - m1 * np.conj(m2) / p
        if N == 0:
            return _unit_normalize(LaurentPoly.rational([1.0], [1.0, -(m1 + m2) * x, m1 * m2 / p], hi))
        tail = _geom(m1 * x, hi).scale(A * C) - _geom(m2 * x, hi).scale(B * np.conj(C))
        if N == 1:
            return _unit_normalize(tail)
        D = np.conj(m1) * np.conj(m2) * (m1 - m2) * p**-1.5
        return _unit_normalize((LaurentPoly.monomial(0, D) + tail.shift(1)).shift(N - 2).clip(0, hi))
    m = m1
    s2 = abs(m) ** 2 / p
    if N == 0:
        return _unit_normalize(_geom2(m * x, hi))
    body = _geom(m * x, hi).scale(1 + s2) - _geom2(m * x, hi).scale(1 - s2)
    if N == 1:
        return _unit_normalize(body)
    D = -np.conj(m) * abs(m) ** 2 * p**-1.5 / (1 - s2)
    return _unit_normalize((LaurentPoly.monomial(0, D) + body.shift(1)).shift(N - 2).clip(0, hi))


def classical_vector(rep, N: int, hi: int = DEFAULT_WINDOW[1]) -> DKVector:
    """v_N(pi) as a unit vector supported on the eps0^-1 component."""
    nu0 = central_char(rep).unit_part.inverse()
    return DKVector({nu0: classical_vector_display(rep, N, hi)})


def matrix_coefficient(rep, N: int, j: int, hi: int = DEFAULT_WINDOW[1], oracle: bool = False) -> complex:
    """<a(p^j) v_N, v_N> / ||v_N||^2."""
    G = classical_vector_oracle(rep, N, hi) if oracle else classical_vector_display(rep, N, hi)
    if G.hi - abs(j) < G.lo:
        raise WindowError("window too small for this j")
    a = G.dense(G.lo, G.hi)
    if j >= 0:
        return complex(np.sum(a[j:] * np.conj(a[: len(a) - j])) / np.sum(np.abs(a) ** 2))
    return np.conj(matrix_coefficient(rep, N, -j, hi, oracle))


def xi_finite(n: int, q: int) -> float:
    n = abs(n)
    return q ** (-n / 2) * (1 + n * (1 - 1 / q) / (1 + 1 / q))


def matrix_coefficient_closed(rep, N: int, j: int, literal: bool = False) -> float:
    """|<a(p^j) v_N, v_N>| / ||v_N||^2 from the closed displays.

    ``literal`` drops the absolute value in the equal-character N = 1 display.
    """
    rep = _as_ps(rep)
    aj = abs(j)
    delta = 1.0 if j == 0 else 0.0
    if isinstance(rep, SupercuspidalInterface):
        return delta
    p = rep_prime(rep)
    if isinstance(rep, Special):
        if rep.mu.level == 0 and N == 1:
            return float(p) ** (-aj)
        return delta
    a, b = rep.mu1.level, rep.mu2.level
    if a > 0 and b > 0:
        return delta
    if a > 0 or b > 0:
        return p ** (-aj / 2) if N == a + b else delta
    t1, t2 = complex(rep.mu1.at_uniformizer), complex(rep.mu2.at_uniformizer)
    if N >= 2:
        return delta
    if abs(t1 - t2) > 1e-12:
        h, hm = complete_h(t1, t2, aj), complete_h(t1, t2, aj - 2)
        inner = h - t1 * t2 * hm / p if N == 0 else h / p - t1 * t2 * hm
        return p ** (-aj / 2) / (1 + 1 / p) * abs(inner)
    r = (1 - 1 / p) / (1 + 1 / p)
    if N == 0:
        return p ** (-aj / 2) * (1 + aj * r)
    val = p ** (-aj / 2) * (1 - aj * r)
    return val if literal else abs(val)


# ---------------------------------------------------------------------------
# K[N]-fixed vectors


@dataclass(frozen=True)
class SupportRule:
    """F_n(nu) = 0 for n < lo; sum_i coeffs[i] F_(k-i) = 0 for every k > threshold."""

    nu: UnitChar
    lo: int
    threshold: int
    coeffs: tuple

    def violations(self, G: LaurentPoly, upto: int | None = None) -> float:
        top = G.hi if upto is None else upto
        worst = max((abs(G[n]) for n in range(G.lo, self.lo)), default=0.0)
        for k in range(self.threshold + 1, top + 1):
            worst = max(worst, abs(sum(c * G[k - i] for i, c in enumerate(self.coeffs))))
        return worst


def k_fixed_support(rep, N: int) -> dict:
    """Per-character support rules for K[N]-fixed vectors (characters of level <= N)."""
    p = rep_prime(rep)
    z0 = complex(central_char(rep).at_uniformizer)
    out = {}
    for nu in all_unit_chars(p, N):
        try:
            cd = c_data(rep, weyl_partner(rep, nu))
        except KeyError:
            continue
        coeffs = tuple(a * z0**i for i, a in enumerate(cd.Q))
        out[nu] = SupportRule(nu, -N, N - cd.nC, coeffs)
    return out


def support_rule(rep, N: int, nu: UnitChar) -> SupportRule | None:
    """None when nu cannot occur in a K[N]-fixed vector."""
    if nu.level > N:
        return None
    return k_fixed_support(rep, N).get(nu)


# ---------------------------------------------------------------------------
# branching


def branching_dimension(mu1: MultChar, mu2: MultChar, N: int) -> int:
    v = (mu1.unit_part * mu2.unit_part.inverse()).level
    if N < max(mu1.level, mu2.level):
        raise ValueError("N below the character conductors")
    return N + 1 - v


def _gl2_order(p: int, N: int) -> int:
    return p ** (4 * (N - 1)) * (p * p - 1) * (p * p - p)


def branching_oracle(chi1: UnitChar, chi2: UnitChar, N: int, check_mass: bool = False) -> dict:
    """Mackey count for Ind from the upper Borel of GL2(Z/p^N) of (chi1, chi2).

    For each double coset representative g in {1, w, n_-(p^k)}, enumerates
    the upper-triangular b with g^-1 b g upper triangular and tests whether
    the inducing character agrees on b and g^-1 b g.
    """
    p = chi1.p
    mod = p**N
    units = unit_rep_ints(p, N)
    A, D, B = np.meshgrid(units, units, np.arange(mod, dtype=np.int64), indexing="ij")
    A, D, B = A.ravel(), D.ravel(), B.ravel()
    base = chi1.values(A) * chi2.values(D)
    reps = {"1": None, "w": "w"}
    reps.update({f"n-({p}^{k})": p**k for k in range(1, N)})
    contributes, stab = {}, {}
    for name, g in reps.items():
        if g is None:
            ok = np.ones(A.shape, bool)
            a2, d2 = A, D
        elif g == "w":
            ok = B == 0
            a2, d2 = D, A
        else:
            x = g
            ok = (x * (D - A - B * x)) % mod == 0
            a2, d2 = (A + B * x) % mod, (D - B * x) % mod
        other = chi1.values(a2[ok]) * chi2.values(d2[ok])
        contributes[name] = bool(np.all(np.abs(base[ok] - other) < 1e-9))
        stab[name] = int(ok.sum())
    out = {"cosets": contributes, "dimension": sum(contributes.values())}
    if check_mass:
        borel = len(units) ** 2 * mod
        out["mass_ok"] = sum(borel * borel // s for s in stab.values()) == _gl2_order(p, N)
    return out


def character_pairs(p: int, level: int):
    chars = all_unit_chars(p, level)
    return itertools.product(chars, chars)
