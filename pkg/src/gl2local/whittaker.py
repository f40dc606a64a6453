"""Whittaker values, local zeta integrals and Rankin-Selberg local factors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gauss import gauss_sum
from .localfield import AddChar, FiniteLocalField, MultChar, UnitChar, unit_rep_ints


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class Unramified:
    alpha1: complex
    alpha2: complex
    q: int

    def __post_init__(self):
        if abs(abs(self.alpha1 * self.alpha2) - 1) > 1e-9:
            raise ValueError("|alpha1 alpha2| must be 1")
        if max(abs(self.alpha1), abs(self.alpha2)) > self.q**0.5 * (1 + 1e-12):
            raise ValueError("|alpha_i| must not exceed q^(1/2)")

    @property
    def tr(self) -> complex:
        return self.alpha1 + self.alpha2

    @property
    def n(self) -> complex:
        return self.alpha1 * self.alpha2

    @property
    def theta(self) -> float:
        """log_q max |alpha_i|."""
        return math.log(max(abs(self.alpha1), abs(self.alpha2))) / math.log(self.q)

    @property
    def tempered(self) -> bool:
        return abs(abs(self.alpha1) - 1) < 1e-12 and abs(abs(self.alpha2) - 1) < 1e-12

    @property
    def conductor(self) -> int:
        return 0


@dataclass(frozen=True)
class PrincipalOrComplementary:
    mu1: MultChar
    mu2: MultChar

    @property
    def central(self) -> MultChar:
        return self.mu1 * self.mu2

    @property
    def conductor(self) -> int:
        return self.mu1.level + self.mu2.level


@dataclass(frozen=True)
class Special:
    """pi(mu |.|^(1/2), mu |.|^(-1/2))."""

    mu: MultChar

    @property
    def central(self) -> MultChar:
        return self.mu * self.mu

    @property
    def conductor(self) -> int:
        return max(1, 2 * self.mu.level)


@dataclass(frozen=True)
class SupercuspidalInterface:
    """User-supplied C-function data: C(nu, t) = C0[nu] t^n_nu[nu]."""

    n_nu: dict
    C0: dict
    central: MultChar

    def __post_init__(self):
        if any(n > -2 for n in self.n_nu.values()):
            raise ValueError("n_nu must be <= -2")

    @property
    def conductor(self) -> int:
        return -self.n_nu[UnitChar.trivial(self.central.p)]


LocalRepr = Unramified | PrincipalOrComplementary | Special | SupercuspidalInterface


# ---------------------------------------------------------------------------
# Whittaker sequences


@dataclass(frozen=True)
class WhittakerSeq:
    """W(a(p^m)) for m >= lo; ``transform_char`` gives W(a(p^m u)) / W(a(p^m))."""

    values: tuple
    lo: int
    transform_char: UnitChar
    tail_ratio: float = 0.0  # bound on |W(m+1) / W(m)| past the stored range

    def __call__(self, m: int) -> complex:
        i = m - self.lo
        if i < 0 or i >= len(self.values):
            return 0j
        return self.values[i]

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @classmethod
    def unramified(cls, a1: complex, a2: complex, q: int, d: int = 0, horizon: int = 400) -> "WhittakerSeq":
        """New vector for psi of conductor p^-d: W(a(p^m)) = unramified_whittaker(m + d)."""
        vals = tuple(unramified_whittaker(a1, a2, m + d, q) for m in range(-d, horizon + 1))
        ratio = max(abs(a1), abs(a2)) * q**-0.5
        return cls(vals, -d, UnitChar.trivial(q), ratio)


def unramified_whittaker(a1: complex, a2: complex, m: int, q: int) -> complex:
    """q^(-m/2) (a1^(m+1) - a2^(m+1)) / (a1 - a2), zero for m < 0."""
    if m < 0:
        return 0j
    return q ** (-m / 2) * complete_h(a1, a2, m)


def complete_h(a1: complex, a2: complex, m: int) -> complex:
    """(a1^(m+1) - a2^(m+1)) / (a1 - a2) for any integer m, with the confluent limit."""
    a1, a2 = complex(a1), complex(a2)
    if abs(a1 - a2) < 1e-9 * max(1.0, abs(a1)):
        return (m + 1) * a1**m
    return (a1 ** (m + 1) - a2 ** (m + 1)) / (a1 - a2)


# ---------------------------------------------------------------------------
# K^0[m]-invariant vectors


@dataclass(frozen=True)
class InvariantVectorSeq:
    """Values f_0, ..., f_m of a B(O)-invariant vector on the double cosets D_n."""

    f: tuple

    @property
    def level(self) -> int:
        return len(self.f) - 1

    def __getitem__(self, n: int) -> complex:
        return self.f[min(n, self.level)]


def double_coset_mass(n: int, q: int) -> Fraction:
    if n < 0:
        raise ValueError("n >= 0")
    if n == 0:
        return Fraction(q, q + 1)
    return Fraction(q - 1, q) / Fraction(q) ** (n - 1) / (q + 1)


def k0m_whittaker(t: complex, f: InvariantVectorSeq, field: FiniteLocalField, y_val: int) -> complex:
    """W(a(y)) of the vector f in pi(xi, xi^-1), t = xi(p), using the closed displays."""
    q, d, m = field.q, field.d, f.level
    K = y_val + d
    if K < 0:
        return 0j
    pref = q ** (-d / 2) * t ** (-y_val) * q ** (-y_val / 2)
    # at level 0 the large-v(y) display counts f_0 twice; the general form is exact
    if K < m or m == 0:
        body = f[0] - f[K + 1] * t ** (2 * (K + 1)) / q
        body += (1 - 1 / q) * sum(f[n] * t ** (2 * n) for n in range(1, K + 1))
        return pref * body
    body = f[0] + (1 - 1 / q) * sum(f[n] * t ** (2 * n) for n in range(1, m))
    if abs(1 - t * t) > 1e-9:
        g1 = (t ** (2 * m) - t ** (2 * (K + 1))) / (1 - t * t)
        g2 = (t ** (2 * m) - t ** (2 * (K + 2))) / (1 - t * t)
    else:
        g1 = sum(t ** (2 * n) for n in range(m, K + 1))
        g2 = sum(t ** (2 * n) for n in range(m, K + 2))
    return pref * (body + (g1 - g2 / q) * f[m])


def k0m_whittaker_oracle(t: complex, f: InvariantVectorSeq, field: FiniteLocalField, y_val: int,
                         extra_shells: int = 3) -> complex:
    """Same value from the Fourier integral of f(w n(x)) psi(-x y), by residue sums.

    The O-part is a mean over x mod p^R; the shell v(x) = -n contributes
    f_n t^(2n) q^(-d/2) times the mean of psi(-p^-n u y) over all residues u
    mod p^R, restricted to units.
    """
    q, d, p = field.q, field.d, field.p
    pref = t ** (-y_val) * q ** (-y_val / 2)
    top = max(y_val + d + 1 + extra_shells, 1)
    total = 0j
    # integral over O: x ranges over residues mod p^R
    R0 = max(-(y_val + d), 0) + 1
    x = np.arange(p**R0, dtype=np.int64)
    k = -(y_val + d)
    phase = np.exp(-2j * math.pi * (x % p**k) / p**k) if k > 0 else np.ones(x.shape)
    total += f[0] * q ** (-d / 2) * np.mean(phase)
    for n in range(1, top + 1):
        k = n - y_val - d  # additive level of u -> psi(-p^-n u y)
        R = max(k, 1)
        u = np.arange(p**R, dtype=np.int64)
        unit = (u % p != 0)
        vals = np.exp(-2j * math.pi * (u % p**k) / p**k) if k > 0 else np.ones(u.shape)
        shell = np.sum(vals[unit]) / p**R
        total += f[n] * t ** (2 * n) * q ** (-d / 2) * shell
    return pref * total


def kirillov_norm_sq(W: WhittakerSeq) -> float:
    """Sum of |W(a(p^m))|^2, i.e. the L^2 norm on F^x with Vol(O^x) = 1."""
    return float(sum(abs(v) ** 2 for v in W.values))


def induced_to_kirillov(q: int) -> float:
    """k0m_norm / kirillov_norm_sq for unitary unramified xi (independent of f and t)."""
    return (q - 1) / (q + 1)


def k0m_norm(f: InvariantVectorSeq, q: int) -> float:
    """Squared norm of W_f; at level 0 the tail term is the f_0 term itself."""
    m = f.level
    if m == 0:
        return abs(f[0]) ** 2
    s = abs(f[0]) ** 2 + sum(abs(f[n]) ** 2 * q ** (-n) * (1 - 1 / q) for n in range(1, m))
    s += abs(f[m]) ** 2 * q ** (-m)
    return s / (1 + 1 / q)


def k0m_norm_display(f: InvariantVectorSeq, q: int) -> float:
    """The norm display taken literally, including at level 0."""
    m = f.level
    s = abs(f[0]) ** 2 + sum(abs(f[n]) ** 2 * q ** (-n) * (1 - 1 / q) for n in range(1, m))
    return (s + abs(f[m]) ** 2 * q ** (-m)) / (1 + 1 / q)


def k0m_sequence(t: complex, f: InvariantVectorSeq, field: FiniteLocalField, horizon: int = 200) -> WhittakerSeq:
    vals = tuple(k0m_whittaker(t, f, field, m) for m in range(-field.d, horizon + 1))
    return WhittakerSeq(vals, -field.d, UnitChar.trivial(field.p), field.q**-0.5)


# ---------------------------------------------------------------------------
# local zeta integrals


class TailError(RuntimeError):
    pass


def _tail_check(W: WhittakerSeq, chi_p: complex, q: int, s: complex, tol: float = 1e-10) -> None:
    ratio = W.tail_ratio * abs(chi_p) * q ** (-complex(s).real)
    if ratio >= 1:
        raise TailError("series does not converge at this s")
    last = abs(W(W.hi)) * abs(chi_p) ** W.hi * q ** (-W.hi * complex(s).real)
    est = last * ratio / (1 - ratio)
    if est > tol:
        raise TailError(f"truncation tail estimate {est:.2e} exceeds {tol:.0e}")


def local_zeta(W: WhittakerSeq, chi: MultChar, psi: AddChar, s: complex, shift: int = 0) -> complex:
    """zeta(s + 1/2, n(p^-l) W, chi, psi) = sum_y W(a(y) n(p^-l)) chi(y) |y|^s d^x y.

    Case split on r = conductor of (transform char) * chi:
    r >= 1 keeps the single valuation m = l - r - d; r = 0 keeps m >= l - d
    plus the -1/(q-1) boundary term at m = l - d - 1.  ``shift = 0`` is the
    untranslated vector.
    """
    f = psi.field
    q, d, l = f.q, f.d, shift
    tw = W.transform_char * chi.unit_part
    r = tw.level
    cp = complex(chi.at_uniformizer)

    def term(m):
        return W(m) * cp**m * q ** (-m * s)

    if r >= 1:
        m = l - r - d
        if W(m) == 0:
            return 0j
        return term(m) * gauss_sum(tw, psi, l - m).value
    _tail_check(W, cp, q, s)
    start = max(l - d, W.lo)
    total = sum(term(m) for m in range(start, W.hi + 1))
    m0 = l - d - 1
    if m0 >= W.lo:
        total -= term(m0) / (q - 1)
    return complex(total)


def local_zeta_bruteforce(W: WhittakerSeq, chi: MultChar, psi: AddChar, s: complex, shift: int,
                          level: int, horizon: int = 400) -> complex:
    """Direct double sum over valuations and unit residues mod p^level."""
    f = psi.field
    q, p = f.q, f.p
    if horizon < 50:
        raise ValueError("horizon >= 50")
    tw = W.transform_char * chi.unit_part
    if level < max(tw.level, 1):
        raise ValueError("level below the character conductor")
    u = unit_rep_ints(p, level)
    chi_u = tw.values(u)
    cp = complex(chi.at_uniformizer)
    total = 0j
    for m in range(W.lo, min(W.hi, horizon) + 1):
        w = W(m)
        if w == 0:
            continue
        k = shift - m - f.d  # level of u -> psi(p^(m-l) u)
        if k > level:
            raise ValueError(f"level {level} too small for valuation {m}")
        add = np.exp(2j * math.pi * (u % p**k) / p**k) if k > 0 else 1.0
        total += w * cp**m * q ** (-m * s) * np.mean(chi_u * add)
    return complex(total)


def l_factor(a1: complex, a2: complex, chi_p: complex, q: int, s: complex) -> complex:
    """L(s + 1/2, pi x chi) for unramified data."""
    x = chi_p * q ** (-s - 0.5)
    return 1 / ((1 - a1 * x) * (1 - a2 * x))


# Frozen once at the extremal anchor found by a phase scan: spherical f, t = 1,
# q = 3, d = 0, s = 1/2 + i pi/log 3, l <= 8, eps = 0.05 (sup 7.974).
DECAY_C = 8.0


def local_zeta_decay_bound(m: int, q: int, d: int, l: int, w_norm: float, eps: float = 0.05) -> float:
    return DECAY_C * (m + 1) * q ** ((m - d) / 2) * q ** (-(l - d) * (1 - eps)) * w_norm


# ---------------------------------------------------------------------------
# Rankin-Selberg local factors

SIGMA_SHIFTS = {1: (1, 0), 2: (0, 1), 3: (-1, 0), 4: (0, -1), 5: (1, -1), 6: (-1, 1), 7: (1, 1), 8: (-1, -1)}


def _rs_prefactor(rep: Unramified, s: complex, d: int) -> complex:
    q = rep.q
    zeta = 1 / (1 - q ** (-2 * s - 2))
    inv_L = 1 + 0j
    for a in (rep.alpha1, rep.alpha2):
        for b in (rep.alpha1, rep.alpha2):
            inv_L *= 1 - a * np.conj(b) * q ** (-s - 1)
    return q ** (-d / 2) * zeta * inv_L


def sigma_v(case: int, rep: Unramified, s: complex, d: int = 0) -> complex:
    """Closed form of the local factor for shifts (u, u') indexed 1..8."""
    if case not in SIGMA_SHIFTS:
        raise ValueError("case must be in 1..8")
    q, tr, n = rep.q, rep.tr, rep.n
    ctr, cn = np.conj(tr), np.conj(n)
    den = 1 - q ** (-2 * s - 2)
    x = q ** (-s - 1)
    if case == 1:
        return q ** (-(d + 1) / 2) * (tr - n * ctr * x) / den
    if case == 2:
        return q ** (-(d + 1) / 2) * (ctr - cn * tr * x) / den
    if case == 3:
        return q ** (-s) * sigma_v(2, rep, s, d)
    if case == 4:
        return q ** (-s) * sigma_v(1, rep, s, d)
    if case == 5:
        num = tr * tr - n - n * abs(tr) ** 2 * x + n * abs(n) ** 2 * x * x
        return q ** (-d / 2 - 1 - s) * num / den
    if case == 6:
        num = ctr * ctr - cn - cn * abs(tr) ** 2 * x + cn * abs(n) ** 2 * x * x
        return q ** (-d / 2 - 1 - s) * num / den
    if case == 7:
        return q ** (-d / 2 + s)
    return q ** (-d / 2 - s)


def sigma_v_bruteforce(case: int, rep: Unramified, s: complex, d: int = 0, horizon: int = 400) -> complex:
    """Truncated sum of shifted Whittaker products times zeta(2s+2) / L(s+1, pi x pi-bar)."""
    if case not in SIGMA_SHIFTS:
        raise ValueError("case must be in 1..8")
    a, b = SIGMA_SHIFTS[case]
    q, a1, a2 = rep.q, rep.alpha1, rep.alpha2
    total = 0j
    for m in range(-max(a, b, 0) - 1, horizon + 1):
        wa = unramified_whittaker(a1, a2, m + a, q)
        wb = unramified_whittaker(a1, a2, m + b, q)
        total += wa * np.conj(wb) * q ** (-m * s)
    return complex(_rs_prefactor(rep, s, d) * total)


def sigma_v_tempered_bound(case: int, rep: Unramified, eps: float, d: int = 0) -> float:
    """Upper bound for |sigma_v| at Re(s) = eps when |alpha_i| = 1."""
    q = rep.q
    K = (1 + q ** (-1 - eps)) / (1 - q ** (-2 - 2 * eps))
    atr = abs(rep.tr)
    if case in (1, 2):
        return K * q ** (-(d + 1) / 2) * atr
    if case in (3, 4):
        return K * q ** (-(d + 1) / 2) * atr * q ** (-eps)
    if case in (5, 6):
        return K * q ** (-d / 2 - 1 - eps) * (atr**2 + 1)
    if case == 7:
        return q ** (-d / 2 + eps)
    if case == 8:
        return q ** (-d / 2 - eps)
    raise ValueError("case must be in 1..8")
