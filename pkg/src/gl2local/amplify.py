"""Amplification bookkeeping: tuple types, exponent forms and the min-max optimizer.

All exponents are of ``Q``.  With ``E = Q^e`` a bound ``Q^(a + b e + c kappa)``
is stored as an :class:`ExponentForm` whose coefficients are exact rationals,
``a`` possibly affine in ``theta``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
from scipy import integrate

Rat = Fraction


# ---------------------------------------------------------------------------
# tuple types


class TupleType(enum.IntEnum):
    DISTINCT = 1
    SAME_SIDE_PAIR = 2      # v1 = v2 or v1' = v2'
    CROSS_PAIR = 3          # v1 = v2' or v1' = v2
    PRIMED_PAIR = 4         # v1 = v1' or v2 = v2'
    TWO_SAME_SIDE = 5       # v1 = v2 and v1' = v2'
    TWO_CROSS = 6           # v1 = v2' and v1' = v2
    TWO_PRIMED = 7          # v1 = v1' and v2 = v2'
    TRIPLE = 8
    ALL_EQUAL = 9


# positions: 0 = v1, 1 = v1', 2 = v2, 3 = v2'
_PAIR_TYPE = {
    frozenset({0, 2}): TupleType.SAME_SIDE_PAIR, frozenset({1, 3}): TupleType.SAME_SIDE_PAIR,
    frozenset({0, 3}): TupleType.CROSS_PAIR, frozenset({1, 2}): TupleType.CROSS_PAIR,
    frozenset({0, 1}): TupleType.PRIMED_PAIR, frozenset({2, 3}): TupleType.PRIMED_PAIR,
}
_TWO_PAIR_TYPE = {
    frozenset({0, 2}): TupleType.TWO_SAME_SIDE, frozenset({0, 3}): TupleType.TWO_CROSS,
    frozenset({0, 1}): TupleType.TWO_PRIMED,
}


def _partition(labels: Sequence[Hashable]) -> list[frozenset]:
    blocks: dict = {}
    for pos, lab in enumerate(labels):
        blocks.setdefault(lab, set()).add(pos)
    return [frozenset(b) for b in blocks.values()]


def classify_tuple(v1, v1p, v2, v2p) -> TupleType:
    blocks = _partition((v1, v1p, v2, v2p))
    sizes = sorted(len(b) for b in blocks)
    if sizes == [1, 1, 1, 1]:
        return TupleType.DISTINCT
    if sizes == [4]:
        return TupleType.ALL_EQUAL
    if sizes == [1, 3]:
        return TupleType.TRIPLE
    pairs = [b for b in blocks if len(b) == 2]
    if sizes == [1, 1, 2]:
        return _PAIR_TYPE[pairs[0]]
    # two pairs: identify by the block containing v1
    return _TWO_PAIR_TYPE[next(b for b in pairs if 0 in b)]


# number of set partitions of the four positions realising each type
_PARTITIONS = {TupleType.DISTINCT: (1, 4), TupleType.SAME_SIDE_PAIR: (2, 3), TupleType.CROSS_PAIR: (2, 3),
               TupleType.PRIMED_PAIR: (2, 3), TupleType.TWO_SAME_SIDE: (1, 2), TupleType.TWO_CROSS: (1, 2),
               TupleType.TWO_PRIMED: (1, 2), TupleType.TRIPLE: (4, 2), TupleType.ALL_EQUAL: (1, 1)}


def count_tuples(M: int, ttype: TupleType | int) -> int:
    """Ordered 4-tuples from an M-set of the given type: (#partitions) * M (M-1) ... (M-blocks+1)."""
    if M < 0:
        raise ValueError("M must be >= 0")
    n_part, blocks = _PARTITIONS[TupleType(ttype)]
    return n_part * math.perm(M, blocks)


def count_tuples_bruteforce(M: int) -> dict[TupleType, int]:
    out = {t: 0 for t in TupleType}
    for tup in itertools.product(range(M), repeat=4):
        out[classify_tuple(*tup)] += 1
    return out


# ---------------------------------------------------------------------------
# exponent forms


@dataclass(frozen=True)
class ExponentForm:
    """Q^(a0 + a_theta theta + b e + c kappa); eps_degree records the Q^(.. eps) factor dropped."""

    a0: Rat
    b: Rat = Rat(0)
    c: Rat = Rat(0)
    a_theta: Rat = Rat(0)
    eps_degree: str = ""

    def __call__(self, e, kappa, theta=Rat(0)) -> Rat:
        return self.a0 + self.a_theta * theta + self.b * e + self.c * kappa

    def half(self) -> "ExponentForm":
        h = Rat(1, 2)
        return ExponentForm(self.a0 * h, self.b * h, self.c * h, self.a_theta * h, self.eps_degree)


# E-power of the constant-term contribution of each type after averaging
_SIGMA1_E = {1: -2, 2: -2, 3: -2, 4: -2, 5: -2, 6: -4, 7: -2, 8: -3, 9: -3}


def contribution_forms() -> dict[tuple[str, int], ExponentForm]:
    """Dominant bound for each (sum, type); the cuspidal and Eisenstein sums use their general bound."""
    table = {}
    for t in TupleType:
        table[("Sigma1", int(t))] = ExponentForm(Rat(0), b=Rat(_SIGMA1_E[int(t)]),
                                                 eps_degree="kappa Q^((2+kappa) eps) E^eps")
        table[("Sigma2", int(t))] = ExponentForm(Rat(-1, 2), b=Rat(2), a_theta=Rat(1), eps_degree="E^eps Q^eps")
        table[("Sigma3", int(t))] = ExponentForm(Rat(-1, 2), b=Rat(1), c=Rat(1, 2), eps_degree="E^eps Q^eps")
    return table


def dominant_form(sigma: str, e, kappa, theta=Rat(0)) -> tuple[int, ExponentForm]:
    """Type whose form is largest at (e, kappa, theta); ties go to the lowest type id."""
    forms = contribution_forms()
    best = max(TupleType, key=lambda t: (forms[(sigma, int(t))](e, kappa, theta), -int(t)))
    return int(best), forms[(sigma, int(best))]


def truncation_form() -> ExponentForm:
    """Q^(-kappa/2) from cutting the unipotent integral at Q^(+-kappa)."""
    return ExponentForm(Rat(0), c=Rat(-1, 2))


def objective_forms() -> list[ExponentForm]:
    """The four forms whose max is minimised: square roots of the three sums plus truncation."""
    forms = contribution_forms()
    s1 = max((forms[("Sigma1", int(t))] for t in TupleType), key=lambda f: f.b)
    return [s1.half(), forms[("Sigma2", 1)].half(), truncation_form(), forms[("Sigma3", 1)].half()]


# ---------------------------------------------------------------------------
# exact min-max


def _solve3(A: list[list[Rat]], y: list[Rat]) -> list[Rat] | None:
    """Exact Gaussian elimination on a 3x3 system; None if singular."""
    M = [row[:] + [v] for row, v in zip(A, y)]
    for col in range(3):
        piv = next((r for r in range(col, 3) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(3):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][3] / M[i][i] for i in range(3)]


@dataclass
class OptimumReport:
    theta: Rat
    value: Rat
    delta: Rat
    e_star: Rat
    kappa_face: tuple[Rat, Rat]
    witness: tuple[Rat, Rat]
    witness_value: Rat
    witness_optimal: bool
    witness_slack: list[Rat]
    active_at_witness: list[int]
    kappa_unique: bool
    vertices: list[tuple[Rat, Rat]]


def _halfplanes(forms: list[ExponentForm], theta: Rat) -> list[tuple[Rat, Rat, Rat, Rat]]:
    """Constraints u e + v kappa + w z <= r, for z >= form_i, e >= 0, 0 <= kappa <= 1."""
    rows = [(f.b, f.c, Rat(-1), -(f.a0 + f.a_theta * theta)) for f in forms]
    rows += [(Rat(-1), Rat(0), Rat(0), Rat(0)), (Rat(0), Rat(-1), Rat(0), Rat(0)), (Rat(0), Rat(1), Rat(0), Rat(1))]
    return rows


def optimize_exponents(theta, forms: list[ExponentForm] | None = None) -> OptimumReport:
    """min over e >= 0, 0 <= kappa <= 1 of max_i form_i(e, kappa), by exact vertex enumeration."""
    theta = Rat(theta)
    if not 0 <= theta <= Rat(1, 2):
        raise ValueError("theta must lie in [0, 1/2]")
    forms = forms or objective_forms()
    rows = _halfplanes(forms, theta)

    def feasible(pt) -> bool:
        return all(u * pt[0] + v * pt[1] + w * pt[2] <= r for u, v, w, r in rows)

    best = None
    for trio in itertools.combinations(rows, 3):
        sol = _solve3([list(t[:3]) for t in trio], [t[3] for t in trio])
        if sol is not None and feasible(sol) and (best is None or sol[2] < best):
            best = sol[2]
    if best is None:
        raise ValueError("no feasible vertex")

    # optimal face: {(e, kappa): max form <= best} within the box; enumerate its vertices
    face_rows = [(u, v, r - w * best) for u, v, w, r in rows]
    verts = set()
    for p, q in itertools.combinations(face_rows, 2):
        det = p[0] * q[1] - p[1] * q[0]
        if det == 0:
            continue
        e = (p[2] * q[1] - p[1] * q[2]) / det
        k = (p[0] * q[2] - p[2] * q[0]) / det
        if all(u * e + v * k <= r for u, v, r in face_rows):
            verts.add((e, k))
    verts = sorted(verts)
    es = [v[0] for v in verts]
    ks = [v[1] for v in verts]
    e_star = es[0] if min(es) == max(es) else None

    witness = ((1 - 2 * theta) / 8, Rat(1, 4) + theta / 6)
    vals = [f(witness[0], witness[1], theta) for f in forms]
    wv = max(vals)
    slack = [wv - v for v in vals]
    return OptimumReport(
        theta=theta, value=best, delta=-best, e_star=e_star if e_star is not None else es[0],
        kappa_face=(min(ks), max(ks)), witness=witness, witness_value=wv,
        witness_optimal=(wv == best), witness_slack=slack,
        active_at_witness=[i for i, s in enumerate(slack) if s == 0],
        kappa_unique=(min(ks) == max(ks)), vertices=verts,
    )


# ---------------------------------------------------------------------------
# Mellin truncation


# sup |h0^(n)| on [1, 2] for the step h0 below, from a 4e5-point grid on the
# symbolic derivative, rounded up.
H0_SUP_NORMS = (1.0, 2.0, 9.8411, 110.57, 2280.4, 77193.0, 4816127.0)


def _g(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1)), 0.0)


def h0(x) -> np.ndarray:
    """1 on (0, 1], 0 on [2, inf), smooth descent g(2-x) / (g(2-x) + g(x-1)) with g(t) = exp(-1/t)."""
    x = np.asarray(x, dtype=float)
    a, b = _g(2 - x), _g(x - 1)
    return np.where(x <= 1, 1.0, np.where(x >= 2, 0.0, a / np.where(a + b > 0, a + b, 1)))


def h_window(t, Q: float, kappa: float) -> np.ndarray:
    """h0(t / Q^(kappa-1)) - h0(t / Q^(-kappa-1))."""
    return h0(np.asarray(t) / Q ** (kappa - 1)) - h0(np.asarray(t) / Q ** (-kappa - 1))


def mellin_truncation_bound(Q: float, kappa: float, s: complex, n: int) -> float:
    """2 kappa log Q ||h0^(n)|| Q^(x Re s) / |(s+1) ... (s+n-1)|.

    x = kappa - 1 for Re s >= 0 and x = -kappa - 1 for Re s < 0.  The implied
    constant depending on Re s + n is set to 1; see ``mellin_truncation_bound_explicit``.
    """
    if n < 1 or n >= len(H0_SUP_NORMS):
        raise ValueError(f"n must lie in [1, {len(H0_SUP_NORMS) - 1}]")
    s = complex(s)
    den = 1 + 0j
    for i in range(1, n):
        den *= s + i
    x = kappa - 1 if s.real >= 0 else -kappa - 1
    return 2 * kappa * math.log(Q) * H0_SUP_NORMS[n] * Q ** (x * s.real) / abs(den)


def mellin_truncation_bound_explicit(Q: float, kappa: float, s: complex, n: int) -> float:
    """The display times int_1^2 t^(Re s + n) dt/t, the constant it absorbs."""
    a = complex(s).real + n
    c = (2**a - 1) / a if a else math.log(2)
    return mellin_truncation_bound(Q, kappa, s, n) * c


def mellin_numeric(Q: float, kappa: float, s: complex) -> complex:
    """Integral of h(t) t^(s-1) dt in log coordinates; the flat middle is done in closed form."""
    s = complex(s)
    lo, hi = (-kappa - 1) * math.log(Q), (kappa - 1) * math.log(Q)
    l2 = math.log(2)

    def seg(a: float, b: float, f) -> complex:
        re = integrate.quad(lambda x: (f(x) * np.exp(s * x)).real, a, b, epsabs=1e-13, epsrel=1e-11, limit=400)[0]
        im = integrate.quad(lambda x: (f(x) * np.exp(s * x)).imag, a, b, epsabs=1e-13, epsrel=1e-11, limit=400)[0]
        return complex(re, im)

    def h_log(x):
        return float(h_window(math.exp(x), Q, kappa))

    if lo + l2 >= hi:
        return seg(lo, hi + l2, h_log)
    # on [lo + log 2, hi] h = 1
    flat = (np.exp(s * hi) - np.exp(s * (lo + l2))) / s if s != 0 else complex(hi - lo - l2)
    return seg(lo, lo + l2, h_log) + flat + seg(hi, hi + l2, h_log)


def mellin_h0(s: complex) -> complex:
    """Integral of h0(t) t^(s-1) dt (h0 alone, no window)."""
    s = complex(s)
    re = integrate.quad(lambda t: (h0(t) * t ** (s - 1)).real, 0, 2, points=[1], epsabs=1e-13)[0]
    im = integrate.quad(lambda t: (h0(t) * t ** (s - 1)).imag, 0, 2, points=[1], epsabs=1e-13)[0]
    return complex(re, im)
