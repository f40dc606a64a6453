"""K-isotypic calculus for GL2 at archimedean places.

Real place: the basis ``e_k`` with the ladder operators ``H, V+, V-``.
Complex place: the basis ``e_{n,k}`` of a fixed ``n0``, realised as sparse
vectors ``{(n, k): coefficient}`` so that operator words can be composed
symbolically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate, special

Index = Tuple[int, int]
Vec = Dict[Index, complex]


class SeriesKind(enum.Enum):
    REAL_PRINCIPAL = "real_principal"
    REAL_COMPLEMENTARY = "real_complementary"
    REAL_DISCRETE = "real_discrete"
    CPLX_PRINCIPAL = "cplx_principal"
    CPLX_COMPLEMENTARY = "cplx_complementary"


@dataclass(frozen=True)
class IsotypicIndex:
    n: int
    k: int
    n0: int = 0

    @property
    def valid(self) -> bool:
        return (0 <= self.k <= self.n and abs(self.n0) <= self.n
                and (self.n - abs(self.n0)) % 2 == 0)


@dataclass(frozen=True)
class SeriesParams:
    kind: SeriesKind
    s: complex
    m: int = 0

    def __post_init__(self):
        s = complex(self.s)
        if self.kind in (SeriesKind.REAL_PRINCIPAL, SeriesKind.CPLX_PRINCIPAL) and abs(s.real) > 1e-12:
            raise ValueError("principal series needs s on the imaginary axis")
        if self.kind in (SeriesKind.REAL_COMPLEMENTARY, SeriesKind.CPLX_COMPLEMENTARY) and not (
                abs(s.imag) < 1e-12 and 0 < s.real < 1):
            raise ValueError("complementary series needs 0 < s < 1")
        if self.kind is SeriesKind.REAL_DISCRETE and not (
                abs(s.imag) < 1e-12 and s.real == int(s.real) and s.real > 0
                and (int(s.real) - self.m) % 2 == 1):
            raise ValueError("discrete series needs a positive integer s = p with s - m odd")


# ---------------------------------------------------------------------------
# Jacobi polynomials


def _gbinom(a: float, j: int) -> float:
    """Generalised binomial coefficient a (a-1) ... (a-j+1) / j!."""
    out = 1.0
    for i in range(j):
        out *= (a - i) / (i + 1)
    return out


def jacobi_explicit(k: int, a: float, b: float, x: float) -> float:
    """sum_j C(k+a, k-j) C(k+b, j) ((x-1)/2)^j ((x+1)/2)^(k-j); valid for any a, b."""
    u, v = (x - 1) / 2, (x + 1) / 2
    return sum(_gbinom(k + a, k - j) * _gbinom(k + b, j) * u**j * v ** (k - j) for j in range(k + 1))


def jacobi(k: int, a: float, b: float, x: float) -> float:
    """P_k^(a, b)(x) by the three-term recursion in k."""
    if k < 0:
        raise ValueError("degree must be >= 0")
    if k == 0:
        return 1.0
    p0, p1 = 1.0, (a + 1) + (a + b + 2) * (x - 1) / 2
    for n in range(2, k + 1):
        c = 2 * n + a + b
        den = 2 * n * (n + a + b) * (c - 2)
        if den == 0:
            # degenerate parameters (negative integers): use the explicit sum
            return jacobi_explicit(k, a, b, x)
        p0, p1 = p1, ((c - 1) * (c * (c - 2) * x + a * a - b * b) * p1
                      - 2 * (n + a - 1) * (n + b - 1) * c * p0) / den
    return p1


def jacobi_derivative_residual(k: int, a: float, b: float, x: float, h: float = 1e-4) -> float:
    """Residual of the (1 - x^2) d/dx recurrence with a five-point difference derivative."""
    P = lambda t: jacobi(k, a, b, t)  # noqa: E731
    d = (P(x - 2 * h) - 8 * P(x - h) + 8 * P(x + h) - P(x + 2 * h)) / (12 * h)
    if k == 0:
        return abs((1 - x * x) * d)
    c = 2 * k + a + b
    rhs = (k * (a - b - c * x) / c * jacobi(k, a, b, x)
           + 2 * (k + a) * (k + b) / c * jacobi(k - 1, a, b, x))
    return abs((1 - x * x) * d - rhs)


# ---------------------------------------------------------------------------
# isotypic vectors on SU(2)


def isotypic_eval(idx: IsotypicIndex, beta: float) -> float:
    """e_{n,k}^{(n0)} at the rotation [[cos b, sin b], [-sin b, cos b]].

    cos^(A) sin^(B) P_j^(B, A)(cos 2b) with A = (n+n0)/2 - k, B = k - (n-n0)/2,
    j = (n-n0)/2.  Negative powers are cleared by expanding the Jacobi sum in
    cos^2 and sin^2 so that the result is a polynomial in cos, sin.
    """
    if not idx.valid:
        return 0.0
    n, k, n0 = idx.n, idx.k, idx.n0
    j = (n - n0) // 2
    A, B = (n + n0) // 2 - k, k - (n - n0) // 2
    c, s = math.cos(beta), math.sin(beta)
    # (x-1)/2 = -sin^2, (x+1)/2 = cos^2 at x = cos 2b
    total = 0.0
    for i in range(j + 1):
        coef = _gbinom(j + B, j - i) * _gbinom(j + A, i)
        if coef == 0:
            continue
        pc, ps = A + 2 * (j - i), B + 2 * i
        if pc < 0 or ps < 0:
            raise ArithmeticError("negative power survived")  # pragma: no cover
        total += coef * (-1) ** i * c**pc * s**ps
    return total


def monomial_coefficient(idx: IsotypicIndex, beta: float) -> float:
    """<rho_n(u) z1^(n-k) z2^k, z1^(n-k0) z2^k0> / <z1^(n-k0) z2^k0, same>, n - 2 k0 = n0.

    rho_n(u) f(z1, z2) = f((z1, z2) u) on degree-n polynomials, whose invariant
    inner product makes monomials orthogonal with norm^2 (n-a)! a!.
    """
    if not idx.valid:
        return 0.0
    n, k = idx.n, idx.k
    k0 = (n - idx.n0) // 2
    c, s = math.cos(beta), math.sin(beta)
    # (z1, z2) u = (c z1 - s z2, s z1 + c z2)
    p1 = np.polynomial.polynomial.polypow([c, -s], n - k)  # in powers of z2 (z1 implicit)
    p2 = np.polynomial.polynomial.polypow([s, c], k)
    poly = np.polynomial.polynomial.polymul(p1, p2)
    return float(poly[k0]) if k0 < len(poly) else 0.0


def rho_matrix(n: int, beta: float) -> np.ndarray:
    """Unitary matrix of rho_n(rotation) in the orthonormal monomial basis."""
    norms = np.array([math.sqrt(math.factorial(n - a) * math.factorial(a)) for a in range(n + 1)])
    U = np.empty((n + 1, n + 1))
    for k0 in range(n + 1):
        for k in range(n + 1):
            U[k0, k] = isotypic_eval(IsotypicIndex(n, k, n - 2 * k0), beta) * norms[k0] / norms[k]
    return U


SU2_NODES = 64


def su2_inner(f1: Callable, f2: Callable, nodes: int = SU2_NODES) -> complex:
    """Integral of f1 conj(f2) over SU(2) with probability Haar measure.

    u = diag(e^{i a1}, e^{-i a1}) rot(b) diag(e^{i a2}, e^{-i a2}); the measure is
    sin(2b) db da1 da2 / (2 pi^2) on b in [0, pi/2], a1 in [0, 2 pi), a2 in [0, pi).
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    b = (x + 1) * math.pi / 4
    wb = w * math.pi / 4 * np.sin(2 * b)
    a1 = np.arange(nodes) * 2 * math.pi / nodes
    a2 = np.arange(nodes) * math.pi / nodes
    total = 0j
    for bi, wi in zip(b, wb):
        vals = np.array([[f1(p, bi, q) * np.conj(f2(p, bi, q)) for q in a2] for p in a1])
        total += wi * vals.mean()
    return total


def isotypic_function(idx: IsotypicIndex) -> Callable[[float, float, float], complex]:
    def f(a1: float, b: float, a2: float) -> complex:
        return complex(np.exp(1j * (idx.n0 * a1 + (idx.n - 2 * idx.k) * a2))) * isotypic_eval(idx, b)
    return f


# ---------------------------------------------------------------------------
# real place ladder


REAL_OPS = ("H", "V+", "V-", "Delta")


def _real_support_ok(params: SeriesParams, k: int) -> bool:
    if params.kind is SeriesKind.REAL_DISCRETE:
        p = int(complex(params.s).real)
        return abs(k) >= p + 1 and (k - p - 1) % 2 == 0
    return (k - params.m) % 2 == 0


def ladder_real(params: SeriesParams, k: int, which: str) -> tuple[complex, int]:
    """(coefficient, target k) of one operator on e_k."""
    if not _real_support_ok(params, k):
        raise ValueError(f"k = {k} is not an index of this series")
    s = complex(params.s)
    if which == "H":
        return 1j * k, k
    if which == "V+":
        return s + 1 + k, k + 2
    if which == "V-":
        return s + 1 - k, k - 2
    if which == "Delta":
        return (1 - s * s) / 8 + k * k / 4, k
    raise ValueError(f"unknown operator {which!r}")


def real_delta_from_ladder(params: SeriesParams, k: int) -> complex:
    """-(V+ V- + V- V+)/16 - H^2/8 on e_k, composed from the ladder table."""
    s = complex(params.s)
    vpvm = (s + 1 - k) * (s + 1 + (k - 2))
    vmvp = (s + 1 + k) * (s + 1 - (k + 2))
    return -(vpvm + vmvp) / 16 + k * k / 8


def real_norm_sq(params: SeriesParams, k: int) -> float:
    s = complex(params.s).real
    if params.kind is SeriesKind.REAL_PRINCIPAL:
        return 1.0
    if params.kind is SeriesKind.REAL_COMPLEMENTARY:
        lg = (special.gammaln((s + 1) / 2) + special.gammaln(s / 2)
              - special.gammaln((s + 1 + k) / 2) - special.gammaln((s + 1 - k) / 2))
        return math.sqrt(math.pi) * math.exp(lg)
    if params.kind is SeriesKind.REAL_DISCRETE:
        p = int(s)
        return math.pi * 4.0 ** (-p) * special.beta((abs(k) - p - 1) / 2 + 1, p)
    raise ValueError("not a real-place series")


def real_norm_ratio(params: SeriesParams, k: int, step: int = 2) -> float:
    """||e_{k+step}||^2 / ||e_k||^2 from the ratio display (complementary series)."""
    s = complex(params.s).real
    if step == 2:
        return abs((s - 1 - k) / (s + 1 + k))
    if step == -2:
        return abs((s - 1 + k) / (s + 1 - k))
    raise ValueError("step must be +-2")


# ---------------------------------------------------------------------------
# complex place ladder on sparse vectors


def _add(out: Vec, key: Index, c: complex) -> None:
    if c != 0:
        out[key] = out.get(key, 0) + c


def _valid(n: int, k: int, n0: int) -> bool:
    return IsotypicIndex(n, k, n0).valid


class ComplexLadder:
    """Action of H1, H2, X+, X- (and words in them) on e_{n,k}^{(n0)}."""

    def __init__(self, s: complex, n0: int):
        self.s, self.n0 = complex(s), n0

    def basis(self, n: int, k: int) -> Vec:
        if not _valid(n, k, self.n0):
            raise ValueError(f"({n}, {k}) is not an index for n0 = {self.n0}")
        return {(n, k): 1.0}

    def _apply(self, v: Vec, rule) -> Vec:
        out: Vec = {}
        for (n, k), c in v.items():
            for (n2, k2), a in rule(n, k):
                if _valid(n2, k2, self.n0):
                    _add(out, (n2, k2), c * a)
        return out

    def H2(self, v: Vec) -> Vec:
        return self._apply(v, lambda n, k: [((n, k), 1j * (n - 2 * k))])

    def Xp(self, v: Vec) -> Vec:
        return self._apply(v, lambda n, k: [((n, k + 1), n - k)])

    def Xm(self, v: Vec) -> Vec:
        return self._apply(v, lambda n, k: [((n, k - 1), k)])

    def h1_terms(self, n: int, k: int) -> list[tuple[Index, complex]]:
        s, n0 = self.s, self.n0
        if n == 0:
            return [((2, 1), 2 * (s + 1))]
        return [
            ((n + 2, k + 1), (s + n / 2 + 1) * (n - n0 + 2) * (n + n0 + 2) / ((n + 1) * (n + 2))),
            ((n, k), 2 * s * n0 * (n - 2 * k) / (n * (n + 2))),
            ((n - 2, k - 1), (s - n / 2) * 4 * k * (n - k) / (n * (n + 1))),
        ]

    def H1(self, v: Vec) -> Vec:
        return self._apply(v, self.h1_terms)

    def Yp(self, v: Vec) -> Vec:
        return sub(self.Xp(self.H1(v)), self.H1(self.Xp(v)))

    def Ym(self, v: Vec) -> Vec:
        return sub(self.Xm(self.H1(v)), self.H1(self.Xm(v)))

    def casimir_K(self, v: Vec) -> Vec:
        """(-H2^2 + 2 (X+ X- + X- X+)) / 4, eigenvalue n(n+2)/4."""
        return scale(add(scale(self.H2(self.H2(v)), -1),
                         scale(add(self.Xp(self.Xm(v)), self.Xm(self.Xp(v))), 2)), 0.25)

    def omega1(self, v: Vec) -> Vec:
        """H1^2 - (Y+Y- + Y-Y+)/2 - H2^2 + 2(X+X- + X-X+), eigenvalue 4 s^2 + n0^2 - 4."""
        return add(add(self.H1(self.H1(v)), scale(add(self.Yp(self.Ym(v)), self.Ym(self.Yp(v))), -0.5)),
                   scale(self.casimir_K(v), 4))

    def omega2(self, v: Vec) -> Vec:
        """(H2 H1 + H1 H2) - i (X+ Y- + Y- X+) + i (X- Y+ + Y+ X-), eigenvalue 4 i s n0."""
        a = add(self.H2(self.H1(v)), self.H1(self.H2(v)))
        b = add(self.Xp(self.Ym(v)), self.Ym(self.Xp(v)))
        c = add(self.Xm(self.Yp(v)), self.Yp(self.Xm(v)))
        return add(a, add(scale(b, -1j), scale(c, 1j)))

    def delta(self, v: Vec) -> Vec:
        """C_K - Omega1 / 32, matching the real-place normalisation when n0 = 0."""
        return add(self.casimir_K(v), scale(self.omega1(v), -1 / 32))

    def apply(self, which: str, v: Vec) -> Vec:
        ops = {"H1": self.H1, "H2": self.H2, "X+": self.Xp, "X-": self.Xm,
               "Y+": self.Yp, "Y-": self.Ym, "Delta": self.delta}
        if which not in ops:
            raise ValueError(f"unknown operator {which!r}")
        return ops[which](v)


def add(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for key, c in b.items():
        _add(out, key, c)
    return out


def scale(a: Vec, c: complex) -> Vec:
    return {key: c * v for key, v in a.items()}


def sub(a: Vec, b: Vec) -> Vec:
    return add(a, scale(b, -1))


def ladder_complex(s: complex, n0: int, n: int, k: int, which: str) -> list[tuple[complex, Index]]:
    """Coefficients of one operator applied to e_{n,k}^{(n0)}."""
    lad = ComplexLadder(s, n0)
    out = lad.apply(which, lad.basis(n, k))
    return [(c, key) for key, c in sorted(out.items()) if abs(c) > 1e-15]


def delta_eigen_complex(s: complex, n0: int, n: int) -> complex:
    """Eigenvalue of C_K - Omega1/32 on e_{n,k}^{(n0)}."""
    return (1 - s * s - n0 * n0 / 4) / 8 + n * (n + 2) / 4


def delta_eigen_complex_display(s: complex, n0: int, n: int) -> complex:
    """(1 - s^2 - n0^2)/8 + n(n+2)/4 in its literal form; agrees with the above only at n0 = 0."""
    return (1 - s * s - n0 * n0) / 8 + n * (n + 2) / 4


# ---------------------------------------------------------------------------
# norms and intertwining eigenvalues


class PoleError(ValueError):
    pass


def intertwining_eigenvalue(s: complex, n: int, k: int | None = None) -> complex:
    """lambda_{n,k}(s) = (-1)^(n/2) pi (s-1)...(s-n/2) / (s (s+1) ... (s+n/2))."""
    if n < 0 or n % 2:
        raise ValueError("n must be even and >= 0")
    if k is not None and not 0 <= k <= n:
        raise ValueError("k out of range")
    h = n // 2
    den = 1
    for i in range(h + 1):
        den *= s + i
    if den == 0 or any(s + i == 0 for i in range(h + 1)):
        raise PoleError(f"pole at s = {s}")
    num = 1
    for i in range(1, h + 1):
        num *= s - i
    return (-1) ** h * math.pi * num / den


def intertwining_oracle(s: float, n: int) -> float:
    """(pi/2) int_{-1}^{1} ((1-t)/2)^(s-1) P_{n/2}(t) dt, for real s > 0."""
    if n % 2 or s <= 0:
        raise ValueError("needs even n and s > 0")
    h = n // 2
    # weight (1 - t)^(s-1) handled by QUADPACK's algebraic-singularity rule
    val, _ = integrate.quad(lambda t: special.eval_legendre(h, t), -1, 1,
                            weight="alg", wvar=(0.0, s - 1), epsabs=1e-13, epsrel=1e-12, limit=200)
    return math.pi / 2 * 2 ** (1 - s) * val


def intertwining_recurrence_residual(s: complex, k: int) -> float:
    """|lambda_{2k+2} (s) - 2(2k+1)/s lambda_{2k}(s+1) - lambda_{2k-2}(s)| for k >= 1."""
    if k < 1:
        raise ValueError("the recurrence holds for k >= 1")
    lhs = intertwining_eigenvalue(s, 2 * k + 2)
    rhs = 2 * (2 * k + 1) / s * intertwining_eigenvalue(s + 1, 2 * k) + intertwining_eigenvalue(s, 2 * k - 2)
    return abs(lhs - rhs)


def _factorial_part(idx: IsotypicIndex) -> float:
    n, k, n0 = idx.n, idx.k, idx.n0
    f = math.factorial
    return f(n - k) * f(k) / (f((n - n0) // 2) * f((n + n0) // 2) * (n + 1))


def isotypic_norm(params: SeriesParams, idx: IsotypicIndex) -> float:
    """||e_{n,k}^{(n0)}||^2 at a complex place."""
    if not idx.valid:
        raise ValueError("invalid index")
    if params.kind is SeriesKind.CPLX_PRINCIPAL:
        return _factorial_part(idx)
    if params.kind is SeriesKind.CPLX_COMPLEMENTARY:
        if idx.n0 != 0:
            raise ValueError("complementary series has n0 = 0")
        return float(intertwining_eigenvalue(complex(params.s).real, idx.n).real) * _factorial_part(idx)
    raise ValueError("isotypic_norm is for complex-place series; use real_norm_sq")


# ---------------------------------------------------------------------------
# Sobolev comparison probe (real place)


@dataclass
class SobolevReport:
    max_ratio: float
    per_operator: dict
    window: tuple[int, int]
    samples: int


def _real_indices(params: SeriesParams, window: int) -> list[int]:
    return [k for k in range(-window, window + 1) if _real_support_ok(params, k)]


def sobolev_equiv_probe(params: SeriesParams, window: int, samples: int = 200,
                        seed: int = 0) -> SobolevReport:
    """max over X in {H, V+, V-} of ||X v|| / (||Delta v|| + ||v||) on random v plus basis vectors."""
    ks = _real_indices(params, window)
    norms = {k: real_norm_sq(params, k) for k in ks}

    def norm_of(coefs: dict) -> float:
        total = 0.0
        for k, c in coefs.items():
            nk = norms.get(k)
            if nk is None:
                nk = real_norm_sq(params, k) if _real_support_ok(params, k) else 0.0
            total += abs(c) ** 2 * nk
        return math.sqrt(total)

    def act(which: str, a: dict) -> dict:
        out: dict = {}
        for k, c in a.items():
            coef, k2 = ladder_real(params, k, which)
            if _real_support_ok(params, k2) and coef != 0:
                out[k2] = out.get(k2, 0) + c * coef
        return out

    rng = np.random.default_rng(seed)
    vecs = [{k: 1.0} for k in ks]
    for _ in range(samples):
        size = min(len(ks), int(rng.integers(1, 51)))
        pick = rng.choice(len(ks), size=size, replace=False)
        vecs.append({ks[i]: complex(*rng.normal(size=2)) for i in pick})
    per = {w: 0.0 for w in ("H", "V+", "V-")}
    for a in vecs:
        den = norm_of(act("Delta", a)) + norm_of(a)
        for w in per:
            per[w] = max(per[w], norm_of(act(w, a)) / den)
    return SobolevReport(max(per.values()), per, (-window, window), len(vecs))
