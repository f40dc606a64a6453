"""Gauss sums at finite places and oscillatory Gauss integrals at a real place."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .localfield import AddChar, FiniteLocalField, MultChar, UnitChar, unit_rep_ints


class Normalization(enum.Enum):
    UNIT_MASS_ONE = "unit_mass_one"  # Vol(O^x) = 1
    DX_OVER_ABS = "dx_over_abs"  # Vol(O^x) = 1 - 1/q


@dataclass(frozen=True)
class GaussSumResult:
    value: complex
    normalization: Normalization

    def __abs__(self) -> float:
        return abs(self.value)

    def rescale(self, target: Normalization, q: int) -> "GaussSumResult":
        if target is self.normalization:
            return self
        factor = 1 - 1 / q
        v = self.value * factor if target is Normalization.DX_OVER_ABS else self.value / factor
        return GaussSumResult(v, target)


def additive_level(field: FiniteLocalField, shift: int) -> int:
    """Level of u -> psi(p^-shift u) on O^x (<= 0 means trivial on O)."""
    return shift - field.d


def gauss_sum(chi: UnitChar, psi: AddChar, shift: int = 0) -> GaussSumResult:
    """Mean of chi(u) psi(p^-shift u) over O^x with Vol(O^x) = 1."""
    f = psi.field
    level = max(chi.level, additive_level(f, shift), 1)
    if level > f.prec:
        raise ValueError(f"needs precision {level}, field has {f.prec}")
    u = unit_rep_ints(f.p, level)
    v = np.mean(chi.values(u) * psi.on_units(-shift, u))
    return GaussSumResult(complex(v), Normalization.UNIT_MASS_ONE)


def gauss_modulus_law(q: int, r: int, add_level: int) -> float:
    """Predicted |G| for conductor r against an additive character of the given level."""
    if r >= 1:
        return q ** (-r / 2) / (1 - 1 / q) if add_level == r else 0.0
    if add_level <= 0:
        return 1.0
    return 1 / (q - 1) if add_level == 1 else 0.0


def eta(mu: UnitChar, psi: AddChar, y_val: int) -> GaussSumResult:
    """Integral of mu(x) psi(x y) over O^x for v(y) = y_val, with Vol(O^x) = 1 - 1/q."""
    g = gauss_sum(mu, psi, -y_val)
    return g.rescale(Normalization.DX_OVER_ABS, psi.field.q)


def root_number(mu: MultChar | UnitChar, psi: AddChar, at_uniformizer: complex | None = None) -> complex:
    """r(mu) = mu(-1) mu(p)^n / eta(mu, p^-n) * q^(-n/2) for conductor n >= 1."""
    if isinstance(mu, MultChar):
        unit, w = mu.unit_part, mu.at_uniformizer
    else:
        unit, w = mu, 1.0
    if at_uniformizer is not None:
        w = at_uniformizer
    n = unit.level
    if n == 0:
        raise ValueError("root number needs a ramified character")
    if psi.field.d != 0:
        raise ValueError("root number is defined for an unramified additive character")
    e = eta(unit, psi, -n).value
    p = unit.p
    return unit(p**n - 1) * complex(w) ** n / e * p ** (-n / 2)


# ---------------------------------------------------------------------------
# real place


def default_phi(x: np.ndarray, m: int = 0) -> np.ndarray:
    """exp(-(|x| + 1/|x|)) sgn(x)^m, vanishing to all orders at 0."""
    ax = np.abs(x)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.where(ax > 0, np.exp(-(ax + 1 / np.where(ax > 0, ax, 1))), 0.0)
    return out * np.sign(x) ** m if m else out


def analytic_conductor(phase: float, m: int) -> float:
    return 2 + abs(complex(m, phase)) / 2


_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)
X_LO, X_HI = 1 / 45, 34.0
MAX_EVALS = 10**6


class QuadratureError(RuntimeError):
    pass


def _panels(t: float, phase: float, n_panels: int, lo: float, hi: float) -> np.ndarray:
    # invert the cumulative phase so each panel carries the same oscillation
    grid = np.geomspace(lo, hi, 4000)
    cum = abs(phase) * np.log(grid / lo) + 2 * math.pi * abs(t) * (grid - lo) + np.log(grid / lo)
    return np.interp(np.linspace(0, cum[-1], n_panels + 1), cum, grid)


def _half_line(g: Callable[[np.ndarray], np.ndarray], t: float, phase: float, n_panels: int,
               lo: float, hi: float) -> complex:
    b = _panels(t, phase, n_panels, lo, hi)
    mid = (b[1:] + b[:-1]) / 2
    half = (b[1:] - b[:-1]) / 2
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    return complex(np.sum(w * g(x)))


def arch_gauss(t: float, phase: float = 0.0, m: int = 0,
               phi: Callable[[np.ndarray], np.ndarray] | None = None,
               tol: float = 1e-8) -> complex:
    """Integral over R of phi(x) exp(2 pi i t x) |x|^(i phase) sgn(x)^m dx.

    Composite Gauss-Legendre on phase-adapted panels, doubled until two
    successive estimates agree to ``tol``.  A user ``phi`` must be negligible
    outside ``X_LO <= |x| <= X_HI``.
    """
    if abs(phase) > 500:
        raise ValueError("|phase| > 500 is outside the validated range")
    if phi is None:
        # sgn^m of phi cancels that of chi: the integrand is even in x
        def g(x):
            return 2 * np.exp(-(x + 1 / x) + 1j * phase * np.log(x)) * np.cos(2 * math.pi * t * x)
        parts = [(g, 1.0)]
    else:
        def gp(x):
            return phi(x) * np.exp(1j * phase * np.log(x) + 2j * math.pi * t * x)

        def gn(x):
            return phi(-x) * (-1) ** m * np.exp(1j * phase * np.log(x) - 2j * math.pi * t * x)
        parts = [(gp, 1.0), (gn, 1.0)]
    cycles = (abs(phase) * math.log(X_HI / X_LO) + 2 * math.pi * abs(t) * X_HI) / (2 * math.pi)
    n = int(cycles) + 16
    prev = None
    used = 0
    while True:
        val = sum(c * _half_line(g, t, phase, n, X_LO, X_HI) for g, c in parts)
        used += n * len(_NODES) * len(parts)
        if prev is not None and abs(val - prev) < tol:
            return val
        if used > MAX_EVALS:
            raise QuadratureError(
                f"no convergence at t={t}, phase={phase}: last change {abs(val - prev):.2e}"
            )
        prev = val
        n *= 2


def arch_gauss_grid(phase: float, m: int = 0, epsilon: float = 0.1,
                    points: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """arch_gauss on a log grid of |t| in [C^(1-eps), C^(1+eps)]."""
    C = analytic_conductor(phase, m)
    ts = np.geomspace(C ** (1 - epsilon), C ** (1 + epsilon), points)
    return ts, np.array([arch_gauss(float(t), phase, m) for t in ts])


def arch_gauss_scan(phase: float, m: int = 0, epsilon: float = 0.1,
                    points: int = 200) -> tuple[float, complex]:
    """Maximise |arch_gauss| over the grid of ``arch_gauss_grid``."""
    ts, vals = arch_gauss_grid(phase, m, epsilon, points)
    i = int(np.argmax(np.abs(vals)))
    return float(ts[i]), complex(vals[i])


def phi_l2_norm_sq(m: int = 0) -> float:
    """Integral of |phi|^2 over R for the default test function."""
    from scipy.integrate import quad

    val, _ = quad(lambda x: math.exp(-2 * (x + 1 / x)), 0, np.inf, epsabs=1e-13)
    return 2 * val


# Frozen constants for the real-place Gauss bounds at eps = 0.1.
# UPPER_K: |G| / C^(-0.4) at the anchor C = 2, t = 0 (0.738), rounded up.
# LOWER_C: best scan value / C^(-0.6) at the anchor C = 20 (0.0500), rounded down.
UPPER_K = 0.74
LOWER_C = 0.05


def upper_envelope(C: float, t: float, eps: float = 0.1) -> float:
    """K min(C^(-1/2+eps), |t|^(-1/2+eps))."""
    return UPPER_K * max(C, abs(t)) ** (-0.5 + eps)


def lower_envelope(C: float) -> float:
    return LOWER_C * C ** (-0.6)
