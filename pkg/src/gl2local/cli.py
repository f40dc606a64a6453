"""Command-line front end: ``gl2local <subcommand> [options]``.

Every subcommand prints a report as JSON (default), CSV or an aligned table.
Exact rationals are emitted as ``"p/q"`` strings; complex numbers as
``{"re": .., "im": ..}`` in JSON and as ``<key>_re``/``<key>_im`` columns in
CSV and tables.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import sys
from fractions import Fraction

import click
import numpy as np

from . import amplify, dualkirillov as dk, gauss, spherical, su2, verify, whittaker as wh
from .localfield import AddChar, FiniteLocalField, MultChar, UnitChar

FORMATS = ("json", "csv", "table")


# ---------------------------------------------------------------------------
# parameter types and output


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float, complex)):
            return complex(value)
        try:
            return complex(str(value).replace(" ", "").replace("i", "j"))
        except ValueError:
            self.fail(f"{value!r} is not a complex number (e.g. 0.5+2j)", param, ctx)


class RationalParam(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational (e.g. 7/64)", param, ctx)


COMPLEX = ComplexParam()
RATIONAL = RationalParam()


def _rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _jsonable(v):
    if isinstance(v, Fraction):
        return _rat(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, enum.Enum):
        return v.name
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _flatten(rec: dict) -> dict:
    out = {}
    for k, v in rec.items():
        v = _jsonable(v)
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            out[f"{k}_re"], out[f"{k}_im"] = v["re"], v["im"]
        elif isinstance(v, (dict, list)):
            out[k] = json.dumps(v, sort_keys=True)
        else:
            out[k] = v
    return out


def render(records: list[dict], fmt: str, single: bool = False) -> str:
    """Format records; ``single`` emits a bare JSON object for one-record reports."""
    if fmt == "json":
        payload = _jsonable(records[0] if single else records)
        return json.dumps(payload, indent=2)
    rows = [_flatten(r) for r in records]
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")

    def cell(v) -> str:
        if isinstance(v, float):
            return f"{v:.10g}"
        return "" if v is None else str(v)

    grid = [cols] + [[cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(g[i]) for g in grid) for i in range(len(cols))]
    lines = ["  ".join(s.rjust(w) for s, w in zip(g, widths)) for g in grid]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _set_format(ctx: click.Context, param, value):
    if value is not None:
        ctx.find_root().ensure_object(dict)["format"] = value
    return value


format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default=None, expose_value=False,
                             callback=_set_format, is_eager=True, help="Output format (overrides the group option).")


def emit(ctx: click.Context, records: list[dict], single: bool = False) -> None:
    click.echo(render(records, ctx.obj["format"], single))


def _unit_char(p: int, level: int, a: int = 1) -> UnitChar:
    return UnitChar.make(p, level, a) if level > 0 else UnitChar.trivial(p)


# ---------------------------------------------------------------------------
# group and config handling


def _load_config(ctx: click.Context, path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}", ctx)
    if not isinstance(cfg, dict):
        raise click.UsageError("config must be a JSON object keyed by subcommand", ctx)
    group = ctx.command
    for sub, params in cfg.items():
        cmd = group.commands.get(sub) if isinstance(group, click.Group) else None
        if cmd is None:
            raise click.UsageError(f"unknown config key {sub!r}", ctx)
        if not isinstance(params, dict):
            raise click.UsageError(f"config for {sub!r} must be an object", ctx)
        known = {p.name for p in cmd.params}
        bad = sorted(set(params) - known)
        if bad:
            raise click.UsageError(f"unknown keys for {sub!r}: {', '.join(bad)}", ctx)
    return cfg


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True,
              help="Output format.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file of per-subcommand defaults, e.g. {\"xi\": {\"q\": 5}}.")
@click.version_option(package_name="artifact")
@click.pass_context
def main(ctx: click.Context, fmt: str, config_path: str | None) -> None:
    """Local GL(2) computations with closed forms checked against brute-force oracles."""
    ctx.ensure_object(dict).setdefault("format", fmt)
    ctx.default_map = _load_config(ctx, config_path)


# ---------------------------------------------------------------------------
# subcommands


@main.command("gauss")
@format_option
@click.option("--place", type=click.Choice(["finite", "real"]), default="finite", show_default=True)
@click.option("--q", type=int, default=5, show_default=True, help="Residue characteristic (odd prime).")
@click.option("--level", type=int, default=1, show_default=True, help="Conductor exponent r of the character.")
@click.option("--a", type=int, default=1, show_default=True, help="Index selecting the character of that level.")
@click.option("--max-add-level", type=int, default=3, show_default=True)
@click.option("--C", "C", type=float, default=20.0, show_default=True, help="Analytic conductor (real place).")
@click.option("--epsilon", type=float, default=0.1, show_default=True)
@click.option("--points", type=int, default=200, show_default=True)
@click.pass_context
def gauss_cmd(ctx, place, q, level, a, max_add_level, C, epsilon, points):
    """Gauss sums against their modulus law, or a real-place Gauss integral scan."""
    if place == "finite":
        chi = _unit_char(q, level, a)
        psi = AddChar(FiniteLocalField(q, 0, max(max_add_level, level, 1)))
        rows = []
        for lev in range(0, max_add_level + 1):
            g = gauss.gauss_sum(chi, psi, lev)
            law = gauss.gauss_modulus_law(q, chi.level, lev)
            rows.append({"q": q, "r": chi.level, "additive_level": lev, "value": g.value,
                         "modulus": abs(g.value), "law": law, "residual": abs(abs(g.value) - law),
                         "normalization": g.normalization})
        return emit(ctx, rows)
    if C < 2:
        raise click.BadParameter("the analytic conductor is at least 2", param_hint="--C")
    phase = 2.0 * (C - 2)
    ts, vals = gauss.arch_gauss_grid(phase, 0, epsilon, points)
    rows = [{"C": C, "t": float(t), "value": complex(v), "modulus": abs(v),
             "upper": gauss.upper_envelope(C, t, epsilon), "lower": gauss.lower_envelope(C)}
            for t, v in zip(ts, vals)]
    emit(ctx, rows)


@main.command("zeta")
@format_option
@click.option("--q", type=int, default=5, show_default=True)
@click.option("--alpha1", type=COMPLEX, default="1", show_default=True)
@click.option("--alpha2", type=COMPLEX, default="1", show_default=True)
@click.option("--chi", type=COMPLEX, default="1", show_default=True, help="Unramified twist value at the uniformizer.")
@click.option("--s", "s_values", type=COMPLEX, multiple=True, default=("0.5",), show_default=True)
@click.pass_context
def zeta_cmd(ctx, q, alpha1, alpha2, chi, s_values):
    """New-vector local zeta integral against the Euler factor."""
    psi = AddChar(FiniteLocalField(q, 0, 4))
    W = wh.WhittakerSeq.unramified(alpha1, alpha2, q)
    ch = MultChar.unramified(q, chi)
    rows = []
    for s in s_values:
        try:
            z = wh.local_zeta(W, ch, psi, s)
        except wh.TailError as exc:
            raise click.BadParameter(str(exc), param_hint="--s")
        L = wh.l_factor(alpha1, alpha2, chi, q, s)
        b = wh.local_zeta_bruteforce(W, ch, psi, s, 0, 1)
        rows.append({"s": s, "zeta": z, "bruteforce": b, "L": L, "residual": max(abs(z - L), abs(b - L))})
    emit(ctx, rows)


@main.command("sigma")
@format_option
@click.option("--q", type=int, default=5, show_default=True)
@click.option("--alpha1", type=COMPLEX, default="1", show_default=True)
@click.option("--alpha2", type=COMPLEX, default="1", show_default=True)
@click.option("--s", type=COMPLEX, default="0.05", show_default=True)
@click.option("--d", type=int, default=0, show_default=True)
@click.option("--case", "cases", type=click.IntRange(1, 8), multiple=True, help="Cases 1..8 (default all).")
@click.pass_context
def sigma_cmd(ctx, q, alpha1, alpha2, s, d, cases):
    """Closed-form local Rankin-Selberg factors against brute-force sums."""
    rep = wh.Unramified(alpha1, alpha2, q)
    rows = []
    for case in cases or range(1, 9):
        closed = wh.sigma_v(case, rep, s, d)
        brute = wh.sigma_v_bruteforce(case, rep, s, d)
        row = {"case": case, "closed": closed, "bruteforce": brute, "residual": abs(closed - brute)}
        if rep.tempered and s.real > 0:
            row["tempered_bound"] = wh.sigma_v_tempered_bound(case, rep, s.real, d)
        rows.append(row)
    emit(ctx, rows)


def _build_rep(kind: str, q: int, t1: complex, t2: complex, level1: int, level2: int):
    if kind == "unramified":
        return wh.Unramified(t1, t2, q)
    if kind == "principal":
        return wh.PrincipalOrComplementary(MultChar(_unit_char(q, level1), t1), MultChar(_unit_char(q, level2), t2))
    if kind == "special":
        return wh.Special(MultChar(_unit_char(q, level1), t1))
    triv = UnitChar.trivial(q)
    return wh.SupercuspidalInterface(n_nu={triv: -max(2, level1)}, C0={triv: 1.0},
                                     central=MultChar.unramified(q, 1.0))


@main.command("matcoef")
@format_option
@click.option("--repr", "kind", type=click.Choice(["unramified", "principal", "special", "supercuspidal"]),
              default="unramified", show_default=True)
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--t1", type=COMPLEX, default="1", show_default=True, help="mu1 (or mu) at the uniformizer.")
@click.option("--t2", type=COMPLEX, default="1", show_default=True, help="mu2 at the uniformizer.")
@click.option("--level1", type=int, default=0, show_default=True, help="Conductor of mu1 (or mu, or of the supercuspidal).")
@click.option("--level2", type=int, default=0, show_default=True)
@click.option("--N", "N", type=int, default=None, help="Classical-vector level (default: the conductor).")
@click.option("--jmax", type=int, default=6, show_default=True)
@click.pass_context
def matcoef_cmd(ctx, kind, q, t1, t2, level1, level2, N, jmax):
    """Matrix coefficients of classical vectors: closed forms vs the series oracle."""
    rep = _build_rep(kind, q, t1, t2, level1, level2)
    c = dk.conductor_of(rep)
    N = c if N is None else N
    if N < c:
        raise click.BadParameter(f"N must be at least the conductor {c}", param_hint="--N")
    rows = []
    for j in range(-jmax, jmax + 1):
        closed = dk.matrix_coefficient_closed(rep, N, j)
        oracle = dk.matrix_coefficient(rep, N, j, oracle=True)
        rows.append({"N": N, "j": j, "closed": closed, "oracle_abs": abs(oracle),
                     "residual": abs(closed - abs(oracle)), "xi": dk.xi_finite(j, q)})
    emit(ctx, rows)


@main.command("branching")
@format_option
@click.option("--p", type=int, default=3, show_default=True)
@click.option("--N", "N", type=int, default=2, show_default=True)
@click.option("--level1", type=int, default=0, show_default=True)
@click.option("--a1", type=int, default=1, show_default=True)
@click.option("--level2", type=int, default=0, show_default=True)
@click.option("--a2", type=int, default=1, show_default=True)
@click.pass_context
def branching_cmd(ctx, p, N, level1, a1, level2, a2):
    """K[N]-fixed dimension formula against the Mackey double-coset count."""
    c1, c2 = _unit_char(p, level1, a1), _unit_char(p, level2, a2)
    try:
        dim = dk.branching_dimension(MultChar(c1), MultChar(c2), N)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--N")
    o = dk.branching_oracle(c1, c2, N, check_mass=True)
    emit(ctx, [{"p": p, "N": N, "dimension": dim, "oracle": o["dimension"], "mass_ok": o["mass_ok"],
                "cosets": o["cosets"]}], single=True)


@main.command("xi")
@format_option
@click.option("--place", type=click.Choice([p.name.lower() for p in spherical.Place]),
              default="finite", show_default=True)
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--d", type=int, default=0, show_default=True, help="Depth -v(T) at a finite place.")
@click.option("--T", "T", type=float, default=1.0, show_default=True, help="|T| at an archimedean place.")
@click.option("--theta", "thetas", type=float, multiple=True, default=(0.0,), show_default=True)
@click.option("--bruteforce/--no-bruteforce", default=False, show_default=True)
@click.pass_context
def xi_cmd(ctx, place, q, d, T, thetas, bruteforce):
    """Integral of Xi(n(-T) a(y) n(T))^(1 - 2 theta) over y."""
    pl = spherical.Place[place.upper()]
    rows = []
    for th in thetas:
        try:
            if pl is spherical.Place.FINITE:
                spec = spherical.TranslatedTorusSpec(-d, th)
                v = spherical.xi_integral_finite(spec, q)
                row = {"q": q, "d": d, "theta": th, "value": v.mass_one, "scaled": v.scaled,
                       "envelope": spherical.xi_finite_envelope(q, d, th) * spherical.xi_finite_constant(th)}
                if bruteforce:
                    row["bruteforce"] = spherical.xi_integral_finite_bruteforce(spec, q)
            else:
                row = {"place": place, "T": T, "theta": th, "value": spherical.xi_integral_arch(pl, T, th),
                       "envelope_shape": spherical.arch_envelope(T, th)}
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--theta")
        rows.append(row)
    emit(ctx, rows)


@main.command("spherical")
@format_option
@click.option("--place", type=click.Choice([p.name.lower() for p in spherical.Place]),
              default="finite", show_default=True)
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--m-max", type=int, default=10, show_default=True)
@click.option("--r", "radii", type=float, multiple=True, default=(0.5, 1.0, 2.0), show_default=True,
              help="Cartan radii at an archimedean place.")
@click.pass_context
def spherical_cmd(ctx, place, q, m_max, radii):
    """Spherical functions: exact values at a finite place, Xi at archimedean ones."""
    pl = spherical.Place[place.upper()]
    if pl is spherical.Place.FINITE:
        rows = [{"m": m, "f0": spherical.f_finite_exact(m, q, 0), "f1_scaled": spherical.f_finite_exact(m, q, 1),
                 "xi": spherical.xi_display_exact(m, q), "macdonald_ok": spherical.macdonald_check(m, q)}
                for m in range(m_max + 1)]
    elif pl is spherical.Place.REAL:
        rows = [{"r": r, "xi": spherical.xi_real_closed(r)} for r in radii]
    else:
        rows = [{"r": r, "xi": spherical.xi_complex(r)} for r in radii]
    emit(ctx, rows)


@main.command("su2")
@format_option
@click.option("--s", "s_values", type=float, multiple=True, default=(0.3, 0.7, 1.4), show_default=True)
@click.option("--n-max", type=int, default=8, show_default=True)
@click.pass_context
def su2_cmd(ctx, s_values, n_max):
    """Intertwining eigenvalues: closed form, quadrature oracle, recurrence residual."""
    rows = []
    for s in s_values:
        for n in range(0, n_max + 1, 2):
            try:
                lam = su2.intertwining_eigenvalue(s, n)
            except su2.PoleError as exc:
                raise click.BadParameter(str(exc), param_hint="--s")
            row = {"s": s, "n": n, "lambda": lam}
            if s > 0:
                row["oracle"] = su2.intertwining_oracle(s, n)
            if n >= 2:
                row["recurrence_residual"] = su2.intertwining_recurrence_residual(s, n // 2)
            rows.append(row)
    emit(ctx, rows)


@main.command("optimize")
@format_option
@click.option("--theta", type=RATIONAL, default="0", show_default=True, help="Exact rational in [0, 1/2].")
@click.pass_context
def optimize_cmd(ctx, theta):
    """Exact min-max of the amplification exponents."""
    try:
        r = amplify.optimize_exponents(theta)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--theta")
    emit(ctx, [{"theta": r.theta, "delta": r.delta, "e": r.e_star, "kappa_face": list(r.kappa_face),
                "kappa_unique": r.kappa_unique, "witness": list(r.witness),
                "witness_optimal": r.witness_optimal, "active_at_witness": r.active_at_witness}], single=True)


@main.command("tuples")
@format_option
@click.option("--M", "M", type=click.IntRange(1, None), default=5, show_default=True)
@click.option("--bruteforce/--no-bruteforce", default=True, show_default=True,
              help="Also enumerate all M^4 tuples (M <= 12).")
@click.pass_context
def tuples_cmd(ctx, M, bruteforce):
    """Counts of index tuples per coincidence type."""
    brute = amplify.count_tuples_bruteforce(M) if bruteforce and M <= 12 else None
    rows = []
    for t in amplify.TupleType:
        row = {"type": int(t), "name": t.name, "count": amplify.count_tuples(M, t)}
        if brute is not None:
            row["bruteforce"] = brute[t]
        rows.append(row)
    emit(ctx, rows)


@main.command("mellin")
@format_option
@click.option("--Q", "Q", type=float, default=1e4, show_default=True)
@click.option("--kappa", type=float, default=0.25, show_default=True)
@click.option("--s", type=COMPLEX, default="2j", show_default=True)
@click.option("--n", type=click.IntRange(1, 6), default=2, show_default=True)
@click.pass_context
def mellin_cmd(ctx, Q, kappa, s, n):
    """Mellin transform of the truncation window against its decay bounds."""
    val = amplify.mellin_numeric(Q, kappa, s)
    emit(ctx, [{"Q": Q, "kappa": kappa, "s": s, "n": n, "mellin": val, "modulus": abs(val),
                "bound": amplify.mellin_truncation_bound(Q, kappa, s, n),
                "bound_explicit": amplify.mellin_truncation_bound_explicit(Q, kappa, s, n)}], single=True)


def _parse_tol(ctx, param, values) -> dict[int, float]:
    out = {}
    for v in values:
        try:
            k, x = v.split("=", 1)
            out[int(k)] = float(x)
        except ValueError:
            raise click.BadParameter(f"{v!r} is not ID=VALUE", ctx, param)
        if int(k) not in verify.CHECKS:
            raise click.BadParameter(f"unknown check id {k}", ctx, param)
        if out[int(k)] < 0:
            raise click.BadParameter(f"tolerance for {k} must be >= 0", ctx, param)
    return out


@main.command("verify-all")
@format_option
@click.option("--quick", is_flag=True, help="Reduced grids (about ten seconds); skips runtime budgets.")
@click.option("--jobs", type=click.IntRange(1, None), default=None,
              help=f"Worker processes (default: ${verify.JOBS_ENV} or 1).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--only", type=click.IntRange(1, 11), multiple=True, help="Run only these check ids.")
@click.option("--tol", multiple=True, callback=_parse_tol, help="Tolerance override ID=VALUE.")
@click.pass_context
def verify_all_cmd(ctx, quick, jobs, seed, only, tol):
    """Run every check; exit 1 listing the failures if any fail."""
    try:
        results = verify.run_all(quick=quick, seed=seed, jobs=jobs, only=list(only) or None, tols=tol)
    except ValueError as exc:
        raise click.UsageError(str(exc), ctx)
    emit(ctx, [r.to_dict() for r in results])
    failed = [r for r in results if not r.passed]
    if failed:
        click.echo("FAILED CHECKS:", err=True)
        for r in failed:
            click.echo(f"  {r.id} {r.name} residual={r.residual:.3e} tol={r.tolerance:.1e} "
                       f"elapsed={r.elapsed}s", err=True)
        ctx.exit(1)


if __name__ == "__main__":
    sys.exit(main())
