"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 precision exhausted,
4 work budget exceeded, 5 a checked inequality or identity failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import real_arith as ra
from .bounds import growth_sweep, j_tuples, f_exponents, lemma1_rhs, prop1_rhs, s_l_sum
from .discrepancy import DEFAULT_WORK_BUDGET, WorkBudgetExceeded, star_discrepancy_exact
from .halton import (
    BaseTuple,
    PointSet,
    format_float,
    points_from_csv,
    points_to_csv,
    subsequence_points,
    verify_merge_identity,
)

EXIT_CONFIG = 2
EXIT_PRECISION = 3
EXIT_BUDGET = 4
EXIT_VIOLATION = 5

COMMANDS = ("gen", "figure1", "discrepancy", "bounds", "sweep", "cf", "ostrowski", "verify-merge")
FIGURE1_BETAS = (("1", "beta-1"), ("sqrt(2)", "beta-sqrt2"), ("pi", "beta-pi"), ("e", "beta-e"))


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    beta: str | None = None
    alpha: str | None = None
    bases: str = "2,3"
    n: int | None = None
    n_range: str | None = None
    out: str | None = None
    format: str | None = None
    exact: bool = False
    work_budget: int = DEFAULT_WORK_BUDGET
    max_digits: int | None = None
    threads: int = 1
    mode: str | None = None
    l: int | None = None
    j: str | None = None
    k: int = 20
    input: str | None = None
    size: int = 400
    radius: float = 1.5

    def to_text(self) -> str:
        """Canonical ``key = value`` form (None fields omitted)."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {str(v).lower() if isinstance(v, bool) else v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        raw = parse_config_text(text)
        if "command" not in raw:
            raise ConfigError("config text lacks a command")
        return cls(**_coerce(raw))

    # derived, validated views -------------------------------------------

    def base_tuple(self) -> BaseTuple:
        try:
            return BaseTuple(tuple(int(b) for b in self.bases.split(",") if b.strip()))
        except ValueError as exc:
            raise ConfigError(f"bad --bases {self.bases!r}: {exc}") from None

    def beta_spec(self) -> ra.RealSpec:
        if self.beta is None:
            raise ConfigError("--beta is required")
        x = _parse_real(self.beta, "--beta")
        sign = ra.compare(x, 0)
        if sign == 0:
            raise ConfigError("beta must be nonzero")
        if sign < 0:
            raise ConfigError("negative beta is not supported")
        return x

    def n_values(self) -> list[int]:
        if self.n is not None and self.n_range is not None:
            raise ConfigError("give either --n or --n-range, not both")
        if self.n is not None:
            if self.n < 1:
                raise ConfigError("--n must be positive")
            return [self.n]
        if self.n_range is not None:
            return parse_n_range(self.n_range)
        raise ConfigError("--n or --n-range is required")


_KEYS = {f.name: f.type for f in fields(RunConfig)}


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(raw: dict[str, str]) -> dict:
    out = {}
    for key, value in raw.items():
        t = _KEYS[key]
        try:
            if "bool" in t:
                out[key] = value.lower() in ("1", "true", "yes", "on")
            elif "int" in t:
                out[key] = int(value)
            elif "float" in t:
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return out


def _parse_real(text: str, flag: str) -> ra.RealSpec:
    try:
        return ra.parse_real(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{flag}: {exc}") from None


def _parse_int(text: str) -> int:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*", text)
    if not m:
        raise ConfigError(f"bad integer {text!r}")
    return int(m[1]) ** int(m[2]) if m[2] else int(m[1])


def parse_n_range(text: str) -> list[int]:
    """``2^a..2^b`` (dyadic), ``lo..hi`` (powers of two inside) or ``n1,n2,...``."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = _parse_int(lo_s), _parse_int(hi_s)
        out = []
        p = 1
        while p <= hi:
            if p >= lo:
                out.append(p)
            p *= 2
    else:
        out = [_parse_int(t) for t in text.split(",") if t.strip()]
    if not out:
        raise ConfigError(f"empty N range {text!r}")
    if any(b <= a for a, b in zip(out, out[1:])) or out[0] < 1:
        raise ConfigError(f"N range {text!r} must be strictly increasing and positive")
    return out


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="file of 'key = value' lines; flags win")
    g.add_argument("--beta")
    g.add_argument("--alpha", help="alpha for bound modes (default 1/beta)")
    g.add_argument("--bases")
    g.add_argument("--n", type=int)
    g.add_argument("--n-range", dest="n_range")
    g.add_argument("--out")
    g.add_argument("--format", choices=("csv", "svg"))
    g.add_argument("--exact", action="store_const", const=True)
    g.add_argument("--work-budget", dest="work_budget", type=int)
    g.add_argument("--max-digits", dest="max_digits", type=int)
    g.add_argument("--threads", type=int)

    parser = argparse.ArgumentParser(
        prog="halton-subseq",
        description="floor(n*beta)-indexed Halton subsequences: points, discrepancy, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write the point set")
    fig = sub.add_parser("figure1", parents=[common], help="four scatter panels, bases 2,3")
    fig.add_argument("--size", type=int)
    fig.add_argument("--radius", type=float)
    disc = sub.add_parser("discrepancy", parents=[common], help="exact star discrepancy")
    disc.add_argument("--input", help="point CSV instead of --beta")
    b = sub.add_parser("bounds", parents=[common], help="bound-chain checks")
    b.add_argument("--mode", choices=("prop1", "lemma1", "sl"))
    b.add_argument("--l", type=int)
    b.add_argument("--j", help="j-tuple, e.g. 1,0 (lemma1; default all j_i <= 3)")
    sub.add_parser("sweep", parents=[common], help="growth sweep of N D*_N")
    c = sub.add_parser("cf", parents=[common], help="continued fraction and convergents")
    c.add_argument("--k", type=int)
    sub.add_parser("ostrowski", parents=[common], help="Ostrowski digits of N for x in (0,1)")
    sub.add_parser("verify-merge", parents=[common], help="beta > 1 reduction identity")
    return parser


def config_from_args(argv: list[str] | None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        values.update(_coerce(parse_config_text(text)))
        values.pop("command", None)
    for key, value in vars(args).items():
        if key in _KEYS and value is not None:
            values[key] = value
    values["command"] = args.command
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.threads < 1:
        raise ConfigError("--threads must be >= 1")
    if cfg.work_budget < 1:
        raise ConfigError("--work-budget must be positive")
    if cfg.max_digits is not None and cfg.max_digits < ra.START_DIGITS:
        raise ConfigError(f"--max-digits must be >= {ra.START_DIGITS}")
    cfg.base_tuple()
    if cfg.command == "bounds" and cfg.mode is None:
        raise ConfigError("bounds needs --mode")
    if cfg.format == "svg" and cfg.command not in ("gen", "figure1"):
        raise ConfigError("svg output is only available for gen and figure1")


# ---------------------------------------------------------------------------
# output helpers


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out and cfg.command != "figure1":
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _num(v: Fraction | None) -> tuple[str, str]:
    if v is None:
        return "", ""
    return str(v.numerator), str(v.denominator)


def svg_scatter(ps: PointSet, size: int = 400, radius: float = 1.5, title: str = "") -> str:
    """Unit-square scatter plot with ticks at multiples of 1/4."""
    if ps.s != 2:
        raise ConfigError("svg scatter needs two-dimensional points")
    m = 40
    full = size + 2 * m
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" '
        f'viewBox="0 0 {full} {full}">',
        f"<title>{title}</title>",
        f'<rect x="{m}" y="{m}" width="{size}" height="{size}" fill="none" stroke="black"/>',
        '<g font-family="sans-serif" font-size="10" stroke="black">',
    ]
    for q in range(5):
        t = Fraction(q, 4)
        px = m + float(t * size)
        py = m + float((1 - t) * size)
        label = ["0", "1/4", "1/2", "3/4", "1"][q]
        out.append(f'<line x1="{px:.3f}" y1="{m + size}" x2="{px:.3f}" y2="{m + size + 5}"/>')
        out.append(f'<line x1="{m - 5}" y1="{py:.3f}" x2="{m}" y2="{py:.3f}"/>')
        out.append(f'<text x="{px:.3f}" y="{m + size + 18}" text-anchor="middle" stroke="none">{label}</text>')
        out.append(f'<text x="{m - 8}" y="{py + 3:.3f}" text-anchor="end" stroke="none">{label}</text>')
    out.append("</g>")
    out.append('<g fill="black">')
    for x, y in ps.points:
        cx = m + float(x * size)
        cy = m + float((1 - y) * size)
        out.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{radius}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.n_range is not None:
        raise ConfigError("gen takes --n, not --n-range")
    (N,) = cfg.n_values()
    ps = subsequence_points(cfg.beta_spec(), cfg.base_tuple(), N)
    if cfg.format == "svg":
        _emit(cfg, svg_scatter(ps, cfg.size, cfg.radius, f"beta={cfg.beta}"))
    else:
        _emit(cfg, points_to_csv(ps, cfg.exact))
    return 0


def figure1_panels(N: int = 500) -> list[tuple[str, PointSet]]:
    return [
        (stem, subsequence_points(ra.parse_real(text), (2, 3), N)) for text, stem in FIGURE1_BETAS
    ]


def cmd_figure1(cfg: RunConfig) -> int:
    N = cfg.n if cfg.n is not None else 500
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for (text, _), (stem, ps) in zip(FIGURE1_BETAS, figure1_panels(N)):
        if cfg.format != "csv":
            path = outdir / f"figure1_{stem}.svg"
            path.write_text(svg_scatter(ps, cfg.size, cfg.radius, f"beta={text}, bases 2,3, N={N}"))
        else:
            path = outdir / f"figure1_{stem}.csv"
            path.write_text(points_to_csv(ps, cfg.exact))
        print(path)
    return 0


def cmd_discrepancy(cfg: RunConfig) -> int:
    rows = [["N", "s", "value_num", "value_den", "value_float", "witness"]]
    if cfg.input:
        try:
            ps = points_from_csv(Path(cfg.input).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read points: {exc}") from None
        Ns = cfg.n_values() if (cfg.n or cfg.n_range) else [ps.N]
    else:
        Ns = cfg.n_values()
        ps = subsequence_points(cfg.beta_spec(), cfg.base_tuple(), Ns[-1])
    for N in Ns:
        if N > ps.N:
            raise ConfigError(f"N={N} exceeds the {ps.N} available points")
        r = star_discrepancy_exact(ps.prefix(N), work_budget=cfg.work_budget)
        rows.append([N, ps.s, *_num(r.value), format_float(r.value), r.witness_text()])
    _emit(cfg, _csv(rows))
    return 0


def _alpha(cfg: RunConfig) -> ra.RealSpec:
    if cfg.alpha is not None:
        a = _parse_real(cfg.alpha, "--alpha")
        if ra.compare(a, 1) <= 0:
            raise ConfigError("alpha must exceed 1")
        return a
    beta = cfg.beta_spec()
    if ra.compare(beta, 1) >= 0:
        raise ConfigError(
            "the bound chain applies to beta in (0,1) with alpha = 1/beta; for beta > 1 "
            "use the reduction alpha' = beta/(beta+1) (see `verify-merge`) and pass --alpha"
        )
    return ra.reciprocal(beta)


def cmd_bounds(cfg: RunConfig) -> int:
    bt = cfg.base_tuple()
    header = ["N", "alpha", "bases", "j_tuple", "lhs_num", "lhs_den", "rhs_num", "rhs_den", "satisfied"]
    if cfg.mode == "sl":
        if cfg.l is None or cfg.l < 1:
            raise ConfigError("sl mode needs --l >= 1")
        a = _parse_real(cfg.alpha, "--alpha") if cfg.alpha else cfg.beta_spec()
        value = s_l_sum(a, bt, cfg.l)
        _emit(cfg, _csv([["alpha", "bases", "L", "S_L"], [a.to_text(), bt.to_text(), cfg.l, value]]))
        return 0
    alpha = _alpha(cfg)
    rows = [header]
    ok = True
    for N in cfg.n_values():
        if cfg.mode == "prop1":
            reps = [prop1_rhs(N, alpha, bt, work_budget=cfg.work_budget, threads=cfg.threads)]
        else:
            if cfg.j:
                try:
                    js = [tuple(int(t) for t in cfg.j.split(","))]
                except ValueError:
                    raise ConfigError(f"bad --j {cfg.j!r}") from None
                if len(js[0]) != bt.s:
                    raise ConfigError("--j length must match --bases")
            else:
                js = list(j_tuples([min(3, f) for f in f_exponents(N, bt)]))
            reps = [lemma1_rhs(N, alpha, j, bt) for j in js]
        for r in reps:
            jt = "all" if r.j is None else ";".join(map(str, r.j))
            sat = "" if r.satisfied is None else str(r.satisfied).lower()
            rows.append([N, alpha.to_text(), bt.to_text(), jt, *_num(r.lhs), *_num(r.rhs), sat])
            ok &= r.satisfied is not False
    _emit(cfg, _csv(rows))
    return 0 if ok else EXIT_VIOLATION


def cmd_sweep(cfg: RunConfig) -> int:
    Ns = cfg.n_values()
    if Ns[0] < 2:
        raise ConfigError("sweep needs N >= 2")
    res = growth_sweep(
        cfg.beta_spec(), cfg.base_tuple(), Ns, work_budget=cfg.work_budget, threads=cfg.threads
    )
    rows = [["N", "NDstar_float", "log_N", "ratio_s_plus_1", "fitted_slope_running"]]
    for smp, ratio, run in zip(res.samples, res.ratios, res.running_slopes):
        rows.append([
            smp.N,
            format_float(smp.NDstar),
            format(smp.logN, ".17g"),
            repr(ratio),
            "" if run is None else repr(run),
        ])
    _emit(cfg, _csv(rows) + f"fitted_slope={res.slope!r}\n")
    return 0


def cmd_cf(cfg: RunConfig) -> int:
    x = cfg.beta_spec() if cfg.beta else _parse_real(cfg.alpha or "", "--alpha")
    cf = ra.cf_expand(x, cfg.k)
    conv = ra.convergents(cf)
    rows = [["k", "a_k", "p_k", "q_k"]]
    for k, (p, q) in enumerate(conv.pairs):
        rows.append([k, cf.quotient(k), p, q])
    _emit(cfg, _csv(rows))
    return 0


def cmd_ostrowski(cfg: RunConfig) -> int:
    x = cfg.beta_spec()
    if ra.compare(x, 1) >= 0:
        raise ConfigError("ostrowski needs x in (0,1)")
    rows = [["N", "i", "q_i", "N_i"]]
    for N in cfg.n_values():
        exp = ra.ostrowski_expand(N, x)
        rows.extend([N, i, q, d] for i, (d, q) in enumerate(zip(exp.digits, exp.denominators)))
    _emit(cfg, _csv(rows))
    return 0


def cmd_verify_merge(cfg: RunConfig) -> int:
    beta = cfg.beta_spec()
    (N,) = cfg.n_values()
    rep = verify_merge_identity(beta, N)
    line = (
        f"beta={rep.beta},N={rep.N},passed={str(rep.passed).lower()},"
        f"identity_checked={rep.identity_checked},values_checked={rep.values_checked}"
    )
    if rep.counterexample:
        line += f",counterexample={rep.counterexample}"
    _emit(cfg, line + "\n")
    return 0 if rep.passed else EXIT_VIOLATION


HANDLERS = {
    "gen": cmd_gen,
    "figure1": cmd_figure1,
    "discrepancy": cmd_discrepancy,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "cf": cmd_cf,
    "ostrowski": cmd_ostrowski,
    "verify-merge": cmd_verify_merge,
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse usage errors already exit with 2
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.max_digits is not None:
        os.environ[ra.MAX_DIGITS_ENV] = str(cfg.max_digits)
    try:
        return HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ra.PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except WorkBudgetExceeded as exc:
        print(f"work budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, ZeroDivisionError) as exc:
        # NegativeIndex, InsufficientConvergents and invalid inputs
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
