"""Command-line front end.

    leeyang zeros --d 2 --rect 7x7 --beta 0.3 --precision 40
    leeyang verify --d 1 --chain 2 --beta 1
    leeyang sweep --d 1 --beta-grid 0.25,0.5,1.0 --nmax 10 --out sweep.csv
    leeyang extrapolate sweep.csv --beta 1.0

Settings may also come from ``--config FILE`` (``key = value`` lines, keys
spelled like the long flags); flags given on the command line win.

Exit codes: 0 success, 1 failed check, 2 invalid configuration or input,
3 engine cap exceeded, 4 other engine failure (e.g. zero count not reached).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from decimal import Decimal, InvalidOperation

from . import __version__, highreal
from .cumulants import MOMENT_CAP, cumulants
from .identities import run_suite
from .lattice import CapExceeded, make_box, make_rectangle
from .partition import partition
from .thermo import fit_alpha1
from .zeros import DEFAULT_THETA_TOL, ZeroCountError, find_zeros_adaptive, first_zero

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CAP, EXIT_ENGINE = 0, 1, 2, 3, 4

COMMANDS = ("zeros", "cumulants", "verify", "sweep", "extrapolate")
SWEEP_COLUMNS = (
    "d",
    "beta",
    "n",
    "num_sites",
    "alpha1",
    "u2_per_site",
    "u4_per_site",
    "b2_est",
    "radius_proxy",
    "error",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int = 1
    box: int | None = None
    rect: str | None = None
    chain: int | None = None
    beta: str | None = None
    beta_grid: tuple = ()
    nmax: int = 3
    precision: int = highreal.DEFAULT_PRECISION
    theta_tol: float = DEFAULT_THETA_TOL
    kmax: int = 8
    out: str | None = None
    format: str = "json"
    input: str | None = None

    def canonical(self):
        data = asdict(self)
        data["beta_grid"] = list(self.beta_grid)
        return data

    def to_json(self):
        return json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))

    def embedded(self):
        """Canonical form minus the output path, which does not affect results."""
        data = self.canonical()
        del data["out"]
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["beta_grid"] = tuple(data.get("beta_grid", ()))
        return validate(cls(**data))

    def domain(self):
        given = [x is not None for x in (self.box, self.rect, self.chain)]
        if sum(given) != 1:
            raise ConfigError("give exactly one of --box, --rect, --chain")
        if self.box is not None:
            return make_box(self.d, self.box)
        if self.chain is not None:
            if self.d != 1:
                raise ConfigError("--chain needs --d 1")
            return make_rectangle(1, [self.chain])
        sides = _parse_rect(self.rect)
        if len(sides) != self.d:
            raise ConfigError(f"--rect {self.rect} has {len(sides)} sides but --d is {self.d}")
        return make_rectangle(self.d, sides)

    def betas(self):
        if self.beta_grid:
            return list(self.beta_grid)
        return [self.beta] if self.beta is not None else []


def _parse_rect(text):
    try:
        sides = [int(s) for s in text.lower().split("x")]
    except ValueError:
        raise ConfigError(f"cannot read rectangle {text!r}; expected e.g. 7x7") from None
    if any(s < 1 for s in sides):
        raise ConfigError("rectangle sides must be positive")
    return sides


def _canonical_beta(text):
    try:
        value = Decimal(str(text).strip())
    except InvalidOperation:
        raise ConfigError(f"cannot read beta {text!r}") from None
    if not value.is_finite() or value < 0:
        raise ConfigError("beta must be a finite non-negative number")
    out = format(value.normalize(), "f")
    return out if out != "-0" else "0"


def parse_beta_grid(text):
    """'start:stop:step' (stop included) or a comma list; '' is the empty grid."""
    text = (text or "").strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("beta grid ranges look like start:stop:step")
        try:
            start, stop, step = (Decimal(p) for p in parts)
        except InvalidOperation:
            raise ConfigError(f"cannot read beta grid {text!r}") from None
        if step <= 0:
            raise ConfigError("beta grid step must be positive")
        out = []
        cur = start
        while cur <= stop:
            out.append(_canonical_beta(cur))
            cur += step
        return tuple(out)
    return tuple(_canonical_beta(p) for p in text.split(",") if p.strip())


def validate(cfg):
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.d < 1:
        raise ConfigError("--d must be positive")
    try:
        highreal.check_precision(cfg.precision)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not 0 < cfg.theta_tol < 1:
        raise ConfigError("--theta-tol must lie in (0, 1)")
    if not 1 <= cfg.kmax <= MOMENT_CAP:
        raise ConfigError(f"--kmax must be between 1 and {MOMENT_CAP}")
    if cfg.nmax < 1:
        raise ConfigError("--nmax must be positive")
    if cfg.format not in ("json", "csv"):
        raise ConfigError("--format must be json or csv")
    for name in ("box", "chain"):
        v = getattr(cfg, name)
        if v is not None and v < (0 if name == "box" else 1):
            raise ConfigError(f"--{name} is out of range")
    if cfg.command in ("zeros", "cumulants", "verify"):
        cfg.domain()
        if cfg.beta is None:
            raise ConfigError(f"{cfg.command} needs --beta")
    if cfg.command == "extrapolate" and not cfg.input:
        raise ConfigError("extrapolate needs an input CSV")
    return cfg


# -- argument handling -------------------------------------------------------

_INT_KEYS = {"d", "box", "chain", "nmax", "precision", "kmax", "jobs"}
_FLOAT_KEYS = {"theta_tol"}


def read_config_file(path):
    """``key = value`` lines; '#' starts a comment."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _coerce(key, value):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}") from None
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file; flags override it")
    common.add_argument("--d", type=int, help="lattice dimension (default 1)")
    common.add_argument("--box", type=int, help="centred box [-n, n]^d")
    common.add_argument("--rect", help="rectangle sides, e.g. 7x7")
    common.add_argument("--chain", type=int, help="chain of L sites (d = 1)")
    common.add_argument("--beta", help="inverse temperature")
    common.add_argument("--beta-grid", help="start:stop:step or comma list")
    common.add_argument("--nmax", type=int, help="largest box index for sweeps (default 3)")
    common.add_argument("--precision", type=int, help="decimal digits (default 30)")
    common.add_argument("--theta-tol", type=float, help="zero angle tolerance (default 1e-15)")
    common.add_argument("--kmax", type=int, help="highest cumulant order (default 8)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--jobs", type=int, help="worker processes for sweep (default: CPU count)")

    parser = argparse.ArgumentParser(prog="leeyang", description="Lee-Yang zeros and cumulants of finite Ising models")
    parser.add_argument("--version", action="version", version=f"leeyang {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("zeros", parents=[common], help="zeros of Z on the imaginary field axis")
    sub.add_parser("cumulants", parents=[common], help="cumulants of the magnetization at h = 0")
    sub.add_parser("verify", parents=[common], help="run the identity and inequality checks")
    sub.add_parser("sweep", parents=[common], help="alpha_1 and cumulants over boxes B_1..B_nmax")
    ext = sub.add_parser("extrapolate", parents=[common], help="fit the alpha_1 column of a sweep CSV")
    ext.add_argument("input", help="sweep CSV")
    return parser


def parse_config(argv):
    """Parse argv into (RunConfig, jobs)."""
    args = build_parser().parse_args(argv)
    merged = read_config_file(args.config) if args.config else {}
    merged = {k: _coerce(k, v) for k, v in merged.items()}
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        merged[key] = value
    jobs = merged.pop("jobs", None) or os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError("--jobs must be positive")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown settings: {', '.join(sorted(unknown))}")
    if "beta" in merged:
        merged["beta"] = _canonical_beta(merged["beta"])
    merged["beta_grid"] = parse_beta_grid(merged.get("beta_grid", ""))
    if args.command == "sweep" and "format" not in merged:
        merged["format"] = "csv"
    return validate(RunConfig(command=args.command, **merged)), jobs


# -- commands ----------------------------------------------------------------


def _header(cfg):
    return {"engine": f"leeyang {__version__}", "config": cfg.embedded()}


def _zeros(cfg):
    dom = cfg.domain()
    poly = partition(dom, cfg.beta, cfg.precision)
    zs = find_zeros_adaptive(poly, cfg.theta_tol)
    body = zs.to_dict()
    body["certificate"] = {
        "total_multiplicity": zs.total_multiplicity,
        "num_sites": dom.num_sites,
        "passed": zs.total_multiplicity == dom.num_sites,
    }
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "multiplicity", "residual", "uncertainty"])
        for row in zip(body["theta"], body["multiplicity"], body["residual"], body["uncertainty"]):
            w.writerow(row)
        return _comment_block(cfg) + buf.getvalue(), EXIT_OK
    return _dump({**_header(cfg), "zeros": body}), EXIT_OK


def _cumulants(cfg):
    cv = cumulants(partition(cfg.domain(), cfg.beta, cfg.precision), cfg.kmax)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "u_k", "u_k_per_site"])
        for k in range(1, cfg.kmax + 1):
            w.writerow([k, highreal.decimal(cv[k], cfg.precision), highreal.decimal(cv.per_site(k), cfg.precision)])
        return _comment_block(cfg) + buf.getvalue(), EXIT_OK
    return _dump({**_header(cfg), "cumulants": cv.to_dict()}), EXIT_OK


def _verify(cfg):
    k_max = max(1, min(4, cfg.kmax // 2))
    reports = run_suite(cfg.domain(), cfg.beta, cfg.precision, cfg.theta_tol, k_max)
    ok = all(r.passed for r in reports)
    text = _dump({**_header(cfg), "passed": ok, "reports": [r.to_dict() for r in reports]})
    return text, EXIT_OK if ok else EXIT_CHECK


def sweep_cell(args):
    """One (beta, n) cell; failures come back in the error field."""
    d, beta, n, precision, theta_tol, kmax = args
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(d=d, beta=beta, n=n, num_sites=(2 * n + 1) ** d)
    try:
        poly = partition(make_box(d, n), beta, precision)
        zs = find_zeros_adaptive(poly, theta_tol)
        row["alpha1"] = highreal.decimal(first_zero(zs), precision)
        cv = cumulants(poly, kmax)
        if kmax >= 2:
            row["u2_per_site"] = highreal.decimal(cv.per_site(2), precision)
        if kmax >= 4:
            row["u4_per_site"] = highreal.decimal(cv.per_site(4), precision)
        roots = [
            (abs(float(cv.per_site(k))) / math.factorial(k)) ** (1.0 / k) for k in range(2, kmax + 1, 2)
        ]
        top = max(roots, default=0.0)
        row["radius_proxy"] = "inf" if top == 0 else repr(1.0 / top)
    except (CapExceeded, ZeroCountError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    return row


def _b2_estimates(rows):
    """Running a + b/L fit of u2/|B_n| over the rows of one beta (fills b2_est)."""
    from .thermo import _fit

    sizes, vals = [], []
    for row in rows:
        if row["u2_per_site"] == "":
            continue
        sizes.append(2 * row["n"] + 1)
        vals.append(float(row["u2_per_site"]))
        if len(vals) == 1:
            row["b2_est"] = repr(vals[0])
        else:
            row["b2_est"] = repr(_fit(sizes, vals, 1, min(4, len(vals)))[0])


def sweep_rows(cfg, jobs):
    cells = [(cfg.d, b, n, cfg.precision, cfg.theta_tol, cfg.kmax) for b in cfg.betas() for n in range(1, cfg.nmax + 1)]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as pool:
            rows = list(pool.map(sweep_cell, cells))
    else:
        rows = [sweep_cell(c) for c in cells]
    for b in cfg.betas():
        _b2_estimates([r for r in rows if r["beta"] == b])
    return rows


def _comment_block(cfg):
    config = json.dumps(cfg.embedded(), sort_keys=True, separators=(",", ":"))
    return f"# engine: leeyang {__version__}\n# config: {config}\n"


def _sweep(cfg, jobs):
    rows = sweep_rows(cfg, jobs)
    if cfg.format == "json":
        return _dump({**_header(cfg), "rows": rows}), EXIT_OK
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    failed = any(r["error"] for r in rows)
    return _comment_block(cfg) + buf.getvalue(), EXIT_CHECK if failed else EXIT_OK


def read_sweep_csv(path):
    try:
        with open(path) as fh:
            lines = [line for line in fh if not line.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or "alpha1" not in reader.fieldnames:
        raise ConfigError(f"{path} is not a sweep CSV")
    return list(reader)


def _extrapolate(cfg):
    rows = [r for r in read_sweep_csv(cfg.input) if r["alpha1"] and not r.get("error")]
    betas = cfg.betas() or sorted({r["beta"] for r in rows}, key=Decimal)
    out = []
    for beta in betas:
        sel = sorted((r for r in rows if Decimal(r["beta"]) == Decimal(beta)), key=lambda r: int(r["n"]))
        if len({r["n"] for r in sel}) < 3:
            raise ConfigError(f"beta {beta}: need at least three box sizes, found {len(sel)}")
        d = int(sel[0]["d"])
        est = fit_alpha1(
            [int(r["n"]) for r in sel],
            [r["alpha1"] for r in sel],
            d,
            beta,
            [int(r["num_sites"]) for r in sel],
        )
        out.append(est.to_dict())
    return _dump({**_header(cfg), "estimates": out}), EXIT_OK


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def run(cfg, jobs=1):
    if cfg.command == "zeros":
        return _zeros(cfg)
    if cfg.command == "cumulants":
        return _cumulants(cfg)
    if cfg.command == "verify":
        return _verify(cfg)
    if cfg.command == "sweep":
        return _sweep(cfg, jobs)
    return _extrapolate(cfg)


def main(argv=None):
    try:
        cfg, jobs = parse_config(argv)
        text, code = run(cfg, jobs)
    except ConfigError as exc:
        print(f"leeyang: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"leeyang: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ZeroCountError as exc:
        print(f"leeyang: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except ValueError as exc:
        print(f"leeyang: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
