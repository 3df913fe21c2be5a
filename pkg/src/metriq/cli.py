"""Command-line frontend: eval, verify, search and figure.

Every command is a thin wrapper that turns its options into a ``RunConfig``
and hands it to the matching ``cmd_*`` function, so ``parse_args`` and the
real invocation share one code path.

Exit codes: 0 pass, 1 verification failure, 2 usage or parse error, 3 I/O error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass

import click
import numpy as np

from . import analysis as A
from . import metrics as M
from .errors import InvalidArgument, UnsupportedDomain
from .geometry import Domain, Sector, parse_domain

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULT_SEED = 0
DEFAULT_N = 100_000
DEFAULT_TOL = 1e-9
STRATEGY_FLAGS = {"closed": "closed_form", "oracle": "oracle"}
TARGETS = ("p-quasi", "w-quasi", "s-quasi", "sw-sup", "pw-sup", "sw-special")
REPORT_FIELDS = ("task", "domain", "metric", "seed", "n_samples", "estimate", "witness", "margin", "pass", "runtime_ms")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


def _fmt(v: float) -> str:
    return repr(float(v))


def parse_point(text: str) -> tuple[float, ...]:
    """``"0.3,-1e-2"`` -> (0.3, -0.01)."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad point literal {text!r}: expected comma-separated numbers") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"bad point literal {text!r}: coordinates must be finite")
    return vals


def render_point(p: tuple[float, ...]) -> str:
    return ",".join(_fmt(c) for c in p)


@dataclass(frozen=True)
class RunConfig:
    command: str
    domain: str | None = None
    metrics: tuple[str, ...] = ()
    x: tuple[float, ...] | None = None
    y: tuple[float, ...] | None = None
    seed: int = DEFAULT_SEED
    n_samples: int = DEFAULT_N
    tol: float = DEFAULT_TOL
    out: str | None = None
    format: str = "json"
    chain: str | None = None
    target: str | None = None
    strategy: str | None = None
    resolution: int = 200
    timing: bool = False

    def render(self) -> list[str]:
        """Argument vector that parses back to this config."""
        argv = [self.command]
        if self.domain is not None:
            argv += ["--domain", self.domain]
        for m in self.metrics:
            argv += ["--metric", m]
        if self.x is not None:
            argv += ["--x", render_point(self.x)]
        if self.y is not None:
            argv += ["--y", render_point(self.y)]
        if self.chain is not None:
            argv += ["--chain", self.chain]
        if self.target is not None:
            argv += ["--target", self.target]
        if self.strategy is not None:
            argv += ["--strategy", self.strategy]
        argv += ["--seed", str(self.seed), "--n", str(self.n_samples), "--tol", _fmt(self.tol)]
        argv += ["--resolution", str(self.resolution), "--format", self.format]
        if self.out is not None:
            argv += ["--out", self.out]
        if self.timing:
            argv.append("--timing")
        return argv


def parse_args(argv: list[str]) -> RunConfig:
    """Parse an argument vector (command first) without running anything."""
    if not argv or argv[0] not in main.commands:
        raise UsageError(f"expected one of {sorted(main.commands)}")
    cmd = main.commands[argv[0]]
    ctx = cmd.make_context(argv[0], list(argv[1:]))
    return _config(argv[0], ctx.params)


def _config(command: str, params: dict) -> RunConfig:
    x = params.get("x")
    y = params.get("y")
    return RunConfig(
        command=command,
        domain=params.get("domain"),
        metrics=tuple(params.get("metric") or ()),
        x=None if x is None else parse_point(x),
        y=None if y is None else parse_point(y),
        seed=params["seed"],
        n_samples=params["n_samples"],
        tol=params["tol"],
        out=params.get("out"),
        format=params["fmt"],
        chain=params.get("chain"),
        target=params.get("target"),
        strategy=params.get("strategy"),
        resolution=params["resolution"],
        timing=params["timing"],
    )


# --------------------------------------------------------------------------
# output


def _clean(v):
    """JSON-safe copy: numpy scalars to python, non-finite floats to null."""
    if isinstance(v, dict):
        return {k: _clean(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(u) for u in v]
    if isinstance(v, np.ndarray):
        return [_clean(u) for u in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, dict):
        return " ".join(f"{k}=" + _csv_cell(u) for k, u in v.items())
    if isinstance(v, list):
        return ";".join(_csv_cell(u) for u in v)
    return str(v)


def render_records(records: list[dict], fmt: str) -> str:
    records = [_clean(r) for r in records]
    if fmt == "json":
        return "".join(json.dumps(r, allow_nan=False) + "\n" for r in records)
    buf = io.StringIO()
    cols = list(REPORT_FIELDS)
    for r in records:
        cols += [k for k in r if k not in cols]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out}: {exc.strerror or exc}") from exc


class _IOFailure(Exception):
    pass


def _report(task: str, cfg: RunConfig, body: dict, t0: float) -> dict:
    rec = {k: body.get(k) for k in REPORT_FIELDS}
    rec.update({k: v for k, v in body.items() if k not in rec})
    rec["task"] = task
    rec["runtime_ms"] = round((time.perf_counter() - t0) * 1e3, 3) if cfg.timing else None
    return rec


# --------------------------------------------------------------------------
# commands


def _domain(cfg: RunConfig, default: str | None = None) -> Domain:
    text = cfg.domain or default
    if text is None:
        raise UsageError("--domain is required")
    return parse_domain(text)


def _strategy(cfg: RunConfig) -> str | None:
    return None if cfg.strategy is None else STRATEGY_FLAGS[cfg.strategy]


def cmd_eval(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    d = _domain(cfg)
    if cfg.x is None or cfg.y is None:
        raise UsageError("eval needs --x and --y")
    if not cfg.metrics:
        raise UsageError("eval needs at least one --metric")
    records = []
    for name in cfg.metrics:
        if name not in M.CLI_NAMES:
            raise UsageError(f"unknown metric {name!r}; choose from {sorted(M.CLI_NAMES)}")
        strategy = _strategy(cfg) if name == "s" else None
        rec = M.evaluate(d, M.MetricId.from_name(name, strategy), cfg.x, cfg.y, tol=cfg.tol)
        body = {
            "domain": d.literal(),
            "metric": name,
            "seed": cfg.seed,
            "n_samples": None,
            "estimate": rec.value,
            "witness": {"x": list(rec.x), "y": list(rec.y)},
            "margin": None,
            "pass": True,
            "value": rec.value,
            "method": rec.method,
        }
        records.append(_report("eval", cfg, body, t0))
    _emit(render_records(records, cfg.format), cfg.out)
    return EXIT_OK


def _metric_chain(chain: str) -> str | None:
    """``"p-metric"`` -> ``"pp"``; ``None`` when the chain is an inequality selector."""
    if chain.endswith("-metric"):
        name = chain[: -len("-metric")]
        name = {"p": "pp"}.get(name, name)
        if name not in M.CLI_NAMES:
            raise UsageError(f"unknown metric in chain {chain!r}")
        return name
    return None


def cmd_verify(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    d = _domain(cfg)
    if cfg.chain is None:
        raise UsageError("verify needs --chain")
    name = _metric_chain(cfg.chain)
    if name is not None:
        if name == "pp" and isinstance(d, Sector):
            rep = A.metric_check_sector(d.theta, cfg.n_samples, cfg.seed)
        else:
            rep = A.metric_check(d, M.MetricId.from_name(name), cfg.n_samples, cfg.seed, tol=cfg.tol)
    else:
        if cfg.chain not in A.SELECTORS:
            raise UsageError(f"unknown chain {cfg.chain!r}; choose from {sorted(A.SELECTORS)} or <metric>-metric")
        rep = A.inequality_sweep(d, cfg.chain, cfg.n_samples, cfg.seed, tol=cfg.tol, s_strategy=_strategy(cfg))
    body = rep.to_dict()
    body["chain"] = cfg.chain
    _emit(render_records([_report("verify", cfg, body, t0)], cfg.format), cfg.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_search(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    target = cfg.target
    if target not in TARGETS:
        raise UsageError(f"unknown target {target!r}; choose from {list(TARGETS)}")
    if target.endswith("-quasi"):
        d = _domain(cfg, "ball:n=2")
        name = {"p": "pp"}.get(target[0], target[0])
        w = A.quasi_constant(d, M.MetricId.from_name(name, _strategy(cfg) if name == "s" else None), cfg.n_samples, cfg.seed)
        body = w.to_dict()
        body.update({"seed": cfg.seed, "n_samples": cfg.n_samples, "margin": None, "pass": True})
    elif target == "sw-special":
        body = A.special_case_extremum().to_dict()
    else:
        if cfg.domain is not None and parse_domain(cfg.domain) != A.DISK:
            raise UsageError(f"target {target} is defined on ball:n=2 only")
        body = A.conjecture_sw_search(cfg.n_samples, cfg.seed, quotient=target[0] + "/w").to_dict()
    body["target"] = target
    _emit(render_records([_report("search", cfg, body, t0)], cfg.format), cfg.out)
    return EXIT_OK


def cmd_figure(cfg: RunConfig) -> int:
    if cfg.x is None or len(cfg.x) != 1:
        raise UsageError("figure needs --x with a single real value in (0, 1)")
    grid = A.figure1_grid(cfg.x[0], cfg.resolution)
    _emit(grid.to_csv(), cfg.out)
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "search": cmd_search, "figure": cmd_figure}


def run(cfg: RunConfig) -> int:
    """Run a config, mapping failures to exit codes (messages go to stderr)."""
    try:
        return COMMANDS[cfg.command](cfg)
    except (UsageError, InvalidArgument, UnsupportedDomain) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except _IOFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO


# --------------------------------------------------------------------------
# click wiring


def _common(f):
    opts = [
        click.option("--domain", default=None, help="Domain literal, e.g. ball:n=2, sector:theta=2.0."),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=DEFAULT_SEED, show_default=True),
        click.option("--n", "n_samples", type=click.IntRange(min=1), default=DEFAULT_N, show_default=True),
        click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True),
        click.option("--strategy", type=click.Choice(sorted(STRATEGY_FLAGS)), default=None,
                     help="How s is computed (default: closed form where available)."),
        click.option("--resolution", type=click.IntRange(min=1), default=200, show_default=True),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
        click.option("--out", default=None, help="Output path (default: stdout)."),
        click.option("--timing", is_flag=True, help="Record runtime_ms (breaks byte-identical output)."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _invoke(command: str, params: dict) -> None:
    try:
        cfg = _config(command, params)
    except UsageError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    sys.exit(run(cfg))


@click.group()
def main():
    """Intrinsic metrics of planar and n-dimensional domains."""


@main.command("eval")
@click.option("--metric", multiple=True, help="Metric name (jstar, pp, s, w, low, rho, th2, th4); repeatable.")
@click.option("--x", default=None, help="Point as comma-separated coordinates.")
@click.option("--y", default=None, help="Point as comma-separated coordinates.")
@_common
def eval_cmd(**params):
    """Evaluate metrics at a pair of points."""
    _invoke("eval", params)


@main.command("verify")
@click.option("--chain", default=None, help="Inequality selector (C48, T46, ...) or <metric>-metric.")
@_common
def verify_cmd(**params):
    """Sweep an inequality chain or check a triangle inequality."""
    _invoke("verify", params)


@main.command("search")
@click.option("--target", type=click.Choice(TARGETS), required=True)
@_common
def search_cmd(**params):
    """Search for quasi-metric constants and s/w extrema."""
    _invoke("search", params)


@main.command("figure")
@click.option("--x", default=None, help="Fixed real point x in (0, 1).")
@_common
def figure_cmd(**params):
    """Write the s/w grid for fixed x as CSV."""
    _invoke("figure", params)


if __name__ == "__main__":  # pragma: no cover
    main()
