"""Command-line experiment runner: ``quasiqec <subcommand> [flags]``.

Every subcommand emits rows with the columns of ``COLUMNS`` as CSV (first line
``# schema: 1``) or JSON, and exits 0 when all in-run tolerances pass, 1 on a
tolerance failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import acceptance, gatecell
from .quasi import ScalingPoint, classify, sweep, threshold_report, vbs_windows
from .vbs import codes, recovery
from .vbs.algebra import ground_energy, su_basis, transfer_spectrum
from .vbs.model import MAX_DIM, ed_cross_check

SCHEMA = 1
COLUMNS = ("d", "N", "t", "p", "quantity", "value", "analytic", "rel_err", "seed", "samples", "ok")
COMMANDS = ("algebra", "code", "recover", "threshold", "classify", "gatecell", "all")
CONFIG_KEYS = {"d", "N", "t", "p", "family", "seed", "jobs", "out", "format",
               "errors", "window", "eta", "samples"}
DEFAULTS: dict[str, Any] = {
    "d": [2], "N": None, "t": [1], "p": [0.1], "family": "holographic", "seed": None, "jobs": 1,
    "out": None, "format": "csv", "errors": None, "window": 1, "eta": math.pi / 8, "samples": 100_000,
}


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = (int(x) for x in part.split(":"))
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _listify(value, parser):
    if value is None:
        return None
    if isinstance(value, list):
        return [parser(str(v))[0] for v in value]
    return parser(str(value))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasiqec", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("-d", help="local dimension(s), e.g. 2 or 2,3")
    parser.add_argument("-N", help="system size(s), e.g. 12 or 8:24 or 8,12,16")
    parser.add_argument("-t", help="error weight(s)")
    parser.add_argument("-p", help="physical error rate(s)")
    parser.add_argument("--family", choices=("holographic", "edge", "bulk"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--config", help="JSON file with default parameters")
    parser.add_argument("--out", help="output path (stdout if omitted)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--errors", help="error insertions for recover, e.g. 'bond:n=2;bond:n=5'")
    parser.add_argument("--window", type=int, help="window size for classify")
    parser.add_argument("--eta", type=float, help="cell size for gatecell")
    parser.add_argument("--samples", type=int, help="Monte Carlo samples")
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, the config file and flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(loaded) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    try:
        cfg["d"] = _listify(cfg["d"], _int_list)
        cfg["N"] = _listify(cfg["N"], _int_list)
        cfg["t"] = _listify(cfg["t"], _int_list)
        cfg["p"] = _listify(cfg["p"], _float_list)
    except ValueError as exc:
        raise UsageError(f"malformed numeric list: {exc}") from exc
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    return cfg


def _row(quantity: str, value, analytic=None, tol=None, relative=False, **kw) -> dict[str, Any]:
    value = float(value)
    rel = None
    if analytic is not None:
        analytic = float(analytic)
        rel = abs(value - analytic) / abs(analytic) if analytic != 0 else abs(value - analytic)
    ok = None
    if tol is not None:
        err = rel if relative else (abs(value - analytic) if analytic is not None else value)
        ok = bool(err <= tol)
    row = {c: None for c in COLUMNS}
    row.update(kw)
    row.update(quantity=quantity, value=value, analytic=analytic, rel_err=rel, ok=ok)
    return row


# --------------------------------------------------------------------------


def cmd_algebra(cfg) -> list[dict]:
    rows = []
    n = (cfg["N"] or [32])[0]
    for d in cfg["d"]:
        _, ev = transfer_spectrum(d)
        rows.append(_row("mu0", ev[0], (d * d - 1) / d**2, 1e-12, d=d))
        rows.append(_row("mu1", ev[-1], -1 / d**2, 1e-12, d=d))
        b = su_basis(d)
        cas = np.einsum("aij,ajk->ik", b.t, b.t)
        rows.append(_row("casimir_residual", np.abs(cas - b.D / (2 * d) * np.eye(d)).max(), 0.0, 1e-12, d=d))
        e1, e2 = codes.link_energies(d, n)
        a1, a2 = ground_energy(d)
        rows.append(_row("E_h", e1, a1, 1e-9, d=d, N=n))
        rows.append(_row("E_h2", e2, a2, 1e-9, d=d, N=n))
    return rows


def cmd_code(cfg) -> list[dict]:
    rows = []
    kind = cfg["family"]
    for d in cfg["d"]:
        for n in cfg["N"] or [12]:
            code = codes.build_code(d, n, kind)
            g = code.gram()
            off = float(np.abs(g - np.diag(np.diag(g))).max())
            rows.append(_row("gram_offdiag", off, 0.0 if kind == "holographic" else None,
                             1e-12 if kind == "holographic" else None, d=d, N=n))
            if kind == "holographic":
                sigma, _ = codes.edge_state(code, n + 1, 0)
                err = np.abs(sigma - codes.edge_state_formula(d, n, 0)).max()
                rows.append(_row("edge_state_residual", err, 0.0, 1e-12, d=d, N=n))
            if (d * d - 1) ** n <= MAX_DIM and n >= 3:
                rep = ed_cross_check(d, n)
                rows.append(_row("ed_degeneracy", rep.degeneracy, 1 if d == 2 else 2, 0, d=d, N=n))
                for k, fid in enumerate(rep.fidelities):
                    rows.append(_row(f"ed_fidelity_{'LR'[k]}", fid, 1.0, 1e-10, d=d, N=n))
                rows.append(_row("ed_frustration_free", rep.frustration_free, 0.0, 1e-9, d=d, N=n))
    return rows


def cmd_recover(cfg) -> list[dict]:
    kind = cfg["family"]
    grid = cfg["N"] or [10]
    rows = []
    if cfg["errors"]:
        for d in cfg["d"]:
            for n in grid:
                code = codes.build_code(d, n, kind)
                sigma = np.zeros((code.dim_logical, code.dim_logical))
                sigma[0, 0] = 1.0
                out = recovery.recover_logical(code, cfg["errors"], sigma, cfg["p"][0])
                rows.append(_row("recovered_trace", out.trace, d=d, N=n, p=cfg["p"][0]))
                rows.append(_row("recovered_distance", out.distance, d=d, N=n, p=cfg["p"][0]))
        return rows
    points = [ScalingPoint(n, d, cfg["p"][0], t) for d in cfg["d"] for n in grid for t in cfg["t"]]
    rep = sweep(f"vbs-{kind}", points, "recovery_Dt", jobs=cfg["jobs"])
    for r in rep.rows:
        tol = 0.05 if r.point.t == 1 else 0.10
        rows.append(_row("D_t", r.value, r.analytic, tol, relative=True,
                         d=r.point.d, N=r.point.N, t=r.point.t, p=r.point.p))
    return rows


def cmd_threshold(cfg) -> list[dict]:
    rows = []
    seeds = [cfg["seed"]] if cfg["seed"] is not None else None
    for d in cfg["d"]:
        for n in cfg["N"] or [100]:
            for t in cfg["t"]:
                rep = threshold_report(n, d, t, cfg["p"], seeds=seeds, samples=cfg["samples"])
                rows.append(_row("epsilon_p_star", rep.epsilon_p_star, t / n, 1e-15, d=d, N=n, t=t))
                rows.append(_row("epsilon_l_star", rep.epsilon_l_star, d=d, N=n, t=t))
                for r in rep.rows:
                    rows.append(_row("p_success", r.success, d=d, N=n, t=t, p=r.p))
                    if r.mc_success is not None:
                        rows.append(_row("p_success_mc", r.mc_success, r.success, r.mc_radius,
                                         d=d, N=n, t=t, p=r.p, seed=r.seed, samples=r.samples))
    return rows


def cmd_classify(cfg) -> list[dict]:
    rows = []
    grid = cfg["N"] or [8, 12, 16, 20]
    for d in cfg["d"]:
        rep = classify(vbs_windows(cfg["family"], d), grid, cfg["window"], f"vbs-{cfg['family']}")
        for r in rep.rows:
            rows.append(_row("strong_metric", r.strong, d=d, N=r.N))
            rows.append(_row("weak_metric", r.weak, d=d, N=r.N))
        label = f"class:{rep.cls}:{rep.decay_type}"
        rows.append(_row(label, rep.parameter if rep.parameter is not None else float("nan"), d=d))
    return rows


def cmd_gatecell(cfg) -> list[dict]:
    eta = cfg["eta"]
    u1 = gatecell.u1_partition(eta)
    su2 = gatecell.su2_partition(eta)
    rows = [
        _row("u1_segments", u1.count, math.ceil(2 * math.pi / eta - 1e-12), 0),
        _row("u1_measure", u1.count * u1.side, 2 * math.pi, 1e-12),
        _row("su2_cubes_per_axis", su2.count),
        _row("su2_cube_side", su2.side, eta / math.sqrt(3), 1e-15),
    ]
    seed = cfg["seed"] if cfg["seed"] is not None else 0
    n = min(cfg["samples"], 1000)
    rng = np.random.default_rng(seed)
    from .vbs.algebra import haar_su

    worst = 0.0
    for _ in range(n):
        u = haar_su(2, rng)
        worst = max(worst, gatecell.phase_distance(gatecell.euler_compose(*gatecell.euler_decompose(u)), u))
    rows.append(_row("euler_max_error", worst, 0.0, 1e-9, seed=seed, samples=n))
    return rows


def cmd_all(cfg) -> list[dict]:
    rows = []
    for res in acceptance.run_all():
        for c in res.checks:
            row = _row(f"c{res.number}:{c.name}", c.value, c.reference)
            row["ok"] = c.passed
            rows.append(row)
    return rows


HANDLERS = {
    "algebra": cmd_algebra,
    "code": cmd_code,
    "recover": cmd_recover,
    "threshold": cmd_threshold,
    "classify": cmd_classify,
    "gatecell": cmd_gatecell,
    "all": cmd_all,
}


def render(rows: list[dict], fmt: str, command: str, cfg: dict) -> str:
    failures = [r["quantity"] for r in rows if r["ok"] is False]
    if fmt == "json":
        doc = {"schema": SCHEMA, "command": command, "config": cfg, "rows": rows,
               "failures": failures, "passed": not failures}
        return json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        rows = HANDLERS[args.command](cfg)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(json.dumps({"schema": SCHEMA, "error": str(exc)}) + "\n")
        return 2
    text = render(rows, cfg["format"], args.command, cfg)
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if any(r["ok"] is False for r in rows) else 0


if __name__ == "__main__":
    raise SystemExit(main())
