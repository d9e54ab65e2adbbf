"""Command-line interface.

Subcommands
    pmax      closed-form optimum for a state and decoding set
    oracle    brute-force sphere-search optimum (independent of closed forms)
    simulate  seeded Monte Carlo of the protocol with optimal (or given)
              encodings
    classical exact two-bit-assisted classical baseline
    measures  correlation measures for a (Bell diagonal) state
    scan      sweep the Bell diagonal tetrahedron, one CSV/JSON row per state
    verify    cross-check closed forms against the oracle and Monte Carlo
              against exact evaluation

Exit codes: 0 success, 2 configuration/input error, 3 verification failure.
Reports are deterministic: same configuration and seed give identical bytes.
QRAC_THREADS caps the Monte Carlo worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bloch import BellDiagonal, TwoQubitBloch, canonicalize, load_state
from .classical import classical_maxmin
from .errors import ConfigError, QracError
from .measures import advantage_predicates, measure_set
from .optimal import OptimalResult, pmax_2to1, pmax_3to1
from .oracle import SphereSearchConfig, oracle_pmax
from .rac import DecodingSet, EncodingSet, RacTask, evaluate, simulate

_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass
class RunConfig:
    command: str
    state_input: str | None = None
    decodings: str | None = None
    encodings: str | None = None
    n: int | None = None
    constraint: str = "unrestricted"
    trials: int = 1_000_000
    seed: int = 0
    tolerance: float = 1e-6
    grid: int = 180
    cases: int = 20
    out: str | None = None
    format: str = "json"
    verify_tol: float = 1e-4


def _parse_decodings(spec: str, n: int | None) -> DecodingSet:
    if spec == "orthogonal-axes":
        if n is None:
            raise ConfigError("--dec orthogonal-axes needs --n")
        axes = [_AXES["x"], _AXES["y"], _AXES["z"]][:n]
        return DecodingSet(np.array(axes))
    try:
        rows = json.loads(spec)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--dec is neither 'orthogonal-axes' nor valid JSON: {exc}") from exc
    try:
        dec = DecodingSet(np.asarray(rows, dtype=float))
    except Exception as exc:
        raise ConfigError(f"--dec rows are not unit-normalizable 3-vectors: {exc}") from exc
    if n is not None and len(dec) != n:
        raise ConfigError(f"--dec has {len(dec)} directions but --n is {n}")
    return dec


def _parse_encodings(spec: str) -> EncodingSet:
    try:
        return EncodingSet(np.asarray(json.loads(spec), dtype=float))
    except Exception as exc:
        raise ConfigError(f"--enc is not a valid encoding list: {exc}") from exc


def _load_state_or_fail(spec: str | None) -> TwoQubitBloch:
    if spec is None:
        raise ConfigError("--state is required for this command")
    try:
        return load_state(spec)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read state: {exc}") from exc


def _emit(cfg: RunConfig, payload: dict | None, csv_text: str | None = None) -> None:
    if cfg.format == "csv":
        if csv_text is None:
            raise ConfigError(f"command {cfg.command!r} has no CSV form")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _optimal_block(result: OptimalResult, rotations=None) -> dict:
    enc = result.encodings.directions
    if rotations is not None:
        enc = np.array([rotations.from_diagonal_a(v) for v in enc])
    return {
        "p_max": result.p_max,
        "method": result.method,
        "degenerate": result.degenerate,
        "encodings": [[float(v) for v in row] for row in enc],
    }


def _sphere_config(cfg: RunConfig) -> SphereSearchConfig:
    return SphereSearchConfig(coarse_grid=cfg.grid, tolerance=cfg.tolerance)


def _cmd_pmax(cfg: RunConfig, use_oracle: bool) -> int:
    state = _load_state_or_fail(cfg.state_input)
    dec_raw = _parse_decodings(cfg.decodings, cfg.n)
    n = len(dec_raw)
    diag, rot = canonicalize(state)
    dec = DecodingSet(np.array([rot.to_diagonal_b(v) for v in dec_raw.directions]))
    if use_oracle:
        result = oracle_pmax(RacTask(n), diag, dec, _sphere_config(cfg))
    elif n == 2:
        result = pmax_2to1(diag, dec)
    else:
        result = pmax_3to1(diag, dec, allow_oracle_fallback=True)
    report = evaluate(RacTask(n), diag, result.encodings, dec)
    payload = report.to_json_dict()
    payload["optimal"] = _optimal_block(result, rot)
    _emit(cfg, payload, report.to_csv())
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    state = _load_state_or_fail(cfg.state_input)
    dec_raw = _parse_decodings(cfg.decodings, cfg.n)
    n = len(dec_raw)
    task = RacTask(n)
    diag, rot = canonicalize(state)
    dec = DecodingSet(np.array([rot.to_diagonal_b(v) for v in dec_raw.directions]))
    optimal_block = None
    if cfg.encodings is not None:
        enc_raw = _parse_encodings(cfg.encodings)
        enc = EncodingSet(np.array([rot.to_diagonal_a(v) for v in enc_raw.directions]))
    else:
        if n == 2:
            result = pmax_2to1(diag, dec)
        else:
            result = pmax_3to1(diag, dec, allow_oracle_fallback=True)
        enc = result.encodings
        optimal_block = _optimal_block(result, rot)
    workers = max(1, int(os.environ.get("QRAC_THREADS", "1")))
    report = simulate(task, diag, enc, dec, trials=cfg.trials, seed=cfg.seed, workers=workers)
    payload = report.to_json_dict()
    payload["trials"] = cfg.trials
    payload["seed"] = cfg.seed
    if optimal_block is not None:
        payload["optimal"] = optimal_block
    _emit(cfg, payload, report.to_csv())
    return 0


def _cmd_classical(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ConfigError("--n is required for classical")
    result = classical_maxmin(cfg.n, cfg.constraint)
    payload = {
        "n": cfg.n,
        "constraint": result.constraint_set,
        "value": float(result.value),
        "value_exact": str(result.value),
        "certified": result.certified,
        "witness": result.witness.to_json_dict(),
    }
    _emit(cfg, payload)
    return 0


def _bell_diagonal_or_fail(state: TwoQubitBloch) -> BellDiagonal:
    diag, _ = canonicalize(state)
    if max(np.max(np.abs(diag.M)), np.max(np.abs(diag.N))) > 1e-9:
        raise ConfigError("measures need a Bell diagonal state (vanishing local Bloch vectors)")
    t = np.diag(diag.T)
    return BellDiagonal(float(t[0]), float(t[1]), float(t[2]))


def _cmd_measures(cfg: RunConfig) -> int:
    state = _load_state_or_fail(cfg.state_input)
    bd = _bell_diagonal_or_fail(state)
    ms = measure_set(bd)
    payload = ms.to_json_dict()
    payload["advantage"] = advantage_predicates(bd).to_json_dict()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d_geom", "s2", "s3", "q3", "p_orth"])
    writer.writerow([ms.d_geom, ms.s2, ms.s3, ms.q3, ms.p_orth])
    _emit(cfg, payload, buf.getvalue())
    return 0


_SCAN_COLUMNS = [
    "T1", "T2", "T3", "p_orth", "q3", "s2", "s3", "d_geom",
    "adv_necessary", "adv_orthogonal", "adv_exists",
]


def _cmd_scan(cfg: RunConfig) -> int:
    if cfg.grid < 2:
        raise ConfigError("--grid must be >= 2 for scan")
    axis = np.linspace(-1.0, 1.0, cfg.grid)
    rows = []
    for t1 in axis:
        for t2 in axis:
            for t3 in axis:
                eigs = (
                    0.25 * (1 - t1 - t2 - t3),
                    0.25 * (1 - t1 + t2 + t3),
                    0.25 * (1 + t1 - t2 + t3),
                    0.25 * (1 + t1 + t2 - t3),
                )
                if min(eigs) < -1e-12:
                    continue
                ordered = BellDiagonal(*_signed_sorted(t1, t2, t3))
                ms = measure_set(ordered)
                flags = advantage_predicates(ordered)
                rows.append(
                    {
                        "T1": float(t1),
                        "T2": float(t2),
                        "T3": float(t3),
                        "p_orth": ms.p_orth,
                        "q3": ms.q3,
                        "s2": ms.s2,
                        "s3": ms.s3,
                        "d_geom": ms.d_geom,
                        "adv_necessary": flags.necessary_all_decodings,
                        "adv_orthogonal": flags.all_orthogonal_2to1,
                        "adv_exists": flags.exists_decoding_2to1,
                    }
                )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_SCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(cfg, {"grid": cfg.grid, "rows": rows}, buf.getvalue())
    return 0


def _signed_sorted(t1: float, t2: float, t3: float) -> tuple[float, float, float]:
    """Reorder entries by decreasing magnitude, keeping signs (a local
    relabeling of axes; the state is unchanged up to local rotations)."""
    vals = sorted((t1, t2, t3), key=abs, reverse=True)
    return vals[0], vals[1], vals[2]


def _cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_verification

    failures = run_verification(
        cases=cfg.cases,
        seed=cfg.seed,
        tol=cfg.verify_tol,
        sphere=_sphere_config(cfg),
        trials=cfg.trials,
        out=sys.stdout,
    )
    return 0 if failures == 0 else 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrac",
        description="Random access codes assisted by two-qubit states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, state=False, dec=False, n_flag=False):
        if state:
            p.add_argument("--state", required=True, help="state JSON (inline or file path)")
        if dec:
            p.add_argument("--dec", required=True,
                           help="decoding directions as JSON rows, or 'orthogonal-axes'")
        if n_flag:
            p.add_argument("--n", type=int, choices=(2, 3))
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("pmax", help="closed-form optimum for fixed decodings")
    add_common(p, state=True, dec=True, n_flag=True)

    p = sub.add_parser("oracle", help="sphere-search optimum for fixed decodings")
    add_common(p, state=True, dec=True, n_flag=True)
    p.add_argument("--grid", type=int, default=180, help="sphere grid points per angle")
    p.add_argument("--tol", type=float, default=1e-6, help="refinement step floor")

    p = sub.add_parser("simulate", help="Monte Carlo with optimal or given encodings")
    add_common(p, state=True, dec=True, n_flag=True)
    p.add_argument("--enc", help="encoding directions as JSON rows (default: optimal)")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("classical", help="exact classical two-bit baseline")
    p.add_argument("--n", type=int, choices=(2, 3), required=True)
    p.add_argument("--constraint", choices=("unrestricted", "bob_maximally_mixed"),
                   default="unrestricted")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("measures", help="correlation measures of a state")
    add_common(p, state=True)

    p = sub.add_parser("scan", help="sweep the Bell diagonal tetrahedron")
    p.add_argument("--grid", type=int, default=21, help="points per T axis")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = sub.add_parser("verify", help="closed-form vs oracle and Monte Carlo checks")
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--grid", type=int, default=120)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    mapping = {
        "state": "state_input",
        "dec": "decodings",
        "enc": "encodings",
        "n": "n",
        "constraint": "constraint",
        "trials": "trials",
        "seed": "seed",
        "grid": "grid",
        "cases": "cases",
        "out": "out",
        "format": "format",
    }
    for arg_name, cfg_name in mapping.items():
        if hasattr(args, arg_name) and getattr(args, arg_name) is not None:
            setattr(cfg, cfg_name, getattr(args, arg_name))
    if hasattr(args, "tol") and args.tol is not None:
        if args.command == "verify":
            cfg.verify_tol = args.tol
        else:
            cfg.tolerance = args.tol
    return cfg


def run(cfg: RunConfig) -> int:
    """Dispatch one validated configuration; returns the exit code."""
    if cfg.command == "pmax":
        return _cmd_pmax(cfg, use_oracle=False)
    if cfg.command == "oracle":
        return _cmd_pmax(cfg, use_oracle=True)
    if cfg.command == "simulate":
        return _cmd_simulate(cfg)
    if cfg.command == "classical":
        return _cmd_classical(cfg)
    if cfg.command == "measures":
        return _cmd_measures(cfg)
    if cfg.command == "scan":
        return _cmd_scan(cfg)
    if cfg.command == "verify":
        return _cmd_verify(cfg)
    raise ConfigError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QracError as exc:
        module = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"error: {module}.{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
