"""Batch front end: ``halasz {sum,lx,verify,decompose,meanvalue,scan} --config run.toml``.

Exit status: 0 success, 1 a frozen-constant assertion failed, 2 usage,
config or domain error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import constants as consts
from .config import RunConfig, load_config
from .errors import CapacityError, ConfigError, HalaszError
from .euler import lx as run_lx
from .meanvalue import classical_mv_contrast, lemma1_battery, lemma1_report
from .multiplicative import log_ratio_sum, summatory_table
from .primes import build_tables
from .reporting import format_value, write_csv, write_json
from .verifier import (
    BLOCK_COLUMNS,
    auxiliary_prime_sum,
    block_rows,
    decomposition_check,
    halasz_bound,
    smooth_variant_check,
)

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


def _tables(cfg: RunConfig, meanvalue: bool = False):
    need = cfg.needed_limit(meanvalue)
    limit = cfg.sieve_limit or need
    if need > limit:
        raise CapacityError(f"x = {need} exceeds sieve_limit {limit}")
    return build_tables(limit)


def _join(values) -> str:
    return ",".join(format_value(v) for v in values)


def run_header(cfg: RunConfig, C: consts.Constants, command: str, xs=None, qsteps=None) -> dict:
    """Everything needed to reproduce a run; thread count and paths are left out on purpose."""
    xs = cfg.x_values if xs is None else xs
    specs = [s.to_dict() for s in cfg.specs]
    seeds = sorted({s.seed for s in cfg.specs if s.kind.startswith("random_")})
    if command == "meanvalue" and "steinhaus" in cfg.meanvalue.families:
        seeds = sorted(set(seeds) | set(cfg.meanvalue.seeds))
    return {
        "command": command,
        "spec": json.dumps(specs[0] if len(specs) == 1 else specs, sort_keys=True, separators=(",", ":")),
        "seed": _join(seeds) if seeds else "none",
        "x_values": _join(xs),
        "grid_step": _join(cfg.grid_step_for(x) for x in xs),
        "quadrature_step": _join(qsteps if qsteps is not None else (cfg.grid_step_for(x) for x in xs)),
        "chunk_size": str(cfg.chunk_size),
        "constants_sha256": C.sha256,
    }


def _stem(cfg: RunConfig, base: str, spec) -> str:
    if len(cfg.specs) == 1:
        return base
    slug = "".join(c if c.isalnum() else "_" for c in spec.name).strip("_")
    return f"{base}_{slug}"


# -- subcommands ----------------------------------------------------------


def cmd_sum(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    """S(x) at every x; one CSV per spec with rows (x, re S, im S)."""
    tables = _tables(cfg)
    header = run_header(cfg, C, "sum")
    for spec in cfg.specs:
        st = summatory_table(spec, tables, cfg.x_values, cfg.chunk_size, cfg.threads)
        rows = [{"x": x, "re_S": v.real, "im_S": v.imag} for x, v in zip(cfg.x_values, st.values)]
        write_csv(out / f"{_stem(cfg, 'sum', spec)}.csv", ["x", "re_S", "im_S"], rows, header)
    return EXIT_OK


def cmd_lx(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    """Window sups and L(x) for every (spec, x)."""
    tables = _tables(cfg)
    header = run_header(cfg, C, "lx")
    results, summary, windows = [], [], []
    for spec in cfg.specs:
        for x in cfg.x_values:
            _, res = run_lx(spec, tables, x, cfg.grid_step, cfg.threads)
            results.append({"spec": spec.name, **res.to_dict()})
            summary.append({"spec": spec.name, "x": x, "grid_step": res.grid_step, "L": res.L})
            for N, s in sorted(res.window_sups.items()):
                windows.append({"spec": spec.name, "x": x, "N": N, "window_sup": s})
    write_json(out / "lx.json", {"header": header, "results": results})
    write_csv(out / "lx.csv", ["spec", "x", "grid_step", "L"], summary, header)
    write_csv(out / "lx_windows.csv", ["spec", "x", "N", "window_sup"], windows, header)
    return EXIT_OK


def global_checks(tables, x: float, C: consts.Constants) -> tuple[dict, list[str]]:
    """Spec-independent estimates: the auxiliary prime sum and sum log(x/n)."""
    loglog = math.log(math.log(x))
    aux = auxiliary_prime_sum(tables, x) / loglog
    logsum = log_ratio_sum(x) / x
    bad = []
    if aux > C["C_AUX"]:
        bad.append(f"x={x:g}: auxiliary sum ratio {aux:.6g} > C_AUX {C['C_AUX']:.6g}")
    if logsum > C["C_LOGSUM"]:
        bad.append(f"x={x:g}: log-sum ratio {logsum:.6g} > C_LOGSUM {C['C_LOGSUM']:.6g}")
    return {"x": x, "aux_ratio": aux, "logsum_ratio": logsum}, bad


def worst(report, field: str, capped: bool = False) -> float:
    vals = [getattr(b, field) for b in report.blocks if not capped or b.k <= report.cutoff_k]
    return max(vals) if vals else 0.0


def summary_row(report, name: str) -> dict:
    return {
        "spec": name,
        "x": report.x,
        "L": report.L,
        "L_over_logx": report.L / math.log(report.x),
        "S_abs": report.S_abs,
        "bound": report.bound,
        "theorem_ratio": report.theorem_ratio,
        "normalized_defect": report.decomposition.normalized_defect,
        "cutoff_k": report.cutoff_k,
        "max_trivial_ratio": worst(report, "trivial_ratio"),
        "max_perron_ratio": worst(report, "perron_ratio"),
        "max_I1_ratio": worst(report, "I1_ratio", True),
        "max_I2_ratio": worst(report, "I2_ratio", True),
        "max_eq32_ratio": worst(report, "eq32_ratio", True),
        "max_chain_ratio": worst(report, "chain_ratio", True),
    }


SUMMARY_COLUMNS = [
    "spec", "x", "L", "L_over_logx", "S_abs", "bound", "theorem_ratio", "normalized_defect", "cutoff_k",
    "max_trivial_ratio", "max_perron_ratio", "max_I1_ratio", "max_I2_ratio", "max_eq32_ratio", "max_chain_ratio",
]


def _summary_line(row: dict, ok: bool) -> str:
    return (
        f"{row['spec']} x={row['x']:g} L={row['L']:.6g} |S|={row['S_abs']:.6g} bound={row['bound']:.6g} "
        f"ratio={row['theorem_ratio']:.4g} worst: triv={row['max_trivial_ratio']:.3g} "
        f"I1={row['max_I1_ratio']:.3g} I2={row['max_I2_ratio']:.3g} eq32={row['max_eq32_ratio']:.3g} "
        f"chain={row['max_chain_ratio']:.3g} perron={row['max_perron_ratio']:.3g} "
        f"defect={row['normalized_defect']:.3g} {'ok' if ok else 'FAIL'}"
    )


def _pipeline(cfg: RunConfig, C: consts.Constants, command: str):
    tables = _tables(cfg)
    reports, rows, smooth, glob, violations = [], [], [], [], []
    for spec in cfg.specs:
        for x in cfg.x_values:
            r = halasz_bound(spec, tables, x, cfg.grid_step, cfg.chunk_size, cfg.threads)
            bad = consts.report_violations(r, C)
            if cfg.smooth_theta is not None:
                theta = cfg.smooth_theta
                sm = smooth_variant_check(spec.restricted(x**theta), tables, x, theta, cfg.grid_step,
                                          cfg.threads, cfg.chunk_size)
                smooth.append({"spec": spec.name, **asdict(sm)})
                if sm.ratio > C["C_SM"]:
                    bad.append(f"{spec.name} x={x:g}: smooth ratio {sm.ratio:.6g} > C_SM {C['C_SM']:.6g}")
            row = summary_row(r, spec.name)
            reports.append(r)
            rows.append(row)
            violations += bad
            if command == "verify":
                print(_summary_line(row, not bad), flush=True)
    for x in cfg.x_values:
        g, bad = global_checks(tables, x, C)
        glob.append(g)
        violations += bad
    return reports, rows, smooth, glob, violations


def cmd_verify(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    """Full chain; exit 1 listing every violated constant."""
    header = run_header(cfg, C, "verify")
    reports, rows, smooth, glob, violations = _pipeline(cfg, C, "verify")
    doc = {
        "header": header,
        "reports": [r.to_dict() for r in reports],
        "smooth": smooth,
        "global": glob,
        "violations": violations,
    }
    write_json(out / "verify.json", doc)
    write_csv(out / "blocks.csv", BLOCK_COLUMNS, block_rows(reports), header)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, rows, header)
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return EXIT_ASSERT if violations else EXIT_OK


def cmd_scan(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    """Ratio-vs-x curves over x_values; measures only, never asserts."""
    header = run_header(cfg, C, "scan")
    reports, rows, smooth, glob, _ = _pipeline(cfg, C, "scan")
    by_x = {g["x"]: g for g in glob}
    for row in rows:
        row.update(aux_ratio=by_x[row["x"]]["aux_ratio"], logsum_ratio=by_x[row["x"]]["logsum_ratio"])
    write_csv(out / "scan.csv", SUMMARY_COLUMNS + ["aux_ratio", "logsum_ratio"], rows, header)
    write_json(out / "scan.json", {"header": header, "rows": rows, "smooth": smooth})
    return EXIT_OK


DECOMPOSE_COLUMNS = [
    "spec", "x", "re_S_direct", "im_S_direct", "re_S_reassembled", "im_S_reassembled", "defect",
    "normalized_defect", "admissible", "abs_discarded_small", "abs_discarded_large",
]


def cmd_decompose(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    tables = _tables(cfg)
    header = run_header(cfg, C, "decompose")
    rows, docs = [], []
    for spec in cfg.specs:
        for x in cfg.x_values:
            d = decomposition_check(spec, tables, x, cfg.chunk_size, cfg.threads)
            rows.append({
                "spec": spec.name, "x": x,
                "re_S_direct": d.S_direct.real, "im_S_direct": d.S_direct.imag,
                "re_S_reassembled": d.S_reassembled.real, "im_S_reassembled": d.S_reassembled.imag,
                "defect": d.defect, "normalized_defect": d.normalized_defect, "admissible": d.admissible,
                "abs_discarded_small": abs(d.discarded_small), "abs_discarded_large": abs(d.discarded_large),
            })
            rec = asdict(d)
            for key in ("S_direct", "S_reassembled", "discarded_small", "discarded_large"):
                rec[key] = [rec[key].real, rec[key].imag]
            docs.append({"spec": spec.name, **rec})
    write_csv(out / "decompose.csv", DECOMPOSE_COLUMNS, rows, header)
    write_json(out / "decompose.json", {"header": header, "results": docs})
    return EXIT_OK


MEANVALUE_COLUMNS = [
    "T", "x", "description", "lhs", "rhs", "ratio", "quadrature_step", "lambda_squared_rhs",
    "classical_bound", "gap",
]


def meanvalue_families(cfg: RunConfig, tables, T: float, x: float):
    mv = cfg.meanvalue
    return lemma1_battery(tables, T, x, cfg.specs, mv.seeds, mv.h_values, mv.families)


def cmd_meanvalue(cfg: RunConfig, out: Path, C: consts.Constants) -> int:
    """Mean-value battery: both sides, the ratio, and the Lambda vs Lambda^2 contrast."""
    tables = _tables(cfg, meanvalue=True)
    xs = cfg.meanvalue_x()
    qsteps = [cfg.quadrature_step_for(x) for x in xs]
    header = run_header(cfg, C, "meanvalue", xs, qsteps)
    rows, violations = [], []
    for x, q in zip(xs, qsteps):
        for T in cfg.meanvalue.T_values:
            if T * T > x:
                continue
            for fam in meanvalue_families(cfg, tables, T, x):
                rep = lemma1_report(fam, tables, T, q, cfg.threads)
                con = classical_mv_contrast(fam, tables, T)
                row = {**rep.to_row(), **{k: v for k, v in asdict(con).items() if k != "lemma1_rhs"}}
                rows.append(row)
                if rep.ratio > C["C_L1"]:
                    violations.append(f"{fam.description} T={T:g} x={x:g}: ratio {rep.ratio:.6g} > C_L1 {C['C_L1']:.6g}")
    write_csv(out / "meanvalue.csv", MEANVALUE_COLUMNS, rows, header)
    write_json(out / "meanvalue.json", {"header": header, "rows": rows, "violations": violations})
    worst_ratio = max((r["ratio"] for r in rows), default=0.0)
    print(f"meanvalue: {len(rows)} families, worst ratio {worst_ratio:.4g} (C_L1 {C['C_L1']:.4g})")
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return EXIT_ASSERT if violations else EXIT_OK


COMMANDS = {
    "sum": cmd_sum,
    "lx": cmd_lx,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "meanvalue": cmd_meanvalue,
    "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="TOML or JSON run document")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides 'output')")
    common.add_argument("--threads", type=int, metavar="N", help="worker threads (overrides 'threads')")
    common.add_argument("--seed-override", type=int, metavar="K", help="replace the seed of every random spec")
    parser = argparse.ArgumentParser(prog="halasz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).splitlines()[0])
    return parser


def resolve(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = replace(cfg, threads=args.threads)
    if args.seed_override is not None:
        cfg = cfg.with_seed(args.seed_override)
        cfg = replace(cfg, meanvalue=replace(cfg.meanvalue, seeds=(args.seed_override,)))
    if args.out is not None:
        cfg = replace(cfg, output=args.out)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        C = consts.load_constants(cfg.constants_file)
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, C)
    except CapacityError as exc:
        print(f"halasz: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except HalaszError as exc:
        print(f"halasz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
