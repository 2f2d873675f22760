"""Command-line entry point for running benchmark cases and convergence studies."""

from __future__ import annotations

import argparse
import os
import sys

from .boundary import SpongeLayer
from .core import ConfigurationError, HKRError
from .harness import (CASES, convergence_study, get_case, run_case,
                      write_convergence_csv, write_summary_csv, write_case_csv)
from .kinetic import RelaxConfig
from .splitting import SCHEME_LABELS


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _parse_overrides(pairs):
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"--set expects key=value, got {pair!r}")
        key, _, val = pair.partition("=")
        out[key.strip()] = _coerce(val.strip())
    return out


def _load_config(path):
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                pairs.append(line)
    return _parse_overrides(pairs)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hkr",
        description="Well-balanced kinetic relaxation benchmark runner")
    p.add_argument("--case", help="case id (1, 2, ..., 4A, 9B, ...)")
    p.add_argument("--scheme", help="scheme label; defaults to the case's scheme set")
    p.add_argument("--nx", type=int, help="override the cell count")
    p.add_argument("--cfl", type=float, help="override the CFL number")
    p.add_argument("--tend", type=float, help="override the final time")
    p.add_argument("--out", help="output directory (fallback: $HKR_OUT_DIR, then ./hkr_out)")
    p.add_argument("--convergence", action="store_true",
                   help="run a mesh-refinement study instead of a single run")
    p.add_argument("--all", action="store_true", help="run every registered case")
    p.add_argument("--slow", action="store_true",
                   help="include the long-horizon cases (9A, 9B, 10, 15B)")
    p.add_argument("--list", action="store_true", help="list registered cases")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE",
                   help="dotted config overrides (relax.C, sponge.width, bc, "
                        "lambda_safety, nx_ref, ...)")
    p.add_argument("--config", help="file of key=value lines applied before flags")
    return p


def _relax_from(cfg: dict) -> RelaxConfig | None:
    keys = {k for k in cfg if k.startswith("relax.")}
    if not keys:
        return None
    kw = {}
    if "relax.law" in cfg:
        kw["law"] = cfg["relax.law"]
    if "relax.C" in cfg:
        kw["C"] = float(cfg["relax.C"])
    if "relax.c_tau" in cfg:
        kw["c_tau"] = float(cfg["relax.c_tau"])
    return RelaxConfig(**kw)


def _sponge_from(cfg: dict):
    """Case default unless overridden; sponge.enabled=false disables it."""
    from .harness import _UNSET
    if not any(k.startswith("sponge.") for k in cfg):
        return _UNSET
    if not cfg.get("sponge.enabled", True):
        return None
    return SpongeLayer(width=int(cfg.get("sponge.width", 10)),
                       strength=float(cfg.get("sponge.strength", 0.5)))


def _run_one(case_id, scheme, args, cfg, outdir, results):
    res = run_case(case_id, scheme,
                   nx=args.nx, cfl=args.cfl, t_end=args.tend,
                   bc_kind=cfg.get("bc"),
                   relax=_relax_from(cfg),
                   lambda_safety=float(cfg.get("lambda_safety", 1.0)),
                   sponge=_sponge_from(cfg))
    write_case_csv(res, outdir)
    results.append(res)
    if res.report.errors is None:
        print(f"case {case_id} {scheme}: completed (no steady reference)")
    else:
        errs = ", ".join(f"{c}={e:.3e}" for c, e in
                         zip(res.report.components, res.report.errors))
        status = "PASS" if res.report.passed else "FAIL"
        flag = status if res.report.threshold is not None else "INFO"
        print(f"case {case_id} {scheme}: L1 errors {errs} [{flag}]")
    return res


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list:
        for cid, case in CASES.items():
            gate = " [slow]" if case.slow else ""
            print(f"{cid:>3}  {case.title}{gate}")
        return 0

    cfg = {}
    if args.config:
        cfg.update(_load_config(args.config))
    try:
        cfg.update(_parse_overrides(args.overrides))
    except ConfigurationError as exc:
        parser.error(str(exc))

    outdir = args.out or os.environ.get("HKR_OUT_DIR") or "hkr_out"

    if args.scheme is not None and args.scheme not in SCHEME_LABELS:
        print(f"unknown scheme {args.scheme!r}; valid labels:", file=sys.stderr)
        for label in SCHEME_LABELS:
            print(f"  {label}", file=sys.stderr)
        return 2

    try:
        if args.convergence:
            case_id = args.case or "11"
            schemes = (args.scheme,) if args.scheme else get_case(case_id).schemes
            for scheme in schemes:
                table = convergence_study(case_id, scheme,
                                          nx_ref=int(cfg.get("nx_ref", 12800)),
                                          relax=_relax_from(cfg))
                path = write_convergence_csv(table, outdir)
                print(f"wrote {path}")
                for nx, err, order in table.rows:
                    msg = f"  nx={nx:5d}"
                    for k, comp in enumerate(table.components):
                        msg += f"  err_{comp}={err[k]:.6e}"
                        if order is not None:
                            msg += f" ord={order[k]:.3f}"
                    print(msg)
            return 0

        if args.all:
            results = []
            for cid, case in CASES.items():
                if case.slow and not args.slow:
                    print(f"case {cid}: skipped (enable with --slow)")
                    continue
                schemes = (args.scheme,) if args.scheme else case.schemes
                for scheme in schemes:
                    _run_one(cid, scheme, args, cfg, outdir, results)
            path = write_summary_csv(results, outdir)
            print(f"wrote {path}")
            return 0 if all(r.report.passed for r in results) else 1

        if not args.case:
            parser.error("--case is required unless --list or --all is given")
        case = get_case(args.case)
        results = []
        for scheme in (args.scheme,) if args.scheme else case.schemes:
            _run_one(args.case, scheme, args, cfg, outdir, results)
        write_summary_csv(results, outdir)
        return 0 if all(r.report.passed for r in results) else 1
    except HKRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
