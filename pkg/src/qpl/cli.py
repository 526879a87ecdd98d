"""Command-line reports for defective spots, gauge solutions, sections and the representation.

Exit status: 0 success, 1 a ``sweep``/``selftest``/``verify-rep`` check failed,
2 domain error, 3 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from qpl import __version__
from qpl.errors import DomainError, ParseError, QPLError
from qpl.fnspec import MAX_DEGREE, build, parse_fnspec, render
from qpl.gauge import (
    SIGN_CONVENTION,
    DefectSet,
    defective_spots,
    is_standard_class,
    solve_gauge_between,
    solve_gauge_to_standard,
)
from qpl.oprep import boundary_defect, independence_rank, relation_residuals
from qpl.qcore import QParam, validate_q
from qpl.sections import kernel_sections

SCHEMA_VERSION = 1
COMMANDS = ("defects", "gauge-standard", "gauge-between", "sections", "verify-rep", "sweep", "selftest")
REP_TOL = 1e-12


class _UsageError(ParseError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _policy_params(args) -> QParam:
    n_cap = None
    env = os.environ.get("QPL_N_CAP")
    if env:
        try:
            n_cap = int(env)
        except ValueError:
            raise DomainError(f"QPL_N_CAP must be an integer, got {env!r}") from None
    return validate_q(args.q, tol=args.tol, n_cap=n_cap)


def _defects_json(d: Optional[DefectSet]):
    if d is None:
        return None
    return {
        "spots": list(d.spots),
        "scan_bound": d.scan_bound,
        "certificate": float(d.certificate),
        "spot_defects": [float(v) for v in d.spot_defects],
    }


def _empty_report(args, p: QParam, inputs) -> dict:
    return {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "q": p.q,
        "command": args.command,
        "inputs": inputs,
        "policy": {
            "tol": p.tol,
            "prod_tol": p.prod_tol,
            "n_cap": p.n_cap,
            "dim": args.dim,
            "max_degree": args.max_degree,
        },
        "defects": None,
        "defects_h": None,
        "gauge": None,
        "sections": None,
        "independence_rank": None,
        "dim_lower_bound": None,
        "rep_check": None,
        "sweep": None,
        "checks": None,
        "notes": [SIGN_CONVENTION],
    }


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise _UsageError(f"command {args.command!r} requires --{name}")
    return val


def _load(args, name, p):
    text = _need(args, name)
    spec = parse_fnspec(text, max_degree=args.max_degree)
    return spec, build(spec, p)


def _sections_block(h, p, dim):
    rep = kernel_sections(h)
    secs = [
        {"n": s.n, "first_zero_index": s.first_zero_index, "residual": float(s.residual)}
        for s in rep.sections
    ]
    rank = independence_rank(rep.sections, p, dim)
    return rep, secs, rank


def run_report(args) -> tuple:
    """Execute ``args.command``; returns ``(report, exit_status)``."""
    p = _policy_params(args)
    status = 0
    cmd = args.command

    if cmd == "defects":
        spec, f = _load(args, "f", p)
        report = _empty_report(args, p, [{"role": "f", "fnspec": render(spec)}])
        report["defects"] = _defects_json(defective_spots(f))

    elif cmd == "gauge-standard":
        spec, f = _load(args, "f", p)
        report = _empty_report(args, p, [{"role": "f", "fnspec": render(spec)}])
        verdict = is_standard_class(f)
        res = solve_gauge_to_standard(f)
        report["defects"] = _defects_json(verdict.defects)
        report["gauge"] = {
            "verdict": verdict.verdict.value,
            "invertible": res.invertible,
            "residual": res.residual,
            "obstruction_index": res.obstruction,
            "limit": res.limit.value if res.limit else None,
            "limit_error": res.limit.error_bound if res.limit else None,
        }

    elif cmd == "gauge-between":
        fs, f = _load(args, "f", p)
        hs, h = _load(args, "h", p)
        report = _empty_report(args, p, [
            {"role": "f", "fnspec": render(fs)},
            {"role": "h", "fnspec": render(hs)},
        ])
        res = solve_gauge_between(f, h)
        report["defects"] = _defects_json(defective_spots(f))
        report["defects_h"] = _defects_json(defective_spots(h))
        report["gauge"] = {
            "verdict": "GaugeEquivalent" if res.invertible else "NoGaugeInSubalgebra",
            "invertible": res.invertible,
            "residual": res.residual,
            "obstruction_index": res.obstruction,
            "limit": res.limit.value if res.limit else None,
            "limit_error": res.limit.error_bound if res.limit else None,
        }
        if not res.invertible:
            report["notes"].append(
                "spot sets differ: no gauge transformation exists in C*(1, B_0); "
                "inequivalence is not asserted"
            )

    elif cmd == "sections":
        spec, h = _load(args, "h", p)
        report = _empty_report(args, p, [{"role": "h", "fnspec": render(spec)}])
        rep, secs, rank = _sections_block(h, p, args.dim)
        report["defects"] = _defects_json(rep.defects)
        report["sections"] = secs
        report["independence_rank"] = rank
        report["dim_lower_bound"] = rep.dim_lower_bound
        report["notes"].extend(n for n in rep.notes if n != SIGN_CONVENTION)

    elif cmd == "verify-rep":
        report = _empty_report(args, p, [])
        table = relation_residuals(p, args.dim)
        table["boundary column of B_- B_+"] = boundary_defect(p, args.dim)
        report["rep_check"] = table
        ok = all(v <= REP_TOL for k, v in table.items() if not k.startswith("boundary"))
        report["checks"] = {"interior_relations_within_1e-12": ok}
        status = 0 if ok else 1

    elif cmd == "sweep":
        texts = args.h or [f"defect:{n}" for n in range(1, args.n_max + 1)]
        report = _empty_report(args, p, [{"role": "h", "fnspec": t} for t in texts])
        rows = []
        for text in texts:
            spec = parse_fnspec(text, max_degree=args.max_degree)
            h = build(spec, p)
            rep, secs, rank = _sections_block(h, p, args.dim)
            rows.append({
                "fnspec": render(spec),
                "spots": list(rep.defects.spots),
                "dim_lower_bound": rep.dim_lower_bound,
                "independence_rank": rank,
                "max_residual": max(s["residual"] for s in secs),
            })
        bounds = [r["dim_lower_bound"] for r in rows]
        monotone = all(a < b for a, b in zip(bounds, bounds[1:]))
        report["sweep"] = rows
        report["dim_lower_bound"] = bounds
        report["checks"] = {"dim_lower_bound_strictly_increasing": monotone}
        status = 0 if monotone else 1

    elif cmd == "selftest":
        report = _empty_report(args, p, [])
        report["checks"] = _selftest(p, args.seed, args.dim)
        status = 0 if all(report["checks"].values()) else 1

    else:  # argparse restricts choices
        raise _UsageError(f"unknown command {cmd!r}")

    return report, status


def _selftest(p: QParam, seed: int, dim: int) -> dict:
    from qpl.specfun import delta_bar, i_bar, poly_fn, sup_norm

    rng = np.random.default_rng(seed)
    inverse_ok = contraction_ok = small_norm_ok = True
    for _ in range(50):
        c = rng.uniform(-5, 5, size=int(rng.integers(1, 21)))
        f = poly_fn(p, c)
        nf = sup_norm(f).value
        back = delta_bar(i_bar(f))
        inverse_ok &= bool(np.max(np.abs(back.values(60) - f.values(60))) <= 1e-10 * (1 + nf))
        contraction_ok &= sup_norm(i_bar(f)).value <= nf + 1e-12
        if nf > 0:
            g = (0.49 / nf) * f
            small_norm_ok &= not defective_spots(g).spots
    rel = relation_residuals(p, max(dim, 3))
    return {
        "delta_bar_inverts_i_bar": bool(inverse_ok),
        "i_bar_contracts": bool(contraction_ok),
        "small_norm_standard": bool(small_norm_ok),
        "relations_within_1e-12": all(v <= REP_TOL for v in rel.values()),
    }


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_finite(report), indent=2, allow_nan=False)


def _text(report: dict) -> str:
    lines = [f"qpl {report['version']}  command={report['command']}  q={report['q']!r}"]
    for inp in report["inputs"]:
        lines.append(f"  {inp['role']}: {inp['fnspec']}")
    for key in ("defects", "defects_h"):
        d = report.get(key)
        if d:
            label = "h" if key == "defects_h" else "input"
            lines.append(
                f"defective spots ({label}): {d['spots'] or 'none'}  "
                f"(scan bound {d['scan_bound']}, certificate {d['certificate']:.3e})"
            )
    g = report.get("gauge")
    if g:
        lines.append(
            f"gauge: {g['verdict']}  invertible={g['invertible']}  "
            f"residual={g['residual']:.3e}  obstruction={g['obstruction_index']}"
        )
    if report.get("sections") is not None:
        for s in report["sections"]:
            lines.append(
                f"  section n={s['n']}: first zero index {s['first_zero_index']}, "
                f"residual {s['residual']:.3e}"
            )
        lines.append(
            f"dim ker >= {report['dim_lower_bound']}  independence rank {report['independence_rank']}"
        )
    if report.get("sweep"):
        for row in report["sweep"]:
            lines.append(
                f"  {row['fnspec']}: spots {row['spots']}, dim ker >= {row['dim_lower_bound']}, "
                f"rank {row['independence_rank']}"
            )
    if report.get("rep_check"):
        width = max(len(k) for k in report["rep_check"])
        for k, v in report["rep_check"].items():
            lines.append(f"  {k:<{width}}  {v:.3e}")
    if report.get("checks"):
        for k, v in report["checks"].items():
            lines.append(f"check {k}: {'PASS' if v else 'FAIL'}")
    lines.extend(f"note: {n}" for n in report["notes"])
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=float, required=True, help="deformation parameter in (0, 1)")
    common.add_argument("--f", help="function specification (see fnspec grammar)")
    common.add_argument("--json", action="store_true", help="emit one JSON document on stdout")
    common.add_argument("--tol", type=float, default=None, help="zero tolerance (default 1e-9)")
    common.add_argument("--dim", type=int, default=64, help="truncation dimension (default 64)")
    common.add_argument("--max-degree", type=int, default=MAX_DEGREE,
                        help=f"largest accepted polynomial degree (default {MAX_DEGREE})")
    common.add_argument("--seed", type=int, default=0, help="seed for selftest")

    parser = _Parser(prog="qpl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qpl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--h", action="append", help="repeatable; default defect:1..--n-max")
            sp.add_argument("--n-max", type=int, default=10)
        else:
            sp.add_argument("--h", help="connection generator specification")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report, status = run_report(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QPLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(dumps(report) if args.json else _text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
