"""Command line interface.

Subcommands
-----------
spectrum  Jordan data, accuracy, and independence report for a mask (JSON).
basis     Sample phi and the homogeneous basis rows to CSV files plus a
          JSON summary.
verify    Run the verification battery and report pass/fail per check.

Exit codes: 0 success, 1 computational or verification failure, 2 bad
usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import MaskError, RefinableError
from .evaluate import (
    DEFAULT_LEVEL,
    MAX_LEVEL,
    build_homogeneous_basis,
    evaluate_phi,
    homogeneity_residual,
    reconstruct_phi,
)
from .mask import Mask, build_scale_matrices, mask_from_coefficients, parse_mask
from .report import dump_csv, dump_json
from .spectral import accuracy, eigen_structure, independence_test
from .verify import run_battery


class UsageError(Exception):
    """Input problems that are the caller's fault (exit code 2)."""


def _load_mask(spec: str) -> Mask:
    """Read a mask from a JSON file, inline JSON, or '-' for stdin."""
    if spec == "-":
        text = sys.stdin.read()
        source = "<stdin>"
    elif spec.lstrip().startswith(("[", "{")):
        text = spec
        source = "<inline>"
    else:
        path = Path(spec)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read mask file {spec}: {exc}") from exc
        source = str(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: not valid JSON: {exc}") from exc
    try:
        if isinstance(payload, list):
            return mask_from_coefficients(payload)
        return parse_mask(payload)
    except MaskError as exc:
        raise UsageError(f"{source}: {exc}") from exc


def _write(text: str, out: str | None, filename: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / filename).write_text(text)


def _mask_doc(mask: Mask) -> dict:
    return {
        "name": mask.name,
        "coefficients": [complex(c) for c in mask.coefficients],
        "exact_coefficients": list(mask.exact) if mask.exact is not None else None,
        "degree": mask.n,
        "sum": complex(mask.coefficients.sum()),
    }


def _spectrum_doc(mask: Mask, *, exact: bool | None) -> dict:
    scale = build_scale_matrices(mask)
    spectral = eigen_structure(scale, exact=exact)
    acc = accuracy(scale, exact=exact if spectral.is_exact else False)
    indep = independence_test(scale)
    return {
        "mask": _mask_doc(mask),
        "exact_mode": spectral.is_exact,
        "jordan_canonical": spectral.jordan_canonical,
        "residual": spectral.residual,
        "convention_first": spectral.convention_first,
        "convention_last": spectral.convention_last,
        "groups": [
            {
                "eigenvalue": g.eigenvalue,
                "exact_eigenvalue": g.exact_eigenvalue,
                "algebraic": g.algebraic,
                "geometric": g.geometric,
                "chain_lengths": list(g.chain_lengths),
                "spread": g.spread,
            }
            for g in spectral.groups
        ],
        "rows": [
            {
                "index": r.index,
                "eigenvalue": r.eigenvalue,
                "kind": r.kind,
                "chain": r.chain,
                "position": r.position,
                "prev_row": r.prev_row,
                "vector": list(spectral.basis[r.index]),
            }
            for r in spectral.rows
        ],
        "jordan": [list(row) for row in spectral.jordan],
        "accuracy": {
            "order": acc.order,
            "polynomials": [list(c) for c in acc.coefficients],
            "exact_polynomials": (
                [list(c) for c in acc.exact_coefficients]
                if acc.exact_coefficients is not None
                else None
            ),
        },
        "independence": {
            "verdict": indep.verdict,
            "gcd_degree": indep.gcd_degree,
            "kernel_dimension": indep.kernel_dimension,
            "core_invertible": indep.core_invertible,
            "consistent": indep.consistent,
            "diagnostic": indep.diagnostic,
        },
    }


def cmd_spectrum(args: argparse.Namespace) -> int:
    mask = _load_mask(args.mask)
    doc = _spectrum_doc(mask, exact=True if args.exact else None)
    _write(dump_json(doc), args.out, "spectrum.json")
    return 0


def cmd_basis(args: argparse.Namespace) -> int:
    mask = _load_mask(args.mask)
    if args.out is None:
        raise UsageError("basis writes several files; --out DIRECTORY is required")
    lo, hi = args.interval
    if lo != int(lo) or hi != int(hi):
        raise UsageError("--interval endpoints must be integers")
    if not (lo <= 0 <= hi and lo < hi):
        raise UsageError("--interval must satisfy A <= 0 <= B with A < B")
    _check_level_arg(args.level)
    spectral = eigen_structure(build_scale_matrices(mask), exact=True if args.exact else None)
    phi = evaluate_phi(mask, args.level)
    basis = build_homogeneous_basis(
        spectral, level=args.level, interval=(int(lo), int(hi)), phi=phi
    )
    rec = reconstruct_phi(basis)
    width = max(2, len(str(spectral.n)))
    _write(dump_csv(phi.grid, phi.values), args.out, "phi.csv")
    rows = []
    for f in basis.functions:
        filename = f"h_{f.row:0{width}d}.csv"
        _write(dump_csv(f.grid, f.values), args.out, filename)
        rows.append(
            {
                "row": f.row,
                "file": filename,
                "eigenvalue": f.eigenvalue,
                "order": f.order,
                "homogeneity_residual": homogeneity_residual(f),
            }
        )
    summary = {
        "mask": _mask_doc(mask),
        "level": basis.level,
        "interval": list(basis.interval),
        "rows": rows,
        "reconstruction": {
            "residual": rec.residual,
            "condition": rec.condition,
        },
    }
    _write(dump_json(summary), args.out, "basis.json")
    return 0


def _check_level_arg(level: int) -> None:
    if not 0 <= level <= MAX_LEVEL:
        raise UsageError(f"--level must be between 0 and {MAX_LEVEL}, got {level}")


def cmd_verify(args: argparse.Namespace) -> int:
    mask = _load_mask(args.mask)
    _check_level_arg(args.level)
    battery = run_battery(
        mask,
        level=args.level,
        tolerance=args.tolerance,
        exact=True if args.exact else None,
    )
    doc = {
        "mask": _mask_doc(mask),
        "level": battery.level,
        "tolerance": battery.tolerance,
        "passed": battery.passed,
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "detail": c.detail,
            }
            for c in battery.checks
        ],
    }
    _write(dump_json(doc), args.out, "verify.json")
    return 0 if battery.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refinable",
        description="Spectral analysis and local bases for refinable functions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument(
            "mask",
            help="mask as a JSON file path, inline JSON, or '-' for stdin",
        )
        p.add_argument("--out", help="write reports into this directory instead of stdout")
        p.add_argument(
            "--exact",
            action="store_true",
            help="force exact rational arithmetic (fails if the spectrum is irrational)",
        )

    p_spec = sub.add_parser("spectrum", help="Jordan, accuracy, and independence report")
    add_common(p_spec)
    p_spec.set_defaults(func=cmd_spectrum)

    p_basis = sub.add_parser("basis", help="sample phi and the homogeneous basis rows")
    add_common(p_basis)
    p_basis.add_argument(
        "--level", type=int, default=DEFAULT_LEVEL, help="dyadic resolution (default 12)"
    )
    p_basis.add_argument(
        "--interval",
        nargs=2,
        type=float,
        default=(-1.0, 1.0),
        metavar=("A", "B"),
        help="integer sampling interval for the basis rows (default -1 1)",
    )
    p_basis.set_defaults(func=cmd_basis)

    p_verify = sub.add_parser("verify", help="run the verification battery")
    add_common(p_verify)
    p_verify.add_argument(
        "--level", type=int, default=DEFAULT_LEVEL, help="dyadic resolution (default 12)"
    )
    p_verify.add_argument(
        "--tolerance", type=float, default=1e-8, help="residual tolerance (default 1e-8)"
    )
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RefinableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
