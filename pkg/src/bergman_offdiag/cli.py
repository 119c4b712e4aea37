"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 cross-method mismatch, 4 precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import oracles
from .errors import BergmanError, CrossValidationMismatch, PrecisionExhausted, ValidationError
from .expansion import B6_MESSAGE, compute_expansion, pn_expansion
from .normal_form import normalize_to_K, verify_K_form
from .serialize import (
    curvature_to_dict,
    dumps,
    expansion_to_dict,
    jet_to_dict,
    load_jet,
    record_to_dict,
)
from .series import format_series
from .tensors import curvature_data_at_point
from .verify import SUITES

log = logging.getLogger("bergman_offdiag")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_MISMATCH, EXIT_PRECISION = range(5)
FIT_TOL = 0.1


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    r_max: int = 4
    order: Optional[int] = None
    method: str = "both"
    t: list = field(default_factory=lambda: ["2", "3"])
    N_grid: list = field(default_factory=oracles.doubling_grid)
    precision_bits: int = oracles.DEFAULT_BITS
    seed: int = 0
    count: int = 20
    fmt: str = "json"
    suite: Optional[str] = None
    model: Optional[str] = None
    experiment: str = "fit"
    m: int = 1
    r_used: int = 2
    ks: list = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])


def parse_grid(text: str) -> list:
    """``"64..4096"`` (doubling) or a comma list ``"64,128,256"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return oracles.doubling_grid(int(lo), int(hi))
        grid = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N grid {text!r}") from None
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise argparse.ArgumentTypeError("N grid must be strictly increasing")
    return grid


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bergman-offdiag", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def io(sp, need_input=True):
        if need_input:
            sp.add_argument("--input", help="jet JSON file")
        sp.add_argument("--output", help="write here instead of stdout")
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")

    sp = sub.add_parser("normalize", help="bring a jet to K-coordinates with a K-frame")
    io(sp)
    sp.add_argument("--order", type=int, help="normalization order (default: jet order)")

    sp = sub.add_parser("curvature", help="curvature data at the base point")
    io(sp)

    sp = sub.add_parser("coeffs", help="expansion coefficients b_1..b_r")
    io(sp)
    sp.add_argument("--max-r", dest="r_max", type=int, default=4)
    sp.add_argument("--method", choices=("closed", "generic", "both"), default="both")

    sp = sub.add_parser("verify", help="run an invariant suite on seeded random jets")
    io(sp, need_input=False)
    sp.add_argument("suite", choices=sorted(SUITES))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--max-r", dest="r_max", type=int, default=None)
    sp.add_argument("--t", nargs="+", default=["2", "3"])
    sp.add_argument("--order", type=int, default=7)

    sp = sub.add_parser("oracle", help="numerical experiments on model kernels")
    io(sp, need_input=False)
    sp.add_argument("model", choices=("fubini-study", "flat"))
    sp.add_argument("--experiment", choices=("fit", "pn", "dklog"), default="fit")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--r", dest="r_used", type=int, default=2)
    sp.add_argument("--k", dest="ks", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    sp.add_argument("--N", dest="N_grid", type=parse_grid, default=oracles.doubling_grid())
    sp.add_argument("--precision-bits", dest="precision_bits", type=int, default=oracles.DEFAULT_BITS)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for name in vars(cfg):
        if name in vars(ns) and getattr(ns, name) is not None:
            setattr(cfg, name, getattr(ns, name))
    if ns.command == "verify":
        cfg.suite = ns.suite
        if ns.r_max is None:
            cfg.r_max = 5 if ns.suite == "properties" else 4
    if ns.command == "oracle":
        cfg.model = ns.model
    return cfg


def _emit(cfg: RunConfig, payload, text: Optional[str] = None) -> None:
    out = text if (cfg.fmt == "text" and text is not None) else dumps(payload)
    if not out.endswith("\n"):
        out += "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _require_input(cfg: RunConfig):
    if not cfg.input:
        raise ValidationError("--input is required")
    try:
        return load_jet(cfg.input)
    except OSError as exc:
        raise ValidationError(f"cannot read {cfg.input}: {exc.strerror}") from None
    except BergmanError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{cfg.input}: malformed jet ({exc})") from None


# -- commands ------------------------------------------------------------------------

def cmd_normalize(cfg: RunConfig) -> int:
    jet = _require_input(cfg)
    n = cfg.order if cfg.order is not None else jet.order
    out, record = normalize_to_K(jet, n)
    ok, _ = verify_K_form(out, n)
    payload = {"jet": jet_to_dict(out), "record": record_to_dict(record), "k_form": ok}
    text = "\n".join([
        f"normalized jet (order {n}): {format_series(out.series)}",
        f"frame change: {format_series(record.frame_change)}",
        *(f"w{k + 1} = {format_series(w)}" for k, w in enumerate(record.coordinate_change)),
    ])
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_curvature(cfg: RunConfig) -> int:
    jet = _require_input(cfg)
    data = curvature_data_at_point(jet)
    payload = curvature_to_dict(data)
    lines = [f"{k} = {v['re']} + {v['im']} i" for k, v in payload["scalars"].items()]
    for name, entries in payload["tensors"].items():
        lines += [f"{key} = {v['re']} + {v['im']} i" for key, v in entries.items()]
    _emit(cfg, payload, "\n".join(lines))
    return EXIT_OK


def cmd_coeffs(cfg: RunConfig) -> int:
    if cfg.r_max >= 6:
        raise ValidationError(B6_MESSAGE)
    jet = _require_input(cfg)
    result = compute_expansion(jet, cfg.r_max, cfg.method)
    lines = [f"b{r} = {b.format()}" for r, b in enumerate(result.bs, start=1)]
    lines += [f"beta{j} = {b.format()}" for j, b in enumerate(result.betas, start=2)]
    if result.single_method:
        lines.append("single-method: " + ", ".join(f"b{r}" for r in result.single_method))
    _emit(cfg, expansion_to_dict(result), "\n".join(lines))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    suite = SUITES[cfg.suite]
    kwargs = {"seed": cfg.seed, "count": cfg.count, "order": cfg.order or 7}
    if cfg.suite != "lemma34":
        kwargs["r_max"] = cfg.r_max
    if cfg.suite == "homogeneity":
        kwargs["ts"] = cfg.t
    report = suite(**kwargs)
    payload = report.to_dict()
    if not report.passed:
        payload["failures"] = report.failures[:1]
    status = "PASS" if report.passed else "FAIL"
    text = f"{cfg.suite}: {status} ({report.checked} checks, {len(report.failures)} failures)"
    if not report.passed:
        text += "\nfirst counterexample:\n" + json.dumps(report.failures[0], indent=2)
    _emit(cfg, payload, text)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _expected_fit_exponent(m: int, r_used: int) -> float:
    """-r'/2 for the first r' > r_used with b_{r'} nonzero on CP^m."""
    bs = oracles.cpm_symbolic_coefficients(m, r_used + 2)
    for r in range(r_used + 1, r_used + 3):
        if not bs[r - 1].is_zero():
            return -r / 2
    return -(r_used + 3) / 2


def cmd_oracle(cfg: RunConfig) -> int:
    kind = "fubini_study" if cfg.model == "fubini-study" else "flat"
    model = oracles.ModelKernel(kind, cfg.m)
    payload: dict = {"model": cfg.model, "m": cfg.m, "experiment": cfg.experiment}

    if cfg.experiment == "dklog":
        if kind != "fubini_study" or cfg.m != 1:
            raise ValidationError("dklog is defined for the Fubini-Study model with m = 1")
        rows = oracles.derivative_growth_demo(cfg.ks, cfg.N_grid, max(cfg.precision_bits // 4, 64))
        ok = all(abs(row["exponent"] - row["expected"]) <= FIT_TOL for row in rows)
        payload["rows"] = [{"k": r["k"], "exponent": r["exponent"], "expected": r["expected"]} for r in rows]
        payload["passed"] = ok
        text = "\n".join(f"k={r['k']}: exponent {r['exponent']:.4f} (expected {r['expected']})" for r in rows)
        _emit(cfg, payload, text)
        return EXIT_OK if ok else EXIT_VERIFY

    if cfg.experiment == "pn":
        data = curvature_data_at_point(model.jet(6))
        fit, bound_ok = oracles.pn_fit(model, pn_expansion(data), cfg.N_grid, precision_bits=cfg.precision_bits)
        ok = bound_ok and (fit.exact or fit.within(-2.0, FIT_TOL))
        payload.update(fit=fit.to_dict(), bound_ok=bound_ok, expected=-2.0, passed=ok)
        _emit(cfg, payload, fit.table() + f"\n0 < P_N <= 1: {bound_ok}")
        return EXIT_OK if ok else EXIT_VERIFY

    if not 1 <= cfg.r_used <= 5:
        raise ValidationError("--r must be between 1 and 5")
    result = compute_expansion(model.jet(cfg.r_used + 2), cfg.r_used, "generic")
    fit = oracles.convergence_fit(model, result.bs, cfg.r_used, cfg.N_grid, precision_bits=cfg.precision_bits)
    if fit.exact:
        expected, ok = None, kind == "flat"
    else:
        expected = _expected_fit_exponent(cfg.m, cfg.r_used)
        ok = fit.within(expected, FIT_TOL)
    payload.update(fit=fit.to_dict(), expected=expected, passed=ok)
    _emit(cfg, payload, fit.table() + (f"\nexpected: {expected}" if expected is not None else ""))
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "normalize": cmd_normalize,
    "curvature": cmd_curvature,
    "coeffs": cmd_coeffs,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    cfg = _config(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except CrossValidationMismatch as exc:
        print(f"error: CrossValidationMismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except PrecisionExhausted as exc:
        print(f"error: PrecisionExhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except BergmanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
