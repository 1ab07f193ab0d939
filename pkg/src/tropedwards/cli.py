"""Command line front end: ``tropedwards {family,classify,cycle,verify,bt,render}``.

JSON goes to stdout (or ``--out``); every number in it is an exact
``[num, den]`` pair.  Exit codes: 0 success, 2 precision, 3 refused input,
4 parse error, 1 internal disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import warnings
from fractions import Fraction

from . import bttree, edwards, thetaparam, tropcurve
from .errors import DisagreementBug, ParseError, PrecisionError, RefusedInput, TropEdwardsError, UndefinedDelta
from .expr import parse_series
from .serialize import dumps, rat, to_jsonable
from .series import DEFAULT_HORIZON, PuiseuxSeries, theta_shift_residuals

EXIT_OK, EXIT_BUG, EXIT_PRECISION, EXIT_REFUSED, EXIT_PARSE = 0, 1, 2, 3, 4


class _ArgParser(argparse.ArgumentParser):
    """Exit with the parse-error code, and let ``-1+q`` through as a positional."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-[\d(q]")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _positive_fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _default_horizon() -> Fraction:
    env = os.environ.get("TROPEDWARDS_HORIZON")
    return _positive_fraction(env) if env else DEFAULT_HORIZON


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=_positive_fraction, default=None, help="q-adic truncation horizon")
    common.add_argument("--ram", type=_positive_int, default=None, help="ramification index of the inputs")
    common.add_argument("--step", type=_positive_fraction, default=thetaparam.DEFAULT_STEP, help="grid step 1/N")
    common.add_argument("--fit-order", type=_positive_int, default=8, help="q-coefficients to fit")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "svg"), default="json")

    p = _ArgParser(prog="tropedwards", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    for name, helptext in (
        ("family", "coefficients, valuations and delta"),
        ("classify", "tropical curve, cycle and smoothness"),
        ("cycle", "sampled theta parametrization of the cycle"),
        ("bt", "pole fit and Bruhat-Tits quotient"),
    ):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("r")
        c.add_argument("s")
    sub.add_parser("verify", parents=[common], help="identity suite")
    rp = sub.add_parser("render", parents=[common], help="draw a JSON report as SVG")
    rp.add_argument("input", nargs="?", default=None, help="JSON file produced by another command")
    rp.add_argument("--delta-sweep", action="store_true", help="panel of cycles for a range of delta")
    return p


# -- commands ---------------------------------------------------------------


def _params(args) -> edwards.FamilyParams:
    h = args.horizon
    r = parse_series(args.r, h, args.ram)
    s = parse_series(args.s, h, args.ram)
    return edwards.FamilyParams(r, s)


def cmd_family(args) -> tuple[dict, int]:
    params = _params(args)
    coeffs = edwards.family_coefficients(params)
    u = edwards.trop_valuations(coeffs)
    out = {
        "r": params.r,
        "s": params.s,
        "horizon": params.horizon,
        "a_squared": coeffs.a_squared,
        "coefficients": coeffs.as_dict(),
        "u": u.as_dict(),
    }
    try:
        out["delta"] = params.delta()
        code = EXIT_OK
    except UndefinedDelta as exc:
        out["delta"] = None
        out["error"] = {"type": "UndefinedDelta", "message": str(exc)}
        code = EXIT_REFUSED
    return to_jsonable(out), code


def cmd_classify(args) -> tuple[dict, int]:
    rep = tropcurve.classify(_params(args))
    return rep.to_json(), EXIT_OK


def _cycle(params, step) -> dict:
    cp = thetaparam.CycleParam.from_params(params)
    curve = tropcurve.tropical_curve(
        tropcurve.TropPolynomial.from_u(edwards.trop_valuations(edwards.family_coefficients(params)))
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sample = thetaparam.sample_cycle(cp, step, curve=curve)
    out = sample.to_json()
    out["warnings"] = [str(w.message) for w in caught]
    return out


def cmd_cycle(args) -> tuple[dict, int]:
    out = _cycle(_params(args), args.step)
    for w in out["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return out, EXIT_OK


def verify_suite(horizon) -> dict:
    horizon = Fraction(horizon)
    checks = []
    j = edwards.j_invariant_check(horizon)
    jj = j.pop("series")
    j["coefficients"] = {str(e): rat(jj.coefficient(e)) for e in (-8, 0, 8)}
    checks.append(to_jsonable(j))

    def zero_check(name, series):
        v = series.valuation() if isinstance(series, PuiseuxSeries) else series.q_valuation()
        return {
            "identity": name,
            "status": "fail" if v.known else "pass",
            "horizon": rat(series.horizon),
            **({"first_mismatch_exponent": rat(v.value)} if v.known else {}),
        }

    checks.append(zero_check("d0 = 2*epsb^2*eps^2 - a^2*(epsb^4 + eps^4)", edwards.constant_term_d0(horizon)))
    for name, res in theta_shift_residuals(horizon).items():
        checks.append(zero_check(name, res))
    t = edwards.generic_unit(horizon).shift(Fraction(1, 2))
    for name, res in edwards.tate_periodicity_residuals(t, horizon).items():
        checks.append(zero_check(f"tate: {name}", res))
    x, y = edwards.edwards_xy(t, horizon)
    checks.append(zero_check("x^2 + y^2 - a^2(1 + x^2 y^2)", edwards.curve_residual(x, y, edwards.edwards_a_squared(horizon))))
    ok = all(c["status"] == "pass" for c in checks)
    return {"horizon": rat(horizon), "all_pass": ok, "checks": checks}


def cmd_verify(args) -> tuple[dict, int]:
    out = verify_suite(args.horizon)
    return out, EXIT_OK if out["all_pass"] else EXIT_BUG


def cmd_bt(args) -> tuple[dict, int]:
    params = _params(args)
    rep = tropcurve.classify(params)
    bt = bttree.bt_pipeline(params, rep.curve, fit_order=args.fit_order)
    out = bt.to_json()
    out["classification"] = {"polygon_kind": rep.polygon_kind, "lattice_length": rat(rep.lattice_length)}
    return out, EXIT_OK


def sweep_instances(horizon=DEFAULT_HORIZON, deltas=None) -> list[tuple[Fraction, edwards.FamilyParams]]:
    """``(r, s) = (1 + q^d, -1 + q^d)`` for ``d >= 0`` and ``(1 + q^|d|, 1 - q^|d|)`` otherwise."""
    from .plotting import SWEEP_DELTAS

    out = []
    for d in deltas or SWEEP_DELTAS:
        d = Fraction(d)
        m = PuiseuxSeries.monomial(1, abs(d), horizon)
        one = PuiseuxSeries.constant(1, horizon)
        r, s = (one + m, -one + m) if d >= 0 else (one + m, one - m)
        out.append((d, edwards.FamilyParams(r, s)))
    return out


def cmd_render(args) -> tuple[str, int]:
    from .plotting import render

    if args.delta_sweep:
        panels = [_cycle(p, args.step) for _, p in sweep_instances(args.horizon)]
        return render({"sweep": panels}), EXIT_OK
    if args.input is None:
        raise ParseError("render needs an input file or --delta-sweep")
    with open(args.input, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", args.input, exc.pos)
    try:
        return render(data), EXIT_OK
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"schema mismatch: {exc}", args.input, 0)


COMMANDS = {
    "family": cmd_family,
    "classify": cmd_classify,
    "cycle": cmd_cycle,
    "verify": cmd_verify,
    "bt": cmd_bt,
    "render": cmd_render,
}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.horizon is None:
        try:
            args.horizon = _default_horizon()
        except argparse.ArgumentTypeError as exc:
            print(f"error: TROPEDWARDS_HORIZON: {exc}", file=sys.stderr)
            return EXIT_PARSE
    if args.format == "svg" and args.command in ("family", "verify"):
        print(f"error: {args.command} has no SVG form", file=sys.stderr)
        return EXIT_PARSE
    try:
        result, code = COMMANDS[args.command](args)
        if args.command != "render" and args.format == "svg":
            from .plotting import render

            result = render(result)
        _emit(result if isinstance(result, str) else dumps(result), args.out)
        return code
    except ParseError as exc:
        _report(exc, "parse")
        return EXIT_PARSE
    except PrecisionError as exc:
        _report(exc, "precision")
        return EXIT_PRECISION
    except RefusedInput as exc:
        _report(exc, "refused")
        return EXIT_REFUSED
    except (DisagreementBug, TropEdwardsError) as exc:
        _report(exc, "internal")
        return EXIT_BUG


def _report(exc: Exception, family: str) -> None:
    print(json.dumps({"error": type(exc).__name__, "family": family, "message": str(exc)}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
