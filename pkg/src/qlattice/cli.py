"""Command-line entry point: ``qlattice <command> ...``.

Exit status is 0 on success, 1 on usage errors, 2 when an input violates a
mathematical precondition and 3 when an input cannot be parsed.  The
``QLATTICE_CONFIG`` environment variable may name a JSON file with defaults.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence, TextIO

from .arith import DomainError, ParseError, format_rational, parse_rational
from .hilbert import distance_sq
from .lattice import certificate_valid, encode, semidecide_not_member
from .serialize import (
    certificate_to_json,
    dumps,
    loads,
    operator_from_json,
    plfunction_from_json,
    state_from_json,
    subspace_from_json,
    vector_from_json,
)
from .spectral import integral, parse_closed_set, valuation_semidecide, valuation_upper
from .states import PureState, mixed_eval, pure_eval
from .topology import (
    OperatorSequence,
    demo_biorth_discontinuity,
    demo_join_discontinuity,
    demo_schroeder,
    sot_check,
)

DOVETAIL_ORDERS = ("level",)


@dataclass(frozen=True)
class Config:
    default_fuel: int = 16
    default_precision: Fraction = Fraction(1, 1024)
    output_format: str = "text"
    dovetail_seed_order: str = "level"

    def __post_init__(self):
        if self.default_fuel < 1:
            raise DomainError("default_fuel must be >= 1")
        if self.default_precision <= 0:
            raise DomainError("default_precision must be positive")
        if self.output_format not in ("json", "text"):
            raise DomainError("output_format must be json or text")
        if self.dovetail_seed_order not in DOVETAIL_ORDERS:
            raise DomainError(f"dovetail_seed_order must be one of {DOVETAIL_ORDERS}")

    @classmethod
    def from_mapping(cls, data: Any) -> "Config":
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object")
        unknown = set(data) - {"default_fuel", "default_precision", "output_format", "dovetail_seed_order"}
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        if "default_fuel" in data:
            if not isinstance(data["default_fuel"], int):
                raise ParseError("default_fuel must be an integer")
            kwargs["default_fuel"] = data["default_fuel"]
        if "default_precision" in data:
            kwargs["default_precision"] = parse_rational(str(data["default_precision"]))
        for key in ("output_format", "dovetail_seed_order"):
            if key in data:
                kwargs[key] = str(data[key])
        return cls(**kwargs)

    @classmethod
    def load(cls, environ=None) -> "Config":
        environ = os.environ if environ is None else environ
        path = environ.get("QLATTICE_CONFIG")
        if not path:
            return cls()
        return cls.from_mapping(_read_json(path))


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlattice", description="Exact computations on the lattice of closed subspaces.")
    p.add_argument("--output", choices=("json", "text"), help="output format (default from config)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("dist", help="squared distance from a vector to a subspace")
    s.add_argument("--vec", required=True)
    s.add_argument("--subspace", required=True)

    s = sub.add_parser("encode", help="stream certificates of a subspace as JSON lines")
    s.add_argument("--subspace", required=True)
    s.add_argument("--max-certs", type=int, required=True)
    s.add_argument("--max-slots", type=int, default=100000)

    s = sub.add_parser("notmember", help="semidecide that a vector is outside a subspace")
    s.add_argument("--subspace", required=True)
    s.add_argument("--vec", required=True)
    s.add_argument("--fuel", type=int)

    s = sub.add_parser("state", help="evaluate a state on a subspace")
    s.add_argument("--state", required=True)
    s.add_argument("--subspace", required=True)
    s.add_argument("--prefix", type=int)

    s = sub.add_parser("specval", help="spectral valuation of a closed set")
    s.add_argument("--op", required=True)
    s.add_argument("--vec", required=True)
    s.add_argument("--set", dest="closed_set")
    s.add_argument("--q", type=_rational_arg)
    s.add_argument("--fuel", type=int)
    s.add_argument("--upper", action="store_true", help="print the upper-bound stream instead")
    s.add_argument("--fn", help="integrate this piecewise-linear function instead")
    s.add_argument("--precision", type=_rational_arg)

    s = sub.add_parser("sotcheck", help="strong-operator convergence on probes")
    s.add_argument("--family", choices=("left-shift", "right-shift", "truncation"), required=True)
    s.add_argument("--probe", action="append", required=True, help="vector file; repeatable")
    s.add_argument("--eps", type=_rational_arg, default=Fraction(1, 1000))
    s.add_argument("--n", type=int, default=32)

    s = sub.add_parser("demo", help="reproduce a discontinuity counterexample")
    s.add_argument("which", choices=("schroeder", "join", "biorth"))
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--K", type=int)
    s.add_argument("--weights", default="geometric:1/2")
    return p


def _fuel(args, config: Config) -> int:
    fuel = args.fuel if args.fuel is not None else config.default_fuel
    if fuel < 1:
        raise DomainError("fuel must be >= 1")
    return fuel


def _emit(out: TextIO, fmt: str, value: Any, text: str) -> None:
    out.write((dumps(value) if fmt == "json" else text) + "\n")


def _cmd_dist(args, config, fmt, out):
    x = vector_from_json(_read_json(args.vec))
    L = subspace_from_json(_read_json(args.subspace))
    if not L.is_finite:
        raise DomainError("dist needs a finite presentation (no tail_bound)")
    d2 = distance_sq(x, L.family())
    _emit(out, fmt, {"distance2": d2}, format_rational(d2))


def _cmd_encode(args, config, fmt, out):
    L = subspace_from_json(_read_json(args.subspace))
    if args.max_certs < 0:
        raise DomainError("--max-certs must be >= 0")
    emitted = 0
    for slot, cert in enumerate(encode(L).stream()):
        if emitted >= args.max_certs or slot >= args.max_slots:
            break
        if cert is None:
            continue
        if L.is_finite and not certificate_valid(L, cert.c, cert.r):
            raise AssertionError("emitted an invalid certificate")
        emitted += 1
        # certificates are JSON lines in either format
        out.write(dumps(certificate_to_json(cert)) + "\n")


def _cmd_notmember(args, config, fmt, out):
    L = subspace_from_json(_read_json(args.subspace))
    x = vector_from_json(_read_json(args.vec))
    fuel = _fuel(args, config)
    verdict = semidecide_not_member(encode(L), x)(fuel)
    _emit(out, fmt, {"verdict": verdict.value, "fuel": fuel}, verdict.value)


def _cmd_state(args, config, fmt, out):
    data = _read_json(args.state)
    L = subspace_from_json(_read_json(args.subspace))
    if not L.is_finite:
        raise DomainError("state evaluation needs a finite presentation (no tail_bound)")
    if isinstance(data, dict) and "vector" in data:
        value = pure_eval(PureState(vector_from_json(data["vector"])), L)
        _emit(out, fmt, {"value": value}, format_rational(value))
        return
    S = state_from_json(data)
    n = args.prefix if args.prefix is not None else S.length
    iv = mixed_eval(S, L, n)
    if iv.lo == iv.hi:
        _emit(out, fmt, {"value": iv.lo}, format_rational(iv.lo))
    else:
        _emit(out, fmt, {"interval": iv}, f"[{format_rational(iv.lo)}, {format_rational(iv.hi)}]")


def _cmd_specval(args, config, fmt, out):
    A = operator_from_json(_read_json(args.op))
    x = vector_from_json(_read_json(args.vec))
    if args.fn:
        f = plfunction_from_json(_read_json(args.fn))
        prec = args.precision if args.precision is not None else config.default_precision
        iv = integral(A, x, f, prec)
        _emit(out, fmt, {"integral": iv}, f"[{format_rational(iv.lo)}, {format_rational(iv.hi)}]")
        return
    if args.closed_set is None:
        raise ParseError("--set is required unless --fn is given")
    C = parse_closed_set(args.closed_set)
    fuel = _fuel(args, config)
    if args.upper:
        bounds = valuation_upper(A, x, C, fuel).prefix(fuel + 1)
        _emit(out, fmt, {"bounds": bounds}, "\n".join(format_rational(b) for b in bounds))
        return
    if args.q is None:
        raise ParseError("--q is required unless --upper or --fn is given")
    verdict = valuation_semidecide(A, x, C, args.q)(fuel)
    _emit(out, fmt, {"verdict": verdict.value, "fuel": fuel}, verdict.value)


_FAMILIES = {
    "left-shift": OperatorSequence.left_shift_powers,
    "right-shift": OperatorSequence.right_shift_powers,
    "truncation": OperatorSequence.truncations,
}


def _cmd_sotcheck(args, config, fmt, out):
    probes = [vector_from_json(_read_json(p)) for p in args.probe]
    if args.n < 0:
        raise DomainError("--n must be >= 0")
    report = sot_check(_FAMILIES[args.family](), None, probes, args.eps, args.n)
    text = "\n".join(
        f"probe {i}: {'converged at n0=' + str(p.n0) if p.converged else 'not converged'}"
        for i, p in enumerate(report.per_probe)
    )
    _emit(out, fmt, report.as_dict(), f"{text}\nverdict: {report.verdict}")


def _cmd_demo(args, config, fmt, out):
    if args.which == "schroeder":
        report = demo_schroeder(args.max_n)
        for n, v in report.values:
            _emit(out, fmt, {"n": n, "value": v}, f"n={n} s(A_n)(e_0)={format_rational(v)}")
    elif args.which == "join":
        report = demo_join_discontinuity(args.max_n, args.K, args.weights)
        for n, d in report.meets:
            _emit(out, fmt, {"n": n, "meet_dim": d}, f"n={n} dim meet(P, Q_n)={d}")
    else:
        report = demo_biorth_discontinuity(args.max_n)
        for n, ok in report.lines:
            _emit(out, fmt, {"n": n, "is_line": ok}, f"n={n} C_n^perp-perp = span(x): {ok}")


_COMMANDS = {
    "dist": _cmd_dist,
    "encode": _cmd_encode,
    "notmember": _cmd_notmember,
    "state": _cmd_state,
    "specval": _cmd_specval,
    "sotcheck": _cmd_sotcheck,
    "demo": _cmd_demo,
}


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(err)
        return 1
    try:
        config = Config.load()
        fmt = args.output or config.output_format
        _COMMANDS[args.command](args, config, fmt, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return 3
    except DomainError as exc:
        err.write(f"domain error: {exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
