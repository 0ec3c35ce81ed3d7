"""Command-line front end.

Exit codes: 0 success, 1 a correctness check failed, 2 configuration error,
3 unreliable scheme (``teleport`` without ``--expect-unreliable``).
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .channels import (
    BellLabel,
    GeneralScheme,
    bell_basis,
    channel_validity,
    clock_shift_family,
    completeness_deviation,
    dual_bell_basis,
    general_bell_basis,
    gram_deviation,
    iter_labels,
)
from .errors import QuditportError, UnreliableScheme
from .jsonio import MalformedMatrix, basis_csv, dumps, encode_array, load_operator, load_state, outcomes_csv
from .linalg import random_state, random_unitary
from .observables import weyl_commutator
from .protocol import FIDELITY_TOL, SCHEMES, TeleportRun, rng_streams, run_teleport

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNRELIABLE = 0, 1, 2, 3
WEYL_TOL = 1e-10
BASIS_TOL = 1e-10


class ConfigError(Exception):
    pass


def report_tolerance() -> float:
    """Tolerance for the informational checks in reports; ``QT_DEFAULT_TOL`` overrides it."""
    raw = os.environ.get("QT_DEFAULT_TOL")
    if raw is None:
        return FIDELITY_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigError(f"QT_DEFAULT_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise ConfigError("QT_DEFAULT_TOL must be positive")
    return tol


def _dim(args, required: bool = True) -> int | None:
    if args.dim is None:
        if required:
            raise ConfigError("--dim is required")
        return None
    if args.dim < 2:
        raise ConfigError(f"--dim must be at least 2, got {args.dim}")
    return args.dim


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_t(path: str, s: int | None):
    try:
        t = load_operator(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except MalformedMatrix as exc:
        raise ConfigError(str(exc)) from None
    if s is not None and t.shape[0] != s:
        raise ConfigError(f"T matrix has dim {t.shape[0]} but --dim is {s}")
    if t.shape[0] < 2:
        raise ConfigError("T matrix must have dim at least 2")
    return t


def _build_run(args) -> TeleportRun:
    s = _dim(args, required=args.scheme != "general" or args.t_matrix is None)
    if args.scheme == "general":
        t = _load_t(args.t_matrix, s) if args.t_matrix else np.eye(s)
        s = t.shape[0]
        channel = GeneralScheme(s, t)
    else:
        if args.t_matrix:
            raise ConfigError("--t-matrix applies only to the general scheme")
        channel = BellLabel(s, args.channel_phase, args.channel_number)
    input_rng, _ = rng_streams(args.seed)
    if args.input_state:
        try:
            phi = load_state(args.input_state)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.input_state}: {exc.strerror}") from None
        except MalformedMatrix as exc:
            raise ConfigError(str(exc)) from None
    else:
        phi = random_state(s, input_rng)
    return TeleportRun(s, args.scheme, phi, channel, seed=args.seed, measurement=args.measurement)


def cmd_teleport(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    run = _build_run(args)
    tol = report_tolerance()
    try:
        report = run_teleport(run, trials=args.trials, allow_unreliable=args.expect_unreliable)
    except UnreliableScheme as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNRELIABLE
    doc = report.to_dict()
    doc["checks"] = {
        "tolerance": tol,
        "probabilities_uniform": doc["aggregates"]["max_probability_deviation"] <= tol,
        "fidelity_ok": report.min_fidelity is not None and report.min_fidelity >= 1 - tol,
    }
    _emit(outcomes_csv(doc) if args.format == "csv" else dumps(doc), args.out)
    if not report.reliable:
        return EXIT_OK
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_validate_channel(args) -> int:
    t = _load_t(args.t_matrix, _dim(args, required=False))
    doc = channel_validity(t).to_dict()
    if args.format == "csv":
        text = "key,value\n" + "".join(f"{k},{'' if v is None else v}\n" for k, v in doc.items())
    else:
        text = dumps(doc)
    _emit(text, args.out)
    return EXIT_OK


def weyl_residuals(s: int) -> tuple[float, tuple[int, int]]:
    worst, where = 0.0, (0, 0)
    for k in range(s):
        for n in range(s):
            c = weyl_commutator(s, k, n)
            r = abs(c - np.exp(2j * np.pi * k * n / s))
            if r > worst:
                worst, where = r, (k, n)
    return float(worst), where


def cmd_weyl_check(args) -> int:
    s = _dim(args)
    try:
        worst, where = weyl_residuals(s)
    except QuditportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = worst < WEYL_TOL
    doc = {"dim": s, "pairs": s * s, "max_residual": worst, "worst_pair": list(where), "passed": ok}
    text = dumps(doc) if args.format == "json" else f"dim,pairs,max_residual,passed\n{s},{s * s},{worst!r},{ok}\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bell_basis(args) -> int:
    s = _dim(args)
    if args.scheme == "standard":
        states = bell_basis(s)
    elif args.scheme == "dual":
        states = dual_bell_basis(s)
    else:
        states = general_bell_basis(clock_shift_family(s))
    labels = [lab.as_list() for lab in iter_labels(s)]
    gram = gram_deviation(states)
    if args.format == "csv":
        text = basis_csv(labels, states)
    else:
        doc = {
            "scheme": args.scheme,
            "dim": s,
            "gram_deviation": gram,
            "completeness_deviation": completeness_deviation(states),
            "states": [{"label": lab, **encode_array(v)} for lab, v in zip(labels, states)],
        }
        text = dumps(doc)
    _emit(text, args.out)
    return EXIT_OK if gram < BASIS_TOL else EXIT_FAIL


def _sweep_one(s: int, scheme: str, inputs: int, seed: int) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence([seed, s]))
    min_f, max_dev = 1.0, 0.0
    for _ in range(inputs):
        if scheme == "general":
            channel = GeneralScheme(s, random_unitary(s, rng))
        else:
            channel = BellLabel(s, int(rng.integers(s)), int(rng.integers(s)))
        report = run_teleport(TeleportRun(s, scheme, random_state(s, rng), channel))
        min_f = min(min_f, report.min_fidelity)
        max_dev = max(max_dev, report.max_probability_deviation)
    ok = min_f >= 1 - FIDELITY_TOL and max_dev <= FIDELITY_TOL
    return {"dim": s, "inputs": inputs, "min_fidelity": min_f, "max_probability_deviation": max_dev, "passed": ok}


def cmd_sweep(args) -> int:
    if any(s < 2 for s in args.dims):
        raise ConfigError("every dimension in --dims must be at least 2")
    if args.inputs < 1:
        raise ConfigError("--inputs must be at least 1")
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda s: _sweep_one(s, args.scheme, args.inputs, args.seed), args.dims))
    ok = all(r["passed"] for r in rows)
    if args.format == "csv":
        keys = list(rows[0])
        text = ",".join(keys) + "\n" + "".join(",".join(repr(r[k]) for k in keys) + "\n" for r in rows)
    else:
        text = dumps({"scheme": args.scheme, "seed": args.seed, "results": rows, "passed": ok})
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quditport", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--dim", "-d", type=int, help="levels per system (s >= 2)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", "-o", help="output path (default: stdout)")

    p = sub.add_parser("teleport", help="run one teleportation experiment")
    common(p)
    p.add_argument("--scheme", choices=SCHEMES, default="standard")
    p.add_argument("--measurement", choices=SCHEMES, help="measurement basis (default: match the scheme)")
    p.add_argument("--channel-phase", type=int, default=0)
    p.add_argument("--channel-number", type=int, default=0)
    p.add_argument("--t-matrix", help="JSON file with the channel deformation T (general scheme)")
    p.add_argument("--input-state", help="JSON file with the state to teleport (default: random from seed)")
    p.add_argument("--seed", type=int, default=0)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate all outcomes (default)")
    mode.add_argument("--trials", type=int, help="sample this many measurement outcomes")
    p.add_argument("--expect-unreliable", action="store_true",
                   help="run a non-unitary channel with polar-factor recovery instead of failing")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("validate-channel", help="audit a channel deformation T")
    common(p)
    p.add_argument("--t-matrix", required=True)
    p.set_defaults(func=cmd_validate_channel)

    p = sub.add_parser("bell-basis", help="dump a Bell measurement basis")
    common(p)
    p.add_argument("--scheme", choices=SCHEMES, default="standard")
    p.set_defaults(func=cmd_bell_basis)

    p = sub.add_parser("weyl-check", help="verify the Weyl relation over all (k, n)")
    common(p)
    p.set_defaults(func=cmd_weyl_check)

    p = sub.add_parser("sweep", help="exhaustive teleportation over random inputs for several dims")
    common(p)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 3, 5, 8])
    p.add_argument("--scheme", choices=SCHEMES, default="standard")
    p.add_argument("--inputs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnreliableScheme as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNRELIABLE
    except QuditportError as exc:
        # bad labels, T normalization, dimension mismatches: all configuration problems here
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
