"""Command-line front end.

Exit codes: 0 success (Member, Precompact), 1 negative verdict (NotMember,
NotPrecompact, NotEquinormed), 2 error or Inconclusive.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field

from . import specfile
from .compactness import (
    DEFAULT_LADDER,
    Counterexample,
    ExplicitFinite,
    Verdict,
    certify,
    difference_family,
    gamma_inverse_at,
    gamma_of,
    lambda_of,
)
from .core import DEFAULT_BUDGET
from .errors import BudgetExhausted, LorentzError, NotSummable, NotUniform, ToleranceUnreachable, UnknownTerm
from .norms import (
    DEFAULT_TOL,
    Inconclusive,
    Member,
    NotMember,
    classify_membership,
    decompose,
    lorentz_norm_bounds,
    seminorm_pth,
)
from .selftest import run_selftest

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


@dataclass
class RunReport:
    command: str
    argv: list
    inputs: dict
    seed: int | None = None
    results: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    @property
    def inputs_digest(self) -> str:
        blob = json.dumps({"command": self.command, "inputs": self.inputs}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "argv": list(self.argv),
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
        }
        out.update(self.results)
        out["runtime_ms"] = self.runtime_ms
        return out


def _json_number(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _load(parser, path):
    node = specfile.load_json(path)
    try:
        return parser(node, "$")
    except specfile.SpecError as exc:
        raise specfile.SpecError(f"{path}: {exc.path}", str(exc).partition(": ")[2]) from None


def _weight(args):
    if args.w_file:
        return _load(specfile.parse_weight, args.w_file)
    return specfile.parse_weight(args.w, "--w")


def _emit(args, obj) -> None:
    if args.emit_spec:
        with open(args.emit_spec, "w") as fh:
            fh.write(specfile.dumps(obj) + "\n")


def _base_inputs(args, w) -> dict:
    return {"p": args.p, "w": specfile.to_spec(w)}


# ---------------------------------------------------------------------------
# Subcommands: each returns (exit code, results dict, inputs dict, human lines)
# ---------------------------------------------------------------------------


def cmd_norm(args):
    a, w = _load(specfile.parse_sequence, args.seq), _weight(args)
    _emit(args, a)
    inputs = {**_base_inputs(args, w), "seq": specfile.to_spec(a), "tol": args.tol, "budget": args.budget}
    try:
        iv = lorentz_norm_bounds(a, args.p, w, args.tol, args.budget)
    except NotSummable as exc:
        return EXIT_NEGATIVE, {"verdict": "NotMember", "reason": str(exc)}, inputs, [f"NotMember: {exc}"]
    ok = iv.width <= args.tol
    results = {"verdict": "Member" if ok else "Inconclusive", "norm_pth": iv.to_dict(), "width": iv.width}
    lines = [f"||a||^p in [{iv.lo!r}, {iv.hi!r}]  (width {iv.width:.3g})"]
    if not ok:
        lines.append(f"requested tolerance {args.tol:g} not reached")
    return (EXIT_OK if ok else EXIT_ERROR), results, inputs, lines


def cmd_member(args):
    a, w = _load(specfile.parse_sequence, args.seq), _weight(args)
    _emit(args, a)
    inputs = {**_base_inputs(args, w), "seq": specfile.to_spec(a), "tol": args.tol, "budget": args.budget}
    m = classify_membership(a, args.p, w, args.budget, args.tol)
    if isinstance(m, Member):
        return EXIT_OK, {"verdict": "Member", "norm_pth": m.norm_pth.to_dict()}, inputs, [
            f"Member, ||a||^p in [{m.norm_pth.lo!r}, {m.norm_pth.hi!r}]"]
    if isinstance(m, NotMember):
        return EXIT_NEGATIVE, {"verdict": "NotMember", "reason": m.reason}, inputs, [f"NotMember: {m.reason}"]
    assert isinstance(m, Inconclusive)
    return EXIT_ERROR, {"verdict": "Inconclusive", "partial_sum": m.partial_sum, "horizon": m.horizon}, inputs, [
        f"Inconclusive: partial sum {m.partial_sum!r} up to index {m.horizon}"]


def cmd_seminorm(args):
    a, w = _load(specfile.parse_sequence, args.seq), _weight(args)
    _emit(args, a)
    inputs = {**_base_inputs(args, w), "seq": specfile.to_spec(a), "i": args.i}
    s = seminorm_pth(a, args.p, w, args.i)
    return EXIT_OK, {"seminorm_pth": s}, inputs, [f"S_{args.i}(a) = {s!r}"]


def cmd_decompose(args):
    a, w = _load(specfile.parse_sequence, args.seq), _weight(args)
    _emit(args, a)
    inputs = {**_base_inputs(args, w), "seq": specfile.to_spec(a), "i": args.i, "tol": args.tol,
              "budget": args.budget}
    rec = decompose(a, args.p, w, args.i, args.tol, args.budget)
    d = rec.to_dict()
    lines = [f"i = {args.i}"]
    for key, val in d.items():
        if isinstance(val, dict):
            lines.append(f"  {key:8s} [{val['lo']!r}, {val['hi']!r}]")
    return EXIT_OK, {"decomposition": d}, inputs, lines


def cmd_certify(args):
    A, w = _load(specfile.parse_family, args.family), _weight(args)
    _emit(args, A)
    ladder = tuple(args.eps) if args.eps else DEFAULT_LADDER
    inputs = {**_base_inputs(args, w), "family": specfile.to_spec(A), "eps": list(ladder), "tol": args.tol,
              "budget": args.budget}
    cert = certify(A, args.p, w, ladder, args.tol, args.budget)
    d = cert.to_dict()
    if d["witness"] and "gap" in d["witness"]:
        d["witness"]["gap"] = _json_number(d["witness"]["gap"])
    lines = [f"verdict: {cert.verdict.value} (method {cert.method.value}, criteria agree: {cert.cross_check_agreement})"]
    if cert.bound_M is not None:
        lines.append(f"bound M in [{cert.bound_M.lo!r}, {cert.bound_M.hi!r}]")
    for eps, n in cert.equinorm_table:
        lines.append(f"  eps = {eps:g}: N = {n}")
    if isinstance(cert.witness, Counterexample):
        lines.append(f"witness: {cert.witness.member}, gap {cert.witness.value:g} >= eps {cert.witness.eps:g}")
    elif cert.witness is not None:
        lines.append(f"witness: {cert.witness.reason}")
    lines += [f"note: {n}" for n in cert.notes]
    code = {Verdict.PRECOMPACT: EXIT_OK, Verdict.NOT_PRECOMPACT: EXIT_NEGATIVE}.get(cert.verdict, EXIT_ERROR)
    return code, d, inputs, lines


def cmd_lambda(args):
    w = _weight(args)
    inputs = {**_base_inputs(args, w), "M": args.M, "d": args.d}
    n = lambda_of(args.M, args.d, args.p, w)
    return EXIT_OK, {"lambda": n}, inputs, [f"lambda({args.d:g}) = {n} for M = {args.M:g}"]


def cmd_gamma(args):
    A = _load(specfile.parse_family, args.family)
    _emit(args, A)
    inputs = {"family": specfile.to_spec(A), "d": args.d, "n": args.n}
    results, lines = {}, []
    if args.d is not None:
        g = gamma_of(A, args.d)
        results["gamma"] = _json_number(g) if isinstance(g, float) else g
        lines.append(f"gamma({args.d:g}) = {'Infinite' if g == math.inf else g}")
    if args.n is not None:
        try:
            v = gamma_inverse_at(A, args.n)
        except NotUniform as exc:
            results["gamma_inverse"] = None
            results["reason"] = str(exc)
            lines.append(f"gamma^-1({args.n}) undefined: {exc}")
            return EXIT_NEGATIVE, results, inputs, lines
        results["gamma_inverse"] = v
        lines.append(f"gamma^-1({args.n}) = {v!r}")
    if not results:
        raise argparse.ArgumentTypeError("gamma needs --d and/or --n")
    return EXIT_OK, results, inputs, lines


def cmd_diff_family(args):
    A = _load(specfile.parse_family, args.family)
    if not isinstance(A, ExplicitFinite):
        raise specfile.SpecError(f"{args.family}: $.kind", "diff-family needs an explicit family")
    D = difference_family(A)
    _emit(args, D)
    inputs = {"family": specfile.to_spec(A)}
    lines = [f"{len(D.members)} differences"] + [f"  {list(m.entries)}" for m in D.members]
    return EXIT_OK, {"family": specfile.to_spec(D)}, inputs, lines


def cmd_selftest(args):
    seed = 0 if args.seed is None else args.seed
    rep = run_selftest(seed, args.trials)
    d = rep.to_dict()
    lines = [f"{name}: {c['passed']} passed, {c['failed']} failed" for name, c in d["checks"].items()]
    lines.append("all checks passed" if rep.ok else "FAILURES")
    for name, c in d["checks"].items():
        if c["first_failure"]:
            lines.append(f"  {name}: {c['first_failure']}")
    return (EXIT_OK if rep.ok else EXIT_NEGATIVE), d, {"trials": args.trials}, lines


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sp, *, seq=False, family=False, weight=True, tol=True):
    if seq:
        sp.add_argument("--seq", required=True, help="sequence spec file (JSON)")
    if family:
        sp.add_argument("--family", required=True, help="family spec file (JSON)")
    if weight:
        sp.add_argument("--p", type=float, required=True)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--w", default="harmonic", help="weight shorthand: harmonic or invsqrt")
        g.add_argument("--w-file", help="weight spec file (JSON)")
    if tol:
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--budget", type=lambda s: int(float(s)), default=DEFAULT_BUDGET,
                        help="horizon cap in terms")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="write the machine-readable report here")
    sp.add_argument("--emit-spec", help="write the parsed input spec back out (canonical form)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentzseq", description="Lorentz sequence space computations")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("norm", help="certified enclosure of ||a||^p")
    _add_common(sp, seq=True)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("member", help="decide membership in L_(p,w)")
    _add_common(sp, seq=True)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("seminorm", help="S_i(a)")
    _add_common(sp, seq=True, tol=False)
    sp.add_argument("--i", type=int, required=True)
    sp.set_defaults(func=cmd_seminorm)

    sp = sub.add_parser("decompose", help="head/tail quantities at a split index")
    _add_common(sp, seq=True)
    sp.add_argument("--i", type=int, required=True)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("certify", help="precompactness certificate for a family")
    _add_common(sp, family=True)
    sp.add_argument("--eps", type=float, action="append", help="repeatable; default 0.1, 0.01, 0.001")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("lambda", help="bound on entries with |a_i| >= d")
    _add_common(sp, tol=False)
    sp.add_argument("--M", type=float, required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("gamma", help="uniform vanishing index and majorant")
    _add_common(sp, family=True, weight=False, tol=False)
    sp.add_argument("--d", type=float)
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("diff-family", help="pairwise differences of an explicit family")
    _add_common(sp, family=True, weight=False, tol=False)
    sp.set_defaults(func=cmd_diff_family)

    sp = sub.add_parser("selftest", help="randomized oracle and invariant checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--out")
    sp.add_argument("--emit-spec", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_selftest)
    return parser


def run(argv: list | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK

    start = time.perf_counter()
    try:
        code, results, inputs, lines = args.func(args)
    except specfile.SpecError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    except (ToleranceUnreachable, BudgetExhausted, UnknownTerm) as exc:
        print(f"inconclusive: {exc}", file=stderr)
        return EXIT_ERROR
    except NotSummable as exc:
        print(f"NotMember: {exc}", file=stderr)
        return EXIT_NEGATIVE
    except (LorentzError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    elapsed = (time.perf_counter() - start) * 1e3

    report = RunReport(args.command, argv, inputs, args.seed, results, round(elapsed, 3))
    for line in lines:
        print(line, file=stdout)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
