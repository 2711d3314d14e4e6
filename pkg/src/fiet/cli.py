"""Command-line front end.

Every command reads Fiet or Certificate JSON (a path, or ``-`` for stdin)
and writes canonical JSON on stdout: sorted keys, no whitespace.  With
``--jsonl`` each input holds one JSON object per line and one output line
is written per input line.

Exit codes: 0 success, 1 verification failure, 2 parse or schema error,
3 precision exhausted.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Callable, TextIO

from . import core
from .certificate import Certificate, Kind
from .core import Fiet, FietError, metric_d
from .decompose import (commutator_decomposition, corner_support_decomposition, involution_decomposition,
                        normalize_fixed_set, shrink_support, strongly_reversible_decomposition,
                        to_restricted_rotations)
from .exactnum import Basis, ExactNumError, PrecisionExhausted, format_mpq
from .generate import random_fiet
from .invariants import is_periodic, saf
from .verify import verify

EXIT_OK, EXIT_FAILED, EXIT_SCHEMA, EXIT_PRECISION = 0, 1, 2, 3

DEFAULT_SPAN_BASIS = {"generators": [{"sqrt": "2"}]}


class SchemaError(ValueError):
    pass


class Failed(Exception):
    """A check ran and failed; the payload is still written to stdout."""

    def __init__(self, payload: dict, message: str):
        super().__init__(message)
        self.payload = payload


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Session:
    """Shared state of one invocation: the basis, budgets and seed."""

    basis_json: dict | None = None
    budget_bits: int | None = None
    piece_cap: int | None = None
    seed: int | None = None
    stdin: TextIO = field(default_factory=lambda: sys.stdin)
    line: int | None = None          # batch mode: the line being processed
    _basis: Basis | None = None
    _stdin_text: str | None = None
    _parsed: dict = field(default_factory=dict)

    def basis(self, declared: dict | None = None) -> Basis:
        """The session basis; a basis embedded in an input must agree with it."""
        if self._basis is None and self.basis_json is not None:
            self._basis = self._make(self.basis_json)
        if declared is not None:
            b = self._make(declared)
            if self._basis is None:
                self._basis = b
            elif b != self._basis:
                raise SchemaError("all inputs of one session must share the basis")
            return self._basis
        if self._basis is None:
            self._basis = self._make(self.basis_json or {})
        return self._basis

    def _make(self, data: dict) -> Basis:
        data = dict(data)
        if self.budget_bits is not None:
            data["budget_bits"] = self.budget_bits
        return Basis.from_json(data)

    def read_text(self, path: str) -> str:
        if path == "-":
            if self._stdin_text is None:
                self._stdin_text = self.stdin.read()
            return self._stdin_text
        with open(path, encoding="utf-8") as fh:
            return fh.read()

    def all_documents(self, path: str, jsonl: bool) -> list:
        key = (path, jsonl)
        if key not in self._parsed:
            text = self.read_text(path)
            lines = [ln for ln in text.splitlines() if ln.strip()] if jsonl else [text]
            self._parsed[key] = [_parse(ln, path, k) for k, ln in enumerate(lines)]
        return self._parsed[key]

    def documents(self, path: str, jsonl: bool) -> list[dict]:
        docs = self.all_documents(path, jsonl)
        if self.line is not None:
            docs = [docs[self.line]]
        for d in docs:
            if isinstance(d, SchemaError):
                raise d
        return docs

    def fiet(self, doc: dict) -> Fiet:
        if not isinstance(doc, dict) or "pieces" not in doc:
            raise SchemaError("expected a Fiet object with a 'pieces' list")
        return Fiet.from_json(doc, self.basis(doc.get("basis")))

    def certificate(self, doc: dict) -> Certificate:
        if not isinstance(doc, dict) or "factors" not in doc or "target" not in doc:
            raise SchemaError("expected a Certificate object")
        return Certificate.from_json(doc, self.basis(doc.get("basis")))


def _parse(text: str, path: str, k: int):
    # a bad line is kept as an error value so the other batch lines still run
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        return SchemaError(f"{path}: line {k + 1}: invalid JSON ({exc})")


def _load_basis_arg(text: str | None) -> dict | None:
    if text is None:
        return None
    src = text
    if not text.lstrip().startswith("{"):
        if not os.path.exists(text):
            raise SchemaError(f"--basis: no such file {text!r}")
        with open(text, encoding="utf-8") as fh:
            src = fh.read()
    try:
        data = json.loads(src)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"--basis: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SchemaError("--basis must be a JSON object")
    return data


# commands ----------------------------------------------------------------

def _canon(s: Session, f: Fiet) -> dict:
    return f.to_json()


def _inverse(s: Session, f: Fiet) -> dict:
    return f.inverse().to_json()


def _saf(s: Session, f: Fiet) -> dict:
    v = saf(f)
    return {"saf": v.to_json(), "zero": v.is_zero()}


def _periodic(s: Session, f: Fiet, cap: int) -> dict:
    return is_periodic(f, cap).to_json()


def _normalize(s: Session, f: Fiet) -> dict:
    h, g = normalize_fixed_set(f)
    return {"h": h.to_json(), "conjugate": g.to_json(), "fixed_measure": f.fixed_measure().to_json()}


def _shrink(s: Session, f: Fiet, n: int) -> dict:
    r = shrink_support(f, n)
    return {
        "p": r.p.to_json(), "p_prime": r.p_prime.to_json(), "g": r.g.to_json(),
        "order_p": r.order_p, "order_p_prime": r.order_p_prime,
        "Q": r.Q, "epsilon": format_mpq(r.epsilon), "n": n,
    }


_PIPELINES: dict[Kind, Callable] = {
    Kind.ROTATIONS: to_restricted_rotations,
    Kind.COMMUTATORS: commutator_decomposition,
    Kind.STRONGLY_REVERSIBLE: strongly_reversible_decomposition,
    Kind.INVOLUTIONS: involution_decomposition,
}


def _decompose(s: Session, f: Fiet, kind: Kind, n: int | None, check: bool) -> dict:
    if kind is Kind.CORNER_SUPPORT:
        if n is None:
            raise SchemaError("--kind corner needs --n")
        cert = corner_support_decomposition(f, n)
    else:
        cert = _PIPELINES[kind](f)
    out = cert.to_json()
    if check:
        v = verify(cert)
        if not v.ok:
            raise Failed(v.to_json(), "certificate failed replay")
        out["verdict"] = v.to_json()
    return out


def _verify(s: Session, c: Certificate) -> dict:
    v = verify(c)
    if not v.ok:
        raise Failed(v.to_json(), "; ".join(f"{r.value}: {d}" for _, r, d in v.failures))
    return v.to_json()


def _compose(s: Session, *fs: Fiet) -> dict:
    out = fs[0]
    for g in fs[1:]:
        out = out.compose(g)
    return out.to_json()


def _eq(s: Session, f: Fiet, g: Fiet) -> dict:
    return {"equal": f == g}


def _metric(s: Session, f: Fiet, g: Fiet) -> dict:
    return {"d": metric_d(f, g).to_json()}


def _gen_random(s: Session, args) -> list[dict]:
    seed = s.seed if s.seed is not None else 0
    rng = random.Random(seed)
    if args.grid is not None:
        basis = s.basis()
    else:
        basis = s.basis(s.basis_json or DEFAULT_SPAN_BASIS)
    out = []
    for i in range(args.count):
        f = random_fiet(rng, args.m, grid=args.grid, basis=basis, flips=args.flips, den=args.den)
        d = f.to_json()
        d["meta"] = {"seed": seed, "index": i, "m": args.m, "flips": args.flips,
                     "grid": args.grid, "den": None if args.grid is not None else args.den}
        out.append(d)
    return out


# dispatch ----------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fiet", description="Exact interval exchanges with flips.")
    p.add_argument("--basis", help="basis JSON, inline or a file path")
    p.add_argument("--budget-bits", type=int, help="precision budget for comparisons")
    p.add_argument("--piece-cap", type=int, help="maximum number of pieces of any map")
    p.add_argument("--seed", type=int, help="seed for random generators")
    p.add_argument("--jsonl", action="store_true", help="inputs and outputs hold one JSON object per line")
    sub = p.add_subparsers(dest="command", required=True)

    for name, help_ in [("canon", "canonical form"), ("inverse", "inverse map"), ("saf", "SAF invariant"),
                        ("normalize-fix", "move the fixed set to a prefix")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input")
    sp = sub.add_parser("periodic", help="decide periodicity up to a cap")
    sp.add_argument("input")
    sp.add_argument("--cap", type=int, default=1000)
    sp = sub.add_parser("shrink", help="periodic maps p, p' with small support of p f p'")
    sp.add_argument("input")
    sp.add_argument("--n", type=int, required=True)
    sp = sub.add_parser("decompose", help="certified decomposition")
    sp.add_argument("input")
    sp.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    sp.add_argument("--n", type=int)
    sp.add_argument("--verify", action="store_true", help="replay the certificate before emitting it")
    sp = sub.add_parser("verify", help="replay a certificate")
    sp.add_argument("input")
    sp = sub.add_parser("compose", help="f1 o f2 o ...")
    sp.add_argument("inputs", nargs="+")
    for name, help_ in [("eq", "equality in the quotient group"), ("metric", "distance d(f, g)")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("first")
        sp.add_argument("second")
    sp = sub.add_parser("gen-random", help="seeded random map")
    sp.add_argument("--m", type=int, required=True)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid", type=int, help="breakpoints on the 1/GRID lattice")
    src.add_argument("--basis-coords", action="store_true", help="breakpoints in the span of the basis")
    sp.add_argument("--flips", action="store_true")
    sp.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="same as the global --seed")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--den", type=int, default=16, help="coordinate denominator for --basis-coords")
    return p


def _single(s: Session, args, handler: Callable, loader: str = "fiet") -> list[dict]:
    load = s.fiet if loader == "fiet" else s.certificate
    return [handler(s, load(doc)) for doc in s.documents(args.input, args.jsonl)]


def _multi(s: Session, args, paths: list[str], handler: Callable) -> list[dict]:
    columns = [s.documents(p, args.jsonl) for p in paths]
    if len({len(c) for c in columns}) != 1:
        raise SchemaError("batch inputs have different numbers of lines")
    return [handler(s, *(s.fiet(d) for d in row)) for row in zip(*columns)]


def _execute(s: Session, args) -> list[dict]:
    cmd = args.command
    if cmd == "canon":
        return _single(s, args, _canon)
    if cmd == "inverse":
        return _single(s, args, _inverse)
    if cmd == "saf":
        return _single(s, args, _saf)
    if cmd == "normalize-fix":
        return _single(s, args, _normalize)
    if cmd == "periodic":
        return _single(s, args, lambda s_, f: _periodic(s_, f, args.cap))
    if cmd == "shrink":
        return _single(s, args, lambda s_, f: _shrink(s_, f, args.n))
    if cmd == "decompose":
        kind = Kind(args.kind)
        return _single(s, args, lambda s_, f: _decompose(s_, f, kind, args.n, args.verify))
    if cmd == "verify":
        return _single(s, args, _verify, loader="certificate")
    if cmd == "compose":
        return _multi(s, args, args.inputs, _compose)
    if cmd == "eq":
        return _multi(s, args, [args.first, args.second], _eq)
    if cmd == "metric":
        return _multi(s, args, [args.first, args.second], _metric)
    if cmd == "gen-random":
        return _gen_random(s, args)
    raise SchemaError(f"unknown command {cmd!r}")


def run(argv: list[str], stdin: str | TextIO | None = None, stderr: TextIO | None = None) -> tuple[str, int]:
    """Run one command; return its stdout text and exit code."""
    err = stderr if stderr is not None else sys.stderr
    if isinstance(stdin, str):
        stdin = io.StringIO(stdin)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return "", EXIT_OK if exc.code == 0 else EXIT_SCHEMA
    old_cap = None
    code = EXIT_OK
    lines: list[str] = []
    try:
        s = Session(basis_json=_load_basis_arg(args.basis), budget_bits=args.budget_bits,
                    piece_cap=args.piece_cap, seed=args.seed, stdin=stdin if stdin is not None else sys.stdin)
        if args.piece_cap is not None:
            old_cap = core.set_piece_cap(args.piece_cap)
        # batch mode keeps going after a failed line so every input gets an output line
        if args.jsonl and args.command != "gen-random":
            lines, code = _run_batch(s, args, err)
        else:
            lines = [dumps(d) for d in _execute(s, args)]
    except Failed as exc:
        print(f"fiet: {exc}", file=err)
        lines.append(dumps(exc.payload))
        code = EXIT_FAILED
    except Exception as exc:       # mapped onto exit codes below
        code = _code_for(exc)
        print(f"fiet: {type(exc).__name__}: {exc}", file=err)
    finally:
        if old_cap is not None:
            core.set_piece_cap(old_cap)
    return "".join(line + "\n" for line in lines), code


def _run_batch(s: Session, args, err: TextIO) -> tuple[list[str], int]:
    """Process the JSONL inputs line by line; the exit code is the worst line's."""
    out, worst = [], EXIT_OK
    for k in range(_batch_size(s, args)):
        s.line = k
        try:
            out.extend(dumps(d) for d in _execute(s, args))
        except Failed as exc:
            print(f"fiet: line {k + 1}: {exc}", file=err)
            out.append(dumps(exc.payload))
            worst = max(worst, EXIT_FAILED)
        except Exception as exc:
            code = _code_for(exc)
            print(f"fiet: line {k + 1}: {type(exc).__name__}: {exc}", file=err)
            out.append(dumps({"error": type(exc).__name__, "detail": str(exc)}))
            worst = max(worst, code)
    s.line = None
    return out, worst


def _batch_size(s: Session, args) -> int:
    if hasattr(args, "second"):
        paths = [args.first, args.second]
    else:
        paths = getattr(args, "inputs", None) or [args.input]
    sizes = {len(s.all_documents(p, True)) for p in paths}
    if len(sizes) != 1:
        raise SchemaError("batch inputs have different numbers of lines")
    return sizes.pop()


def _code_for(exc: Exception) -> int:
    if isinstance(exc, PrecisionExhausted):
        return EXIT_PRECISION
    if isinstance(exc, (SchemaError, json.JSONDecodeError, KeyError, TypeError, ValueError,
                        FietError, ExactNumError, OSError)):
        return EXIT_SCHEMA
    return EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    out, code = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
