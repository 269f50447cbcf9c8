"""qsrlab command line.

Exit status: 0 success, 1 usage or input error, 2 a checked bound failed.
The default seed comes from QSRLAB_SEED (else 0); SplitMix64 drives all
randomness, so identical arguments and seed give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .analysis import (
    corollary1_min_entropy,
    fmt_fraction,
    lemma1_crosscheck,
    randomization_epsilon_exact,
    secure_epsilon,
    theorem1_check,
    uniform_distribution,
    MatrixScheme,
)
from .errors import ConsistencyError, GuardError
from .gf2 import BitMatrix, BitVector
from .hybrid import HybridCipher, hybrid_decrypt, hybrid_encrypt, hybrid_randomization_distance, keysize_accounting
from .pauli_otp import SubsampledScheme, epsilon_estimate
from .qsr_core import CipherInstance, SchemeParams, decrypt, encrypt_instance, keygen, sample_key_instance
from .qstate import DensityOperator, random_density
from .rng import SplitMix64
from .verify import grid_from_spec, run_checks

SCHEMA = "qsrlab/1"
SEED_ENV = "QSRLAB_SEED"
EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 1, 2

SWEEP_FIELDS = ["m", "n", "t", "delta", "epsilon_exact", "epsilon", "bound", "key_entropy_bits",
                "corollary1_floor_bits", "holds_bound", "holds_corollary1"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ----------------------------------------------------------------- output


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return f'"{x}"'
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, doubles at 17 significant digits, Fractions as "p/q"."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, Fraction):
        return f'"{fmt_fraction(obj)}"'
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, Fraction):
        return fmt_fraction(v)
    if isinstance(v, (list, tuple, dict)):
        return " ".join(to_json(v).split())
    return str(v)


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k in sorted(d):
        v = d[k]
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


def render(report: dict, fmt: str) -> str:
    body = {"schema": SCHEMA, **report}
    if fmt == "json":
        return to_json(body) + "\n"
    flat = _flatten(body)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(flat))
        w.writerow([_cell(v) for v in flat.values()])
        return buf.getvalue()
    return "".join(f"{k}: {_cell(v)}\n" for k, v in flat.items())


def _write(args, text: str) -> None:
    if getattr(args, "output", None) and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- inputs


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _params(args) -> SchemeParams:
    if args.m is None or args.n is None:
        raise UsageError("--m and --n are required")
    if args.delta is not None:
        if args.t is not None:
            raise UsageError("give --t or --delta, not both")
        return SchemeParams.from_delta(args.m, args.n, Fraction(args.delta))
    if args.t is None:
        raise UsageError("--t or --delta is required")
    return SchemeParams(args.m, args.n, args.t)


def _read_text(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    if os.path.exists(spec):
        with open(spec) as fh:
            return fh.read()
    return spec


def _load_key(args) -> BitMatrix:
    if not args.key:
        raise UsageError("--key is required")
    with open(args.key) as fh:
        return BitMatrix.loads(fh.read())


def _parse_tuple(text: str, t: int, m: int) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != t or any(len(p) != m or set(p) - {"0", "1"} for p in parts):
        raise UsageError(f"message tuple {text!r} must be {t} comma-separated {m}-bit strings")
    return tuple(int(p, 2) for p in parts)


def parse_dist(spec: str, t: int, m: int) -> dict:
    """'uniform', 'point:01,10' or 'two-point:01,10+11,00' (t comma-separated m-bit messages)."""
    if spec == "uniform":
        return uniform_distribution(t, m)
    kind, _, rest = spec.partition(":")
    if kind == "point":
        return {_parse_tuple(rest, t, m): Fraction(1)}
    if kind == "two-point":
        a, sep, b = rest.partition("+")
        if not sep:
            raise UsageError("two-point distribution needs 'tuple+tuple'")
        ta, tb = _parse_tuple(a, t, m), _parse_tuple(b, t, m)
        if ta == tb:
            return {ta: Fraction(1)}
        return {ta: Fraction(1, 2), tb: Fraction(1, 2)}
    raise UsageError(f"unknown distribution {spec!r}")


# --------------------------------------------------------------- commands


def cmd_keygen(args) -> int:
    if args.m is None or args.n is None:
        raise UsageError("--m and --n are required")
    if args.m < 1 or args.n < 1:
        raise UsageError("--m and --n must be >= 1")
    _write(args, keygen(args.m, args.n, SplitMix64(_seed(args))).dumps())
    return EXIT_OK


def cmd_encrypt(args) -> int:
    a = _load_key(args)
    if args.message is None:
        raise UsageError("--message is required")
    s = BitVector.parse(args.message)
    if s.length != a.nrows:
        raise UsageError(f"message must have m = {a.nrows} bits")
    inst = sample_key_instance(a, SplitMix64(_seed(args)))
    _write(args, encrypt_instance(inst, s).dumps())
    return EXIT_OK


def cmd_decrypt(args) -> int:
    a = _load_key(args)
    if not args.cipher:
        raise UsageError("--cipher is required")
    c = CipherInstance.loads(_read_text(args.cipher))
    _write(args, str(decrypt(a, c)) + "\n")
    return EXIT_OK


def cmd_hybrid_encrypt(args) -> int:
    a = _load_key(args)
    if not args.state:
        raise UsageError("--state is required")
    with open(args.state) as fh:
        sigma = DensityOperator.loads(fh.read())
    _write(args, hybrid_encrypt(a, sigma, SplitMix64(_seed(args))).dumps())
    return EXIT_OK


def cmd_hybrid_decrypt(args) -> int:
    a = _load_key(args)
    if not args.cipher:
        raise UsageError("--cipher is required")
    c = HybridCipher.loads(_read_text(args.cipher))
    _write(args, hybrid_decrypt(a, c).dumps())
    return EXIT_OK


def _params_dict(p: SchemeParams) -> dict:
    return {"m": p.m, "n": p.n, "t": p.t, "delta": fmt_fraction(p.effective_delta)}


def analyze_randomization(args) -> tuple[dict, bool]:
    rep = randomization_epsilon_exact(_params(args))
    return {"analysis": "randomization", **rep.to_dict()}, rep.holds


def analyze_secure(args) -> tuple[dict, bool]:
    p = _params(args)
    dist = parse_dist(args.dist, p.t, p.m)
    eps_s = secure_epsilon(p, dist)
    eps_r = randomization_epsilon_exact(p).epsilon_exact
    holds = eps_s <= 2 * eps_r
    return {"analysis": "secure", "params": _params_dict(p), "distribution": args.dist,
            "epsilon_exact": eps_s, "epsilon": float(eps_s), "bound": 2 * eps_r, "holds": holds}, holds


def analyze_theorem1(args) -> tuple[dict, bool]:
    p = _params(args)
    if p.t < 1:
        raise UsageError("theorem1 needs t >= 1")
    rep = theorem1_check(MatrixScheme(p), parse_dist(args.dist, p.t, p.m), p.t)
    return {"analysis": "theorem1", "params": _params_dict(p), "distribution": args.dist,
            "lhs_exact": rep.lhs_exact, "lhs": rep.lhs, "rhs": rep.rhs, "message_entropy_bits": rep.h_st,
            "key_entropy_bits": rep.h_k, "holds": rep.satisfied}, rep.satisfied


def analyze_lemma1(args) -> tuple[dict, bool]:
    p = _params(args)
    rep = lemma1_crosscheck(p)
    return {"analysis": "lemma1", "params": _params_dict(p), "epsilon_randomizing": rep.eps_r,
            "epsilon_secure": rep.eps_s, "distributions": rep.distributions, "forward": rep.forward,
            "converse": rep.converse, "holds": rep.holds}, rep.holds


def analyze_corollary1(args) -> tuple[dict, bool]:
    if args.d is not None:
        if args.t is None:
            raise UsageError("--t is required with --d")
        eps = args.eps if args.eps is not None else 0.0
        floor = corollary1_min_entropy(args.t, args.d, eps)
        return {"analysis": "corollary1", "t": args.t, "d": args.d, "epsilon": eps, "floor_bits": floor.bits,
                "raw_bits": floor.raw_bits, "vacuous": floor.vacuous}, True
    p = _params(args)
    eps = randomization_epsilon_exact(p).epsilon_exact
    floor = corollary1_min_entropy(p.t, 1 << p.m, float(eps))
    h_k = p.m * p.n
    holds = h_k >= floor.raw_bits
    return {"analysis": "corollary1", "params": _params_dict(p), "epsilon_exact": eps, "d": 1 << p.m,
            "key_entropy_bits": h_k, "floor_bits": floor.bits, "raw_bits": floor.raw_bits,
            "vacuous": floor.vacuous, "holds": holds}, holds


def analyze_keysize(args) -> tuple[dict, bool]:
    if args.t is None or args.d is None or args.eps1 is None or args.eps2 is None:
        raise UsageError("keysize needs --t, --d, --eps1 and --eps2")
    b = keysize_accounting(args.t, args.d, args.eps1, args.eps2)
    holds = b.lower_bound_bits <= b.entropy_bits
    return {"analysis": "keysize", "t": b.t, "d": b.d, "eps1": b.eps1, "eps2": b.eps2,
            "entropy_bits": b.entropy_bits, "lower_bound_bits": b.lower_bound_bits, "ratio": b.ratio,
            "pauli_entropy_bits": b.pauli_entropy_bits, "holds": holds}, holds


def analyze_hybrid(args) -> tuple[dict, bool]:
    if args.n is None or args.t is None:
        raise UsageError("hybrid needs --n and --t")
    q = args.q
    p = SchemeParams(2 * q, args.n, args.t)
    t1 = args.t1 if args.t1 is not None else p.t
    rng = SplitMix64(_seed(args))
    g = rng.numpy()
    if args.subsample:
        if not 1 <= args.subsample <= 1 << (2 * q):
            raise UsageError(f"--subsample must lie in [1, {1 << (2 * q)}]")
        inner = SubsampledScheme.random(q, args.subsample, g)
    else:
        inner = SubsampledScheme.full(q)
    if args.state:
        with open(args.state) as fh:
            sigma = DensityOperator.loads(fh.read())
        sigmas = [sigma] * t1
    else:
        sigmas = [random_density(1 << q, g) for _ in range(t1)]
    eps2 = epsilon_estimate(inner, args.eps2_trials, g) if args.eps2_trials else None
    rep = hybrid_randomization_distance(p, sigmas, t1, inner=inner, eps2=eps2)
    return {"analysis": "hybrid", "params": _params_dict(p), "q": q, "t1": t1,
            "pad_keys": [k.dumps().strip() for k in inner.keys], "distance": rep.distance, "eps1": rep.eps1,
            "eps2": rep.eps2, "bound": rep.bound, "holds": rep.holds}, rep.holds


ANALYSES = {
    "randomization": analyze_randomization,
    "secure": analyze_secure,
    "theorem1": analyze_theorem1,
    "lemma1": analyze_lemma1,
    "corollary1": analyze_corollary1,
    "keysize": analyze_keysize,
    "hybrid": analyze_hybrid,
}


def cmd_analyze(args) -> int:
    report, holds = ANALYSES[args.kind](args)
    _write(args, render(report, args.format))
    return EXIT_OK if holds else EXIT_BOUND


def sweep_row(m: int, n: int, t: int, delta: str) -> dict:
    p = SchemeParams(m, n, t)
    rep = randomization_epsilon_exact(p)
    floor = corollary1_min_entropy(t, 1 << m, float(rep.epsilon_exact))
    return {
        "m": m, "n": n, "t": t, "delta": delta,
        "epsilon_exact": fmt_fraction(rep.epsilon_exact), "epsilon": float(rep.epsilon_exact),
        "bound": fmt_fraction(rep.paper_bound), "key_entropy_bits": m * n,
        "corollary1_floor_bits": floor.bits, "holds_bound": rep.holds,
        "holds_corollary1": m * n >= floor.raw_bits,
    }


def _sweep_points(args) -> list[tuple[int, int, int, str]]:
    grid = grid_from_spec(args.grid)
    if args.delta is None:
        return [(p.m, p.n, p.t, fmt_fraction(p.effective_delta)) for p in grid]
    delta = Fraction(args.delta)
    seen = []
    for p in grid:
        q = SchemeParams.from_delta(p.m, p.n, delta)
        q.check_exact()
        pt = (q.m, q.n, q.t, fmt_fraction(delta))
        if pt not in seen:
            seen.append(pt)
    return seen


def cmd_sweep(args) -> int:
    points = _sweep_points(args)
    if args.jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(sweep_row, *zip(*points)))
    else:
        rows = [sweep_row(*pt) for pt in points]
    if args.format == "json":
        text = to_json({"schema": SCHEMA, "rows": rows}) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_FIELDS)
        for r in rows:
            w.writerow([_cell(r[f]) for f in SWEEP_FIELDS])
        text = buf.getvalue()
    _write(args, text)
    ok = all(r["holds_bound"] and r["holds_corollary1"] for r in rows)
    return EXIT_OK if ok else EXIT_BOUND


def cmd_verify(args) -> int:
    start = time.perf_counter()
    keys = set(args.only.split(",")) if args.only else None
    results = run_checks(grid_from_spec(args.grid), keys)
    elapsed = time.perf_counter() - start
    ok = all(r.ok for r in results)
    if args.format == "json":
        text = to_json({"schema": SCHEMA, "checks": [r.to_dict() for r in results], "seconds": elapsed,
                        "passed": ok}) + "\n"
    else:
        lines = [r.line() for r in results]
        lines.append(f"{sum(r.ok for r in results)}/{len(results)} checks passed in {elapsed:.1f}s")
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return EXIT_OK if ok else EXIT_BOUND


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    scheme = _Parser(add_help=False)
    scheme.add_argument("--m", type=int)
    scheme.add_argument("--n", type=int)
    scheme.add_argument("--t", type=int)
    scheme.add_argument("--delta", type=str, help="sets t = floor((1 - delta) n)")

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=["json", "csv", "text"], default="text")

    parser = _Parser(prog="qsrlab", description="Quantum state randomization laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", parents=[common], help="sample a decryption key")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", parents=[common], help="encrypt an m-bit message with a fresh key instance")
    p.add_argument("--key")
    p.add_argument("--message")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", parents=[common], help="decrypt a cipher line (path, '-' or inline)")
    p.add_argument("--key")
    p.add_argument("--cipher")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("hybrid-encrypt", parents=[common], help="encrypt a q-qubit state (m = 2q)")
    p.add_argument("--key")
    p.add_argument("--state")
    p.set_defaults(func=cmd_hybrid_encrypt)

    p = sub.add_parser("hybrid-decrypt", parents=[common], help="recover the state from a hybrid cipher")
    p.add_argument("--key")
    p.add_argument("--cipher")
    p.set_defaults(func=cmd_hybrid_decrypt)

    p = sub.add_parser("analyze", parents=[common, scheme, fmt], help="exact security figures and bound checks")
    p.add_argument("kind", choices=sorted(ANALYSES))
    p.add_argument("--dist", default="uniform", help="uniform | point:T | two-point:T+T, T = comma-separated messages")
    p.add_argument("--d", type=int, help="message dimension (corollary1, keysize)")
    p.add_argument("--eps", type=float, help="security parameter (corollary1 with --d)")
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--q", type=int, default=1, help="qubits per hybrid message")
    p.add_argument("--t1", type=int, help="hybrid ciphers held by the adversary (default t)")
    p.add_argument("--eps2-trials", type=int, default=0, help="Haar trials for an empirical pad epsilon")
    p.add_argument("--subsample", type=int, default=0, help="use K random Pauli keys instead of all")
    p.add_argument("--state", help="message state file for hybrid (default: random states)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", parents=[common], help="randomization table over a grid (CSV)")
    p.add_argument("--grid", default="default", help="default | empty | m=a:b,n=a:b,t=a:b")
    p.add_argument("--delta", type=str, help="replace t by floor((1 - delta) n)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance battery")
    p.add_argument("--grid", default="default")
    p.add_argument("--only", help="comma-separated check ids, e.g. 1,2,9a")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("qsrlab") else f"qsrlab: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"qsrlab: consistency check failed: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (GuardError, ValueError, OSError) as exc:
        print(f"qsrlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
