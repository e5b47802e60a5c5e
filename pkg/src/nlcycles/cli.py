"""Command-line interface.

Every subcommand prints one JSON document on stdout.  Exact values are
strings "p/q".  Errors print {"error": {code, message, module}} and exit with
2 (bad input), 3 (computation error) or 4 (failed precondition).

The on-disk cache lives under $NLCYCLES_CACHE (default ~/.cache/nlcycles);
--no-cache bypasses it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import format_rational, parse_rational
from .discform import discriminant_form, milgram_signature, parse_element
from .errors import BadInput, ComputationError, NLError
from .lattice import IntegerLattice, determinant, from_json, level, signature

log = logging.getLogger("nlcycles")

CACHE_ENV = "NLCYCLES_CACHE"
CACHE_FORMAT = 1
CONFIG_VERSIONS = {"slope_table": "1", "archimedean_constant": "1", "cache_format": str(CACHE_FORMAT)}


class CacheCorrupt(ComputationError):
    module = "cli"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadInput(message, "cli")


# -- cache


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Cache:
    """Content-addressed JSON store; one file per key, written by atomic rename."""

    def __init__(self, root: str | os.PathLike | None = None, enabled: bool = True):
        self.enabled = enabled
        root = root or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "nlcycles"
        self.root = Path(root)

    @staticmethod
    def key(module: str, lattice_hash: str, params: dict) -> str:
        blob = canonical_json({"module": module, "lattice": lattice_hash, "params": params, "v": CACHE_FORMAT})
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        p = self.path(key)
        try:
            data = json.loads(p.read_text())
            payload = data["payload"]
            if data.get("key") != key or data.get("digest") != _digest(payload):
                raise CacheCorrupt(f"digest mismatch in {p}")
            return payload
        except FileNotFoundError:
            return None
        except (ValueError, KeyError, TypeError, CacheCorrupt) as exc:
            log.warning("cache entry %s unusable (%s); recomputing", p.name, exc)
            return None

    def put(self, key: str, payload) -> None:
        if not self.enabled:
            return
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        body = json.dumps({"key": key, "digest": _digest(payload), "payload": payload}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(body)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def fetch(self, module: str, lattice_hash: str, params: dict, compute):
        key = self.key(module, lattice_hash, params)
        hit = self.get(key)
        if hit is not None:
            log.info("cache hit %s %s", module, key[:12])
            return hit
        payload = compute()
        self.put(key, payload)
        return payload


def _digest(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


# -- argument helpers


def load_lattice(arg: str, d: int | None = None) -> IntegerLattice:
    """A lattice from a name, an inline JSON object, or a JSON file."""
    arg = arg.strip()
    if arg.startswith("{"):
        return from_json(arg)
    if os.path.exists(arg):
        try:
            return from_json(Path(arg).read_text())
        except json.JSONDecodeError as exc:
            raise BadInput(f"{arg}: not valid JSON ({exc})", "cli") from exc
    if arg in ("lambda_2d", "k3_weight_seven_halves"):
        if d is None:
            raise BadInput(f"{arg} needs --d", "cli")
        return from_json({"name": arg, "d": d})
    if arg in ("lambda_cubic", "lattice_f2"):
        return from_json({"name": arg})
    from .nlpic import definite_lattice

    return definite_lattice(arg)


def parse_indices(text: str) -> list[tuple[Fraction, tuple]]:
    """Indices as JSON [["1/3",[2]], ...] or as "1/3@[2];4/3@[2]"."""
    text = text.strip()
    try:
        if text.startswith("[["):
            return [(parse_rational(m), parse_element(mu)) for m, mu in json.loads(text)]
        out = []
        for part in filter(None, (p.strip() for p in text.split(";"))):
            m, mu = part.split("@")
            out.append((parse_rational(m.strip()), parse_element(mu.strip())))
        return out
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        if isinstance(exc, BadInput):
            raise
        raise BadInput(f"cannot parse indices {text!r}: {exc}", "cli") from exc


def _rational_arg(s: str) -> Fraction:
    try:
        return parse_rational(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"not a rational number: {s!r}", "cli") from exc


# -- subcommands


def cmd_lattice(args, cache: Cache):
    if args.action != "info":
        raise BadInput(f"unknown lattice action {args.action!r}", "cli")
    L = load_lattice(args.lattice, args.d)
    D = discriminant_form(L)
    sig = signature(L)
    return {
        "name": L.name,
        "digest": L.digest(),
        "rank": L.rank,
        "signature": [sig.b_plus, sig.b_minus],
        "det": str(determinant(L.gram)),
        "level": level(L),
        "hyperbolic_planes": L.hyperbolic_planes,
        "discriminant": {
            "invariant_factors": list(D.invariant_factors),
            "order": D.order,
            "milgram_signature": milgram_signature(D),
            "q": {str(list(mu)): format_rational(D.q(mu)) for mu in D.elements()},
        },
        "gram": [list(r) for r in L.gram],
    }


def cmd_theta(args, cache: Cache):
    from .theta import theta_qexp

    L = load_lattice(args.lattice, args.d)
    m = _rational_arg(args.max_m)
    return cache.fetch("theta", L.digest(), {"max_m": format_rational(m)}, lambda: theta_qexp(L, m).to_json())


def cmd_eisenstein(args, cache: Cache):
    from .eisenstein import eisenstein_coefficient

    L = load_lattice(args.lattice, args.d)
    k = _rational_arg(args.weight) if args.weight else Fraction(L.rank, 2)
    D = discriminant_form(L)
    if args.indices:
        idx = parse_indices(args.indices)
    elif args.max_m:
        from .qexp import supported_exponents

        top = _rational_arg(args.max_m)
        idx = [(m, mu) for mu in D.elements() for m in supported_exponents(D, mu, top, dual=True)]
    else:
        raise BadInput("give --indices or --max-m", "cli")
    out = []
    for m, mu in idx:
        mu = D.reduce(mu)
        params = {"k": format_rational(k), "m": format_rational(m), "mu": list(mu)}

        def compute(m=m, mu=mu):
            t = time.perf_counter()
            c = eisenstein_coefficient(L, k, m, mu, D=D)
            log.info("c(%s, %s) computed in %.2fs", format_rational(m), list(mu), time.perf_counter() - t)
            return format_rational(c)

        out.append({"m": format_rational(m), "mu": list(mu), "c": cache.fetch("eisenstein", L.digest(), params, compute)})
    return {"lattice": L.digest(), "weight": format_rational(k), "coefficients": out}


def cmd_hodge(args, cache: Cache):
    from .nlpic import hodge_via_eisenstein, hodge_via_theta

    if args.d < 1:
        raise BadInput("--d must be positive", "cli")
    fn = {"theta": hodge_via_theta, "eisenstein": hodge_via_eisenstein}[args.method]
    return cache.fetch("hodge", f"d={args.d}", {"method": args.method}, lambda: fn(args.d).to_json())


def cmd_generators(args, cache: Cache):
    from .nlpic import generating_set

    L = load_lattice(args.lattice, args.d)
    syms = generating_set(L, args.flavor, "general" if args.general else "auto")
    return {"flavor": args.flavor, "count": len(syms), "symbols": [s.to_json() for s in syms]}


def _relation(L: IntegerLattice, N: int, source: str):
    from .nlpic import definite_lattice, eisenstein_partner_form, relation_from_source, theta_partner_form

    if source == "eisenstein":
        F = eisenstein_partner_form(L, N)
    elif source.startswith("theta:"):
        F = theta_partner_form(L, definite_lattice(source[6:]), N)
    else:
        raise BadInput(f"unknown source {source!r}", "cli")
    return relation_from_source(L, N, F)


def cmd_relation(args, cache: Cache):
    from .nlpic import pairing_gate

    L = load_lattice(args.lattice, args.d)

    def compute():
        rel = _relation(L, args.N, args.source)
        out = rel.to_json(relation=True)
        if args.check:
            out["pairing"] = format_rational(pairing_gate(L, rel))
        return out

    return cache.fetch("relation", L.digest(), {"N": args.N, "source": args.source, "check": args.check}, compute)


def cmd_bounds(args, cache: Cache):
    from .bounds import SlopeTable, C_bound, enumerate_S

    overrides = {g: v for g, v in ((2, args.s2), (3, args.s3)) if v is not None}
    table = SlopeTable.with_entries(overrides)
    k = _rational_arg(args.k)
    rows = []
    for i in range(1, args.g + 1):
        v, closed = C_bound(i, args.g, k, table, with_closed=True)
        rows.append({"i": i, "C": format_rational(v), "closed_form": format_rational(closed)})
    out = {"g": args.g, "k": format_rational(k), "table": table.to_json(), "C": rows}
    if args.lattice:
        L = load_lattice(args.lattice, args.d)
        S = enumerate_S(k, args.g, L, table)
        out["S"] = [x.to_json() for x in S]
        out["count"] = len(S)
    return out


def cmd_slope(args, cache: Cache):
    from .slope import cubic_slope_bounds, k3deg2_slope_bounds

    fn = {"cubic": cubic_slope_bounds, "k3deg2": k3deg2_slope_bounds}[args.which]
    return cache.fetch("slope", args.which, {}, lambda: fn().to_json())


def cmd_pairing_check(args, cache: Cache):
    from .nlpic import eisenstein_partner_form, matching_theta_lattices, pairing_gate, relation_from_source, theta_pairing

    L = load_lattice(args.lattice, args.d)

    def compute():
        checks = []
        for K in matching_theta_lattices(L, args.N):
            log.info("pairing against theta series of %s", K.name)
            checks.append({"theta": K.name, "pairing": format_rational(theta_pairing(L, K, args.N))})
        try:
            rel = relation_from_source(L, args.N, eisenstein_partner_form(L, args.N))
            checks.append({"eisenstein_relation": rel.to_json(relation=True), "pairing": format_rational(pairing_gate(L, rel))})
        except NLError as exc:
            log.info("no Eisenstein partner: %s", exc)
        return {"N": args.N, "checks": checks, "all_zero": bool(checks) and all(c["pairing"] == "0" for c in checks)}

    return cache.fetch("pairing", L.digest(), {"N": args.N}, compute)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nlcycles", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--no-cache", action="store_true", help="bypass the on-disk cache")
    p.add_argument("--quiet", action="store_true", help="no progress on stderr")
    p.add_argument("--manifest", help="write a run manifest (JSON) to this path")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def lat(sp):
        sp.add_argument("lattice")
        sp.add_argument("--d", type=int)

    s = sub.add_parser("lattice")
    s.add_argument("action", choices=["info"])
    lat(s)
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("theta")
    lat(s)
    s.add_argument("--max-m", required=True)
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("eisenstein")
    lat(s)
    s.add_argument("--weight")
    s.add_argument("--indices")
    s.add_argument("--max-m")
    s.set_defaults(func=cmd_eisenstein)

    s = sub.add_parser("hodge")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--method", choices=["theta", "eisenstein"], default="theta")
    s.set_defaults(func=cmd_hodge)

    s = sub.add_parser("generators")
    lat(s)
    s.add_argument("--flavor", choices=["H", "P"], default="P")
    s.add_argument("--general", action="store_true", help="the general bound set instead of the d+1 presentation")
    s.set_defaults(func=cmd_generators)

    s = sub.add_parser("relation")
    lat(s)
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--source", required=True, help="theta:<definite lattice> or eisenstein")
    s.add_argument("--check", action="store_true", help="also pair against the Eisenstein series of L")
    s.set_defaults(func=cmd_relation)

    s = sub.add_parser("bounds")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--s2")
    s.add_argument("--s3")
    s.add_argument("--lattice")
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("slope")
    s.add_argument("which", choices=["cubic", "k3deg2"])
    s.set_defaults(func=cmd_slope)

    s = sub.add_parser("pairing-check")
    lat(s)
    s.add_argument("--N", type=int, default=1)
    s.set_defaults(func=cmd_pairing_check)
    return p


def _setup_logging(quiet: bool):
    log.handlers.clear()
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("[nlcycles] %(message)s"))
    log.addHandler(h)
    log.setLevel(logging.WARNING if quiet else logging.INFO)
    log.propagate = False


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = None
    try:
        args = build_parser().parse_args(argv)
        _setup_logging(args.quiet)
        cache = Cache(enabled=not args.no_cache)
        started = time.time()
        result = args.func(args, cache)
        text = json.dumps(result, sort_keys=True)
        stdout.write(text + "\n")
        if args.manifest:
            manifest = {
                "command": args.command,
                "arguments": list(argv if argv is not None else sys.argv[1:]),
                "config_versions": CONFIG_VERSIONS,
                "started": started,
                "finished": time.time(),
                "output_digest": hashlib.sha256(text.encode()).hexdigest(),
            }
            if getattr(args, "lattice", None):
                try:
                    manifest["lattice_hash"] = load_lattice(args.lattice, getattr(args, "d", None)).digest()
                except NLError:
                    pass
            Path(args.manifest).write_text(json.dumps(manifest, sort_keys=True, indent=1))
        return 0
    except NLError as exc:
        stdout.write(json.dumps({"error": exc.to_json()}, sort_keys=True) + "\n")
        return exc.exit_code
    except KeyboardInterrupt:
        return 130


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
