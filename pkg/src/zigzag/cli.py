"""Command-line interface: ``zigzag <verb> ...``.

Exit codes: 0 success or true, 1 false or failed verification, 2 usage or
precondition error, 3 disagreement between the analytic and brute-force layers.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

from .fencemap import FenceMap, MapError, compose_all, evaluate, is_fence_preserving, normalize
from .factorization import (
    SCHEMA_VERSION,
    SCHEMES,
    FactorizationError,
    GeneratorWord,
    factor,
    verify_word,
)
from .generators import (
    PeriodicSubset,
    alpha_family,
    alpha_gen,
    beta_gen,
    collapse_witness,
    delta_gen,
    lambda_gen,
    xi,
)
from .invariants import block_stream, classify, ms_stream
from . import oracle

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_ORACLE = 0, 1, 2, 3


class MapSyntaxError(MapError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos}: {text[:pos]}⟨here⟩{text[pos:]}")
        self.pos = pos


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def fail(self, message: str):
        raise MapSyntaxError(message, self.text, self.pos)

    def expect(self, lit: str) -> None:
        self.skip()
        if not self.text.startswith(lit, self.pos):
            self.fail(f"expected {lit!r}")
        self.pos += len(lit)

    def integer(self) -> int:
        self.skip()
        m = re.compile(r"-?\d+").match(self.text, self.pos)
        if not m:
            self.fail("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def int_list(self) -> list[int]:
        self.expect("[")
        self.skip()
        out: list[int] = []
        if self.text.startswith("]", self.pos):
            self.pos += 1
            return out
        out.append(self.integer())
        while True:
            self.skip()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                out.append(self.integer())
            else:
                break
        self.expect("]")
        return out

    def end(self) -> None:
        self.skip()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")


def _parse_dsl(text: str) -> FenceMap:
    s = _Scanner(text)
    s.expect("prefix=")
    prefix = s.int_list()
    s.expect("tail(")
    fields = {}
    for i, name in enumerate(("start", "period", "drift", "base")):
        if i:
            s.expect(",")
        s.expect(f"{name}=")
        fields[name] = s.int_list() if name == "base" else s.integer()
    s.expect(")")
    s.end()
    return FenceMap(tuple(prefix), fields["start"], fields["period"], fields["drift"], tuple(fields["base"]))


_GEN = re.compile(r"^(alpha|beta|lambda|delta):(\d+)$")
_FAMILY = re.compile(r"^family:\[([^;\]]*);([^;\]]*);([^;\]]*)\]$")


def _ints(chunk: str, what: str) -> list[int]:
    chunk = chunk.strip()
    if not chunk:
        return []
    try:
        return [int(t) for t in chunk.split(",")]
    except ValueError:
        raise MapError(f"bad {what} list {chunk!r}") from None


def parse_map(text: str) -> FenceMap:
    """Parse the map DSL, its JSON mirror, or a generator spelling into canonical form."""
    t = text.strip()
    if t.startswith("{"):
        try:
            data = json.loads(t)
        except json.JSONDecodeError as exc:
            raise MapSyntaxError(f"bad JSON ({exc.msg})", t, exc.pos) from None
        return normalize(FenceMap.from_json(data))
    if t == "xi":
        return xi()
    if t == "witness":
        return collapse_witness()
    if t == "identity":
        return normalize(FenceMap((), 1, 1, 1, (1,)))
    m = _GEN.match(t)
    if m:
        ctor = {"alpha": alpha_gen, "beta": beta_gen, "lambda": lambda_gen, "delta": delta_gen}[m.group(1)]
        return ctor(int(m.group(2)))
    m = _FAMILY.match(t)
    if m:
        members = _ints(m.group(1), "member")
        period = _ints(m.group(2), "period")
        pattern = _ints(m.group(3), "pattern")
        if len(period) != 1:
            raise MapError("family period must be a single integer")
        if any(b not in (0, 1) for b in pattern):
            raise MapError("family pattern entries must be 0 or 1")
        return alpha_family(PeriodicSubset.from_members(members, period[0], [bool(b) for b in pattern]))
    if t.startswith("prefix"):
        return normalize(_parse_dsl(t))
    raise MapSyntaxError("unrecognized map expression", t, 0)


def render_map(m: FenceMap) -> str:
    m = normalize(m)
    pre = ",".join(map(str, m.prefix))
    base = ",".join(map(str, m.tail_base))
    return (
        f"prefix=[{pre}] tail(start={m.tail_start}, period={m.tail_period}, "
        f"drift={m.tail_drift}, base=[{base}])"
    )


# --- commands -------------------------------------------------------------------


@dataclass
class Result:
    code: int
    out: str = ""
    err: str = ""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zigzag", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("text", "json"), default="text")
    common.add_argument("--oracle", action="store_true", help="cross-check against brute force")
    common.add_argument("--horizon", type=int, default=None, help="oracle / listing window")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("check", parents=[common], help="is the map fence-preserving?")
    c.add_argument("map")
    c = sub.add_parser("eval", parents=[common], help="evaluate a map at points")
    c.add_argument("map")
    c.add_argument("points", nargs="+", type=int)
    c = sub.add_parser("compose", parents=[common], help="compose maps left to right")
    c.add_argument("maps", nargs="+")
    c = sub.add_parser("classify", parents=[common], help="full class report")
    c.add_argument("map")
    c.add_argument("--n", type=int, default=1)
    c = sub.add_parser("factor", parents=[common], help="factor a map into generators")
    c.add_argument("map")
    c.add_argument("--scheme", choices=SCHEMES, required=True)
    c.add_argument("--n", type=int, default=None)
    c = sub.add_parser("verify", parents=[common], help="verify a word file against a target")
    c.add_argument("word", nargs="?", default="-")
    c.add_argument("--target", required=True)
    c = sub.add_parser("gen", parents=[common], help="print a generator in canonical DSL form")
    c.add_argument("spelling")
    c = sub.add_parser("blocks", parents=[common], help="constancy blocks and singleton runs")
    c.add_argument("map")
    return p


def _read_operand(text: str, stdin: TextIO) -> str:
    return stdin.read() if text == "-" else text


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=False)


def _map_json(m: FenceMap) -> dict:
    return {"schema_version": SCHEMA_VERSION, **normalize(m).to_json()}


def run(argv: Sequence[str], stdin: TextIO | None = None) -> Result:
    stdin = stdin if stdin is not None else sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return Result(EXIT_USAGE if exc.code else EXIT_OK, err="usage error")
    try:
        return _dispatch(args, stdin)
    except (MapError, FactorizationError, ValueError) as exc:
        return Result(EXIT_USAGE, err=f"error: {exc}")


def _dispatch(args: argparse.Namespace, stdin: TextIO) -> Result:
    def load(text: str) -> FenceMap:
        return parse_map(_read_operand(text, stdin))

    as_json = args.emit == "json"
    verb = args.verb

    if verb == "gen":
        m = parse_map(args.spelling)
        return Result(EXIT_OK, _dump(_map_json(m)) if as_json else render_map(m))

    if verb == "check":
        m = load(args.map)
        ok = is_fence_preserving(m)
        if args.oracle:
            h = args.horizon or oracle.auto_horizon(m)
            if oracle.brute_preserving(m, max(h, 3)) != ok:
                return Result(EXIT_ORACLE, err="oracle disagrees with the local criterion")
        out = _dump({"schema_version": SCHEMA_VERSION, "fence_preserving": ok}) if as_json else str(ok).lower()
        return Result(EXIT_OK if ok else EXIT_FALSE, out)

    if verb == "eval":
        m = load(args.map)
        if any(x < 1 for x in args.points):
            return Result(EXIT_USAGE, err="points must be positive")
        vals = [evaluate(m, x) for x in args.points]
        if as_json:
            return Result(EXIT_OK, _dump({"schema_version": SCHEMA_VERSION, "points": args.points, "values": vals}))
        return Result(EXIT_OK, " ".join(map(str, vals)))

    if verb == "compose":
        maps = [load(t) for t in args.maps]
        m = compose_all(maps)
        if args.oracle:
            h = args.horizon or oracle.auto_horizon(*maps)
            for x in range(1, h + 1):
                y = x
                for f in maps:
                    y = evaluate(f, y)
                if evaluate(m, x) != y:
                    return Result(EXIT_ORACLE, err=f"composition disagrees with pointwise evaluation at {x}")
        return Result(EXIT_OK, _dump(_map_json(m)) if as_json else render_map(m))

    if verb == "classify":
        m = load(args.map)
        if not is_fence_preserving(m):
            return Result(EXIT_USAGE, err="error: classification needs a fence-preserving map")
        if args.n < 1:
            return Result(EXIT_USAGE, err="error: --n must be >= 1")
        rep = classify(m, args.n)
        if as_json:
            return Result(EXIT_OK, _dump({"schema_version": SCHEMA_VERSION, **rep.to_json()}))
        lines = []
        for k, v in rep.__dict__.items():
            if isinstance(v, tuple):
                v = ",".join(v) or "-"
            elif isinstance(v, bool):
                v = str(v).lower()
            lines.append(f"{k}: {v}")
        return Result(EXIT_OK, "\n".join(lines))

    if verb == "factor":
        m = load(args.map)
        if args.scheme != "ksplit" and args.n is None:
            return Result(EXIT_USAGE, err=f"error: scheme {args.scheme} needs --n")
        word = factor(m, args.scheme, args.n)
        if args.oracle:
            h = args.horizon or oracle.auto_horizon(m, word.compose())
            if not oracle.agree_on_prefix(word.compose(), m, h):
                return Result(EXIT_ORACLE, err="composed word disagrees with the target on the oracle window")
        return Result(EXIT_OK, _dump(word.to_json()) if as_json else word.render())

    if verb == "verify":
        target = load(args.target)
        try:
            raw = stdin.read() if args.word == "-" else open(args.word, encoding="utf-8").read()
        except OSError as exc:
            return Result(EXIT_USAGE, err=f"error: cannot read word file ({exc})")
        try:
            word = GeneratorWord.from_json(json.loads(raw))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return Result(EXIT_USAGE, err=f"error: bad word file ({exc})")
        report = verify_word(word, target)
        if args.oracle:
            h = args.horizon or oracle.auto_horizon(target, word.compose())
            agree = oracle.agree_on_prefix(word.compose(), target, h)
            exact = report.composed_equals_target
            witness_seen = not exact and report.mismatch_witness[0] <= h
            if (exact and not agree) or (witness_seen and agree):
                return Result(EXIT_ORACLE, err="oracle disagrees with exact comparison")
        if as_json:
            out = _dump(report.to_json())
        else:
            lines = [f"composed_equals_target: {str(report.composed_equals_target).lower()}"]
            if report.mismatch_witness:
                x, u, v = report.mismatch_witness
                lines.append(f"mismatch at x={x}: word gives {u}, target gives {v}")
            for c in report.factor_certifications:
                status = "ok" if c.ok else f"FAIL ({c.failing_predicate})"
                lines.append(f"factor {c.index} {c.symbol}: {status}")
            out = "\n".join(lines)
        return Result(EXIT_OK if report.ok else EXIT_FALSE, out)

    if verb == "blocks":
        m = load(args.map)
        if not is_fence_preserving(m):
            return Result(EXIT_USAGE, err="error: block analysis needs a fence-preserving map")
        bs, ms = block_stream(m), ms_stream(m)
        h = args.horizon or 40
        if args.oracle:
            oh = args.horizon or oracle.auto_horizon(m)
            got = [(b.start, b.length) for b in bs.upto(oh)]
            want = [(b.start, b.length) for b in oracle.brute_blocks(m, oh)]
            if got != want:
                return Result(EXIT_ORACLE, err="block stream disagrees with brute-force blocks")
        if as_json:
            return Result(
                EXIT_OK,
                _dump({"schema_version": SCHEMA_VERSION, "blocks": bs.to_json(), "singleton_runs": ms.to_json()}),
            )

        def show(blocks) -> str:
            parts = []
            for b in blocks:
                end = b.start + b.length - 1
                parts.append(f"{{{b.start}}}" if b.length == 1 else f"{{{b.start}..{end}}}")
            return " ".join(parts)

        out = [
            f"blocks up to {h}: {show(bs.upto(h))}",
            f"singleton runs up to {h}: {show(ms.upto(h))}",
            f"collapsed blocks: {bs.m_star_count()}",
        ]
        return Result(EXIT_OK, "\n".join(out))

    return Result(EXIT_USAGE, err=f"unknown verb {verb}")  # pragma: no cover


def main(argv: Sequence[str] | None = None) -> int:
    res = run(sys.argv[1:] if argv is None else argv)
    if res.out:
        print(res.out)
    if res.err:
        print(res.err, file=sys.stderr)
    return res.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
