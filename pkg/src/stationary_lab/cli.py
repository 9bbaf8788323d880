"""Command-line experiment runner.

Exit codes: 0 success, 1 a checked property failed, 2 invalid usage.
Rationals are passed as ``p/q`` strings; JSON output is one record per line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import boundary, skew, torus, walk
from .words import format_letters

_RATIONAL = re.compile(r"^\s*-?\d+(/\d+)?\s*$")


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise UsageError(f"malformed rational {text!r}; expected p/q")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise UsageError(f"zero denominator in {text!r}") from None


def parse_t(text: Optional[str]) -> Fraction:
    if text is None:
        raise UsageError("--t is required")
    t = parse_rational(text)
    if not 0 <= t <= 1:
        raise UsageError(f"t = {t} outside [0, 1]")
    return t


def parse_point(text: str) -> torus.TorusPointRational:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"malformed point {text!r}; expected x,y with rationals")
    return torus.TorusPointRational(*(parse_rational(p) for p in parts))


def parse_float_pair(text: str) -> tuple[float, float]:
    try:
        x, y = (float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"malformed pair {text!r}; expected x,y") from None
    return x, y


def parse_int_pair(text: str) -> tuple[int, int]:
    try:
        x, y = (int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"malformed integer pair {text!r}") from None
    return x, y


@dataclass
class RunConfig:
    seed: Optional[int] = None
    samples: int = 0
    depth: int = 0
    t: Optional[Fraction] = None
    output: str = "-"
    format: str = "json"

    def require_seed(self) -> int:
        if self.seed is None:
            raise UsageError("this run is randomized; pass an explicit --seed")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")
        return self.seed


class Emitter:
    """Collects records and writes them as JSON lines or one CSV table."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.rows: list[dict] = []

    def emit(self, record: dict) -> None:
        self.rows.append(record)

    def extend(self, records: Iterable[dict]) -> None:
        self.rows.extend(records)

    def render(self) -> str:
        if self.cfg.format == "json":
            return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in self.rows)
        buf = io.StringIO()
        if self.rows:
            fields = list(self.rows[0])
            writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
            writer.writeheader()
            for r in self.rows:
                writer.writerow({k: _csv_cell(v) for k, v in r.items()})
        return buf.getvalue()

    def flush(self) -> None:
        text = self.render()
        if self.cfg.output == "-":
            sys.stdout.write(text)
        else:
            with open(self.cfg.output, "w", newline="") as fh:
                fh.write(text)


def _csv_cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    if v is None:
        return ""
    return v


# -- subcommands -------------------------------------------------------------


def cmd_entropy(args, cfg: RunConfig, out: Emitter) -> int:
    if args.kind == "boundary":
        if args.method == "exact":
            h = boundary.entropy_boundary_exact()
            out.emit(skew.entropy_record(None, h.coefficient, h.value, "exact"))
        else:
            seed = cfg.require_seed()
            est, se, used = walk.entropy_boundary_mc(cfg.samples, seed)
            out.emit(skew.entropy_record(None, None, est, "mc", used, se, seed))
        return 0
    t = parse_t(args.t)
    if args.method == "exact":
        h = skew.entropy_skew_exact(t)
        out.emit(skew.entropy_record(t, h.coefficient, h.value, "exact"))
    else:
        seed = cfg.require_seed()
        est, se = skew.entropy_skew_mc(t, cfg.samples, seed)
        out.emit(skew.entropy_record(t, None, est, "mc", cfg.samples, se, seed))
    return 0


def cmd_stationarity(args, cfg: RunConfig, out: Emitter) -> int:
    if cfg.depth < 1:
        raise UsageError("--depth must be >= 1")
    if args.system == "boundary":
        rep = boundary.check_stationarity(cfg.depth)
        rec = {"system": "boundary", "t": None, "depth": cfg.depth}
    else:
        t = parse_t(args.t)
        rep = skew.check_stationarity_skew(t, cfg.depth)
        rec = {"system": "skew", "t": str(t), "depth": cfg.depth}
    rec.update(rep.as_record())
    out.emit(rec)
    return 0 if rep.passed else 1


def cmd_realize(args, cfg: RunConfig, out: Emitter) -> int:
    q = parse_rational(args.q)
    try:
        t = skew.realize_entropy(q)
    except skew.OutOfRange as exc:
        raise UsageError(str(exc)) from None
    verified = skew.entropy_skew_exact(t).coefficient == q
    out.emit({"q": str(q), "t": str(t), "verified": verified})
    return 0 if verified else 1


def cmd_walk(args, cfg: RunConfig, out: Emitter) -> int:
    seed = cfg.require_seed()
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    path = walk.sample_walk(seed, args.n)
    positions = path.positions() if args.positions else None
    for k in range(path.n + 1):
        rec = {
            "k": k,
            "step": "" if k == 0 else format_letters([path.steps[k - 1]]),
            "length": int(path.lengths[k]),
        }
        if positions is not None:
            rec["position"] = str(next(positions))
        out.emit(rec)
    return 0


def cmd_harmonic_freq(args, cfg: RunConfig, out: Emitter) -> int:
    seed = cfg.require_seed()
    if cfg.depth < 1 or args.walks < 1 or args.n < 1:
        raise UsageError("--depth, --walks and --n must be >= 1")
    window = args.window if args.window is not None else walk.default_window(args.n)
    if not 1 <= window <= args.n:
        raise UsageError("--window must lie in [1, n]")
    freq, total = walk.empirical_cylinder_freq(args.walks, args.n, cfg.depth, seed, window=window)
    z = walk.cylinder_z_scores(freq, total)
    for c, f in freq.items():
        target = boundary.eta(c)
        out.emit({
            "cylinder": str(c.prefix),
            "frequency": f,
            "target": f"{target.numerator}/{target.denominator}",
            "z_score": z[c],
            "stabilized": total,
            "walks": args.walks,
        })
    return 0


def cmd_drift(args, cfg: RunConfig, out: Emitter) -> int:
    seed = cfg.require_seed()
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    out.emit({
        "seed": seed,
        "n": args.n,
        "drift": walk.drift_estimate(seed, args.n),
        "target": float(walk.birth_death_drift()),
    })
    return 0


def cmd_torus(args, cfg: RunConfig, out: Emitter) -> int:
    if args.sub == "orbit":
        orb = torus.enumerate_orbit(parse_point(args.point))
        out.emit({
            "denominator": orb.denominator,
            "size": len(orb),
            "points": [str(p) for p in orb.points],
        })
        return 0
    if args.sub == "invariance":
        ok = True
        if args.matrix:
            try:
                a, b, c, d = (int(v) for v in args.matrix.split(","))
            except ValueError:
                raise UsageError(f"malformed matrix {args.matrix!r}; expected a,b,c,d") from None
            mats = [("custom", ((a, b), (c, d)))]
        else:
            mats = [(ch, torus.GENERATORS[ch]) for ch in torus.GENERATOR_ORDER]
        for name, M in mats:
            rep = torus.check_lebesgue_invariance(M, args.max_freq)
            out.emit({"measure": "lebesgue", "matrix": name, **rep.as_record()})
            ok &= rep.passed
        for text in args.orbit or ["0,0", "1/2,0"]:
            orb = torus.enumerate_orbit(parse_point(text))
            rep = torus.check_orbit_measure_invariance(orb)
            out.emit({"measure": f"orbit {text}", "matrix": "generators", **rep.as_record()})
            ok &= rep.passed
        return 0 if ok else 1
    if args.sub == "witness":
        seed = cfg.require_seed()
        base = parse_point(args.orbit)
        space = torus.BlowupSpace.first(args.registry)
        if space.orbit_of(base) is None:
            space.orbits.append(torus.enumerate_orbit(base))
        line = torus.ProjLine(*parse_float_pair(args.line))
        start = space.fiber(base, line)
        words = torus.random_words(seed, args.words, args.steps)
        if args.words == 1:
            rep = torus.nonminimality_witness(space, torus.word_text(words[0]), start)
            out.emit({"seed": seed, "words": 1, **rep.as_record()})
            return 0 if rep.stays_in_fiber else 1
        stayed, idx, _ = torus.nonminimality_witness_batch(space, words, start)
        orb = space.orbits[start.orbit_id]
        out.emit({
            "seed": seed,
            "words": args.words,
            "stays_in_fiber": stayed,
            "orbit_id": start.orbit_id,
            "steps": args.steps,
            "visited_bases": sorted({str(orb.points[i]) for i in idx.tolist()}),
        })
        return 0 if stayed else 1
    if args.sub == "character-avg":
        seed = cfg.require_seed()
        start = torus.TorusPointReal(*parse_float_pair(args.start))
        char = parse_int_pair(args.char)
        if char == (0, 0):
            raise UsageError("--char must be nonzero")
        mod = torus.character_walk_average(seed, args.steps, start, char)
        out.emit({"seed": seed, "steps": args.steps, "start": args.start, "char": list(char), "modulus": mod})
        return 0
    raise UsageError(f"unknown torus subcommand {args.sub}")


# -- parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, fmt: str = "json") -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--output", default="-", help="file path, or - for standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stationary-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="m-entropy of the boundary or skew product")
    p.add_argument("kind", choices=("boundary", "skew"))
    p.add_argument("--t")
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=100_000)
    _common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("stationarity", help="exact stationarity check over cylinders")
    p.add_argument("--system", choices=("boundary", "skew"), required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--t")
    _common(p)
    p.set_defaults(func=cmd_stationarity)

    p = sub.add_parser("realize", help="Bernoulli parameter for a target entropy q*log 3")
    p.add_argument("--q", required=True)
    _common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("walk", help="one random-walk path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--positions", action="store_true", help="include full position words")
    _common(p, "csv")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("harmonic-freq", help="empirical harmonic measure of cylinders")
    p.add_argument("--walks", type=int, default=10_000)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--window", type=int, default=None)
    _common(p, "csv")
    p.set_defaults(func=cmd_harmonic_freq)

    p = sub.add_parser("drift", help="|w_n|/n for one walk")
    p.add_argument("--n", type=int, required=True)
    _common(p, "csv")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("torus", help="SL(2,Z) torus and its blow-up")
    tsub = p.add_subparsers(dest="sub", required=True)
    q = tsub.add_parser("orbit")
    q.add_argument("--point", required=True)
    _common(q)
    q = tsub.add_parser("invariance")
    q.add_argument("--matrix", help="a,b,c,d (any integer matrix); default: the four generators")
    q.add_argument("--max-freq", type=int, default=20)
    q.add_argument("--orbit", action="append", help="rational point whose orbit to check; repeatable")
    _common(q)
    q = tsub.add_parser("witness")
    q.add_argument("--orbit", required=True, help="rational base point x,y of the fiber bundle")
    q.add_argument("--line", default="1,0", help="starting direction u,v")
    q.add_argument("--steps", type=int, default=10_000)
    q.add_argument("--words", type=int, default=1)
    q.add_argument("--registry", type=int, default=2, help="number of orbits blown up")
    _common(q)
    q = tsub.add_parser("character-avg")
    q.add_argument("--start", required=True)
    q.add_argument("--char", required=True)
    q.add_argument("--steps", type=int, default=100_000)
    _common(q)
    p.set_defaults(func=cmd_torus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on grammar errors
    cfg = RunConfig(
        seed=args.seed,
        samples=getattr(args, "samples", 0),
        depth=getattr(args, "depth", 0),
        output=args.output,
        format=args.format,
    )
    out = Emitter(cfg)
    try:
        status = args.func(args, cfg, out)
    except (UsageError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    out.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
