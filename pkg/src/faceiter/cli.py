"""Command-line front end.

Exit codes: 0 success, 1 parse/validation error, 2 size-guard refusal,
3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from typing import Sequence

from . import analysis, generators, kunz
from .atomset import AtomSet
from .errors import ConsistencyError, InputError, SizeGuardError, StructureError
from .iterator import FaceIterator, FaceRecord, IterStats, parallel_run
from .lattice_io import (
    LatticeInput,
    dualize,
    far_face_mode,
    fix,
    parse,
    render,
    validate,
)

EXIT_INPUT, EXIT_GUARD, EXIT_CONSISTENCY = 1, 2, 3


# --- input handling -------------------------------------------------------------

def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_inputs(args, check: bool = True) -> list[LatticeInput]:
    """One input, or several when the document is a JSON array (a complex)."""
    text = _read_text(args.input)
    if text.lstrip().startswith("["):
        try:
            docs = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        inputs = [parse(json.dumps(d), "json", check) for d in docs]
    else:
        inputs = [parse(text, args.format, check)]
    return [_apply_flags(inp, args) for inp in inputs]


def _parse_far_face(spec: str, n: int) -> AtomSet:
    try:
        idx = [int(t) for t in spec.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"--far-face expects atom indices, got {spec!r}") from None
    return AtomSet.from_indices(n, idx)


def _apply_flags(inp: LatticeInput, args) -> LatticeInput:
    if getattr(args, "far_face", None):
        inp = far_face_mode(inp, _parse_far_face(args.far_face, inp.n_atoms))
    if getattr(args, "dual", False):
        inp = dualize(inp)
    if getattr(args, "lex_sort", False):
        inp = inp.lex_sorted()
    if getattr(args, "no_top", False):
        inp = inp.with_top(False)
    return inp


def _fmt_record(rec: FaceRecord) -> str:
    atoms = " ".join(map(str, rec.atoms.indices())) if rec.atoms else "{}"
    return f"{rec.depth} {atoms}"


def _print_stats(stats: IterStats, out) -> None:
    print("stats " + " ".join(f"{k}={v}" for k, v in stats.as_dict().items()), file=out)


def _records(inp: LatticeInput, tasks: int):
    """``(records iterable, stats getter)``; streams when single-task."""
    if tasks > 1:
        recs, st = parallel_run(inp, tasks)
        return recs, lambda: st
    it = FaceIterator(inp)
    return it, lambda: it.stats


# --- verbs -----------------------------------------------------------------------

def cmd_faces(args) -> int:
    out = sys.stdout
    for inp in _read_inputs(args):
        recs, stats = _records(inp, args.tasks)
        if args.sorted:
            recs = sorted(recs, key=lambda r: (r.depth, r.atoms.sort_key()))
        for rec in recs:
            out.write(_fmt_record(rec) + "\n")
        if args.stats:
            _print_stats(stats(), sys.stderr)
    return 0


def cmd_fvector(args) -> int:
    for inp in _read_inputs(args):
        if args.tasks > 1:
            recs, st = parallel_run(inp, args.tasks)
            counts = Counter(r.depth for r in recs)
            print(" ".join(str(counts[d]) for d in sorted(counts)))
            if args.stats:
                _print_stats(st, sys.stderr)
            continue
        if args.stats:
            counts, st, _ = analysis.depth_counts(inp, args.engine)
            print(" ".join(str(counts[d]) for d in sorted(counts)))
            _print_stats(st, sys.stderr)
            continue
        # --dual was already applied by the flags, so no automatic flip here
        auto = None if not args.dual else False
        print(analysis.f_vector(inp, dual=auto, engine=args.engine))
    return 0


def cmd_hasse(args) -> int:
    for inp in _read_inputs(args):
        if args.ungraded:
            diagram = analysis.cover_relations_ungraded(inp)
        else:
            diagram = analysis.cover_relations_graded(inp)
        sys.stdout.write(diagram.to_json() + "\n" if args.json else diagram.to_text())
    return 0


def cmd_check(args) -> int:
    status = 0
    for inp in _read_inputs(args, check=False):
        if args.fix:
            inp = fix(inp)
        report = validate(inp)
        for line in report.lines():
            print(line)
        print("valid" if report.ok else "invalid")
        if not report.ok:
            status = EXIT_INPUT
            continue
        if args.oracle:
            faces = analysis.brute_force_faces(inp)
            branched, atomic_all, coatomic_all = analysis.branching_equivalence(faces)
            print(f"locally branched: {'yes' if branched else 'no'}")
            print(f"atomic: {'yes' if analysis.is_atomic(faces) else 'no'}")
            print(f"coatomic: {'yes' if analysis.is_coatomic(faces) else 'no'}")
            print(f"every interval atomic: {'yes' if atomic_all else 'no'}")
            print(f"every interval coatomic: {'yes' if coatomic_all else 'no'}")
        if args.fix:
            sys.stdout.write(render(inp, args.output_format))
    return status


def cmd_gen(args) -> int:
    try:
        params = tuple(int(p) for p in args.params)
    except ValueError:
        raise InputError(f"generator parameters must be integers: {args.params}") from None
    result = generators.generate(generators.GeneratorSpec(args.family, params))
    if isinstance(result, list):
        if args.output_format != "json":
            raise InputError("a complex can only be written as a JSON array")
        print(json.dumps([r.as_lists() for r in result]))
    else:
        sys.stdout.write(render(result, args.output_format).rstrip("\n") + "\n")
    return 0


def cmd_dual(args) -> int:
    for inp in _read_inputs(args):
        sys.stdout.write(render(dualize(inp), args.output_format).rstrip("\n") + "\n")
    return 0


def cmd_kunz_rays(args) -> int:
    rays = kunz.enumerate_rays(args.m, args.method, args.max_m)
    if args.output:
        kunz.write_ray_file(args.output, args.m, rays)
        print(f"{len(rays)} rays written to {args.output}")
    else:
        print(f"m {args.m} rays {len(rays)}")
        for r in rays:
            print(" ".join(map(str, r)))
    return 0


def cmd_kunz_bad(args) -> int:
    rays = None
    if args.rays:
        m, rays = kunz.read_ray_file(args.rays)
        if m != args.m:
            raise InputError(f"{args.rays} holds rays for m={m}, not m={args.m}")
    filters = kunz.Filters(not args.no_2e, not args.no_e_gt_t, args.use_3e)
    cone = kunz.build_cone(args.m, rays, max_m=args.max_m)
    count, census = kunz.count_bad_orbits(args.m, filters, cone=cone, workers=args.tasks)
    print(f"bad orbits: {count}")
    if args.census:
        kunz.write_census(args.census, census)
    if args.oracle:
        ref = kunz.count_bad_orbits_oracle(args.m, filters, rays=cone.rays)
        print(f"oracle bad orbits: {ref}")
        if ref != count:
            raise ConsistencyError(f"symmetry-pruned count {count} != oracle count {ref}")
    return 0


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="faceiter",
        description="Iterate faces of locally branched lattices given by coatom incidences.",
        epilog="exit codes: 1 bad input, 2 size guard refused, 3 internal consistency failure",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="verb", required=True)

    def reader(name, help_):
        q = sub.add_parser(name, help=help_)
        q.add_argument("input", nargs="?", help="input file (default: stdin)")
        q.add_argument("--format", choices=("auto", "json", "text"), default="auto")
        q.add_argument("--far-face", metavar="ATOMS", help="ignore faces inside these atoms")
        q.add_argument("--dual", action="store_true", help="iterate the opposite lattice")
        q.add_argument("--lex-sort", action="store_true", help="sort coatoms lexicographically")
        q.add_argument("--no-top", action="store_true", help="do not emit the top")
        return q

    def tasks(q):
        q.add_argument("--tasks", type=int, default=1, metavar="N", help="split over N workers")
        q.add_argument("--stats", action="store_true", help="print run statistics to stderr")

    q = reader("faces", "stream every face as 'depth atoms'")
    tasks(q)
    q.add_argument("--sorted", action="store_true", help="sort output by depth, then atoms")
    q.set_defaults(func=cmd_faces)

    q = reader("fvector", "print the level counts, top first")
    tasks(q)
    q.add_argument("--engine", choices=("auto", "kernel", "python"), default="auto")
    q.set_defaults(func=cmd_fvector)

    q = reader("hasse", "print the cover relations")
    q.add_argument("--ungraded", action="store_true", help="use the builder for non-graded lattices")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_hasse)

    q = reader("check", "validate an input")
    q.add_argument("--oracle", action="store_true", help="also run the brute-force lattice checks")
    q.add_argument("--fix", action="store_true", help="repair, then print the repaired input")
    q.add_argument("--output-format", choices=("json", "text"), default="json")
    q.set_defaults(func=cmd_check)

    q = reader("dual", "print the transposed input")
    q.add_argument("--output-format", choices=("json", "text"), default="json")
    q.set_defaults(func=cmd_dual)

    q = sub.add_parser("gen", help="print a generator family as an input document")
    q.add_argument("family", choices=sorted(generators.FAMILIES))
    q.add_argument("params", nargs="*")
    q.add_argument("--output-format", choices=("json", "text"), default="json")
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("kunz-rays", help="extreme rays of the Kunz cone")
    q.add_argument("m", type=int)
    q.add_argument("--method", choices=("dd", "rank"), default="dd")
    q.add_argument("--max-m", type=int, default=None, help="raise the size guard")
    q.add_argument("-o", "--output", help="write a ray file instead of stdout")
    q.set_defaults(func=cmd_kunz_rays)

    q = sub.add_parser("kunz-bad", help="count bad face orbits of the Kunz cone")
    q.add_argument("m", type=int)
    q.add_argument("--rays", help="ray file (required above the size guard)")
    q.add_argument("--census", help="write one line per bad orbit to this file")
    q.add_argument("--max-m", type=int, default=None)
    q.add_argument("--no-2e", action="store_true", help="disable the 2e >= m filter")
    q.add_argument("--no-e-gt-t", action="store_true", help="disable the e > t filter")
    q.add_argument("--use-3e", action="store_true", help="enable the 3e >= m filter")
    q.add_argument("--oracle", action="store_true", help="cross-check without symmetry")
    q.add_argument("--tasks", type=int, default=1, metavar="N", help="worker processes")
    q.set_defaults(func=cmd_kunz_bad)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s: %(message)s",
    )
    if getattr(args, "tasks", 1) < 1:
        print("error: --tasks must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except BrokenPipeError:
        return 0


def main() -> None:
    sys.exit(run())
