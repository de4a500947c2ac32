"""Command-line front end.

Exit codes: 0 ok, 1 negative verdict (not realizable / verification failed),
2 heuristic exhausted, 3 input error.  Reports are ``key=value`` lines.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .builder import HeuristicExhausted, RealizationCertificate, builder_M, diagram_svg, realize, surface_svg
from .chi import NotRealizable, Partition, PeriodVector, decide, haupt_decide, image_group
from .field import FieldContext, format_quad, parse_quad
from .sp_action import generic_normalize_heuristic, genus2_normalize, lattice_normal_form
from .surface import TranslationSurface, verify_certificate

EXIT_OK, EXIT_NEGATIVE, EXIT_EXHAUSTED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_chi(args) -> PeriodVector:
    if not args.chi:
        raise InputError("--chi FILE is required")
    try:
        chi = PeriodVector.from_text(_read(args.chi))
    except InputError:
        raise
    except Exception as e:
        raise InputError(f"{args.chi}: {e}") from e
    if args.field_d is None:
        return chi
    ctx = FieldContext(args.field_d)
    for k, z in enumerate(chi.entries):
        for x in (z.re, z.im):
            try:
                ctx.check(x)
            except ValueError as e:
                raise InputError(f"{args.chi}: entry {k + 1}: {e}") from e
    return chi


def _load_partition(args, g: int, required: bool):
    if not args.partition:
        if required:
            raise InputError("--partition is required")
        return None
    try:
        part = Partition.parse(args.partition)
    except ValueError as e:
        raise InputError(f"--partition: {e}") from e
    if part.genus != g:
        raise InputError(f"--partition {args.partition} has genus {part.genus}, character has genus {g}")
    return part


def _verdict_lines(v) -> str:
    lines = [f"verdict={'REALIZABLE' if v else 'NOT_REALIZABLE'}"]
    if isinstance(v, NotRealizable):
        lines.append(f"reason={v.reason}")
    lines.append(f"volume={format_quad(v.volume)}")
    lines.append(f"image={v.image.classification}")
    if v.image.covolume is not None:
        lines.append(f"covolume={format_quad(v.image.covolume)}")
    if isinstance(v, NotRealizable) and v.deficit is not None:
        lines.append(f"deficit={format_quad(v.deficit)}")
    return "\n".join(lines) + "\n"


def cmd_decide(args) -> int:
    chi = _load_chi(args)
    part = _load_partition(args, chi.genus, required=False)
    v = decide(chi, part) if part else haupt_decide(chi)
    sys.stdout.write(_verdict_lines(v))
    return EXIT_OK if v else EXIT_NEGATIVE


def cmd_normalize(args) -> int:
    chi = _load_chi(args)
    part = _load_partition(args, chi.genus, required=False)
    if image_group(chi).is_lattice:
        m = [2] * (chi.genus - 2) if part is not None and len(part) == 1 else None
        res = lattice_normal_form(chi, m)
    elif chi.genus == 2:
        res = genus2_normalize(chi)
    else:
        M = args.M if args.M is not None else (builder_M(part) if part else 1)
        res = generic_normalize_heuristic(chi, M, max_steps=args.max_steps, seed=args.seed)
        if res is None:
            sys.stdout.write(f"status=HEURISTIC_EXHAUSTED\nmax_steps={args.max_steps}\nseed={args.seed}\n")
            return EXIT_EXHAUSTED
    _write(args.out, res.to_text())
    return EXIT_OK


def cmd_realize(args) -> int:
    chi = _load_chi(args)
    part = _load_partition(args, chi.genus, required=True)
    res = realize(chi, part, M=args.M, max_steps=args.max_steps, seed=args.seed)
    if isinstance(res, NotRealizable):
        sys.stdout.write(_verdict_lines(res))
        return EXIT_NEGATIVE
    if isinstance(res, HeuristicExhausted):
        sys.stdout.write(f"status=HEURISTIC_EXHAUSTED\nmax_steps={res.max_steps}\nseed={res.seed}\n")
        return EXIT_EXHAUSTED
    _write(args.out, res.to_text())
    if args.svg:
        Path(args.svg).write_text(diagram_svg(res.diagram) if res.diagram else surface_svg(res.surface))
    if args.out not in (None, "-"):
        sys.stdout.write(f"status=CERTIFIED\nstratum={part}\nout={args.out}\n")
    return EXIT_OK


def _verify_one(path: str):
    try:
        cert = RealizationCertificate.from_text(_read(path))
    except Exception as e:
        return path, None, f"{e}"
    return path, verify_certificate(cert).to_text(), None


def cmd_verify(args) -> int:
    paths = args.files
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_verify_one, paths))
    else:
        results = [_verify_one(p) for p in paths]
    code = EXIT_OK
    for path, report, err in results:
        if len(paths) > 1:
            sys.stdout.write(f"file={path}\n")
        if err is not None:
            sys.stderr.write(f"error: {path}: {err}\n")
            code = max(code, EXIT_INPUT)
            continue
        sys.stdout.write(report)
        if "verdict=VERIFIED" not in report:
            code = max(code, EXIT_NEGATIVE)
    return code


def cmd_render(args) -> int:
    text = _read(args.file)
    head = text.lstrip().split("\n", 1)[0].strip()
    try:
        if head.startswith("CERTIFICATE"):
            surf = RealizationCertificate.from_text(text).surface
        else:
            surf, _ = TranslationSurface.from_text(text)
    except Exception as e:
        raise InputError(f"{args.file}: {e}") from e
    _write(args.out, surface_svg(surf))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatperiods", description="Periods of translation surfaces in prescribed strata.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--chi", help="period vector file ('genus g' then 2g lines '(re, im)')")
        p.add_argument("--field-d", type=int, default=None,
                       help="require entries in Q(sqrt(d)) (default: the field the entries generate)")
        p.add_argument("--partition", help='zero orders "n1,n2,..."')

    def search(p):
        p.add_argument("--M", type=parse_quad, default=None, help="scale in the generic-form check")
        p.add_argument("--max-steps", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decide", help="decide realizability")
    common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("normalize", help="reduce to a normal form")
    common(p)
    search(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("realize", help="build a certified surface")
    common(p)
    search(p)
    p.add_argument("--out", help="certificate file (default stdout)")
    p.add_argument("--svg", help="also write a picture of the slit diagram")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="re-check certificates")
    p.add_argument("files", nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="draw a TSURF file or certificate as SVG")
    p.add_argument("file")
    p.add_argument("--out", help="SVG file (default stdout)")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except ValueError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
