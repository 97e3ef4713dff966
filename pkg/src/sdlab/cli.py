"""Command-line entry point: ``sdlab <command> [options]``.

Exit status is 0 on success, 2 when a numerical solver fails and 3 on
invalid input (including usage errors). Errors are reported on stderr as a
one-line JSON object.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import render as R
from .config import profile
from .errors import InvalidInput, SdlError, SolverError

EXIT_OK, EXIT_SOLVER, EXIT_INPUT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


def parse_complex(s: str) -> complex:
    try:
        parts = [float(x) for x in s.split(",")]
    except ValueError:
        raise InvalidInput(f"expected RE,IM but got {s!r}") from None
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) != 2:
        raise InvalidInput(f"expected RE,IM but got {s!r}")
    return complex(parts[0], parts[1])


def read_config(path: str) -> dict:
    """key=value lines; blank lines and lines starting with # are skipped."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise InvalidInput(f"cannot read config {path}: {exc.strerror}") from None
    with fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def fmt_num(x) -> str:
    x = complex(x)
    re = f"{x.real:.10g}"
    if abs(x.imag) < 1e-12:
        return re
    return f"{re}{x.imag:+.10g}i"


def _window(args, default_center, default_width):
    c = parse_complex(args.center) if args.center else default_center
    w = args.width if args.width else default_width
    return R.RenderJob(args.command, c, w, None, (args.size, args.size), args.max_iter)


def _write(args, data, default_name):
    path = args.out or default_name
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)
    return path


def _emit(args, payload: dict):
    text = R.dumps_json(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_render_cs(args):
    job = _window(args, complex(0.05, 0.0), 0.7)
    rgb, grid = R.render_cs_locus(job, args.tol)
    path = _write(args, R.to_png_bytes(rgb), "cs_locus.png")
    print(f"wrote {path}")


def cmd_render_dyn(args):
    a = parse_complex(args.a)
    job = _window(args, complex(0.25, 0.0), 3.0)
    rgb, _ = R.render_dynamical_plane(a, job, args.tol)
    path = _write(args, R.to_png_bytes(rgb), "dynamical_plane.png")
    print(f"wrote {path}")


def _overlay_angles(args):
    return [Fraction(x) for x in args.rays.split(",")] if args.rays else []


def cmd_render_tricorn(args):
    job = _window(args, complex(-0.3, 0.0), 4.0)
    job.overlays = _overlay_angles(args)
    rgb, _ = R.render_tricorn(job)
    path = _write(args, R.to_png_bytes(rgb), "tricorn.png")
    print(f"wrote {path}")


def cmd_render_limb(args):
    job = _window(args, R.BASILICA_LIMB["center"], R.BASILICA_LIMB["width"])
    job.overlays = _overlay_angles(args) or [Fraction(1, 3), Fraction(2, 3)]
    rgb, _ = R.render_basilica_limb(job)
    path = _write(args, R.to_png_bytes(rgb), "basilica_limb.png")
    print(f"wrote {path}")


def _itinerary_or_angle(text):
    from .coding import itinerary_of_rational, parse_angle, parse_itinerary

    if "|" in text:
        return parse_itinerary(text)
    return itinerary_of_rational(parse_angle(text))


def cmd_ray(args):
    from .coding import format_angle, parse_angle, rational_from_itinerary

    if args.family == "s":
        from . import schwarz as S

        if args.a is None:
            raise InvalidInput("--a is required for the reflection family")
        m = S.SchwarzMap.at(parse_complex(args.a), args.tol)
        it = _itinerary_or_angle(args.angle)
        tr = S.trace_dynamical_ray(m, it, args.depth)
        end = tr.landing_estimate
        payload = {"family": "s", "a": [m.a.real, m.a.imag], "itinerary": str(it),
                   "angle": format_angle(rational_from_itinerary(it)), "depth": args.depth,
                   "landing": [end.real, end.imag], "cauchy_gap": tr.cauchy_gap}
    else:
        from . import tricorn as T

        theta = parse_angle(args.angle)
        if args.c is None:
            rp = T.trace_parameter_ray(theta)
            kind = "parameter"
        else:
            rp = T.trace_dynamical_ray(parse_complex(args.c), theta, args.depth)
            kind = "dynamical"
        end = rp.landing_estimate
        payload = {"family": "t", "kind": kind, "angle": format_angle(theta), "depth": args.depth,
                   "landing": [end.real, end.imag], "cauchy_gap": rp.cauchy_gap}
    _emit(args, payload)


def cmd_center(args):
    seed = parse_complex(args.seed)
    if args.family == "s":
        from .schwarz import find_center

        a = find_center(args.period, seed, args.tol)
        print(f"a={fmt_num(a)}")
    else:
        from .tricorn import find_center

        c = find_center(args.period, seed, args.tol)
        print(f"c={fmt_num(c)}")


def cmd_chi(args):
    from .straightening import chi_center

    res = chi_center(parse_complex(args.a))
    print(f"c={fmt_num(res.c)}")
    if args.out:
        _emit(args, res.to_json())


def cmd_index_exp(args):
    from .straightening import index_experiment

    _emit(args, index_experiment())


def cmd_lamination(args):
    from .portraits import parameter_lamination

    which = {"cs": "CS_model", "l": "L_model"}[args.which]
    lam = parameter_lamination(args.max_period, which)
    if args.out and args.out.endswith(".svg"):
        svg, _ = R.render_lamination_disk(lam)
        _write(args, svg, "")
    elif args.out and args.out.endswith(".png"):
        _, rgb = R.render_lamination_disk(lam, R.RenderJob("lamination_disk", 0j, 2.2, None, (args.size, args.size)))
        _write(args, R.to_png_bytes(rgb), "")
    else:
        _emit(args, {"which": which, "max_period": args.max_period, **lam.to_json()})


def cmd_scan(args):
    try:
        x0, x1, y0, y1, nx, ny = args.grid.split(",")
        x0, x1, y0, y1 = (float(v) for v in (x0, x1, y0, y1))
        nx, ny = int(nx), int(ny)
    except ValueError:
        raise InvalidInput("--grid expects XMIN,XMAX,YMIN,YMAX,NX,NY") from None
    if not (x1 > x0 and y1 > y0):
        raise InvalidInput("--grid window is degenerate")
    job = R.RenderJob("scan", complex((x0 + x1) / 2, (y0 + y1) / 2), x1 - x0, y1 - y0, (nx, ny), args.max_iter)
    text = R.rows_to_csv(R.scan_rows(job, args.tol))
    if args.out:
        _write(args, text, "")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# parser


def _global_flags(default) -> argparse.ArgumentParser:
    # the sub-command copies use SUPPRESS so they do not clobber values given before the command
    g = _Parser(add_help=False)
    g.add_argument("--out", default=default, help="output file")
    g.add_argument("--config", default=default, help="file of key=value defaults")
    g.add_argument("--threads", type=int, default=default, help="worker threads (default: $SDL_THREADS)")
    g.add_argument("--max-iter", type=int, default=default)
    g.add_argument("--tol-profile", default=default, help="default, fast or strict")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(argparse.SUPPRESS)
    p = _Parser(prog="sdlab", description=__doc__.splitlines()[0], parents=[_global_flags(None)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def render_cmd(name, fn):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--center", default=None, help="RE,IM")
        s.add_argument("--width", type=float, default=None)
        s.add_argument("--size", type=int, default=512)
        s.set_defaults(func=fn)
        return s

    render_cmd("render-cs", cmd_render_cs)
    render_cmd("render-dyn", cmd_render_dyn).add_argument("--a", required=True, help="RE,IM")
    render_cmd("render-tricorn", cmd_render_tricorn).add_argument("--rays", default=None, help="angles p/q,p/q")
    render_cmd("render-limb", cmd_render_limb).add_argument("--rays", default=None, help="angles p/q,p/q")

    s = sub.add_parser("ray", parents=[common])
    s.add_argument("--family", choices=["s", "t"], required=True)
    s.add_argument("--angle", required=True, help="p/q, or an itinerary PRE|PERIOD for the reflection family")
    s.add_argument("--depth", type=int, default=40)
    s.add_argument("--a", default=None, help="RE,IM (reflection family)")
    s.add_argument("--c", default=None, help="RE,IM (anti-polynomial dynamical ray; omit for a parameter ray)")
    s.set_defaults(func=cmd_ray)

    s = sub.add_parser("center", parents=[common])
    s.add_argument("--family", choices=["s", "t"], required=True)
    s.add_argument("--period", type=int, required=True)
    s.add_argument("--seed", required=True, help="RE,IM")
    s.set_defaults(func=cmd_center)

    s = sub.add_parser("chi", parents=[common])
    s.add_argument("--a", required=True, help="RE,IM")
    s.set_defaults(func=cmd_chi)

    s = sub.add_parser("index-exp", parents=[common])
    s.set_defaults(func=cmd_index_exp)

    s = sub.add_parser("lamination", parents=[common])
    s.add_argument("--which", choices=["cs", "l"], required=True)
    s.add_argument("--max-period", type=int, default=6)
    s.add_argument("--size", type=int, default=512)
    s.set_defaults(func=cmd_lamination)

    s = sub.add_parser("scan", parents=[common])
    s.add_argument("--grid", required=True, help="XMIN,XMAX,YMIN,YMAX,NX,NY")
    s.set_defaults(func=cmd_scan)
    return p


def _apply_config(args):
    conf = read_config(args.config) if args.config else {}
    for key in ("out", "threads", "max_iter", "tol_profile"):
        if getattr(args, key, None) is None and key in conf:
            setattr(args, key, conf[key])
    if args.threads is None and os.environ.get("SDL_THREADS"):
        args.threads = os.environ["SDL_THREADS"]
    try:
        args.threads = int(args.threads) if args.threads is not None else None
        args.max_iter = int(args.max_iter) if args.max_iter is not None else 500
    except ValueError:
        raise InvalidInput("threads and max_iter must be integers") from None
    if args.max_iter < 1:
        raise InvalidInput("max_iter must be positive")
    try:
        args.tol = profile(args.tol_profile or "default")
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    R.set_threads(args.threads)


def _fail(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _apply_config(args)
        args.func(args)
    except InvalidInput as exc:
        return _fail(exc, EXIT_INPUT)
    except (SolverError, ArithmeticError) as exc:
        return _fail(exc, EXIT_SOLVER)
    except SdlError as exc:
        return _fail(exc, EXIT_SOLVER)
    except (ValueError, KeyError) as exc:
        return _fail(exc, EXIT_INPUT)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
