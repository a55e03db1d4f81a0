"""Command-line orchestration: reproducible generation, density, frame and
verdict runs emitting canonical JSON reports.

Exit codes: 0 success, 1 operation error, 2 configuration/parse error
(including missing input files).  With a fixed seed, outputs are
byte-identical across runs: reports carry no timestamps, inputs are
referenced by content hash, and every numeric field is a decimal string.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, io_json
from .density import FolnerSpec, TestFunction, beurling_density, covolume_bounds_from_density, hull_beurling_density, weil_check
from .errors import AperioError, ConfigError
from .framekit import frame_trend_report, verdict
from .hull import grid_translates, orbit_sample, transversal_translates
from .cutproject import generate_model_set
from .rkhs import wiener_amalgam_norm


@dataclass
class Context:
    workspace: Path
    seed: int | None = None
    threads: int | None = None
    tolerance_profile: str = "default"
    input_hashes: dict[str, str] = field(default_factory=dict)

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.workspace / p

    def read_json(self, rel: str, role: str) -> dict:
        path = self.resolve(rel)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        self.input_hashes[f"{role}:{rel}"] = io_json.sha256_bytes(data)
        try:
            return json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc

    def write_json(self, rel: str | None, obj: dict) -> None:
        text = io_json.canonical_dumps(obj)
        if rel is None:
            sys.stdout.write(text)
            return
        path = self.resolve(rel)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)

    def write_text(self, rel: str | None, text: str) -> None:
        if rel is None:
            sys.stdout.write(text)
            return
        path = self.resolve(rel)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, newline="")


def _parse_box(values: list[float], dim_hint: int | None = None):
    if len(values) % 2 != 0 or not values:
        raise ConfigError("box must be given as lo hi pairs, one pair per dimension")
    box = tuple((float(values[i]), float(values[i + 1])) for i in range(0, len(values), 2))
    if dim_hint is not None and len(box) != dim_hint:
        raise ConfigError(f"box has {len(box)} dimension(s), expected {dim_hint}")
    return box


# ------------------------------------------------------------------- handlers

def handle_gen(ctx: Context, scheme: str, box: list[float], out: str | None = None) -> None:
    sch = io_json.scheme_from_jsonable(ctx.read_json(scheme, "scheme"))
    patch = generate_model_set(sch, _parse_box(box, sch.d))
    ctx.write_json(out, io_json.patch_to_jsonable(patch))


def handle_density(
    ctx: Context,
    patch: str,
    folner: list[float],
    step: float | None = None,
    extras: list[str] | None = None,
    ell: int | None = None,
    out: str | None = None,
    csv: str | None = None,
) -> None:
    base = io_json.patch_from_jsonable(ctx.read_json(patch, "patch"))
    spec = FolnerSpec(sizes=tuple(folner), translate_grid_step=step)
    if extras:
        limits = [io_json.patch_from_jsonable(ctx.read_json(e, "extra")) for e in extras]
        report = hull_beurling_density(base, spec, limits)
    else:
        report = beurling_density(base, spec)
    if ell is not None:
        b = covolume_bounds_from_density(report, ell)
        report = dataclasses.replace(
            report, covolume_bounds=(b.covol_minus_lo, b.covol_plus_hi)
        )
    obj = io_json.density_report_to_jsonable(report, ctx.seed, ctx.input_hashes)
    ctx.write_json(out, obj)
    if csv:
        ctx.write_text(csv, io_json.emit_csv(obj, ["n", "inf", "sup"]))


def handle_hull_sample(
    ctx: Context,
    patch: str,
    k_box: list[float],
    translates: str = "own",
    grid_step: float | None = None,
    limit: int | None = None,
    out: str | None = None,
) -> None:
    base = io_json.patch_from_jsonable(ctx.read_json(patch, "patch"))
    kb = _parse_box(k_box, base.dim)
    if translates == "own":
        vecs = transversal_translates(base, kb)
    elif translates == "grid":
        if grid_step is None:
            raise ConfigError("grid translates need --grid-step")
        vecs = grid_translates(base, kb, grid_step)
    else:
        raise ConfigError(f"unknown translate mode {translates!r}")
    if limit is not None:
        vecs = vecs[:limit]
    samples = orbit_sample(base, vecs, kb)
    ctx.write_json(out, io_json.patch_list_to_jsonable(samples))


def handle_frame(
    ctx: Context,
    kernel: str,
    patch: str,
    truncations: list[float],
    margin_frac: float = 0.25,
    out: str | None = None,
    csv: str | None = None,
) -> None:
    kern = io_json.kernel_from_jsonable(ctx.read_json(kernel, "kernel"))
    base = io_json.patch_from_jsonable(ctx.read_json(patch, "patch"))
    report = frame_trend_report(kern, base, truncations, margin_frac=margin_frac)
    obj = io_json.frame_report_to_jsonable(report, ctx.seed, ctx.input_hashes)
    ctx.write_json(out, obj)
    if csv:
        ctx.write_text(csv, io_json.emit_csv(obj, ["truncation", "A", "B"]))


def handle_verdict(
    ctx: Context,
    kernel: str,
    density: str,
    ell: int = 1,
    tol: float | None = None,
    relatively_dense: bool = False,
    out: str | None = None,
) -> None:
    kern = io_json.kernel_from_jsonable(ctx.read_json(kernel, "kernel"))
    report = io_json.density_report_from_jsonable(ctx.read_json(density, "density"))
    if ctx.tolerance_profile == "strict" and tol is None:
        tol = 0.0
    v = verdict(kern, report, ell=ell, tol=tol, relatively_dense=relatively_dense)
    ctx.write_json(out, io_json.verdict_report_to_jsonable(v, ctx.seed, ctx.input_hashes))


def handle_weil_check(
    ctx: Context,
    scheme: str,
    function: str = "triangle",
    quadrature_n: int = 10_000,
    trunc: float = 8.0,
    out: str | None = None,
) -> None:
    sch = io_json.scheme_from_jsonable(ctx.read_json(scheme, "scheme"))
    f = TestFunction(kind=function, trunc=trunc)
    residual = weil_check(sch, f, quadrature_n)
    ctx.write_json(
        out,
        io_json.weil_report_to_jsonable(residual, quadrature_n, function, ctx.seed, ctx.input_hashes),
    )


def handle_amalgam(
    ctx: Context,
    kernel: str,
    q: float,
    trunc: float,
    step: float,
    out: str | None = None,
) -> None:
    kern = io_json.kernel_from_jsonable(ctx.read_json(kernel, "kernel"))
    norm = wiener_amalgam_norm(kern, q, trunc, step)
    ctx.write_json(
        out,
        io_json.amalgam_report_to_jsonable(norm, q, trunc, step, ctx.seed, ctx.input_hashes),
    )


def handle_csv(ctx: Context, report: str, columns: str, out: str | None = None) -> None:
    obj = ctx.read_json(report, "report")
    cols = [c.strip() for c in columns.split(",") if c.strip()]
    try:
        text = io_json.emit_csv(obj, cols)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ctx.write_text(out, text)


HANDLERS = {
    "gen": handle_gen,
    "density": handle_density,
    "hull-sample": handle_hull_sample,
    "frame": handle_frame,
    "verdict": handle_verdict,
    "weil-check": handle_weil_check,
    "amalgam": handle_amalgam,
    "csv": handle_csv,
}

# step args that name input files, for run-config validation
_INPUT_ARGS = {"scheme", "patch", "kernel", "density", "report", "extras"}


def handle_run(ctx: Context, config: str) -> None:
    cfg = ctx.read_json(config, "config")
    steps = cfg.get("steps")
    if not isinstance(steps, list) or not steps:
        raise ConfigError("config needs a non-empty 'steps' list")
    if ctx.seed is None and "seed" in cfg:
        ctx.seed = int(cfg["seed"])
    produced: set[str] = set()
    for i, step in enumerate(steps):
        cmd = step.get("command")
        if cmd not in HANDLERS or cmd == "run":
            raise ConfigError(f"step {i}: unknown command {cmd!r}")
        args = step.get("args", {})
        if not isinstance(args, dict):
            raise ConfigError(f"step {i}: args must be an object")
        for key, value in args.items():
            if key not in _INPUT_ARGS:
                continue
            names = value if isinstance(value, list) else [value]
            for name in names:
                if name in produced:
                    continue
                if not ctx.resolve(name).is_file():
                    raise ConfigError(f"step {i}: input file {name!r} does not exist")
        for key in ("out", "csv"):
            if args.get(key):
                produced.add(args[key])
    for step in steps:
        HANDLERS[step["command"]](ctx, **step.get("args", {}))


# ------------------------------------------------------------------ arg parse

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aperio",
        description="Point-set densities, covolumes and reproducing-kernel frame diagnostics.",
    )
    parser.add_argument("--version", action="version", version=f"aperio {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="seed recorded in report provenance")
    parser.add_argument("--workspace", default=".", help="root for relative file paths")
    parser.add_argument("--threads", type=int, default=None, help="reserved; BLAS threading applies")
    parser.add_argument(
        "--tolerance-profile",
        choices=("strict", "default"),
        default="default",
        help="strict sets verdict tolerance to 0 unless given explicitly",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a model-set patch from a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--box", type=float, nargs="+", required=True, metavar="LO HI")
    p.add_argument("--out")

    p = sub.add_parser("density", help="Beurling density report along Folner boxes")
    p.add_argument("--patch", required=True)
    p.add_argument("--folner", required=True, help="comma-separated sizes, e.g. 5,10,20,40")
    p.add_argument("--step", type=float, default=None, help="translate grid step (d >= 2)")
    p.add_argument("--extras", nargs="*", default=None, help="injected limit patches (hull estimate)")
    p.add_argument("--ell", type=int, default=None, help="attach covolume bounds for this ell")
    p.add_argument("--out")
    p.add_argument("--csv")

    p = sub.add_parser("hull-sample", help="translate-orbit samples on a compact window")
    p.add_argument("--patch", required=True)
    p.add_argument("--k-box", dest="k_box", type=float, nargs="+", required=True)
    p.add_argument("--translates", choices=("own", "grid"), default="own")
    p.add_argument("--grid-step", dest="grid_step", type=float, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out")

    p = sub.add_parser("frame", help="Riesz/sampling bound trends over nested truncations")
    p.add_argument("--kernel", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--truncations", required=True, help="comma-separated half-widths, e.g. 20,40,80")
    p.add_argument("--margin-frac", dest="margin_frac", type=float, default=0.25)
    p.add_argument("--out")
    p.add_argument("--csv")

    p = sub.add_parser("verdict", help="necessary-density verdicts from a density report")
    p.add_argument("--kernel", required=True)
    p.add_argument("--density", required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--relatively-dense", dest="relatively_dense", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("weil-check", help="lattice periodization identity residual")
    p.add_argument("--scheme", required=True)
    p.add_argument("--function", choices=("triangle", "gaussian"), default="triangle")
    p.add_argument("--quadrature-n", dest="quadrature_n", type=int, default=10_000)
    p.add_argument("--trunc", type=float, default=8.0)
    p.add_argument("--out")

    p = sub.add_parser("amalgam", help="local-maximum-function norm of the kernel")
    p.add_argument("--kernel", required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--trunc", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("csv", help="render a report JSON as CSV")
    p.add_argument("--report", required=True)
    p.add_argument("--columns", required=True)
    p.add_argument("--out")

    p = sub.add_parser("run", help="execute an experiment config")
    p.add_argument("--config", required=True)

    return parser


def _csv_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = Context(
        workspace=Path(args.workspace),
        seed=args.seed,
        threads=args.threads,
        tolerance_profile=args.tolerance_profile,
    )
    kwargs = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "seed", "workspace", "threads", "tolerance_profile")
    }
    if "folner" in kwargs:
        kwargs["folner"] = _csv_floats(kwargs["folner"])
    if "truncations" in kwargs:
        kwargs["truncations"] = _csv_floats(kwargs["truncations"])
    try:
        HANDLERS.get(args.command, handle_run)(ctx, **kwargs)
    except ConfigError as exc:
        print(f"aperio: config error: {exc}", file=sys.stderr)
        return 2
    except AperioError as exc:
        print(f"aperio: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"aperio: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
