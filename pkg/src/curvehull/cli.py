"""Command-line front end: job-file parsing, subcommand dispatch, and
human- or machine-readable reports.

Job files are JSON documents (see JOB_SCHEMA); unknown keys are
rejected.  Subcommands: relax, member, recession, certify.  Exit codes:
0 success/Exact/Inside, 2 Approximate, 3 Outside, 1 errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import jsonschema
import numpy as np

from . import pipeline
from .geometry import GapReport, membership, restrict_pencil, uniform_directions
from .pipeline import (CurveJob, NormalizationComponent, PipelineError,
                       augment_presentation, closed_hull_noncompact,
                       is_compact_sampled, recession_fan, relax_job)
from .poly import PolyError, parse_poly
from .relaxation import RelaxationError
from .rings import RingError

_NORMALIZATION_ITEM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["defining_poly", "variables", "phi_map"],
    "properties": {
        "defining_poly": {"type": "string"},
        "variables": {"type": "array", "items": {"type": "string"},
                      "minItems": 2, "maxItems": 2},
        "phi_map": {"type": "object",
                    "additionalProperties": {"type": "string"}},
    },
}

JOB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["variables"],
    "properties": {
        "name": {"type": "string"},
        "variables": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "curve": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "defining_poly": {"type": "string"},
                "components": {"type": "array", "items": _NORMALIZATION_ITEM},
            },
        },
        "normalization": {"type": "array", "items": _NORMALIZATION_ITEM},
        "isolated_points": {
            "type": "array",
            "items": {"type": "array", "items": {"type": ["number", "string"]}},
        },
        "generators": {"type": "array", "items": {"type": "string"}},
        "level": {"type": "integer", "minimum": 1},
        "max_level": {"type": "integer", "minimum": 1},
        "subspaces": {
            "type": "array",
            "items": {"type": "array",
                      "items": {"type": "array", "items": {"type": "string"}}},
        },
        "box": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "number"},
                                     "minItems": 2, "maxItems": 2},
        },
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "directions": {"type": "integer", "minimum": 4},
        "grid": {"type": "integer", "minimum": 2},
        "seed": {"type": "integer"},
        "noncompact": {"type": "boolean"},
    },
}


class JobFileError(ValueError):
    pass


def load_job(path: str) -> CurveJob:
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as exc:
        raise JobFileError(f"cannot read job file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobFileError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(data, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise JobFileError(f"{path}: schema violation at {where}: {exc.message}") from exc
    return job_from_dict(data)


def job_from_dict(data: dict) -> CurveJob:
    variables = tuple(data["variables"])
    curve = None
    norm_items = list(data.get("normalization", []))
    curve_block = data.get("curve", {})
    if "defining_poly" in curve_block:
        if len(variables) != 2:
            raise JobFileError("curve.defining_poly needs exactly two ambient variables")
        curve = parse_poly(curve_block["defining_poly"], variables)
    norm_items.extend(curve_block.get("components", []))
    normalization = []
    for item in norm_items:
        indep, dep = item["variables"]
        f = parse_poly(item["defining_poly"], (indep, dep))
        phi = {v: parse_poly(p, (indep, dep)) for v, p in item["phi_map"].items()}
        missing = [v for v in variables if v not in phi]
        if missing:
            raise JobFileError(f"phi_map lacks ambient variables {missing}")
        normalization.append(NormalizationComponent(f, indep, dep, phi))
    points = [tuple(Fraction(str(c)) for c in p) for p in data.get("isolated_points", [])]
    generators = [parse_poly(g, variables) for g in data.get("generators", [])]
    box = {v: (float(lo), float(hi)) for v, (lo, hi) in data.get("box", {}).items()}
    seed = int(os.environ.get("CURVEHULL_SEED", data.get("seed", 2024)))
    kwargs = dict(
        variables=variables, curve=curve, normalization=normalization,
        isolated_points=points, generators=generators, box=box,
        level=data.get("level"), subspaces=data.get("subspaces"),
        tol=float(data.get("tol", 1e-3)), directions=int(data.get("directions", 64)),
        grid=int(data.get("grid", 1201)), seed=seed,
        max_level=int(data.get("max_level", 4)), name=data.get("name", ""),
    )
    return CurveJob(**kwargs)


def _run_report(job: CurveJob, force_noncompact: bool):
    prep = augment_presentation(job)
    compact, diams = is_compact_sampled(prep)
    if force_noncompact or not compact:
        return closed_hull_noncompact(job), False
    return relax_job(job), True


def report_dict(report, compact: bool) -> dict:
    out = {
        "status": report.status,
        "level": report.level,
        "gap": report.gap,
        "tolerance": report.tol,
        "block_sizes": report.block_sizes,
        "compact": compact,
        "diagnostics": report.diagnostics,
        "provenance": report.provenance,
    }
    if report.slice_gap is not None:
        out["slice_gap"] = report.slice_gap
    if report.fan is not None:
        out["recession_rays"] = [list(map(float, r)) for r in report.fan.rays]
    return out


def render_report(report, compact: bool, fmt: str) -> str:
    data = report_dict(report, compact)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2, default=str) + "\n"
    lines = [f"status: {data['status']}"]
    for key in ("level", "gap", "tolerance", "block_sizes", "compact"):
        lines.append(f"{key}: {data[key]}")
    if "slice_gap" in data:
        lines.append(f"slice_gap: {data['slice_gap']}")
    if "recession_rays" in data:
        lines.append(f"recession_rays: {data['recession_rays']}")
    if data["diagnostics"]:
        lines.append(f"diagnostics: {data['diagnostics']}")
    lines.append(f"provenance: {json.dumps(data['provenance'], sort_keys=True, default=str)}")
    return "\n".join(lines) + "\n"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def cmd_relax(args) -> int:
    job = load_job(args.jobfile)
    job = _apply_overrides(job, args)
    report, compact = _run_report(job, args.noncompact or False)
    if report.pencil is not None:
        pencil_path = args.out or (os.path.splitext(args.jobfile)[0] + ".pencil")
        _write(pencil_path, report.pencil.serialize())
        if pencil_path != "-":
            print(f"pencil written to {pencil_path}")
    sys.stdout.write(render_report(report, compact, args.format))
    if report.status == pipeline.EXACT:
        return 0
    return 2


def cmd_member(args) -> int:
    job = load_job(args.jobfile)
    job = _apply_overrides(job, args)
    report, compact = _run_report(job, args.noncompact or False)
    pencil = report.pencil
    if pencil is None:
        print("no pencil could be built", file=sys.stderr)
        return 1
    if not compact:
        # membership in cl conv K is the t = 1 slice of the cone pencil
        pencil = restrict_pencil(pencil, {0: Fraction(1)})
    point = [float(x) for x in args.point]
    if len(point) != pencil.nx:
        print(f"point has {len(point)} coordinates, expected {pencil.nx}", file=sys.stderr)
        return 1
    res = membership(point, pencil)
    if res.status == "Inside":
        print(f"Inside margin={res.margin:.9g}")
        return 0
    if res.status == "Outside":
        sep = ("none" if res.separating_direction is None
               else ",".join(f"{v:.9g}" for v in res.separating_direction))
        print(f"Outside margin={res.margin:.9g} separating_direction={sep}")
        return 3
    print("Indeterminate (solver could not certify either side)", file=sys.stderr)
    return 1


def cmd_recession(args) -> int:
    job = load_job(args.jobfile)
    job = _apply_overrides(job, args)
    prep = augment_presentation(job)
    fan, _, r0 = recession_fan(prep)
    _write(args.out, fan.to_csv(job.variables))
    return 0


def cmd_certify(args) -> int:
    job = load_job(args.jobfile)
    job = _apply_overrides(job, args)
    report, compact = _run_report(job, args.noncompact or False)
    if report.table is not None:
        _write(args.out, report.table.to_csv())
    else:
        dirs = uniform_directions(len(job.variables), job.directions, job.seed)
        _write(args.out, GapReport(dirs, np.full(len(dirs), np.nan),
                                   np.full(len(dirs), np.nan)).to_csv())
    print(f"status={report.status} level={report.level} gap={report.gap:.6g} "
          f"tol={report.tol:.6g}")
    if report.slice_gap is not None:
        print(f"slice_gap={report.slice_gap:.6g}")
    return 0 if report.status == pipeline.EXACT else 2


def _apply_overrides(job: CurveJob, args) -> CurveJob:
    if getattr(args, "level", None) is not None:
        job.level = args.level
    if getattr(args, "max_level", None) is not None:
        job.max_level = args.max_level
    if getattr(args, "tol", None) is not None:
        job.tol = args.tol
    return job


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="curvehull",
        description="Semidefinite representations of convex hulls of plane algebraic curves")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("jobfile", help="JSON job file")
        sp.add_argument("--level", type=int, help="relaxation level override")
        sp.add_argument("--max-level", dest="max_level", type=int,
                        help="level search cap override")
        sp.add_argument("--tol", type=float, help="exactness tolerance override")
        sp.add_argument("--out", help="output path ('-' for stdout)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--noncompact", action="store_true",
                        help="force the homogenization pipeline")

    sp = sub.add_parser("relax", help="build the pencil and certify exactness")
    common(sp)
    sp.set_defaults(func=cmd_relax)

    sp = sub.add_parser("member", help="membership of a point in the relaxed hull")
    common(sp)
    sp.add_argument("point", nargs="+", help="point coordinates")
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("recession", help="confirmed asymptotic directions as CSV")
    common(sp)
    sp.set_defaults(func=cmd_recession)

    sp = sub.add_parser("certify", help="support-function table and gap summary")
    common(sp)
    sp.set_defaults(func=cmd_certify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (JobFileError, PipelineError, RelaxationError, RingError, PolyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
