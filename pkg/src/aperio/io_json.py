"""JSON (de)serialization with decimal-string numerics and provenance tags.

Every report JSON stores numbers as decimal strings (``repr`` of the float,
which round-trips exactly) and wraps each numeric field in an object
``{"value": ..., "provenance": ...}``.  Writers emit canonical JSON (sorted
keys, fixed indentation) so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np

from . import __version__
from .cutproject import CutProjectScheme, Window
from .density import DensityReport, ErgodicEstimate
from .framekit import FrameReport, VerdictReport
from .pointset import PointPatch
from .rkhs import KernelSpec, gabor_gaussian, paley_wiener


def fstr(x: float) -> str:
    return repr(float(x))


def fparse(v) -> float:
    if isinstance(v, str):
        return float(v)
    if isinstance(v, (int, float)):
        return float(v)
    raise ValueError(f"expected a number or decimal string, got {type(v).__name__}")


def tagged(x: float, provenance: str) -> dict:
    return {"value": fstr(x), "provenance": provenance}


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def provenance_block(seed: int | None, inputs: dict[str, str]) -> dict:
    return {
        "tool": "aperio",
        "version": __version__,
        "seed": seed,
        "inputs": dict(sorted(inputs.items())),
    }


# ---------------------------------------------------------------- point patch

def patch_to_jsonable(patch: PointPatch) -> dict:
    return {
        "dim": patch.dim,
        "box": [[fstr(lo), fstr(hi)] for lo, hi in patch.box],
        "points": [[fstr(c) for c in row] for row in patch.points],
    }


def patch_from_jsonable(obj: dict) -> PointPatch:
    dim = int(obj["dim"])
    box = tuple((fparse(lo), fparse(hi)) for lo, hi in obj["box"])
    pts = np.array([[fparse(c) for c in row] for row in obj["points"]], dtype=np.float64)
    pts = pts.reshape(-1, dim)
    return PointPatch(dim=dim, box=box, points=pts)


# --------------------------------------------------------------------- scheme

def scheme_to_jsonable(scheme: CutProjectScheme) -> dict:
    out = {
        "d": scheme.d,
        "m": scheme.m,
        "basis": [[fstr(v) for v in row] for row in scheme.basis],
    }
    if scheme.m > 0:
        out["window"] = [
            {"lo": [fstr(v) for v, _ in b], "hi": [fstr(v) for _, v in b]}
            for b in scheme.window.boxes
        ]
    return out


def scheme_from_jsonable(obj: dict) -> CutProjectScheme:
    d = int(obj["d"])
    m = int(obj["m"])
    basis = np.array([[fparse(v) for v in row] for row in obj["basis"]], dtype=np.float64)
    window = None
    if m > 0:
        boxes = tuple(
            tuple((fparse(lo), fparse(hi)) for lo, hi in zip(b["lo"], b["hi"]))
            for b in obj.get("window", [])
        )
        window = Window(m=m, boxes=boxes)
    return CutProjectScheme(d=d, m=m, basis=basis, window=window)


# --------------------------------------------------------------------- kernel

def kernel_to_jsonable(spec: KernelSpec) -> dict:
    if spec.kind == "paley_wiener":
        return {"kind": "paley_wiener", "band": [[fstr(lo), fstr(hi)] for lo, hi in spec.band]}
    return {"kind": "gabor_gaussian", "n": spec.n}


def kernel_from_jsonable(obj: dict) -> KernelSpec:
    if obj["kind"] == "paley_wiener":
        return paley_wiener([(fparse(lo), fparse(hi)) for lo, hi in obj["band"]])
    if obj["kind"] == "gabor_gaussian":
        return gabor_gaussian(int(obj["n"]))
    raise ValueError(f"unknown kernel kind {obj['kind']!r}")


# -------------------------------------------------------------------- reports

def density_report_to_jsonable(
    report: DensityReport,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    rows = []
    for (n, lo), (_, hi), tag in zip(report.lower, report.upper, report.method):
        rows.append(
            {
                "n": fstr(n),
                "inf": tagged(lo, tag),
                "sup": tagged(hi, tag),
            }
        )
    trend_tag = f"trend(truncations={[n for n, _ in report.lower]})"
    out = {
        "kind": "density_report",
        "rows": rows,
        "extrapolated_lower": tagged(report.extrapolated_lower, trend_tag),
        "extrapolated_upper": tagged(report.extrapolated_upper, trend_tag),
        "uncertainty": tagged(report.uncertainty, trend_tag),
        "certified_region_note": report.certified_region_note,
        "extras_used_lower": report.extras_used_lower,
        "extras_used_upper": report.extras_used_upper,
        "covolume_bounds": (
            None
            if report.covolume_bounds is None
            else {
                "covol_minus_lower": tagged(report.covolume_bounds[0], trend_tag),
                "covol_plus_upper": tagged(report.covolume_bounds[1], trend_tag),
            }
        ),
        "provenance": provenance_block(seed, inputs or {}),
    }
    return out


def density_report_from_jsonable(obj: dict) -> DensityReport:
    lower = tuple((fparse(r["n"]), fparse(r["inf"]["value"])) for r in obj["rows"])
    upper = tuple((fparse(r["n"]), fparse(r["sup"]["value"])) for r in obj["rows"])
    methods = tuple(r["inf"]["provenance"] for r in obj["rows"])
    cb = obj.get("covolume_bounds")
    return DensityReport(
        lower=lower,
        upper=upper,
        extrapolated_lower=fparse(obj["extrapolated_lower"]["value"]),
        extrapolated_upper=fparse(obj["extrapolated_upper"]["value"]),
        uncertainty=fparse(obj["uncertainty"]["value"]),
        certified_region_note=obj["certified_region_note"],
        method=methods,
        extras_used_lower=bool(obj.get("extras_used_lower", False)),
        extras_used_upper=bool(obj.get("extras_used_upper", False)),
        covolume_bounds=(
            None
            if cb is None
            else (fparse(cb["covol_minus_lower"]["value"]), fparse(cb["covol_plus_upper"]["value"]))
        ),
    )


def frame_report_to_jsonable(
    report: FrameReport,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    tag = f"trend(truncations={list(report.truncations)})"
    rows = []
    for i, t in enumerate(report.truncations):
        rows.append(
            {
                "truncation": fstr(t),
                "A": tagged(report.riesz_lower[i], tag),
                "B": tagged(report.riesz_upper[i], tag),
                "A_raw": tagged(report.riesz_lower_raw[i], tag),
                "A_samp": tagged(report.sampling_lower[i], tag),
                "B_samp": tagged(report.sampling_upper[i], tag),
            }
        )
    return {
        "kind": "frame_report",
        "rows": rows,
        "boundary_margin": tagged(report.boundary_margin, "exact"),
        "frame_status": report.frame_status,
        "riesz_status": report.riesz_status,
        "verdict": report.verdict,
        "eigenvalues": [fstr(v) for v in report.final_eigenvalues],
        "notes": report.notes,
        "provenance": provenance_block(seed, inputs or {}),
    }


def verdict_report_to_jsonable(
    report: VerdictReport,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    b = report.covol_bounds

    def vb(x: float, prov: str) -> dict | None:
        return None if math.isinf(x) else tagged(x, prov)

    return {
        "kind": "verdict_report",
        "critical_density": tagged(report.critical_density, "exact"),
        "d_minus": tagged(report.d_minus, "trend"),
        "d_plus": tagged(report.d_plus, "trend"),
        "tol": tagged(report.tol, "exact"),
        "ell": report.ell,
        "covol_minus_interval": [
            vb(b.covol_minus_lo, "trend"),
            vb(b.covol_minus_hi, "trend"),
        ],
        "covol_plus_upper": vb(b.covol_plus_hi, "trend"),
        "covol_plus_exact": b.covol_plus_exact,
        "necessary_sampling_ok": report.necessary_sampling_ok,
        "necessary_interpolation_ok": report.necessary_interpolation_ok,
        "sampling_covol_ok": report.sampling_covol_ok,
        "interpolation_covol_ok": report.interpolation_covol_ok,
        "ruled_out": list(report.ruled_out),
        "notes": report.notes,
        "provenance": provenance_block(seed, inputs or {}),
    }


def weil_report_to_jsonable(
    residual: float,
    quadrature_n: int,
    function_kind: str,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    return {
        "kind": "weil_report",
        "function": function_kind,
        "residual": tagged(residual, f"quadrature(n={quadrature_n})"),
        "provenance": provenance_block(seed, inputs or {}),
    }


def amalgam_report_to_jsonable(
    norm: float,
    q_radius: float,
    trunc_radius: float,
    grid_step: float,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    return {
        "kind": "amalgam_report",
        "norm": tagged(norm, f"grid(step={grid_step})"),
        "q_radius": tagged(q_radius, "exact"),
        "trunc_radius": tagged(trunc_radius, "exact"),
        "provenance": provenance_block(seed, inputs or {}),
    }


def ergodic_report_to_jsonable(
    est: ErgodicEstimate,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
) -> dict:
    return {
        "kind": "ergodic_report",
        "covolume": tagged(est.covolume, est.provenance),
        "n_translates": est.n_translates,
        "s_box": [[fstr(lo), fstr(hi)] for lo, hi in est.s_box],
        "provenance": provenance_block(seed, inputs or {}),
    }


def patch_list_to_jsonable(patches: list[PointPatch]) -> list:
    return [patch_to_jsonable(p) for p in patches]


# ------------------------------------------------------------------------ CSV

CSV_COLUMNS = {
    "density_report": ("n", "inf", "sup"),
    "frame_report": ("truncation", "A", "B", "A_raw", "A_samp", "B_samp", "eigenvalue"),
}


def emit_csv(report: dict, columns: list[str]) -> str:
    """Render report fields as RFC-4180 CSV (CRLF, header row, 12 significant digits)."""
    kind = report.get("kind")
    valid = CSV_COLUMNS.get(kind)
    if valid is None:
        raise ValueError(f"report kind {kind!r} has no CSV view")
    bad = [c for c in columns if c not in valid]
    if bad:
        raise ValueError(f"unknown column(s) {bad}; valid columns for {kind}: {list(valid)}")
    if "eigenvalue" in columns:
        if columns != ["eigenvalue"]:
            raise ValueError("the eigenvalue column cannot be combined with trend columns")
        rows = [[float(v)] for v in report["eigenvalues"]]
    else:
        rows = []
        for r in report["rows"]:
            row = []
            for c in columns:
                cell = r[c]
                row.append(fparse(cell["value"] if isinstance(cell, dict) else cell))
            rows.append(row)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\r\n".join(lines) + "\r\n"
