"""File formats for schedules, polynomials, roots, curves, levels and reports.

All writers are deterministic: no timestamps, fixed digit counts derived
from the stated precision, newline-terminated text.  Re-running a command
with identical inputs reproduces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np

from .errors import InvalidInputError
from .exact import ComplexRational, format_complex_rational, parse_complex_rational
from .hyppoly import HypPolynomial, ParameterSchedule
from .potential import LevelCurve, RegionGrid
from .rootfinding import RootCountingMeasure


def decimal_digits(precision_bits: int) -> int:
    """Faithful decimal digit count for a binary precision."""
    return int(math.floor(precision_bits * math.log10(2))) + 2


def _mpf_str(x, digits: int) -> str:
    return mp.nstr(mp.mpf(x), digits, strip_zeros=True)


# -- schedules ----------------------------------------------------------------


def schedule_to_json(schedule: ParameterSchedule) -> str:
    doc = {
        "A": schedule.A,
        "B": schedule.B,
        "alphas": [format_complex_rational(x) for x in schedule.alphas],
        "cs": [format_complex_rational(x) for x in schedule.cs],
        "betas": [format_complex_rational(x) for x in schedule.betas],
        "ds": [format_complex_rational(x) for x in schedule.ds],
    }
    return json.dumps(doc, indent=2) + "\n"


def schedule_from_json(text: str) -> ParameterSchedule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"schedule file is not valid JSON: {exc}") from exc
    for key in ("A", "B", "alphas", "cs", "betas", "ds"):
        if key not in doc:
            raise InvalidInputError(f"schedule file lacks field {key!r}")
    alphas = [parse_complex_rational(s) for s in doc["alphas"]]
    cs = [parse_complex_rational(s) for s in doc["cs"]]
    betas = [parse_complex_rational(s) for s in doc["betas"]]
    ds = [parse_complex_rational(s) for s in doc["ds"]]
    if len(alphas) != doc["A"] or len(betas) != doc["B"]:
        raise InvalidInputError("schedule lengths disagree with declared A, B")
    return ParameterSchedule(alphas, cs, betas, ds)


def write_schedule(path, schedule: ParameterSchedule) -> None:
    Path(path).write_text(schedule_to_json(schedule))


def read_schedule(path) -> ParameterSchedule:
    return schedule_from_json(Path(path).read_text())


def schedule_hash(schedule: ParameterSchedule) -> str:
    return "sha256:" + hashlib.sha256(schedule_to_json(schedule).encode()).hexdigest()[:16]


# -- polynomials --------------------------------------------------------------


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def write_polynomial(path, p: HypPolynomial) -> None:
    """One row per coefficient: ``k re_num/re_den im_num/im_den``, exact."""
    lines = [
        "# polynomial export: k re im (exact rationals)",
        f"# n = {p.n} degree = {p.degree} schedule = {schedule_hash(p.schedule)}",
    ]
    for k, c in enumerate(p.coeffs):
        lines.append(f"{k} {_frac(c.re)} {_frac(c.im)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_polynomial_coeffs(path):
    """The exact coefficients back from a polynomial export."""
    coeffs = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        k, re, im = line.split()
        if int(k) != len(coeffs):
            raise InvalidInputError(f"non-contiguous coefficient index in {path}")
        coeffs.append(ComplexRational(Fraction(re), Fraction(im)))
    return coeffs


# -- root measures ------------------------------------------------------------


def write_roots(path, m: RootCountingMeasure, schedule: ParameterSchedule) -> None:
    """One line per root: ``re im residual_bound``, digits faithful to precision."""
    digits = decimal_digits(m.precision_bits)
    with mp.workprec(m.precision_bits):
        lines = [
            "# roots export: re im residual_bound",
            f"# n = {m.source_n} count = {m.n} precision_bits = {m.precision_bits} "
            f"schedule = {schedule_hash(schedule)}",
        ]
        for z, r in zip(m.roots, m.residual_bounds):
            lines.append(
                f"{_mpf_str(z.real, digits)} {_mpf_str(z.imag, digits)} {_mpf_str(r, 8)}"
            )
    Path(path).write_text("\n".join(lines) + "\n")


def read_roots(path) -> RootCountingMeasure:
    """Rebuild a measure from a roots export (precision from the header)."""
    precision = None
    source_n = None
    roots = []
    residuals = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            if "precision_bits" in line:
                parts = line.lstrip("# ").split()
                fields = dict(zip(parts[::3], parts[2::3]))
                precision = int(fields["precision_bits"])
                source_n = int(fields.get("n", 0))
            continue
        if not line:
            continue
        re_s, im_s, res_s = line.split()
        roots.append((re_s, im_s))
        residuals.append(res_s)
    if precision is None:
        raise InvalidInputError(f"roots file {path} lacks a precision header")
    with mp.workprec(precision):
        zs = tuple(mp.mpc(mp.mpf(a), mp.mpf(b)) for a, b in roots)
        rs = tuple(mp.mpf(r) for r in residuals)
        threshold = mp.mpf(2) ** (-precision // 4)
    return RootCountingMeasure(
        roots=zs,
        precision_bits=precision,
        residual_bounds=rs,
        forward_error_bounds=tuple(mp.mpf(0) for _ in zs),
        certification_threshold=threshold,
        clusters=(),
        source_n=source_n or len(zs),
    )


# -- curves -------------------------------------------------------------------


def write_curve(path, curve) -> None:
    """Exact (j, k, a_jk) triples of the expanded bivariate polynomial."""
    lines = ["# curve export: j k re im (coefficient of z^j w^k, exact)"]
    for (j, k), a in sorted(curve.terms.items()):
        lines.append(f"{j} {k} {_frac(a.re)} {_frac(a.im)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_branch_points(path, bps, precision_bits: int = 128) -> None:
    digits = decimal_digits(precision_bits)
    lines = [f"# branch points: re im (degenerate = {bps.degenerate})"]
    with mp.workprec(precision_bits):
        for z in bps.points:
            lines.append(f"{_mpf_str(z.real, digits)} {_mpf_str(z.imag, digits)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_point_list(path) -> np.ndarray:
    pts = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        re_s, im_s = line.split()[:2]
        pts.append(complex(float(re_s), float(im_s)))
    return np.array(pts)


# -- level curves -------------------------------------------------------------


def write_level_curve(path, curve: LevelCurve) -> None:
    """Ordered CSV polyline with per-point residuals plus a # header."""
    crit = ";".join(
        f"{c.location.real:.15g}+{c.location.imag:.15g}i" for c in curve.critical_points
    )
    lines = [
        f"# level curve pair = {curve.pair[0]},{curve.pair[1]} closed = {curve.closed} "
        f"hit_cut = {curve.hit_cut} criticals = {crit or 'none'}",
        "index,re,im,residual",
    ]
    for k, (z, r) in enumerate(zip(curve.points, curve.residuals)):
        lines.append(f"{k},{z.real:.17g},{z.imag:.17g},{r:.3e}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_level_curve(path) -> LevelCurve:
    points = []
    residuals = []
    pair = (0, 0)
    closed = False
    hit_cut = False
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            toks = line.split()
            if "pair" in toks:
                pair = tuple(int(x) for x in toks[toks.index("pair") + 2].split(","))
            if "closed" in toks:
                closed = toks[toks.index("closed") + 2] == "True"
            if "hit_cut" in toks:
                hit_cut = toks[toks.index("hit_cut") + 2] == "True"
            continue
        if not line or line.startswith("index"):
            continue
        _k, re_s, im_s, res_s = line.split(",")
        points.append(complex(float(re_s), float(im_s)))
        residuals.append(float(res_s))
    return LevelCurve(
        pair=pair,
        points=np.array(points),
        residuals=np.array(residuals),
        closed=closed,
        critical_points=(),
        hit_cut=hit_cut,
    )


# -- region grids -------------------------------------------------------------


def write_region_grid(path, grid: RegionGrid) -> None:
    """JSON header line, then one raster line per row (label digits)."""
    header = {
        "box": list(grid.box),
        "resolution": grid.resolution,
        "legend": {str(i): ("H_1" if i == 1 else f"H~_{i}") for i in grid.labels_present()},
    }
    lines = [json.dumps(header, sort_keys=True)]
    for row in grid.labels:
        lines.append("".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_k_cells(path, grid: RegionGrid) -> None:
    pts = grid.k_points()
    lines = [f"# K cells: re im (cell_diagonal = {grid.cell_diagonal:.9g})"]
    for z in pts:
        lines.append(f"{z.real:.9g} {z.imag:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_region_grid(path) -> RegionGrid:
    text = Path(path).read_text().splitlines()
    header = json.loads(text[0])
    res = header["resolution"]
    labels = np.array([[int(ch) for ch in row] for row in text[1 : res + 1]], dtype=np.int16)
    xmin, xmax, ymin, ymax = header["box"]
    xs = xmin + (np.arange(res) + 0.5) * (xmax - xmin) / res
    ys = ymin + (np.arange(res) + 0.5) * (ymax - ymin) / res
    kmask = np.zeros_like(labels, dtype=bool)
    diff_v = labels[:-1, :] != labels[1:, :]
    X = np.meshgrid(xs, ys)[0]
    Y = np.meshgrid(xs, ys)[1]
    straddle = (np.sign(Y[:-1, :]) != np.sign(Y[1:, :])) & (X[:-1, :] < 0)
    diff_v &= ~straddle
    kmask[:-1, :] |= diff_v
    kmask[1:, :] |= diff_v
    diff_h = labels[:, :-1] != labels[:, 1:]
    kmask[:, :-1] |= diff_h
    kmask[:, 1:] |= diff_h
    return RegionGrid(tuple(header["box"]), res, labels, kmask, xs, ys)


# -- reports and manifests ----------------------------------------------------


def write_report(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def file_hash(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def write_manifest(out_dir, command: str, config: dict, inputs: dict) -> None:
    """Record the effective parameters and content hashes of the inputs."""
    payload = {
        "command": command,
        "config": config,
        "input_hashes": {k: file_hash(v) for k, v in inputs.items() if Path(v).exists()},
    }
    write_report(Path(out_dir) / f"manifest_{command}.json", payload)
