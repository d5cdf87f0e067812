"""Quantitative clustering and convergence experiments.

Distances from computed zeros to traced level curves, convergence of the
empirical Cauchy transform to the designated rational branch inside/outside
a closed loop, and the fraction of zeros on the discrete singular set K
compared against a uniform null model.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import InvalidInputError
from .hyppoly import ParameterSchedule, build_polynomial
from .potential import LevelCurve, RegionGrid
from .rootfinding import (
    DEFAULT_PRECISION,
    RootCountingMeasure,
    cauchy_transform_at,
    find_roots,
)


def points_to_polyline_distance(points: np.ndarray, polyline: np.ndarray,
                                closed: bool = True) -> np.ndarray:
    """Min distance from each point to a polyline (segment projections)."""
    a = polyline
    b = np.roll(polyline, -1) if closed else polyline[1:]
    if not closed:
        a = polyline[:-1]
    ab = b - a
    ab2 = np.abs(ab) ** 2
    ab2[ab2 == 0] = 1.0
    out = np.empty(len(points))
    for k, z in enumerate(points):
        t = np.clip(((z - a) * np.conj(ab)).real / ab2, 0.0, 1.0)
        proj = a + t * ab
        out[k] = np.min(np.abs(z - proj))
    return out


def winding_number(polyline: np.ndarray, z: complex) -> int:
    """Winding number of a closed polyline around z (angle summation)."""
    v = polyline - z
    angles = np.angle(np.roll(v, -1) / v)
    return int(round(float(np.sum(angles)) / (2 * np.pi)))


def label_side(curve: LevelCurve, z: complex) -> str:
    """inside/outside by winding number of the traced closed loop."""
    if not curve.closed:
        raise InvalidInputError("side labeling needs a closed loop")
    return "inside" if winding_number(curve.points, z) != 0 else "outside"


@dataclass(frozen=True)
class DistanceReport:
    """Zero-to-curve distances for the roots passing a restriction predicate."""

    n: int
    restriction: str
    n_total: int
    n_restricted: int
    distances: np.ndarray
    vacuous: bool

    @property
    def max(self) -> float:
        return float(np.max(self.distances)) if len(self.distances) else float("nan")

    @property
    def mean(self) -> float:
        return float(np.mean(self.distances)) if len(self.distances) else float("nan")

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.distances, q)) if len(self.distances) else float("nan")

    def summary(self) -> dict:
        return {
            "n": self.n,
            "restriction": self.restriction,
            "n_total": self.n_total,
            "n_restricted": self.n_restricted,
            "max": self.max,
            "mean": self.mean,
            "q50": self.quantile(0.5),
            "q90": self.quantile(0.9),
            "vacuous": self.vacuous,
        }


def zero_curve_distance(measure: RootCountingMeasure, curve: LevelCurve,
                        restriction=None, restriction_label: str = "all") -> DistanceReport:
    """Min distance of each (restricted) zero to the traced curve polyline.

    ``restriction`` is a predicate on complex numbers (e.g. a half-plane
    cutoff selecting the loop's side); an empty restricted set is reported
    as vacuous rather than an error.
    """
    if len(curve.points) < 2:
        raise InvalidInputError("curve polyline is empty")
    roots = measure.as_complex_array()
    if restriction is not None:
        sel = np.array([bool(restriction(z)) for z in roots])
        chosen = roots[sel]
    else:
        chosen = roots
    d = points_to_polyline_distance(chosen, curve.points, closed=curve.closed)
    return DistanceReport(
        n=measure.n,
        restriction=restriction_label,
        n_total=len(roots),
        n_restricted=len(chosen),
        distances=d,
        vacuous=len(chosen) == 0,
    )


def halfplane_restriction(threshold: float):
    """The loop-side restriction Re z > threshold (threshold = eta/(eta+1))."""
    return lambda z: z.real > threshold


@dataclass(frozen=True)
class ConvergencePoint:
    z: complex
    side: str
    target: complex
    deviations: dict
    excluded: bool = False
    note: str = ""


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-point deviations |C_mu_n(z) - f_branch(z)| along an n ladder."""

    n_list: tuple
    points: tuple

    @property
    def monotone(self) -> bool:
        """Largest-n deviation below smallest-n deviation at every admissible point."""
        lo, hi = self.n_list[0], self.n_list[-1]
        return all(
            p.deviations[hi] < p.deviations[lo] for p in self.points if not p.excluded
        )

    def summary(self) -> dict:
        return {
            "n_list": list(self.n_list),
            "monotone_last_below_first": self.monotone,
            "points": [
                {
                    "z": [p.z.real, p.z.imag],
                    "side": p.side,
                    "target": [p.target.real, p.target.imag],
                    "deviations": {str(n): float(d) for n, d in p.deviations.items()},
                    "excluded": p.excluded,
                    "note": p.note,
                }
                for p in self.points
            ],
        }


def cauchy_convergence(schedule: ParameterSchedule, n_list, test_points,
                       precision_bits: int = DEFAULT_PRECISION,
                       measures: dict = None) -> ConvergenceReport:
    """Deviation of the empirical Cauchy transform from the limit branch.

    For degenerate schedules the designated branches are -alpha_2/z inside
    the loop and 1/(z-1) outside.  ``test_points`` is a list of (z, side)
    pairs with side in {"inside", "outside"}; points within the cluster
    radius of a computed root are excluded with a note.  Pass ``measures``
    (n -> RootCountingMeasure) to reuse existing root computations.
    """
    if not schedule.is_degenerate:
        raise InvalidInputError(
            "branch designation inside/outside is defined for degenerate schedules"
        )
    if len(schedule.alphas) != 2:
        raise InvalidInputError("inside-branch designation needs the two-slope family")
    n_list = sorted(n_list)
    if len(n_list) < 2:
        raise InvalidInputError("need at least two n values to compare")
    alpha2 = complex(schedule.alphas[1])
    got = dict(measures or {})
    for n in n_list:
        if n not in got:
            got[n] = find_roots(build_polynomial(schedule, n), precision_bits)
    out_points = []
    for z, side in test_points:
        z = complex(z)
        if side not in ("inside", "outside"):
            raise InvalidInputError(f"side must be inside/outside, got {side!r}")
        target = -alpha2 / z if side == "inside" else 1.0 / (z - 1.0)
        devs = {}
        excluded = False
        note = ""
        for n in n_list:
            m = got[n]
            dmin = float(np.min(np.abs(m.as_complex_array() - z)))
            if dmin < float(m.cluster_radius):
                excluded = True
                note = f"z within cluster radius of a root at n={n}"
                break
            c = cauchy_transform_at(m, z)
            devs[n] = float(abs(c - mp.mpc(target)))
        out_points.append(ConvergencePoint(z, side, target, devs, excluded, note))
    return ConvergenceReport(tuple(n_list), tuple(out_points))


@dataclass(frozen=True)
class ClusterScore:
    """Fraction of zeros near K, with a uniform-null comparison."""

    epsilon: float
    fraction_on_k: float
    fraction_on_k_in_domain: float
    null_fraction: float
    null_samples: int
    seed: int

    @property
    def ratio_over_null(self) -> float:
        if self.null_fraction == 0:
            return float("inf") if self.fraction_on_k > 0 else 0.0
        return self.fraction_on_k / self.null_fraction

    def summary(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "fraction_on_k": self.fraction_on_k,
            "fraction_on_k_in_domain": self.fraction_on_k_in_domain,
            "null_fraction": self.null_fraction,
            "ratio_over_null": self.ratio_over_null,
            "null_samples": self.null_samples,
            "seed": self.seed,
        }


def k_set_score(measure: RootCountingMeasure, grid: RegionGrid,
                      epsilon: float = None, null_samples: int = 20000,
                      seed: int = 20240901) -> ClusterScore:
    """Fraction of zeros within epsilon of the discrete set K.

    epsilon defaults to 3 cell diagonals (K is one cell thick; sub-cell
    distances are meaningless).  Also reports the fraction near K
    restricted to the approximate domain D (non-H_1 regions plus their
    boundary), and a deterministic uniform Monte-Carlo null over the box.
    """
    if epsilon is None:
        epsilon = 3.0 * grid.cell_diagonal
    kpts = grid.k_points()
    if len(kpts) == 0:
        return ClusterScore(epsilon, 0.0, 0.0, 0.0, null_samples, seed)
    roots = measure.as_complex_array()
    xmin, xmax, ymin, ymax = grid.box
    inside_box = (
        (roots.real >= xmin) & (roots.real <= xmax)
        & (roots.imag >= ymin) & (roots.imag <= ymax)
    )
    if not np.all(inside_box):
        raise InvalidInputError(
            f"grid box {grid.box} does not cover the root cloud "
            f"({int((~inside_box).sum())} roots outside)"
        )
    dmin = _min_dist_chunked(roots, kpts)
    frac = float(np.mean(dmin <= epsilon))
    dom = grid.domain_mask()
    X, Y = np.meshgrid(grid.xs, grid.ys)
    kpts_d = (X + 1j * Y)[grid.kmask & dom]
    if len(kpts_d):
        dmin_d = _min_dist_chunked(roots, kpts_d)
        frac_d = float(np.mean(dmin_d <= epsilon))
    else:
        frac_d = 0.0
    rng = np.random.default_rng(seed)
    U = rng.uniform(xmin, xmax, null_samples) + 1j * rng.uniform(ymin, ymax, null_samples)
    dnull = _min_dist_chunked(U, kpts)
    null_frac = float(np.mean(dnull <= epsilon))
    return ClusterScore(float(epsilon), frac, frac_d, null_frac, null_samples, seed)


def _min_dist_chunked(points: np.ndarray, targets: np.ndarray,
                      chunk: int = 512) -> np.ndarray:
    """Min |point - target| per point, chunked to bound memory."""
    out = np.empty(len(points))
    for k in range(0, len(points), chunk):
        block = points[k:k + chunk]
        out[k:k + chunk] = np.min(np.abs(block[:, None] - targets[None, :]), axis=1)
    return out
