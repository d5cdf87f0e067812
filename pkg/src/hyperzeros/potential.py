"""Harmonic branch potentials, level-curve tracing, and region decomposition.

Each branch w = f_i(z) of the limit curve integrates to a harmonic function
H_i(z) = Re int_p^z f_i(s) ds on a simply connected set avoiding {0, 1}.
For degenerate schedules the branches are rational and the H_i have closed
forms; otherwise values are obtained by quadrature along paths with branch
tracking.  Shifted copies H~_i = H_i + (H_1(p_i) - H_i(p_i)) agree with H_1
at the branch point p_i; their pairwise level sets carry the conjectured
zero clusters, and the pointwise maximum of the shifted branches cuts the
plane into regions whose boundary is the discrete singular set K.

Arg is the principal branch in (-pi, pi]; the cut on the negative real axis
is treated as a barrier: traces stop there and the region grid never
compares labels across it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algcurve import BivariateCurve, build_curve
from .errors import (
    BranchCollisionError,
    InvalidInputError,
    NonConvergenceError,
    SaddleAtSeedError,
)
from .hyppoly import ParameterSchedule

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)

TRACE_RESIDUAL_TOL = 1e-12
SINGULAR_GUARD = 1e-13


@dataclass(frozen=True)
class HarmonicSystem:
    """Branch potentials H_i and their shifted copies for one schedule.

    ``mode`` is "closed" (degenerate schedules, closed forms) or "integral"
    (general schedules, path quadrature).  ``offsets[i-1]`` is the constant
    C_i with H~_i = H_i + C_i; only differences H~_i - H~_j and region
    labels are basepoint-independent.  In integral mode the offsets are not
    defined (no canonical branch-to-branch-point pairing is constructed) and
    operations that need them reject the system.
    """

    schedule: ParameterSchedule
    basepoint: complex
    mode: str
    curve: BivariateCurve
    offsets: tuple
    branch_point_list: tuple

    @property
    def num_branches(self) -> int:
        return self.schedule.A

    # -- closed forms --------------------------------------------------------

    def _require_closed(self, what):
        if self.mode != "closed":
            raise InvalidInputError(
                f"{what} needs closed forms; this system is in integral mode "
                "(non-degenerate schedule)"
            )

    def harmonic(self, i: int, z):
        """H_i(z) from the closed forms (degenerate mode only); i is 1-based.

        H_1(z) = log|1-z| - log|1-p|; for i >= 2, with alpha_i = ax + i ay,
        H_i(z) = -ax log|z| + ay Arg z + ax log|p| - ay Arg p.
        Accepts scalars or numpy arrays.
        """
        self._require_closed("harmonic_value")
        z = np.asarray(z, dtype=complex)
        self._check_singular(z)
        p = self.basepoint
        with np.errstate(divide="ignore", invalid="ignore"):
            if i == 1:
                out = np.log(np.abs(1 - z)) - math.log(abs(1 - p))
            else:
                al = complex(self.schedule.alphas[i - 1])
                out = (
                    -al.real * np.log(np.abs(z))
                    + al.imag * np.angle(z)
                    + al.real * math.log(abs(p))
                    - al.imag * cmath.phase(p)
                )
        return out if out.shape else float(out)

    def _check_singular(self, z):
        bad = np.minimum(np.abs(np.asarray(z) - 1.0), np.abs(np.asarray(z))) < SINGULAR_GUARD
        if np.any(bad):
            raise InvalidInputError(
                "harmonic branch potentials have logarithmic singularities at 0 and 1"
            )

    def shifted(self, i: int, z):
        """H~_i = H_i + C_i (C_1 = 0)."""
        base = self.harmonic(i, z)
        return base + self.offsets[i - 1]

    def branch_value(self, i: int, z):
        """The rational branch f_i at z (closed mode): 1/(z-1) or -alpha_i/z."""
        self._require_closed("closed-form branch values")
        z = np.asarray(z, dtype=complex)
        if i == 1:
            out = 1.0 / (z - 1.0)
        else:
            out = -complex(self.schedule.alphas[i - 1]) / z
        return out if out.shape else complex(out)

    def branch_derivative(self, i: int, z):
        self._require_closed("closed-form branch derivatives")
        z = complex(z)
        if i == 1:
            return -1.0 / (z - 1.0) ** 2
        return complex(self.schedule.alphas[i - 1]) / z ** 2

    def difference(self, pair, z):
        """H~_i(z) - H~_j(z) for the pair (i, j)."""
        i, j = pair
        return self.shifted(i, z) - self.shifted(j, z)

    def difference_gradient(self, pair, z):
        """Gradient of the difference as a complex number conj(f_i - f_j)."""
        i, j = pair
        return np.conjugate(self.branch_value(i, z) - self.branch_value(j, z))

    def critical_points(self, pair):
        """Known critical points of the pair difference (closed mode).

        f_1 - f_i vanishes exactly at the branch point p_i; differences of
        two rational branches i, j >= 2 have constant numerator and no
        finite critical points.
        """
        i, j = pair
        pts = []
        if self.mode == "closed":
            if i == 1 and j >= 2:
                pts.append(self.branch_point_list[j - 2])
            elif j == 1 and i >= 2:
                pts.append(self.branch_point_list[i - 2])
        return pts


def make_harmonic_system(schedule: ParameterSchedule, basepoint=None) -> HarmonicSystem:
    """Build the harmonic system for a schedule.

    Degenerate schedules get closed-form mode with the basepoint defaulting
    to the first branch point p_2 = alpha_2/(alpha_2 + 1); general schedules
    get integral mode and require an explicit basepoint.
    """
    curve = build_curve(schedule)
    if schedule.is_degenerate:
        bpts = []
        for al in schedule.alphas[1:]:
            a = complex(al)
            if a == -1:
                raise InvalidInputError("alpha_i = -1 puts a branch point at infinity")
            bpts.append(a / (a + 1))
        p = complex(basepoint) if basepoint is not None else bpts[0]
        if abs(p) < SINGULAR_GUARD or abs(p - 1) < SINGULAR_GUARD:
            raise InvalidInputError("basepoint must avoid the singular points 0 and 1")
        sys0 = HarmonicSystem(schedule, p, "closed", curve, (0.0,) * schedule.A, tuple(bpts))
        offsets = [0.0]
        for i in range(2, schedule.A + 1):
            pi = bpts[i - 2]
            offsets.append(float(sys0.harmonic(1, pi) - sys0.harmonic(i, pi)))
        return HarmonicSystem(schedule, p, "closed", curve, tuple(offsets), tuple(bpts))
    if basepoint is None:
        raise InvalidInputError("integral mode needs an explicit basepoint")
    p = complex(basepoint)
    return HarmonicSystem(schedule, p, "integral", curve, (), ())


def harmonic_value(sys: HarmonicSystem, i: int, z):
    """H_i(z) from the closed forms; see HarmonicSystem.harmonic."""
    return sys.harmonic(i, z)


def shifted_harmonic_value(sys: HarmonicSystem, i: int, z):
    """H~_i(z) = H_i(z) + C_i; see HarmonicSystem.shifted."""
    return sys.shifted(i, z)


# -- branch tracking along paths ---------------------------------------------


class _BranchTracker:
    """Follows one branch of A(z, w) = 0 along points by nearest continuation."""

    def __init__(self, curve: BivariateCurve, min_separation=1e-9):
        self.curve = curve
        self.m = np.array([complex(c) for c in curve.m_coeffs])
        self.n = np.array([complex(c) for c in curve.n_coeffs])
        self.min_separation = min_separation

    def all_branches(self, z: complex) -> np.ndarray:
        A = len(self.m) - 1
        coeffs = np.zeros(A + 1, dtype=complex)
        for k in range(A + 1):
            if k <= A:
                coeffs[k] += self.m[k] * z ** k
            if k >= 1:
                coeffs[k] -= self.n[k - 1] * z ** (k - 1)
        if abs(coeffs[-1]) == 0 or abs(z) < SINGULAR_GUARD:
            raise InvalidInputError(f"branch values degenerate at z = {z}")
        return np.roots(coeffs[::-1])

    def step(self, z: complex, w_prev: complex) -> tuple:
        """Continue the branch with value w_prev to the point z.

        Returns (w, margin_ok) where margin_ok is False when the move
        exceeds a quarter of the separation to the nearest other branch
        (the caller should shorten its step).
        """
        ws = self.all_branches(z)
        dists = np.abs(ws - w_prev)
        k = int(np.argmin(dists))
        w = ws[k]
        others = np.delete(ws, k)
        if len(others):
            sep = float(np.min(np.abs(others - w)))
            if sep < self.min_separation:
                raise BranchCollisionError(
                    f"branches collide near z = {z} (separation {sep:.2e}); "
                    "reroute the path",
                    where=z,
                )
            if dists[k] > sep / 4:
                return w, False
        return w, True


def _gauss_segment(tracker, a: complex, b: complex, w_start: complex, reanchor=None):
    """One Gauss pass over [a, b] with branch tracking; returns (integral, w_end).

    ``reanchor(s)`` may return a closed-form branch value to take instead of
    the tracked one (used near branch points, where nearest-value matching
    is ill-conditioned), or None to keep tracking.
    """
    mid = (a + b) / 2
    half = (b - a) / 2
    total = 0j
    w = w_start
    for x, wt in zip(_GAUSS_X, _GAUSS_W):
        s = mid + half * x
        override = reanchor(s) if reanchor is not None else None
        if override is not None:
            w = override
        else:
            w, ok = tracker.step(s, w)
            if not ok:
                raise _StepReject()
        total += wt * w
    override = reanchor(b) if reanchor is not None else None
    if override is not None:
        w_end = override
    else:
        w_end, ok = tracker.step(b, w)
        if not ok:
            raise _StepReject()
    return total * half, w_end


class _StepReject(Exception):
    pass


def harmonic_value_by_integration(sys: HarmonicSystem, i: int, z, path=None,
                                  tol: float = 1e-12) -> float:
    """H_i(z) = Re int_p^z f_i(s) ds by adaptive quadrature with branch tracking.

    The path (polyline from the basepoint to z, default the straight
    segment) must avoid {0, 1} and the branch points.  The branch is chosen
    nearest to the previous step's value; a step is shortened whenever the
    value moves more than a quarter of the separation to the nearest other
    branch, and a genuine collision raises BranchCollisionError so the
    caller can reroute.
    """
    z = complex(z)
    waypoints = [sys.basepoint] + ([complex(w) for w in path] if path else []) + [z]
    # drop consecutive duplicates
    pts = [waypoints[0]]
    for w in waypoints[1:]:
        if w != pts[-1]:
            pts.append(w)
    tracker = _BranchTracker(sys.curve)
    if sys.mode == "closed":
        w = complex(sys.branch_value(i, sys.basepoint))
        bpts = sys.branch_point_list

        def reanchor(s, _i=i):
            # nearest-value matching degenerates where branches collide;
            # the closed form disambiguates there
            if min(abs(s - b) for b in bpts) < 0.05:
                return complex(sys.branch_value(_i, s))
            return None

    else:
        ws = sorted(tracker.all_branches(sys.basepoint), key=lambda v: (v.real, v.imag))
        if not 1 <= i <= len(ws):
            raise InvalidInputError(f"branch index {i} out of range 1..{len(ws)}")
        w = ws[i - 1]
        reanchor = None
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        seg_len = abs(b - a)
        if seg_len == 0:
            continue
        t = 0.0
        dt = 1.0
        w_seg = w
        while t < 1.0 - 1e-15:
            dt = min(dt, 1.0 - t)
            a0 = a + (b - a) * t
            b0 = a + (b - a) * (t + dt)
            mid = (a0 + b0) / 2
            try:
                whole, _wend = _gauss_segment(tracker, a0, b0, w_seg, reanchor)
                left, w_mid = _gauss_segment(tracker, a0, mid, w_seg, reanchor)
                right, w_end = _gauss_segment(tracker, mid, b0, w_mid, reanchor)
            except _StepReject:
                dt /= 2
                if dt < 1e-12:
                    raise NonConvergenceError(
                        f"quadrature step collapsed near {a0}; branch margin "
                        "unattainable (reroute the path)"
                    )
                continue
            err = abs(whole - (left + right))
            if err > tol * max(1.0, seg_len):
                dt /= 2
                if dt < 1e-12:
                    raise NonConvergenceError(f"quadrature did not converge near {a0}")
                continue
            total += left + right
            w_seg = w_end
            t += dt
            if err < tol * 0.01:
                dt *= 2
        w = w_seg
    return float(total.real)


# -- level curves -------------------------------------------------------------


@dataclass(frozen=True)
class LevelCurve:
    """A traced level curve of H~_i - H~_j = 0.

    ``points`` is an ordered polyline; ``residuals`` the per-point values of
    the implicit function; ``critical_points`` any saddles encountered
    (each with its four outgoing level-set directions); ``hit_cut`` whether
    the trace stopped at the Arg-cut barrier.
    """

    pair: tuple
    points: np.ndarray
    residuals: np.ndarray
    closed: bool
    critical_points: tuple
    hit_cut: bool

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    directions: tuple


class _ClosedLevelFunction:
    """F = H~_i - H~_j and its gradient from closed forms."""

    def __init__(self, sys, pair):
        self.sys = sys
        self.pair = pair

    def value(self, z):
        return float(self.sys.difference(self.pair, z))

    def gradient(self, z):
        return complex(self.sys.difference_gradient(self.pair, z))

    def second(self, z):
        i, j = self.pair
        return self.sys.branch_derivative(i, z) - self.sys.branch_derivative(j, z)

    def commit(self, z):
        pass


class _IntegralLevelFunction:
    """F for integral mode: increments of Re int (f_i - f_j) from an anchor.

    The anchor starts at the seed with F = 0 (the traced curve is the level
    set through the seed).  Queries integrate from the anchor along a
    straight segment with branch tracking; ``commit`` moves the anchor to an
    accepted trace point so error does not accumulate over rejected
    corrector excursions.
    """

    def __init__(self, sys, pair, seed):
        self.sys = sys
        self.tracker = _BranchTracker(sys.curve)
        self.pair = pair
        ws = sorted(self.tracker.all_branches(seed), key=lambda v: (v.real, v.imag))
        A = len(ws)
        i, j = pair
        if not (1 <= i <= A and 1 <= j <= A):
            raise InvalidInputError(f"branch indices {pair} out of range 1..{A}")
        self.anchor = complex(seed)
        self.wi = ws[i - 1]
        self.wj = ws[j - 1]
        self.f_anchor = 0.0
        self._last = None

    def _integrate_to(self, z):
        z = complex(z)
        total = 0j
        wi, wj = self.wi, self.wj
        if z == self.anchor:
            return self.f_anchor, wi, wj
        dt = 1.0 / (int(abs(z - self.anchor) / 0.05) + 1)
        t = 0.0
        rejects = 0
        while t < 1.0 - 1e-15:
            step_dt = min(dt, 1.0 - t)
            a0 = self.anchor + (z - self.anchor) * t
            b0 = self.anchor + (z - self.anchor) * (t + step_dt)
            try:
                seg_i, wi_end = _gauss_segment(self.tracker, a0, b0, wi)
                seg_j, wj_end = _gauss_segment(self.tracker, a0, b0, wj)
            except _StepReject:
                rejects += 1
                if rejects > 60:
                    raise BranchCollisionError(
                        f"branch margin unattainable near {b0}", where=b0
                    )
                dt = step_dt / 2
                continue
            total += seg_i - seg_j
            wi, wj = wi_end, wj_end
            t += step_dt
            rejects = 0
            dt = min(dt * 1.5, 1.0)
        return float(self.f_anchor + total.real), wi, wj

    def value(self, z):
        f, wi, wj = self._integrate_to(z)
        self._last = (complex(z), f, wi, wj)
        return f

    def gradient(self, z):
        if self._last is None or self._last[0] != complex(z):
            self.value(z)
        _, _, wi, wj = self._last
        return complex(np.conjugate(wi - wj))

    def second(self, z):
        h = 1e-6
        gp = np.conjugate(self.gradient(z + h))
        gm = np.conjugate(self.gradient(z - h))
        return (gp - gm) / (2 * h)

    def commit(self, z):
        if self._last is None or self._last[0] != complex(z):
            self.value(z)
        self.anchor, self.f_anchor, self.wi, self.wj = (
            self._last[0],
            self._last[1],
            self._last[2],
            self._last[3],
        )


def _saddle_directions(g2: complex):
    """The four level-set directions at a critical point with second derivative g2."""
    if g2 == 0:
        base = 0.0
    else:
        base = (math.pi / 2 - cmath.phase(g2)) / 2
    return tuple(base + k * math.pi / 2 for k in range(4))


def _crosses_cut(a: complex, b: complex) -> bool:
    """Does the segment a->b cross the barrier cut {re < 0, im = 0}?"""
    if a.imag == 0 and a.real < 0:
        return True
    if (a.imag > 0) == (b.imag > 0):
        return False
    t = a.imag / (a.imag - b.imag)
    x = a.real + t * (b.real - a.real)
    return x < 0


def _newton_correct(fun, z, tol, max_iter=40):
    for _ in range(max_iter):
        f = fun.value(z)
        if abs(f) < tol:
            return z, f
        g = fun.gradient(z)
        g2 = abs(g) ** 2
        if g2 == 0:
            return None, f
        z = z - f * g / g2
    f = fun.value(z)
    if abs(f) < tol:
        return z, f
    return None, f


def trace_level_curve(sys: HarmonicSystem, pair, seed, step: float = 0.005,
                      residual_tol: float = TRACE_RESIDUAL_TOL,
                      max_points: int = 50000) -> LevelCurve:
    """Predictor-corrector trace of the implicit curve H~_i - H~_j = 0.

    The seed is first Newton-corrected onto the curve; the trace then
    marches both directions, declares the curve closed on returning within
    step/2 of the start, stops at critical points (reporting the saddle and
    its four outgoing directions) and at the Arg-cut barrier.  Every emitted
    point has implicit residual below ``residual_tol``.

    In integral mode the curve traced is the level set of H_i - H_j through
    the seed (offsets are a closed-form construct).
    """
    i, j = pair
    if i == j:
        raise InvalidInputError("level curve needs two distinct branch indices")
    if sys.mode == "closed":
        fun = _ClosedLevelFunction(sys, pair)
    else:
        fun = _IntegralLevelFunction(sys, pair, seed)
    known_criticals = sys.critical_points(pair)

    z0, f0 = _newton_correct(fun, complex(seed), residual_tol)
    if z0 is None:
        raise InvalidInputError(
            f"seed {seed} could not be corrected onto the level curve "
            f"(residual {f0:.3e}); seed closer to the curve"
        )
    fun.commit(z0)

    # gradient scale for the critical-point threshold: median over a local sample
    sample = [
        z0 + 0.5 * (k1 + 1j * k2) / 4
        for k1 in range(-4, 5)
        for k2 in range(-4, 5)
        if (k1, k2) != (0, 0)
    ]
    mags = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in sample:
            try:
                g = abs(fun.gradient(s)) if sys.mode == "closed" else 1.0
            except (InvalidInputError, ZeroDivisionError):
                continue
            if np.isfinite(g):
                mags.append(g)
    grad_scale = float(np.median(mags)) if mags else 1.0
    crit_tol = 1e-6 * grad_scale

    g0 = fun.gradient(z0)
    if abs(g0) < crit_tol:
        raise SaddleAtSeedError(z0, _saddle_directions(fun.second(z0)))

    def march(direction_sign):
        pts = []
        res = []
        criticals = []
        hit_cut = False
        closed = False
        z = z0
        tangent = direction_sign * 1j * g0 / abs(g0)
        h = step
        while len(pts) < max_points:
            candidate = None
            for _ in range(60):
                zp = z + h * tangent
                if _crosses_cut(z, zp):
                    hit_cut = True
                    break
                try:
                    zc, _f = _newton_correct(fun, zp, residual_tol)
                except BranchCollisionError:
                    # the curve runs into a branch collision (integral mode);
                    # shorten, then give up on this direction
                    zc = None
                if zc is None or abs(zc - z) > 3 * h:
                    h /= 2
                    if h < step / 4096:
                        break
                    continue
                g = fun.gradient(zc)
                if abs(g) < crit_tol:
                    candidate = ("saddle", zc, g)
                    break
                t_new = 1j * g / abs(g)
                if (t_new.conjugate() * tangent).real < 0:
                    t_new = -t_new
                turn = abs(cmath.phase(t_new / tangent))
                if turn > 0.45 and h > step / 4096:
                    h /= 2
                    continue
                candidate = ("ok", zc, g, t_new, turn)
                break
            if hit_cut or candidate is None:
                break
            if candidate[0] == "saddle":
                zc = candidate[1]
                criticals.append(CriticalPoint(zc, _saddle_directions(fun.second(zc))))
                pts.append(zc)
                res.append(fun.value(zc))
                break
            _, zc, g, t_new, turn = candidate
            near_crit = next((c for c in known_criticals if abs(zc - c) < max(h, step)), None)
            if near_crit is not None and abs(zc - near_crit) < max(h, step):
                criticals.append(
                    CriticalPoint(near_crit, _saddle_directions(fun.second(near_crit)))
                )
                pts.append(near_crit)
                res.append(fun.value(near_crit))
                break
            fun.commit(zc)
            pts.append(zc)
            res.append(fun.value(zc))
            z = zc
            tangent = t_new
            if turn < 0.1 and h < step:
                h = min(step, 2 * h)
            if len(pts) >= 10 and abs(z - z0) < step / 2:
                closed = True
                break
            if abs(z) > 1e6:
                break
        return pts, res, criticals, hit_cut, closed

    fw_pts, fw_res, fw_crit, fw_cut, fw_closed = march(+1)
    if fw_closed:
        points = [z0] + fw_pts
        residuals = [f0] + fw_res
        criticals = fw_crit
        hit_cut = fw_cut
        closed = True
    else:
        bw_pts, bw_res, bw_crit, bw_cut, bw_closed = march(-1)
        points = list(reversed(bw_pts)) + [z0] + fw_pts
        residuals = list(reversed(bw_res)) + [f0] + fw_res
        criticals = bw_crit + fw_crit
        hit_cut = fw_cut or bw_cut
        closed = bw_closed
        # both marches terminating at the same saddle close the loop there
        if not closed and fw_crit and bw_crit:
            if abs(fw_crit[-1].location - bw_crit[-1].location) < 2 * step:
                closed = True
    return LevelCurve(
        pair=tuple(pair),
        points=np.array(points, dtype=complex),
        residuals=np.array(residuals, dtype=float),
        closed=closed,
        critical_points=tuple(criticals),
        hit_cut=hit_cut,
    )


def level_seed_on_ray(sys: HarmonicSystem, pair, origin, direction,
                      t_range=(1e-9, 64.0)) -> complex:
    """A point on the level set of the pair difference along origin + t*direction.

    Bisects the sign change of F along the ray; origin is typically a
    logarithmic singularity of one branch so F covers both signs.
    """
    fun = _ClosedLevelFunction(sys, pair) if sys.mode == "closed" else None
    if fun is None:
        raise InvalidInputError("ray seeding needs closed-form mode")
    d = complex(direction)
    d /= abs(d)
    o = complex(origin)
    lo, hi = t_range
    flo = fun.value(o + lo * d)
    fhi = fun.value(o + hi * d)
    while flo * fhi > 0 and hi < 1e9:
        hi *= 2
        fhi = fun.value(o + hi * d)
    if flo * fhi > 0:
        raise InvalidInputError("no sign change of the level function along the ray")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        fm = fun.value(o + mid * d)
        if flo * fm <= 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return o + math.sqrt(lo * hi) * d


def trace_conjectured_loop(sys: HarmonicSystem, i: int = 2, step: float = 0.004) -> LevelCurve:
    """The level curve H~_1 = H~_i through the branch point p_i, traced as the
    lobe that winds around z = 1.

    Seeded on the ray from 1 pointing away from p_i so the trace starts on
    the lobe; the loop self-intersects at p_i (a saddle), where the trace
    closes.
    """
    sys._require_closed("the conjectured loop")
    pi = sys.branch_point_list[i - 2]
    direction = 1 - pi
    if abs(direction) < 1e-12:
        direction = 1.0
    seed = level_seed_on_ray(sys, (1, i), 1.0, direction)
    return trace_level_curve(sys, (1, i), seed, step=step)


# -- Psi and regions ----------------------------------------------------------


@dataclass(frozen=True)
class PsiValue:
    value: float
    index: int
    tie: bool


PSI_TIE_TOL = 1e-10


def psi_value(sys: HarmonicSystem, z) -> PsiValue:
    """Max over {H_1, H~_2, ..., H~_A} with the achieving (1-based) index.

    Ties within 1e-10 are broken by the smallest index and reported.
    """
    vals = [float(sys.shifted(i, z)) for i in range(1, sys.num_branches + 1)]
    top = max(vals)
    idx = next(k for k, v in enumerate(vals, start=1) if v >= top - PSI_TIE_TOL)
    tie = sum(1 for v in vals if v >= top - PSI_TIE_TOL) > 1
    return PsiValue(top, idx, tie)


@dataclass(frozen=True)
class RegionGrid:
    """Per-cell argmax labels over a box, with the boundary cells K.

    ``labels[iy, ix]`` is the 1-based branch index achieving the maximum at
    the cell center; ``kmask`` marks cells whose 4-neighbors carry a
    different label (pairs straddling the Arg-cut barrier are never
    compared).
    """

    box: tuple
    resolution: int
    labels: np.ndarray
    kmask: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    @property
    def cell_width(self) -> float:
        return self.xs[1] - self.xs[0] if len(self.xs) > 1 else 0.0

    @property
    def cell_height(self) -> float:
        return self.ys[1] - self.ys[0] if len(self.ys) > 1 else 0.0

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(self.cell_width, self.cell_height)

    def k_points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        return (X + 1j * Y)[self.kmask]

    def labels_present(self):
        return sorted(int(v) for v in np.unique(self.labels))

    def domain_mask(self) -> np.ndarray:
        """Approximation of the domain D: non-H_1 cells dilated by one cell."""
        inner = self.labels != 1
        out = inner.copy()
        out[1:, :] |= inner[:-1, :]
        out[:-1, :] |= inner[1:, :]
        out[:, 1:] |= inner[:, :-1]
        out[:, :-1] |= inner[:, 1:]
        return out


def classify_regions(sys: HarmonicSystem, box, resolution: int) -> RegionGrid:
    """Label every grid cell by the branch achieving Psi at its center.

    ``box`` is (xmin, xmax, ymin, ymax); the grid has resolution x resolution
    cells.  Boundary cells (label different from a 4-neighbor, cut-barrier
    pairs excluded) make up the discrete singular set K.
    """
    sys._require_closed("region classification")
    xmin, xmax, ymin, ymax = box
    if not (xmin < xmax and ymin < ymax):
        raise InvalidInputError(f"empty box {box}")
    res = int(resolution)
    if res < 2:
        raise InvalidInputError("resolution must be at least 2")
    xs = xmin + (np.arange(res) + 0.5) * (xmax - xmin) / res
    ys = ymin + (np.arange(res) + 0.5) * (ymax - ymin) / res
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    stack = np.stack([sys.shifted(i, Z) for i in range(1, sys.num_branches + 1)])
    stack = np.where(np.isfinite(stack), stack, -np.inf)
    labels = np.argmax(stack, axis=0).astype(np.int16) + 1
    kmask = np.zeros_like(labels, dtype=bool)
    diff_v = labels[:-1, :] != labels[1:, :]
    # vertical neighbor pairs straddling the cut {re < 0, im = 0} are barriers
    straddle = (np.sign(Y[:-1, :]) != np.sign(Y[1:, :])) & (X[:-1, :] < 0)
    diff_v &= ~straddle
    kmask[:-1, :] |= diff_v
    kmask[1:, :] |= diff_v
    diff_h = labels[:, :-1] != labels[:, 1:]
    kmask[:, :-1] |= diff_h
    kmask[:, 1:] |= diff_h
    return RegionGrid(tuple(box), res, labels, kmask, xs, ys)
