"""Certified multiprecision zeros of exact polynomials.

All zeros are found simultaneously by Ehrlich-Aberth iteration seeded on
Newton-polygon circles (radii from the coefficient-based root-magnitude
bound), with companion-matrix eigenvalues as a deterministic fallback for
hard seeds.  Coefficients of this polynomial family span hundreds of orders
of magnitude, so the working precision carries the coefficient spread on
top of the requested precision, and every root is certified a posteriori by
a running-error Horner bound.  If certification fails the solve is retried
at doubled precision, up to a hard cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np
from mpmath.libmp import from_int, mpf_div, round_nearest

from .errors import InvalidInputError, NonConvergenceError, PoleError
from .exact import ComplexRational
from .hyppoly import HypPolynomial

DEFAULT_PRECISION = 512
MAX_PRECISION = 4096


def fraction_to_mpf(f: Fraction, prec: int) -> mp.mpf:
    """Correctly rounded conversion of an exact rational at ``prec`` bits.

    Built from raw libmp values so the ambient context precision cannot
    re-round the result.
    """
    return mp.make_mpf(
        mpf_div(from_int(f.numerator), from_int(f.denominator), prec, round_nearest)
    )


def to_big_complex(x, prec: int) -> mp.mpc:
    """Correctly rounded conversion of a ComplexRational (or number) at ``prec`` bits."""
    if isinstance(x, ComplexRational):
        return mp.make_mpc(
            (fraction_to_mpf(x.re, prec)._mpf_, fraction_to_mpf(x.im, prec)._mpf_)
        )
    if isinstance(x, (int, Fraction)):
        return mp.make_mpc((fraction_to_mpf(Fraction(x), prec)._mpf_, mp.mpf(0)._mpf_))
    return mp.mpc(x)


class _ExactCoeffs:
    """Coefficient provider that re-rounds exact coefficients at any precision."""

    def __init__(self, coeffs):
        self.coeffs = [c if isinstance(c, ComplexRational) else ComplexRational(c) for c in coeffs]

    def at(self, prec):
        return [to_big_complex(c, prec) for c in self.coeffs]


class _FixedCoeffs:
    """Provider over already-rounded mpc coefficients (accuracy capped by input)."""

    def __init__(self, coeffs):
        self.coeffs = [mp.mpc(c) for c in coeffs]

    def at(self, prec):
        return [mp.mpc(c) for c in self.coeffs]


class _ShiftedCoeffs:
    """Provider view that drops the ``shift`` lowest coefficients."""

    def __init__(self, provider, shift):
        self.provider = provider
        self.shift = shift

    def at(self, prec):
        return self.provider.at(prec)[self.shift:]


def _coeff_spread_bits(coeffs) -> int:
    """log2 of max|c_k| over min(|c_0|, |c_n|): precision lost to scaling."""
    with mp.workprec(64):
        mags = [abs(c) for c in coeffs]
        top = max(mags)
        ends = min(m for m in (mags[0], mags[-1]) if m > 0)
        if top <= ends:
            return 0
        return int(mp.ceil(mp.log(top / ends, 2)))


def _newton_polygon_seeds(coeffs, degree):
    """Initial guesses on circles whose radii come from the Newton polygon.

    The upper convex hull of (k, log|c_k|) splits the index range into edges;
    each edge of horizontal length m contributes m seeds on a circle of
    radius exp(slope), which estimates the magnitudes of m roots.
    """
    logs = []
    for k, c in enumerate(coeffs):
        a = abs(c)
        logs.append(-math.inf if a == 0 else float(mp.log(a)))
    hull = []
    for k in range(degree + 1):
        if logs[k] == -math.inf:
            continue
        while len(hull) >= 2:
            (k1, v1), (k2, v2) = hull[-2], hull[-1]
            if (v2 - v1) * (k - k2) <= (logs[k] - v2) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append((k, logs[k]))
    seeds = []
    for e in range(len(hull) - 1):
        (k1, v1), (k2, v2) = hull[e], hull[e + 1]
        m = k2 - k1
        r = math.exp((v1 - v2) / m)
        for j in range(m):
            # fixed irrational-ish offsets break the rotational symmetry that
            # locks simultaneous iterations
            th = 2.0 * math.pi * j / m + 0.4 + float(e)
            seeds.append(mp.mpc(r * math.cos(th), r * math.sin(th)))
    return seeds


def _companion_seeds(coeffs, degree):
    """Fallback seeds from float64 companion eigenvalues; None if not finite."""
    try:
        cf = np.array([complex(c) for c in coeffs], dtype=complex)
    except (OverflowError, ValueError):
        return None
    if not np.all(np.isfinite(cf)) or cf[-1] == 0:
        return None
    with np.errstate(all="ignore"):
        try:
            rts = np.roots(cf[::-1])
        except np.linalg.LinAlgError:
            return None
    if len(rts) != degree or not np.all(np.isfinite(rts)):
        return None
    rts = sorted(rts, key=lambda z: (z.real, z.imag))
    return [mp.mpc(z) for z in rts]


def _aberth_phase(c, z, noise_unit, cap):
    """Run Ehrlich-Aberth sweeps until every root's correction sinks below its
    evaluation-noise floor; returns (z, sweeps, active_left).

    Updates are applied sequentially within a sweep (simultaneous updates can
    lock symmetric pairs into 2-cycles).  The iteration is single-threaded and
    fully deterministic.
    """
    deg = len(c) - 1
    ca = [abs(ck) for ck in c]
    cp = [c[k] * k for k in range(1, deg + 1)]
    active = list(range(deg))
    sweeps = 0
    while active and sweeps < cap:
        sweeps += 1
        still = []
        for i in active:
            zi = z[i]
            az = abs(zi)
            pv = c[deg]
            pt = ca[deg]
            for k in range(deg - 1, -1, -1):
                pv = pv * zi + c[k]
                pt = pt * az + ca[k]
            dv = cp[deg - 1]
            for k in range(deg - 2, -1, -1):
                dv = dv * zi + cp[k]
            if dv == 0:
                # nudge off the exact critical point of p'
                z[i] = zi * (1 + mp.mpf(2) ** -20) + mp.mpf(2) ** -20
                still.append(i)
                continue
            newton = pv / dv
            s = mp.mpc(0)
            for j in range(deg):
                if j != i:
                    s += 1 / (zi - z[j])
            den = 1 - newton * s
            corr = newton / den if den != 0 else newton
            z[i] = zi - corr
            if abs(corr) > 4 * noise_unit * pt / abs(dv):
                still.append(i)
        active = still
    return z, sweeps, len(active)


def _certificates(c, z):
    """Per-root residual and forward-error bounds at the current precision.

    residual: (|p(z)| + noise) / max-term scale, an upper bound on the
    relative backward error; forward: (|p(z)| + noise) / |p'(z)|, a
    first-order bound on the distance to the nearby true root.
    """
    deg = len(c) - 1
    ca = [abs(ck) for ck in c]
    cp = [c[k] * k for k in range(1, deg + 1)]
    unit = mp.mpf(2 * deg) * mp.eps
    residuals = []
    forwards = []
    for zi in z:
        az = abs(zi)
        pv = c[deg]
        pt = ca[deg]
        for k in range(deg - 1, -1, -1):
            pv = pv * zi + c[k]
            pt = pt * az + ca[k]
        scale = mp.mpf(0)
        zp = mp.mpf(1)
        for k in range(deg + 1):
            t = ca[k] * zp
            if t > scale:
                scale = t
            zp *= az
        dv = cp[deg - 1]
        for k in range(deg - 2, -1, -1):
            dv = dv * zi + cp[k]
        noise = unit * pt
        num = abs(pv) + noise
        residuals.append(num / scale if scale > 0 else mp.mpf(0))
        forwards.append(num / abs(dv) if dv != 0 else mp.inf)
    return residuals, forwards


def solve_all_roots(provider, degree, precision_bits, max_precision_bits=MAX_PRECISION):
    """Find all roots of the polynomial given by ``provider`` with certification.

    Returns (roots, residuals, forwards, precision_used, trace).  Roots are
    rounded to ``precision_used`` bits and sorted lexicographically by
    (re, im).  Raises NonConvergenceError with the iteration trace when even
    the precision cap fails to certify.
    """
    if degree < 1:
        raise InvalidInputError("polynomial must have at least one root")
    with mp.workprec(64):
        c_probe = provider.at(64)
    zeros_at_origin = 0
    while zeros_at_origin < degree and c_probe[zeros_at_origin] == 0:
        zeros_at_origin += 1
    if zeros_at_origin:
        # exact roots at 0; solve the reduced polynomial for the rest
        shifted = _ShiftedCoeffs(provider, zeros_at_origin)
        if zeros_at_origin == degree:
            reduced = ([], [], [], precision_bits, [])
        else:
            reduced = solve_all_roots(
                shifted, degree - zeros_at_origin, precision_bits, max_precision_bits
            )
        roots, residuals, forwards, prec, trace = reduced
        with mp.workprec(prec):
            zero = mp.mpc(0)
            roots = [zero] * zeros_at_origin + list(roots)
            residuals = [mp.mpf(0)] * zeros_at_origin + list(residuals)
            forwards = [mp.mpf(0)] * zeros_at_origin + list(forwards)
            order = sorted(range(degree), key=lambda i: (roots[i].real, roots[i].imag))
            roots = [roots[i] for i in order]
            residuals = [residuals[i] for i in order]
            forwards = [forwards[i] for i in order]
        return roots, residuals, forwards, prec, trace
    trace = []
    prec = precision_bits
    z = None
    tried_companion = False
    while True:
        with mp.workprec(64):
            spread = _coeff_spread_bits(provider.at(64))
        wp1 = max(96, spread + 64)
        wp2 = prec + spread + 64
        if z is None:
            with mp.workprec(wp1):
                c1 = provider.at(wp1)
                z = _newton_polygon_seeds(c1, degree)
        with mp.workprec(wp1):
            c1 = provider.at(wp1)
            noise1 = mp.mpf(2 * degree) * mp.mpf(2) ** (-wp1)
            z = [mp.mpc(zi) for zi in z]
            z, sw1, left1 = _aberth_phase(c1, z, noise1, cap=60)
        trace.append({"phase": "seed", "working_bits": wp1, "sweeps": sw1, "active_left": left1})
        if left1 > degree // 2 and not tried_companion:
            # seeding failed badly; fall back to companion eigenvalues
            tried_companion = True
            with mp.workprec(wp1):
                seeds = _companion_seeds(provider.at(wp1), degree)
            if seeds is not None:
                z = seeds
                trace.append({"phase": "companion-reseed", "working_bits": 53})
                continue
        with mp.workprec(wp2):
            c2 = provider.at(wp2)
            noise2 = mp.mpf(2 * degree) * mp.mpf(2) ** (-wp2)
            z = [mp.mpc(zi) for zi in z]
            z, sw2, left2 = _aberth_phase(c2, z, noise2, cap=120 + 2 * degree)
            residuals, forwards = _certificates(c2, z)
            res_ok = all(r < mp.mpf(2) ** (-prec // 4) for r in residuals)
            fwd_thr = mp.mpf(2) ** (-prec // 2)
            cluster_rad = mp.mpf(2) ** (-prec // 8)

            def _fwd_passes(i):
                # a Newton-style forward bound degrades like noise^(1/m) at an
                # m-fold root; clustered roots are certified by residual alone
                # and reported in the measure's cluster diagnostic
                if forwards[i] < fwd_thr * (1 + abs(z[i])):
                    return True
                gap = min(abs(z[i] - z[j]) for j in range(degree) if j != i) if degree > 1 else mp.inf
                return gap < cluster_rad * (1 + abs(z[i]))

            fwd_ok = all(_fwd_passes(i) for i in range(degree))
        trace.append(
            {"phase": "refine", "working_bits": wp2, "sweeps": sw2, "active_left": left2,
             "residuals_ok": res_ok, "forward_ok": fwd_ok}
        )
        if left2 == 0 and res_ok and fwd_ok:
            break
        if prec >= max_precision_bits:
            raise NonConvergenceError(
                f"root finding did not certify at {prec} bits "
                f"(active={left2}, residuals_ok={res_ok}, forward_ok={fwd_ok})",
                trace=trace,
            )
        prec = min(2 * prec, max_precision_bits)
        trace.append({"phase": "double-precision", "target_bits": prec})
    with mp.workprec(prec):
        out = [mp.mpc(zi) for zi in z]
        order = sorted(range(degree), key=lambda i: (out[i].real, out[i].imag))
        out = [out[i] for i in order]
        residuals = [mp.mpf(residuals[i]) for i in order]
        forwards = [mp.mpf(forwards[i]) for i in order]
    return out, residuals, forwards, prec, trace


@dataclass(frozen=True)
class RootCountingMeasure:
    """The zeros of a polynomial, each carrying weight 1/(number of zeros).

    ``roots`` are sorted lexicographically by (re, im) and counted with
    multiplicity; ``clusters`` lists index groups closer together than the
    cluster radius 2^(-precision_bits/8) (a diagnostic -- the atoms keep
    unit weight).
    """

    roots: tuple
    precision_bits: int
    residual_bounds: tuple
    forward_error_bounds: tuple
    certification_threshold: object
    clusters: tuple
    source_n: int

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def weight(self):
        return mp.mpf(1) / self.n

    @property
    def cluster_radius(self):
        return mp.mpf(2) ** (-self.precision_bits // 8)

    def total_mass(self) -> Fraction:
        """Exactly 1: n atoms of weight 1/n (computed in rational arithmetic)."""
        return Fraction(1, self.n) * self.n

    def as_complex_array(self) -> np.ndarray:
        return np.array([complex(z) for z in self.roots])


def _find_clusters(roots, radius):
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < radius * (1 + abs(roots[i])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in groups.values() if len(g) > 1)


def find_roots(p: HypPolynomial, precision_bits: int = DEFAULT_PRECISION,
               max_precision_bits: int = MAX_PRECISION) -> RootCountingMeasure:
    """All zeros of ``p`` with multiplicity, as a root-counting measure.

    Deterministic for fixed inputs.  Raises NonConvergenceError (with the
    iteration trace) if certification fails even at ``max_precision_bits``.
    """
    if precision_bits < 64:
        raise InvalidInputError("precision_bits must be at least 64")
    if p.is_zero():
        raise InvalidInputError("cannot root-find the zero polynomial")
    if p.degree < 1:
        raise InvalidInputError("constant polynomial has no roots")
    provider = _ExactCoeffs(p.coeffs)
    roots, residuals, forwards, prec, _trace = solve_all_roots(
        provider, p.degree, precision_bits, max_precision_bits
    )
    with mp.workprec(prec):
        clusters = _find_clusters(roots, mp.mpf(2) ** (-prec // 8))
        threshold = mp.mpf(2) ** (-prec // 4)
    return RootCountingMeasure(
        roots=tuple(roots),
        precision_bits=prec,
        residual_bounds=tuple(residuals),
        forward_error_bounds=tuple(forwards),
        certification_threshold=threshold,
        clusters=clusters,
        source_n=p.n,
    )


def _check_not_pole(m: RootCountingMeasure, z):
    guard = mp.mpf(2) ** (-m.precision_bits // 2)
    for zeta in m.roots:
        if abs(z - zeta) <= guard * (1 + abs(zeta)):
            raise PoleError(f"evaluation point {z} coincides with a root within {guard}")


def cauchy_transform_at(m: RootCountingMeasure, z) -> mp.mpc:
    """Empirical Cauchy transform (1/n) sum 1/(z - zeta_nu).

    Sign convention: the transform equals p'/(n p); see the package notes on
    conventions.  Raises PoleError when z is within the certified guard
    distance of a root.
    """
    with mp.workprec(m.precision_bits):
        zz = mp.mpc(z)
        _check_not_pole(m, zz)
        total = mp.mpc(0)
        for zeta in m.roots:
            total += 1 / (zz - zeta)
        return total / m.n


def log_potential_at(m: RootCountingMeasure, z) -> mp.mpf:
    """Logarithmic potential (1/n) sum log|z - zeta_nu|."""
    with mp.workprec(m.precision_bits):
        zz = mp.mpc(z)
        _check_not_pole(m, zz)
        total = mp.mpf(0)
        for zeta in m.roots:
            total += mp.log(abs(zz - zeta))
        return total / m.n


@dataclass(frozen=True)
class VietaReport:
    sum_of_roots: object
    expected_sum: object
    product_of_roots: object
    expected_product: object
    sum_deviation: object
    product_deviation: object

    @property
    def max_deviation(self):
        return max(self.sum_deviation, self.product_deviation)


def vieta_check(p: HypPolynomial, m: RootCountingMeasure) -> VietaReport:
    """Compare sum/product of computed roots against exact coefficient ratios."""
    if p.degree != m.n:
        raise InvalidInputError(f"degree {p.degree} != number of roots {m.n}")
    prec = m.precision_bits + 32
    with mp.workprec(prec):
        s = mp.mpc(0)
        prod = mp.mpc(1)
        for z in m.roots:
            s += z
            prod *= z
        cn = to_big_complex(p.coeffs[-1], prec)
        c0 = to_big_complex(p.coeffs[0], prec)
        cn1 = to_big_complex(p.coefficient(p.degree - 1), prec)
        exp_sum = -cn1 / cn
        exp_prod = c0 / cn if p.degree % 2 == 0 else -c0 / cn
        dev_s = abs(s - exp_sum) / max(abs(exp_sum), mp.mpf(1))
        dev_p = abs(prod - exp_prod) / max(abs(exp_prod), mp.mpf(1))
        return VietaReport(s, exp_sum, prod, exp_prod, dev_s, dev_p)
