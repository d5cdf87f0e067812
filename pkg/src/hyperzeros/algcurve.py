"""The limiting algebraic curve of the Cauchy transform.

For a schedule with slopes alpha_1..alpha_A (numerator) and beta_1..beta_B
(denominator), the limit transform w(z) satisfies

    A(z, w) = prod_i (z w + alpha_i) - w prod_j (z w + beta_j) = 0,

kept both in structured form M(u) - w N(u) with u = z w (M, N univariate
with elementary-symmetric coefficients) and fully expanded.  When the
denominator slopes repeat the numerator ones (beta_i = alpha_{i+1}) the
curve splits into rational branches w = 1/(z-1) and w = -alpha_i/z, which
this module certifies by exact substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .errors import InvalidInputError
from .exact import (
    ONE,
    ZERO,
    ComplexRational,
    poly_add,
    poly_divexact,
    poly_is_zero,
    poly_mul,
    poly_pow,
    poly_scale,
    poly_sub,
    poly_trim,
)
from .hyppoly import ParameterSchedule
from .rootfinding import _FixedCoeffs, solve_all_roots, to_big_complex


def _product_poly(values):
    """prod (u + v) as a univariate coefficient list in u."""
    out = [ONE]
    for v in values:
        out = poly_mul(out, [v, ONE])
    return out


@dataclass(frozen=True)
class BivariateCurve:
    """A(z, w) in structured and expanded form.

    ``m_coeffs``/``n_coeffs`` are the univariate coefficients of M and N in
    u = z w.  ``terms`` maps (j, k) -> exact coefficient of z^j w^k.
    """

    alphas: tuple
    betas: tuple
    m_coeffs: tuple
    n_coeffs: tuple
    terms: dict

    @property
    def degree_w(self) -> int:
        return len(self.alphas)

    def w_polynomial_coeffs(self, z):
        """Exact coefficients (in w) of A(z, .) for an exact z."""
        A = self.degree_w
        out = []
        for k in range(A + 1):
            c = ZERO
            if k < len(self.m_coeffs):
                c = c + self.m_coeffs[k] * (z ** k)
            if 1 <= k and (k - 1) < len(self.n_coeffs):
                c = c - self.n_coeffs[k - 1] * (z ** (k - 1))
            out.append(c)
        return out

    def evaluate(self, z, w):
        """A(z, w) for exact arguments."""
        total = ZERO
        for (j, k), a in self.terms.items():
            total = total + a * (z ** j) * (w ** k)
        return total

    def evaluate_structured(self, z, w):
        """M(zw) - w N(zw), the structured route (used to cross-check terms)."""
        u = z * w
        m = ZERO
        for k, c in enumerate(self.m_coeffs):
            m = m + c * (u ** k)
        nn = ZERO
        for k, c in enumerate(self.n_coeffs):
            nn = nn + c * (u ** k)
        return m - w * nn


def build_curve(schedule: ParameterSchedule) -> BivariateCurve:
    """Expand A(z, w) exactly from the schedule slopes.

    Requires A = B + 1 (built into the schedule) and all alpha_i nonzero;
    a zero slope degenerates the pencil and is rejected.
    """
    for i, al in enumerate(schedule.alphas, start=1):
        if not al:
            raise InvalidInputError(f"alpha_{i} = 0: degenerate pencil, no limit curve")
    m = _product_poly(schedule.alphas)
    n = _product_poly(schedule.betas)
    terms = {}
    for k, c in enumerate(m):
        if c:
            terms[(k, k)] = terms.get((k, k), ZERO) + c
    for k, c in enumerate(n):
        if c:
            terms[(k, k + 1)] = terms.get((k, k + 1), ZERO) - c
    terms = {jk: c for jk, c in terms.items() if c}
    return BivariateCurve(
        alphas=schedule.alphas,
        betas=schedule.betas,
        m_coeffs=tuple(m),
        n_coeffs=tuple(n),
        terms=terms,
    )


def rational_branches(schedule: ParameterSchedule):
    """The closed-form branches of the degenerate case as callables.

    branch 1: w = 1/(z-1); branch i >= 2: w = -alpha_i/z.
    """
    if not schedule.is_degenerate:
        raise InvalidInputError("rational branches exist only for degenerate schedules")
    funcs = [lambda z: 1 / (z - 1)]
    for al in schedule.alphas[1:]:
        a = complex(al)
        funcs.append(lambda z, a=a: -a / z)
    return funcs


def branches_at(curve: BivariateCurve, z, precision_bits: int = 128):
    """The A roots in w of A(z, .), sorted lexicographically by (re, im).

    z must avoid 0 (all terms carry z w, the equation degenerates) and
    should avoid 1 and branch points (there the returned list contains
    coinciding values).
    """
    with mp.workprec(precision_bits + 32):
        zz = mp.mpc(z)
        if abs(zz) < mp.mpf(2) ** (-precision_bits // 2):
            raise InvalidInputError(
                "branches_at rejected z = 0: the leading w-coefficient z^B (z-1) "
                "vanishes and the curve degenerates there"
            )
        A = curve.degree_w
        coeffs = []
        for k in range(A + 1):
            c = mp.mpc(0)
            if k < len(curve.m_coeffs):
                c += to_big_complex(curve.m_coeffs[k], precision_bits + 32) * zz ** k
            if 1 <= k and (k - 1) < len(curve.n_coeffs):
                c -= to_big_complex(curve.n_coeffs[k - 1], precision_bits + 32) * zz ** (k - 1)
            coeffs.append(c)
        if abs(coeffs[-1]) == 0:
            raise InvalidInputError(
                f"leading w-coefficient of A({z}, .) vanishes (z in {{0, 1}}?)"
            )
        if A == 1:
            return [-coeffs[0] / coeffs[1]]
        roots, _, _, _, _ = solve_all_roots(_FixedCoeffs(coeffs), A, precision_bits)
        return roots


@dataclass(frozen=True)
class BranchPointSet:
    """Zeros of the w-discriminant of A(z, .), excluding the singular z in {0, 1}."""

    points: tuple
    degenerate: bool
    exact_points: tuple
    residual_bounds: tuple
    excluded_singular: tuple


def _sylvester_determinant(rows):
    """Fraction-free (Bareiss) determinant of a matrix of exact polynomials."""
    m = [[list(e) for e in row] for row in rows]
    size = len(m)
    prev = [ONE]
    for k in range(size - 1):
        if poly_is_zero(m[k][k]):
            swap = next(
                (r for r in range(k + 1, size) if not poly_is_zero(m[r][k])), None
            )
            if swap is None:
                return []
            m[k], m[swap] = m[swap], m[k]
            # a row swap flips the sign of the determinant
            m[k] = [poly_scale(e, ComplexRational(-1)) for e in m[k]]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = poly_sub(poly_mul(m[k][k], m[i][j]), poly_mul(m[i][k], m[k][j]))
                m[i][j] = poly_divexact(num, prev) if prev != [ONE] else num
            m[i][k] = []
        prev = m[k][k]
    return poly_trim(m[size - 1][size - 1])


def discriminant_z(curve: BivariateCurve):
    """Resultant_w(A, dA/dw) as an exact univariate polynomial in z."""
    A = curve.degree_w
    # w-coefficients of A and dA/dw, as polynomials in z
    p = []
    for k in range(A + 1):
        entry = []
        if k < len(curve.m_coeffs) and curve.m_coeffs[k]:
            entry = [ZERO] * k + [curve.m_coeffs[k]]
        if 1 <= k and (k - 1) < len(curve.n_coeffs) and curve.n_coeffs[k - 1]:
            entry = poly_sub(entry, [ZERO] * (k - 1) + [curve.n_coeffs[k - 1]])
        p.append(poly_trim(entry))
    q = [poly_scale(p[k], ComplexRational(k)) for k in range(1, A + 1)]
    dp = A
    dq = A - 1
    size = dp + dq
    rows = []
    for r in range(dq):
        row = [[] for _ in range(size)]
        for k in range(dp + 1):
            row[r + k] = list(p[dp - k])
        rows.append(row)
    for r in range(dp):
        row = [[] for _ in range(size)]
        for k in range(dq + 1):
            row[r + k] = list(q[dq - k])
        rows.append(row)
    return _sylvester_determinant(rows)


def branch_points(curve: BivariateCurve, schedule: ParameterSchedule,
                  precision_bits: int = 128) -> BranchPointSet:
    """Points where branches collide.

    Degenerate case: exactly p_i = alpha_i / (alpha_i + 1) (the collisions of
    branch i with branch 1; collisions among the rational branches i, j >= 2
    are z-independent and excluded for distinct slopes).  General case: the
    zeros of the w-discriminant, found at high precision and certified by
    residual.  z in {0, 1} is excluded as singular, not branching.
    """
    if schedule.is_degenerate:
        exact = []
        for i, al in enumerate(schedule.alphas[1:], start=2):
            if al == ComplexRational(-1):
                raise InvalidInputError(f"alpha_{i} = -1 puts the branch point at infinity")
            exact.append(al / (al + 1))
        seen = []
        for p in exact:
            if p not in seen:
                seen.append(p)
        pts = tuple(to_big_complex(p, precision_bits) for p in seen)
        return BranchPointSet(
            points=pts,
            degenerate=True,
            exact_points=tuple(seen),
            residual_bounds=tuple(mp.mpf(0) for _ in seen),
            excluded_singular=(),
        )
    disc = discriminant_z(curve)
    if not disc:
        raise InvalidInputError("discriminant vanishes identically: curve is non-reduced")
    if len(disc) == 1:
        return BranchPointSet((), False, (), (), ())
    roots, residuals, _, prec, _ = solve_all_roots(
        _FixedCoeffs([to_big_complex(c, precision_bits + 64) for c in disc]),
        len(disc) - 1,
        precision_bits,
    )
    guard = mp.mpf(2) ** (-precision_bits // 2)
    kept = []
    kept_res = []
    excluded = []
    with mp.workprec(precision_bits):
        for r, res in zip(roots, residuals):
            if abs(r) < guard or abs(r - 1) < guard:
                excluded.append(mp.mpc(r))
            else:
                kept.append(mp.mpc(r))
                kept_res.append(res)
    return BranchPointSet(
        points=tuple(kept),
        degenerate=False,
        exact_points=(),
        residual_bounds=tuple(kept_res),
        excluded_singular=tuple(excluded),
    )


@dataclass(frozen=True)
class RationalBranchReport:
    """Exact residuals of the rational branches substituted into A(z, w)."""

    branch_names: tuple
    residual_polys: tuple

    @property
    def all_vanish(self) -> bool:
        return all(poly_is_zero(r) for r in self.residual_polys)


def verify_rational_branches(schedule: ParameterSchedule) -> RationalBranchReport:
    """Substitute w = 1/(z-1) and w = -alpha_i/z into A(z, w) symbolically.

    The substitution is done as rational functions: with w = P/Q the
    cleared numerator sum_{j,k} a_{jk} z^j P^k Q^(A-k) must vanish
    identically.  Requires the degenerate slope pattern; exact vanishing is
    certified coefficient by coefficient.
    """
    if not schedule.is_degenerate:
        raise InvalidInputError(
            "verify_rational_branches requires beta_i = alpha_{i+1} for all i "
            f"(betas={[str(b) for b in schedule.betas]}, "
            f"alphas={[str(a) for a in schedule.alphas]})"
        )
    curve = build_curve(schedule)
    A = curve.degree_w
    substitutions = [("w = 1/(z-1)", [ONE], [ComplexRational(-1), ONE])]
    for i, al in enumerate(schedule.alphas[1:], start=2):
        substitutions.append((f"w = -alpha_{i}/z", [-al], [ZERO, ONE]))
    names = []
    residuals = []
    for name, P, Q in substitutions:
        total = []
        for (j, k), a in sorted(curve.terms.items()):
            term = poly_scale(
                poly_mul(
                    poly_mul([ZERO] * j + [ONE], poly_pow(P, k)),
                    poly_pow(Q, A - k),
                ),
                a,
            )
            total = poly_add(total, term)
        names.append(name)
        residuals.append(tuple(total))
    return RationalBranchReport(tuple(names), tuple(residuals))
