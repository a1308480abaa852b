"""Exact rational Herglotz machinery and finite Blaschke products.

Cauchy transforms of finite atomic measures are rational functions, and all
identities the verification suites check reduce to exact rational algebra.
This module keeps both representations side by side:

* coefficient pairs (numerator/denominator, ascending degree, denominator
  normalized monic) -- the canonical exchange format;
* a partial-fraction backing (pole positions + weights) attached when the
  rational was built from a measure -- the numerically stable form used by
  the root finders (monomial coefficients of high-degree node polynomials
  misrepresent their roots; the partial-fraction sum does not).

Root finding is correctness-first: the secular equation on the line uses
monotone bisection with virtual endpoint signs (the transform has a pole of
known sign at each atom, so intervals never need endpoint evaluation),
followed by Newton polish; boundary level sets of Blaschke products start
from companion-matrix eigenvalues and polish with Newton on the circle,
where the angular derivative is an explicit positive sum of Poisson kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (ConstructionError, DomainError, PoleError, ResidueError,
                     RootFindingError)
from .measures import CircleAtomicMeasure, LineAtomicMeasure

_TRIM_REL = 1e-14
REDUCED_TOL = 1e-10


def _trim(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ConstructionError("coefficient array must be 1-d and non-empty")
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > _TRIM_REL * scale)[0]
    if keep.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: keep[-1] + 1]


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    c = _trim(coeffs)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


@dataclass(frozen=True)
class HerglotzRational:
    """Rational function as a (numerator, denominator) coefficient pair.

    Coefficients ascend in degree and the denominator is monic.  Use
    :func:`rational_from_coefficients` (validating) or the measure
    constructors :func:`cauchy_rational_line` / :func:`cauchy_rational_disk`
    to build instances; the latter attach a partial-fraction backing.
    """

    num: tuple[complex, ...]
    den: tuple[complex, ...]
    pf_kind: str | None = field(default=None, compare=False)
    pf_nodes: tuple = field(default=(), compare=False)
    pf_weights: tuple = field(default=(), compare=False)

    @property
    def num_degree(self) -> int:
        return len(self.num) - 1

    @property
    def den_degree(self) -> int:
        return len(self.den) - 1


def rational_from_coefficients(num: Sequence[complex], den: Sequence[complex],
                               check_reduced: bool = True) -> HerglotzRational:
    """Validated constructor: trims, normalizes the denominator monic, and
    rejects common roots (within REDUCED_TOL) so near-cancellation is
    surfaced instead of absorbed.

    Degree dominance (deg num <= deg den) holds automatically for every
    transform of a finite measure and is asserted by those constructors;
    plain polynomials (needed as derivative results) are accepted here.
    """
    n = _trim(np.asarray(num, dtype=complex))
    d = _trim(np.asarray(den, dtype=complex))
    if np.all(d == 0.0):
        raise ConstructionError("denominator is identically zero")
    lead = d[-1]
    n = n / lead
    d = d / lead
    if check_reduced and n.size > 1 and d.size > 1 and np.any(n != 0.0):
        rn = _poly_roots(n)
        rd = _poly_roots(d)
        if rn.size and rd.size:
            dist = np.abs(rn[:, None] - rd[None, :])
            scale = np.maximum(1.0, np.abs(rd[None, :]))
            if np.any(dist <= REDUCED_TOL * scale):
                raise ConstructionError(
                    "numerator and denominator share a root within tolerance; "
                    "reduce the fraction first")
    return HerglotzRational(tuple(n), tuple(d))


def _prefix_suffix_product(factors: list[np.ndarray]) -> tuple[list, list]:
    n = len(factors)
    prefix = [np.ones(1, dtype=complex)] * (n + 1)
    suffix = [np.ones(1, dtype=complex)] * (n + 1)
    for i in range(n):
        prefix[i + 1] = npoly.polymul(prefix[i], factors[i])
    for i in range(n - 1, -1, -1):
        suffix[i] = npoly.polymul(suffix[i + 1], factors[i])
    return prefix, suffix


def cauchy_rational_line(mu: LineAtomicMeasure) -> HerglotzRational:
    """Cauchy transform sum m_j/(t_j - z) as a rational with line backing."""
    t = np.asarray(mu.positions)
    m = np.asarray(mu.masses)
    factors = [np.array([tj, -1.0], dtype=complex) for tj in t]
    prefix, suffix = _prefix_suffix_product(factors)
    den = prefix[len(factors)]
    num = np.zeros(max(1, den.size - 1), dtype=complex)
    for j, mj in enumerate(m):
        term = mj * npoly.polymul(prefix[j], suffix[j + 1])
        num[: term.size] += term
    lead = den[-1]
    base = rational_from_coefficients(num / lead, den / lead, check_reduced=False)
    assert base.num_degree <= base.den_degree
    return HerglotzRational(base.num, base.den, pf_kind="line",
                            pf_nodes=tuple(float(x) for x in t),
                            pf_weights=tuple(float(x) for x in m))


def cauchy_rational_disk(nu: CircleAtomicMeasure) -> HerglotzRational:
    """Disk Cauchy transform sum m_j/(1 - conj(xi_j) z) with disk backing."""
    xi = nu.points()
    m = np.asarray(nu.masses)
    factors = [np.array([1.0, -np.conj(x)], dtype=complex) for x in xi]
    prefix, suffix = _prefix_suffix_product(factors)
    den = prefix[len(factors)]
    num = np.zeros(max(1, den.size - 1), dtype=complex)
    for j, mj in enumerate(m):
        term = mj * npoly.polymul(prefix[j], suffix[j + 1])
        num[: term.size] += term
    lead = den[-1]
    base = rational_from_coefficients(num / lead, den / lead, check_reduced=False)
    assert base.num_degree <= base.den_degree
    return HerglotzRational(base.num, base.den, pf_kind="disk",
                            pf_nodes=tuple(complex(x) for x in xi),
                            pf_weights=tuple(float(x) for x in m))


def rational_eval(f: HerglotzRational, z: complex) -> complex:
    """Evaluate f at z.  Uses the partial-fraction backing when present."""
    z = complex(z)
    if f.pf_kind == "line":
        t = np.asarray(f.pf_nodes)
        if z.imag == 0.0 and any(z.real == tj for tj in f.pf_nodes):
            raise PoleError(f"evaluation at pole {z.real}")
        return complex(np.sum(np.asarray(f.pf_weights) / (t - z)))
    if f.pf_kind == "disk":
        xi = np.asarray(f.pf_nodes)
        den = 1.0 - np.conj(xi) * z
        if np.any(den == 0.0):
            raise PoleError(f"evaluation at reflected pole of {z}")
        return complex(np.sum(np.asarray(f.pf_weights) / den))
    dval = complex(npoly.polyval(z, np.asarray(f.den)))
    if dval == 0.0:
        raise PoleError(f"denominator vanishes at {z}")
    return complex(npoly.polyval(z, np.asarray(f.num))) / dval


def rational_derivative(f: HerglotzRational) -> HerglotzRational:
    """Quotient-rule derivative, returned in reduced form.

    Common factors between (num' den - num den') and den^2 (they appear
    exactly when the denominator has repeated roots) are cancelled by
    pairing nearby roots; the validating constructor then re-checks the
    result, so silent near-cancellation cannot slip through.
    """
    n = np.asarray(f.num)
    d = np.asarray(f.den)
    new_num = npoly.polysub(npoly.polymul(npoly.polyder(n), d),
                            npoly.polymul(n, npoly.polyder(d)))
    new_den = npoly.polymul(d, d)
    new_num = _trim(new_num)
    new_den = _trim(new_den)
    if new_den.size == 1:
        return rational_from_coefficients(new_num, new_den, check_reduced=False)
    rn = list(_poly_roots(new_num))
    rd = list(_poly_roots(new_den))
    lead_n = new_num[-1] if np.any(new_num != 0.0) else 0.0
    lead_d = new_den[-1]
    cancel_tol = 1e-6
    kept_d = []
    for root_d in rd:
        best = None
        for i, root_n in enumerate(rn):
            dist = abs(root_n - root_d)
            if dist <= cancel_tol * max(1.0, abs(root_d)):
                if best is None or dist < abs(rn[best] - root_d):
                    best = i
        if best is None:
            kept_d.append(root_d)
        else:
            rn.pop(best)
    if np.all(new_num == 0.0):
        return rational_from_coefficients([0.0], [1.0], check_reduced=False)
    num_poly = lead_n * npoly.polyfromroots(rn) if rn else np.array([lead_n])
    den_poly = lead_d * npoly.polyfromroots(kept_d) if kept_d else np.array([lead_d])
    return rational_from_coefficients(num_poly, den_poly)


def rational_to_json_dict(f: HerglotzRational) -> dict:
    return {"num": [[c.real, c.imag] for c in f.num],
            "den": [[c.real, c.imag] for c in f.den]}


def rational_from_json_dict(obj: dict) -> HerglotzRational:
    num = [complex(re, im) for re, im in obj["num"]]
    den = [complex(re, im) for re, im in obj["den"]]
    return rational_from_coefficients(num, den)


# ---------------------------------------------------------------------------
# Finite Blaschke products
# ---------------------------------------------------------------------------

_BOUNDARY_CHECK_POINTS = 64


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product c * prod (z - z_j)/(1 - conj(z_j) z).

    All zeros strictly inside the unit disk, |c| = 1.  With this convention
    theta(0) = 0 exactly when some zero sits at the origin.
    """

    zeros: tuple[complex, ...]
    c: complex = 1.0 + 0.0j

    def __post_init__(self):
        zeros = tuple(complex(z) for z in self.zeros)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "c", complex(self.c))
        for z in zeros:
            if abs(z) > 1.0 - 1e-12:
                raise ConstructionError(
                    f"Blaschke zero {z} not strictly inside the unit disk")
        if abs(abs(self.c) - 1.0) > 1e-12:
            raise ConstructionError(f"front constant {self.c} is not unimodular")
        if zeros:
            xi = np.exp(2j * np.pi * np.arange(_BOUNDARY_CHECK_POINTS)
                        / _BOUNDARY_CHECK_POINTS)
            vals = _blaschke_eval_array(zeros, self.c, xi)
            defect = np.max(np.abs(np.abs(vals) - 1.0))
            if defect > 1e-10:
                raise ConstructionError(
                    f"boundary modulus defect {defect:.3e} exceeds 1e-10")

    @property
    def degree(self) -> int:
        return len(self.zeros)


def _blaschke_eval_array(zeros, c, z):
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, c, dtype=complex)
    for zj in zeros:
        out *= (z - zj) / (1.0 - np.conj(zj) * z)
    return out


def blaschke_eval(theta: BlaschkeProduct, z):
    """Evaluate theta at z (scalar or array).

    Well-defined on the closed disk; outside, raises PoleError exactly at a
    reflected zero 1/conj(z_j).
    """
    zarr = np.asarray(z, dtype=complex)
    for zj in theta.zeros:
        if zj != 0 and np.any(zarr * np.conj(zj) == 1.0):
            raise PoleError(f"evaluation at reflected zero 1/conj({zj})")
    out = _blaschke_eval_array(theta.zeros, theta.c, zarr)
    if np.isscalar(z) or zarr.ndim == 0:
        return complex(out)
    return out


def blaschke_derivative(theta: BlaschkeProduct, z):
    """theta'(z) by the product rule (stable at the zeros themselves)."""
    zarr = np.asarray(z, dtype=complex)
    out = np.zeros(zarr.shape if zarr.ndim else (1,), dtype=complex)
    zs = theta.zeros
    n = len(zs)
    for j in range(n):
        rest = np.full(out.shape, theta.c, dtype=complex)
        for k in range(n):
            if k != j:
                rest *= (zarr - zs[k]) / (1.0 - np.conj(zs[k]) * zarr)
        dj = (1.0 - abs(zs[j]) ** 2) / (1.0 - np.conj(zs[j]) * zarr) ** 2
        out += rest * dj
    if np.isscalar(z) or zarr.ndim == 0:
        return complex(out[0] if out.ndim else out)
    return out


def boundary_derivative_modulus(theta: BlaschkeProduct, xi):
    """|theta'| on the unit circle: sum_j (1 - |z_j|^2) / |xi - z_j|^2.

    This equals d/dt arg theta(e^{it}) and is strictly positive, which is
    why boundary level sets of a finite Blaschke product are always simple.
    """
    xiarr = np.asarray(xi, dtype=complex)
    out = np.zeros(xiarr.shape if xiarr.ndim else (1,), dtype=float)
    for zj in theta.zeros:
        out += (1.0 - abs(zj) ** 2) / np.abs(xiarr - zj) ** 2
    if np.isscalar(xi) or xiarr.ndim == 0:
        return float(out[0] if out.ndim else out)
    return out


def blaschke_numerator_denominator(theta: BlaschkeProduct
                                   ) -> tuple[np.ndarray, np.ndarray]:
    """theta = P/Q with P = c prod(z - z_j), Q = prod(1 - conj(z_j) z)."""
    p = np.array([theta.c], dtype=complex)
    q = np.array([1.0], dtype=complex)
    for zj in theta.zeros:
        p = npoly.polymul(p, np.array([-zj, 1.0]))
        q = npoly.polymul(q, np.array([1.0, -np.conj(zj)]))
    return p, q


def blaschke_to_json_dict(theta: BlaschkeProduct) -> dict:
    return {"zeros": [[z.real, z.imag] for z in theta.zeros],
            "c": [theta.c.real, theta.c.imag]}


def blaschke_from_json_dict(obj: dict) -> BlaschkeProduct:
    zeros = [complex(re, im) for re, im in obj["zeros"]]
    c = complex(obj["c"][0], obj["c"][1])
    return BlaschkeProduct(tuple(zeros), c)


def _require_unimodular(alpha: complex, tol: float = 1e-9) -> complex:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > tol:
        raise DomainError(f"|alpha| = {abs(alpha)} is not unimodular")
    return alpha / abs(alpha)


def _companion_stack(coeffs: np.ndarray) -> np.ndarray:
    """Companion matrices for a stack of ascending coefficient rows."""
    m, deg1 = coeffs.shape
    n = deg1 - 1
    comp = np.zeros((m, n, n), dtype=complex)
    idx = np.arange(n - 1)
    comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -coeffs[:, :-1] / coeffs[:, -1:]
    return comp


def level_set_batch(theta: BlaschkeProduct, alphas, polish_tol: float = 1e-12,
                    max_newton: int = 50) -> np.ndarray:
    """Boundary level sets {theta = alpha} for many alphas at once.

    Returns an (len(alphas), degree) array of unimodular points, each row
    sorted by angle.  Roots come from companion-matrix eigenvalues of
    P - alpha Q and are polished by Newton in the boundary angle; the
    iteration divides by |theta'| which is strictly positive on the circle.
    """
    if theta.degree == 0:
        raise DomainError("level sets need a nonconstant inner function")
    alphas = np.asarray([_require_unimodular(a) for a in np.atleast_1d(alphas)],
                        dtype=complex)
    p, q = blaschke_numerator_denominator(theta)
    n = theta.degree
    coeffs = np.zeros((alphas.size, n + 1), dtype=complex)
    coeffs[:, : p.size] = p
    coeffs[:, : q.size] -= alphas[:, None] * q
    roots = np.linalg.eigvals(_companion_stack(coeffs))
    t = np.angle(roots)

    converged = np.zeros(t.shape, dtype=bool)
    for _ in range(max_newton):
        xi = np.exp(1j * t)
        vals = _blaschke_eval_array(theta.zeros, theta.c, xi)
        resid = np.angle(np.conj(alphas)[:, None] * vals)
        converged = np.abs(vals - alphas[:, None]) <= polish_tol
        if np.all(converged):
            break
        deriv = boundary_derivative_modulus(theta, xi)
        step = np.where(converged, 0.0, resid / deriv)
        t = t - step
    else:
        xi = np.exp(1j * t)
        vals = _blaschke_eval_array(theta.zeros, theta.c, xi)
        worst = np.max(np.abs(vals - alphas[:, None]))
        if worst > 1e-9:
            raise RootFindingError(
                f"level-set Newton polish stalled at residual {worst:.3e}")

    xi = np.exp(1j * t)
    order = np.argsort(np.angle(xi) % (2.0 * math.pi), axis=1)
    return np.take_along_axis(xi, order, axis=1)


def level_set(theta: BlaschkeProduct, alpha: complex,
              polish_tol: float = 1e-12) -> np.ndarray:
    """All degree(theta) boundary solutions of theta(xi) = alpha, sorted by angle."""
    return level_set_batch(theta, [alpha], polish_tol=polish_tol)[0]


# ---------------------------------------------------------------------------
# Secular equation on the line
# ---------------------------------------------------------------------------

def _line_pf(K: HerglotzRational) -> tuple[np.ndarray, np.ndarray]:
    """Positions and masses backing a line Cauchy transform.

    Recovers them from the coefficients when no backing is attached (poles
    must be real and residues positive, otherwise K was not the transform
    of a positive line measure).
    """
    if K.pf_kind == "line":
        return np.asarray(K.pf_nodes, dtype=float), np.asarray(K.pf_weights, dtype=float)
    den = np.asarray(K.den)
    num = np.asarray(K.num)
    poles = _poly_roots(den)
    if np.any(np.abs(poles.imag) > 1e-9 * np.maximum(1.0, np.abs(poles))):
        raise DomainError("denominator roots are not real; not a line transform")
    t = np.sort(poles.real)
    dprime = npoly.polyder(den)
    w = -npoly.polyval(t, num) / npoly.polyval(t, dprime)
    if np.any(np.abs(w.imag) > 1e-9 * np.maximum(1.0, np.abs(w))) or np.any(w.real <= 0.0):
        raise DomainError("residues are not positive; not a positive measure")
    return t, w.real


def _cauchy_line_value(t, m, x):
    """K(x) for an array of real probes, one row per probe."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.sum(m[None, :] / (t[None, :] - x[:, None]), axis=1)


def _bisect_interior(t, m, target, iters: int = 64) -> np.ndarray:
    """One root of K = target strictly inside each gap (t_j, t_{j+1}).

    K increases from -inf to +inf across every gap, so the endpoint signs
    are known without evaluation and bisection cannot fail.
    """
    lo = t[:-1].copy()
    hi = t[1:].copy()
    if lo.size == 0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gmid = _cauchy_line_value(t, m, mid) - target
        above = gmid > 0.0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _bisect_outside(t, m, target) -> float:
    """The single root of K = target outside the atom range.

    target < 0 puts it above the top atom, target > 0 below the bottom one.
    """
    # K - target increases across either outside bracket: from -inf at the
    # pole-side end (target < 0, above the atoms) or from -target < 0 at the
    # far end (target > 0, below the atoms) up through zero.
    span = max(1.0, t[-1] - t[0])
    total = float(np.sum(m))
    if target < 0.0:
        lo = t[-1]
        hi = lo + max(span, -total / target)
        for _ in range(200):
            if _cauchy_line_value(t, m, [hi])[0] - target > 0.0:
                break
            hi = lo + 2.0 * (hi - lo)
        else:
            raise RootFindingError(
                f"no sign change above {t[-1]} for target {target}")
    else:
        hi = t[0]
        lo = hi - max(span, total / target)
        for _ in range(200):
            if _cauchy_line_value(t, m, [lo])[0] - target < 0.0:
                break
            lo = hi - 2.0 * (hi - lo)
        else:
            raise RootFindingError(
                f"no sign change below {t[0]} for target {target}")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        g = _cauchy_line_value(t, m, [mid])[0] - target
        if g > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cauchy_zeros_line(K: HerglotzRational) -> np.ndarray:
    """The N-1 real zeros of the transform, one strictly inside each gap."""
    t, m = _line_pf(K)
    return _bisect_interior(t, m, 0.0)


def secular_roots_line(K: HerglotzRational, lam: float) -> np.ndarray:
    """All N real solutions of K(x) = -1/lam, sorted ascending.

    Exactly one root lies strictly between consecutive atoms; the remaining
    root sits above the top atom for lam > 0 and below the bottom atom for
    lam < 0.  Each root is bisected into its bracket and Newton-polished to
    |K(x) + 1/lam| <= 1e-12 * |1/lam| (up to the evaluation noise floor of
    the transform itself).
    """
    lam = float(lam)
    if lam == 0.0:
        raise DomainError("secular equation needs a nonzero coupling")
    t, m = _line_pf(K)
    target = -1.0 / lam
    interior = _bisect_interior(t, m, target)
    outside = _bisect_outside(t, m, target)
    roots = np.sort(np.concatenate([interior, [outside]]))

    for _ in range(4):
        g = _cauchy_line_value(t, m, roots) - target
        kp = np.sum(m[None, :] / (t[None, :] - roots[:, None]) ** 2, axis=1)
        roots = roots - g / kp

    resid = np.abs(_cauchy_line_value(t, m, roots) - target)
    # Attainable floor in binary64: summation noise plus the jump of K
    # across one ulp of root position (K' can be huge next to a pole).
    kp = np.sum(m[None, :] / (t[None, :] - roots[:, None]) ** 2, axis=1)
    eps = np.finfo(float).eps
    noise = eps * (32.0 * np.sum(np.abs(m[None, :] / (t[None, :] - roots[:, None])),
                                 axis=1)
                   + 4.0 * kp * (1.0 + np.abs(roots)))
    allowed = np.maximum(1e-12 * abs(target), noise)
    if np.any(resid > allowed):
        worst = int(np.argmax(resid - allowed))
        raise RootFindingError(
            f"secular root at {roots[worst]} has residual {resid[worst]:.3e} "
            f"(allowed {allowed[worst]:.3e}); interlacing bracket "
            f"may be violated")
    return roots


def residue_masses_line(K: HerglotzRational, lam: float, roots) -> np.ndarray:
    """Masses 1/(lam^2 K'(x)) of the perturbed measure at the secular roots.

    All masses are positive and must sum to the unperturbed total mass
    within 1e-10 (cyclic vector norm is conserved).
    """
    lam = float(lam)
    if lam == 0.0:
        raise DomainError("residues need a nonzero coupling")
    t, m = _line_pf(K)
    roots = np.asarray(roots, dtype=float)
    kp = np.sum(m[None, :] / (t[None, :] - roots[:, None]) ** 2, axis=1)
    if np.any(kp < 1e-14):
        raise ResidueError(f"K' = {kp.min():.3e} too small at a root; "
                           "degenerate clustering")
    masses = 1.0 / (lam ** 2 * kp)
    defect = abs(math.fsum(masses) - math.fsum(m))
    if defect > 1e-10 * max(1.0, math.fsum(m)):
        raise ResidueError(f"residue masses miss total mass by {defect:.3e}")
    return masses


# ---------------------------------------------------------------------------
# Disk <-> half-plane conformal transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlaneInner:
    """Inner function on the upper half-plane, stored via its disk transfer.

    eval(z) = disk Blaschke evaluated at (z - i)/(z + i); modulus < 1 on the
    open upper half-plane and 1 on the real axis.
    """

    disk: BlaschkeProduct

    def eval(self, z):
        zarr = np.asarray(z, dtype=complex)
        w = (zarr - 1j) / (zarr + 1j)
        out = _blaschke_eval_array(self.disk.zeros, self.disk.c, w)
        if np.isscalar(z) or zarr.ndim == 0:
            return complex(out)
        return out

    @property
    def degree(self) -> int:
        return self.disk.degree


def _mobius_compose_halfplane(p: np.ndarray, nominal_degree: int) -> np.ndarray:
    """(z + i)^n * p((z - i)/(z + i)) as polynomial coefficients in z."""
    out = np.zeros(1, dtype=complex)
    lo = np.array([-1j, 1.0])   # z - i
    hi = np.array([1j, 1.0])    # z + i
    for k in range(nominal_degree + 1):
        ak = p[k] if k < p.size else 0.0
        if ak == 0.0:
            continue
        term = np.array([ak], dtype=complex)
        for _ in range(k):
            term = npoly.polymul(term, lo)
        for _ in range(nominal_degree - k):
            term = npoly.polymul(term, hi)
        out = npoly.polyadd(out, term)
    return out


def cayley_transfer(J: HerglotzRational) -> HalfPlaneInner:
    """Half-plane inner function (1 + iJ)/(1 - iJ) of a Herglotz rational J.

    Orientation: |theta| < 1 wherever Im J > 0 (at J = i the value is 0, not
    infinity).  The zeros solve J(z) = i in the upper half-plane and map to
    disk Blaschke zeros through (z - i)/(z + i).
    """
    ji = rational_eval(J, 1j)
    if ji.imag <= 0.0:
        raise DomainError(f"J(i) = {ji} has non-positive imaginary part; "
                          "input is not Herglotz")
    num = np.asarray(J.num)
    den = np.asarray(J.den)
    # J = i  <=>  num - i*den = 0.
    zs = _poly_roots(npoly.polysub(num, 1j * den))
    ws = []
    for z in zs:
        if z.imag <= 0.0:
            raise DomainError(f"solution {z} of J = i left the upper half-plane")
        ws.append((z - 1j) / (z + 1j))
    ws_arr = np.asarray(ws, dtype=complex)

    for w0 in (0.0, 1.0 / 3.0, -1.0 / 3.0, 1j / 3.0, 0.2 + 0.1j):
        if ws_arr.size == 0 or np.min(np.abs(ws_arr - w0)) > 1e-6:
            anchor = complex(w0)
            break
    else:
        raise ConstructionError("no anchor point clear of the Blaschke zeros")
    z0 = 1j * (1.0 + anchor) / (1.0 - anchor)
    jz0 = rational_eval(J, z0)
    target = (1.0 + 1j * jz0) / (1.0 - 1j * jz0)
    bare = np.prod((anchor - ws_arr) / (1.0 - np.conj(ws_arr) * anchor)) if ws else 1.0
    c = target / bare
    c /= abs(c)
    return HalfPlaneInner(BlaschkeProduct(tuple(ws), complex(c)))


def cayley_inverse(hp: HalfPlaneInner) -> HerglotzRational:
    """Recover the Herglotz rational J with (1 + iJ)/(1 - iJ) = hp."""
    pb, qb = blaschke_numerator_denominator(hp.disk)
    n = hp.degree
    p_hp = _mobius_compose_halfplane(pb, n)
    q_hp = _mobius_compose_halfplane(qb, n)
    num = -1j * npoly.polysub(p_hp, q_hp)
    den = npoly.polyadd(p_hp, q_hp)
    return rational_from_coefficients(num, den)


def halfplane_level_set(hp: HalfPlaneInner, alpha: complex) -> np.ndarray:
    """Real solutions of hp(x) = alpha, via the disk level set.

    The disk point xi = 1 corresponds to x = infinity and is dropped (it
    appears only for alpha = hp(infinity)).
    """
    pts = level_set(hp.disk, alpha)
    xs = []
    for xi in pts:
        if abs(xi - 1.0) <= 1e-9:
            continue
        x = 1j * (1.0 + xi) / (1.0 - xi)
        xs.append(x.real)
    return np.sort(np.asarray(xs))


def coupling_to_alpha(lam: float) -> complex:
    """Unimodular label of the coupling lam under the conformal transfer."""
    return (lam - 1j) / (lam + 1j)


def alpha_to_coupling(alpha: complex) -> float:
    """Inverse of coupling_to_alpha (alpha = 1 corresponds to lam = inf)."""
    alpha = _require_unimodular(alpha)
    if abs(alpha - 1.0) < 1e-14:
        raise DomainError("alpha = 1 corresponds to infinite coupling")
    lam = 1j * (1.0 + alpha) / (1.0 - alpha)
    return float(lam.real)
