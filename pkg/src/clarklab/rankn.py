"""Recursive rank-n unitary perturbations and analytic-curve checks.

A rank-n perturbation of a unitary is built recursively, one unimodular
parameter at a time, since a sum of rank-one unitary updates is not unitary;
every intermediate stage is checked for unitarity and for cyclicity of the
next perturbation vector (a lost cyclic vector would silently invalidate
every spectral identity downstream).

For n = 2 the closed-form spectral transforms are available through the
model space of the base operator: with f the model-space function
corresponding to the second vector (and f(0) = 0, i.e. the two vectors
orthogonal), the second-stage transform is a Moebius update of
W = (g + alpha h)/(alpha - theta).  Along an analytic curve
xi -> (I_1(xi), I_2(xi)) the xi-average of these transforms is the value at
conj(I(0)) of a bounded antianalytic function, which yields the closed-form
density function phi; its positive boundary density is 2 Re(phi) - 1 (the
Poisson pairing -- for curves with I_k(0) = 0 this collapses to phi = 1).
General n is exercised through the recursive matrix construction and the
dense-matrix oracle only; no closed forms beyond n = 2 are guessed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, CyclicityError, DomainError
from .herglotz import BlaschkeProduct, blaschke_eval
from .measures import (BorelSetSpec, CircleAtomicMeasure, TWO_PI, measure_of,
                       simon_wolff_integral_circle)
from .modelspace import ModelSpace, ModelVector, build_model_space, lemma7_decompose, v_alpha
from .rankone import (CyclicOperatorModel, inner_from_unitary,
                      rank_one_unitary_update, spectral_measure,
                      unitary_spectral_measure)
from .quadrature import integrate_line, vectorize_scalar


@dataclass(frozen=True)
class AnalyticCurve:
    """Tuple of inner functions defining a curve on the n-torus."""

    components: tuple[BlaschkeProduct, ...]

    def __post_init__(self):
        if not self.components:
            raise ConstructionError("curve needs at least one component")
        for comp in self.components:
            if comp.degree < 1:
                raise ConstructionError("curve components must be nonconstant")

    @property
    def n(self) -> int:
        return len(self.components)


def curve_sample(curve: AnalyticCurve, xi: complex) -> np.ndarray:
    """The torus point (I_1(xi), ..., I_n(xi)) for unimodular xi."""
    xi = complex(xi)
    if abs(abs(xi) - 1.0) > 1e-9:
        raise DomainError(f"|xi| = {abs(xi)} is not unimodular")
    xi /= abs(xi)
    point = np.array([blaschke_eval(c, xi) for c in curve.components])
    defect = np.max(np.abs(np.abs(point) - 1.0))
    if defect > 1e-10:
        raise ConstructionError(f"curve point off the torus by {defect:.3e}")
    return point


def krylov_is_cyclic(matrix: np.ndarray, vector: np.ndarray,
                     rel_tol: float = 1e-10) -> bool:
    """Cyclicity via the Krylov matrix rank (smallest/largest singular value)."""
    n = matrix.shape[0]
    cols = [np.asarray(vector, dtype=complex)]
    for _ in range(n - 1):
        cols.append(matrix @ cols[-1])
    s = np.linalg.svd(np.column_stack(cols), compute_uv=False)
    return bool(s[-1] > rel_tol * s[0])


@dataclass(frozen=True)
class RankNPerturbationFamily:
    """Base circle model plus n cyclic unit perturbation vectors.

    Vector entries are indexed against the model's (sorted) sites.
    """

    base: CyclicOperatorModel
    vectors: tuple

    def __post_init__(self):
        if self.base.kind != "circle":
            raise ConstructionError("rank-n families live over circle models")
        vecs = tuple(np.asarray(v, dtype=complex) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise ConstructionError("at least one perturbation vector required")
        u = self.base.dense()
        for i, v in enumerate(vecs):
            if v.shape != (self.base.dimension,):
                raise ConstructionError(f"vector {i} has shape {v.shape}")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ConstructionError(f"vector {i} is not a unit vector")
            if not krylov_is_cyclic(u, v):
                raise CyclicityError(f"vector {i} is not cyclic for the base")

    @property
    def n(self) -> int:
        return len(self.vectors)


def family_to_json_dict(family: RankNPerturbationFamily) -> dict:
    from .rankone import model_to_json_dict
    return {"base": model_to_json_dict(family.base),
            "vectors": [[[c.real, c.imag] for c in v] for v in family.vectors]}


def family_from_json_dict(obj: dict) -> RankNPerturbationFamily:
    from .rankone import model_from_json_dict
    base = model_from_json_dict(obj["base"])
    vectors = tuple(np.array([complex(re, im) for re, im in v])
                    for v in obj["vectors"])
    return RankNPerturbationFamily(base, vectors)


def recursive_unitary(family: RankNPerturbationFamily, alphas,
                      unitarity_tol: float = 1e-10,
                      check_cyclicity: bool = True) -> np.ndarray:
    """Apply the staged rank-one updates U_{a^1}, ..., U_{a^n}.

    Each stage perturbs along the next vector with respect to the *current*
    operator's inverse; unitarity and (optionally) cyclicity of the incoming
    vector are verified at every stage.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if alphas.shape != (family.n,):
        raise DomainError(f"expected {family.n} parameters, got {alphas.shape}")
    if np.any(np.abs(np.abs(alphas) - 1.0) > 1e-9):
        raise DomainError("all parameters must be unimodular")
    alphas = alphas / np.abs(alphas)
    u = family.base.dense()
    eye = np.eye(family.base.dimension)
    for k, (alpha_k, phi_k) in enumerate(zip(alphas, family.vectors)):
        if check_cyclicity and k > 0 and not krylov_is_cyclic(u, phi_k):
            raise CyclicityError(f"vector {k} lost cyclicity at stage {k}")
        u = rank_one_unitary_update(u, phi_k, alpha_k)
        defect = np.linalg.norm(u.conj().T @ u - eye, 2)
        if defect > unitarity_tol:
            raise ConstructionError(
                f"stage {k + 1} not unitary: defect {defect:.3e}")
    return u


def orthogonal_collapse_matrix(family: RankNPerturbationFamily, alphas
                               ) -> np.ndarray:
    """Closed-form U + sum alpha_k (., U^{-1} phi_k) phi_k, valid only when
    the perturbation vectors are pairwise orthogonal."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    u = family.base.dense()
    out = u.copy()
    for alpha_k, phi_k in zip(alphas, family.vectors):
        uinv_v = u.conj().T @ phi_k
        out = out + (alpha_k - 1.0) * np.outer(phi_k, np.conj(uinv_v))
    return out


def spectral_measure_of_vector(matrix: np.ndarray, vector: np.ndarray
                               ) -> CircleAtomicMeasure:
    """Dense oracle: atoms at eigenvalue angles, masses |<v, eigvec>|^2."""
    return unitary_spectral_measure(matrix, vector)


def family_model_space(family: RankNPerturbationFamily,
                       vector_index: int = 1) -> tuple[ModelSpace, ModelVector]:
    """Model space of the base operator plus the model-space function of
    one perturbation vector (default the second).

    The base cyclic vector corresponds to the constant 1; vector entries
    divided by the cyclic-vector components give its boundary values at the
    base atoms.
    """
    theta = inner_from_unitary(family.base)
    ms = build_model_space(theta)
    w = np.asarray(family.base.weights)
    values = family.vectors[vector_index] / np.sqrt(w)
    f = v_alpha(ms, 1.0, values, mu=spectral_measure(family.base))
    return ms, f


def _gh_eval(ms: ModelSpace, vec: ModelVector, z):
    g, h = lemma7_decompose(ms, vec)
    return ms.eval_vector(g, z), ms.eval_vector(h, z)


def _require_vanishing_at_zero(ms: ModelSpace, vec: ModelVector, tol: float = 1e-8):
    f0 = ms.eval_vector(vec, 0.0)
    if abs(f0) > tol:
        raise DomainError(f"f(0) = {f0} must vanish (orthogonal second vector)")


def knu_alpha_beta(ms: ModelSpace, vec: ModelVector, alpha: complex,
                   beta: complex, z: complex) -> complex:
    """Two-parameter transform beta W / (1 + (beta - 1) W) at z, |z| < 1,
    with W = (g + alpha h)/(alpha - theta); requires f(0) = 0."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"|z| = {abs(z)} not inside the unit disk")
    alpha = complex(alpha)
    beta = complex(beta)
    for name, val in (("alpha", alpha), ("beta", beta)):
        if abs(abs(val) - 1.0) > 1e-9:
            raise DomainError(f"|{name}| = {abs(val)} is not unimodular")
    _require_vanishing_at_zero(ms, vec)
    gz, hz = _gh_eval(ms, vec, z)
    w = (gz + alpha * hz) / (alpha - blaschke_eval(ms.theta, z))
    den = 1.0 + (beta - 1.0) * w
    return complex(beta * w / den)


def phi_density(ms: ModelSpace, vec: ModelVector, curve: AnalyticCurve,
                z: complex) -> complex:
    """Closed-form curve-average density function phi at z.

    phi(z) = W0 / (conj(I2(0)) + (1 - conj(I2(0))) W0) with
    W0 = (conj(I1(0)) g + h)/(1 - conj(I1(0)) theta): the value at the
    origin of the bounded antianalytic xi-dependence of the two-parameter
    transform.  Analytic in z with |phi| <= 1/(1 - |I2(0)|); identically 1
    when both components vanish at the origin.
    """
    if curve.n != 2:
        raise DomainError("closed-form density is available for 2-component curves")
    _require_vanishing_at_zero(ms, vec)
    c1 = blaschke_eval(curve.components[0], 0.0)
    c2 = blaschke_eval(curve.components[1], 0.0)
    gz, hz = _gh_eval(ms, vec, z)
    w0 = (np.conj(c1) * gz + hz) / (1.0 - np.conj(c1) * blaschke_eval(ms.theta, z))
    return complex(w0 / (np.conj(c2) + (1.0 - np.conj(c2)) * w0))


def herglotz_positivity_check(ms: ModelSpace, vec: ModelVector, alphas,
                              zs) -> float:
    """Minimum of Re[(conj(alpha) g + h)/(1 - conj(alpha) theta)] over grids.

    The fraction is the transform of a probability measure, so the minimum
    must exceed 1/2 everywhere inside the disk.
    """
    _require_vanishing_at_zero(ms, vec)
    g, h = lemma7_decompose(ms, vec)
    zs = np.asarray(zs, dtype=complex)
    gz = np.asarray([ms.eval_vector(g, z) for z in zs])
    hz = np.asarray([ms.eval_vector(h, z) for z in zs])
    tz = np.asarray([blaschke_eval(ms.theta, z) for z in zs])
    smallest = math.inf
    for alpha in np.asarray(alphas, dtype=complex):
        vals = (np.conj(alpha) * gz + hz) / (1.0 - np.conj(alpha) * tz)
        smallest = min(smallest, float(np.min(vals.real)))
    return smallest


@dataclass(frozen=True)
class CurveDisintegrationResult:
    average: float            # quadrature of the oracle measures over xi
    density_integral: float   # integral of the closed-form density over B
    quadrature_error: float

    @property
    def defect(self) -> float:
        return abs(self.average - self.density_integral)


def curve_disintegration_check(family: RankNPerturbationFamily,
                               curve: AnalyticCurve, borel: BorelSetSpec,
                               tol: float = 1e-4) -> CurveDisintegrationResult:
    """Compare the xi-average of nu_{gamma(xi)}(B) with the density integral.

    Left side: adaptive quadrature over xi of the dense-oracle spectral
    measure of the second vector for the staged perturbation at gamma(xi).
    Right side: the integral over B of the positive boundary density
    2 Re(phi) - 1 of the averaged measure (the real/Poisson pairing of the
    closed-form phi; equal to phi when the curve passes through the origin
    of the torus, where phi = 1).
    """
    if family.n != 2 or curve.n != 2:
        raise DomainError("curve disintegration check is the n = 2 harness")
    if borel.space != "circle":
        raise DomainError("needs a circle Borel set")
    ms, f = family_model_space(family)
    phi2 = family.vectors[1]

    def lhs_integrand(s: float) -> float:
        point = curve_sample(curve, cmath.exp(1j * s))
        u = recursive_unitary(family, point, check_cyclicity=False)
        nu = spectral_measure_of_vector(u, phi2)
        return measure_of(nu, borel)

    lhs, err1 = integrate_line(vectorize_scalar(lhs_integrand), 0.0, TWO_PI,
                               tol=0.25 * tol * TWO_PI)

    def rhs_integrand(s_arr: np.ndarray) -> np.ndarray:
        zs = np.exp(1j * np.asarray(s_arr))
        vals = np.array([phi_density(ms, f, curve, z) for z in zs])
        return 2.0 * vals.real - 1.0

    rhs = 0.0
    err2 = 0.0
    for s, e in borel.pieces:
        v, er = integrate_line(rhs_integrand, s, s + (e - s),
                               tol=0.25 * tol * TWO_PI / max(1, len(borel.pieces)))
        rhs += v
        err2 += er
    return CurveDisintegrationResult(average=lhs / TWO_PI,
                                     density_integral=rhs / TWO_PI,
                                     quadrature_error=(err1 + err2) / TWO_PI)


def theorem4_axis_criterion(family: RankNPerturbationFamily, probes
                            ) -> list[dict]:
    """Per-coordinate pure-point criterion on the base spectral measures.

    For each perturbation vector, evaluates the circle second-moment
    integral of its base spectral measure at each unimodular probe; at
    finite rank the integral is finite exactly off the atoms.
    """
    angles = np.asarray(family.base.sites)
    out = []
    for k, phi_k in enumerate(family.vectors):
        mu_k = CircleAtomicMeasure.from_atoms(zip(angles, np.abs(phi_k) ** 2))
        records = []
        for probe in probes:
            val = simon_wolff_integral_circle(mu_k, probe)
            records.append({"probe": complex(probe), "value": val,
                            "finite": math.isfinite(val)})
        out.append({"vector": k, "records": records})
    return out


def theorem9_nullset_check(family: RankNPerturbationFamily,
                           curve: AnalyticCurve, null_angles,
                           xi_angles, tol: float = 1e-9) -> dict:
    """Generic-position check: no atom of nu_{gamma(xi)} may fall on the
    finite null set E, for any sampled xi.

    Returns a report listing every (xi, atom, null point) collision within
    ``tol`` in angle; an empty violation list is a pass.
    """
    if family.n != curve.n:
        raise DomainError("family and curve ranks differ")
    null_angles = [float(a) % TWO_PI for a in null_angles]
    xi_angles = list(xi_angles)
    phi_last = family.vectors[-1]
    violations = []
    for s in xi_angles:
        xi = cmath.exp(1j * float(s))
        point = curve_sample(curve, xi)
        u = recursive_unitary(family, point, check_cyclicity=False)
        nu = spectral_measure_of_vector(u, phi_last)
        for atom in nu.angles:
            for e in null_angles:
                dist = abs(math.remainder(atom - e, TWO_PI))
                if dist <= tol:
                    violations.append({"xi_angle": float(s), "atom": float(atom),
                                       "null_point": float(e), "distance": dist})
    return {"checked": len(xi_angles), "violations": violations,
            "pass": not violations}
