"""Rank-one perturbation families of cyclic self-adjoint and unitary operators.

A diagonalized cyclic operator (sites + cyclic-vector weights) is perturbed
along its cyclic vector; the perturbed spectral measures are computed two
independent ways:

* the transform route -- secular-equation roots and residues of the
  resolvent identity K_lam = K_0 / (1 + lam K_0) on the line, level sets of
  the associated inner function and residues of the analogous Moebius
  update on the circle;
* the dense-matrix oracle -- full eigendecomposition of the perturbed
  matrix, masses as squared projections onto the cyclic vector.

The module also carries the operator <-> inner-function dictionary (with
its conformal transfer to the half-plane), Clark measures of finite
Blaschke products, and the two measure-disintegration identities: averaging
the perturbed family over the coupling recovers Lebesgue measure on the
line, and averaging a Clark family over the spectral parameter recovers
normalized arc length.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (ConstructionError, DomainError, PoleError, ResidueError)
from .herglotz import (BlaschkeProduct, HalfPlaneInner, HerglotzRational,
                       blaschke_eval, boundary_derivative_modulus,
                       cauchy_rational_disk, cauchy_rational_line,
                       cauchy_zeros_line, cayley_transfer, level_set,
                       level_set_batch, rational_eval, residue_masses_line,
                       secular_roots_line)
from .measures import (BorelSetSpec, CircleAtomicMeasure, LineAtomicMeasure,
                       TWO_PI, measure_of, simon_wolff_integral, total_mass)
from .quadrature import integrate_circle, integrate_line, vectorize_scalar

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class CyclicOperatorModel:
    """Diagonalized cyclic operator with cyclic-vector weights.

    ``sites`` are eigenvalues (line) or eigenvalue angles (circle), strictly
    increasing; ``weights`` are |<phi, e_j>|^2 > 0 and sum to 1, so the
    cyclic vector is a unit vector with nonzero component in every
    eigenspace.
    """

    kind: str
    sites: tuple[float, ...]
    weights: tuple[float, ...]

    @classmethod
    def from_data(cls, kind: str, sites: Iterable[float],
                  weights: Iterable[float]) -> "CyclicOperatorModel":
        sites = [float(s) for s in sites]
        if kind == "circle":
            sites = [s % TWO_PI for s in sites]
        pairs = sorted(zip(sites, (float(w) for w in weights)))
        return cls(kind, tuple(s for s, _ in pairs), tuple(w for _, w in pairs))

    def __post_init__(self):
        if self.kind not in ("line", "circle"):
            raise ConstructionError(f"kind must be 'line' or 'circle', got {self.kind!r}")
        if len(self.sites) != len(self.weights) or not self.sites:
            raise ConstructionError("sites and weights must be non-empty and aligned")
        if any(w <= 0.0 for w in self.weights):
            raise ConstructionError("all weights must be positive")
        if any(b <= a for a, b in zip(self.sites, self.sites[1:])):
            raise ConstructionError("sites must be strictly increasing and distinct")
        if self.kind == "circle" and (self.sites[0] < 0.0 or self.sites[-1] >= TWO_PI):
            raise ConstructionError("circle sites must be angles in [0, 2*pi)")
        defect = abs(math.fsum(self.weights) - 1.0)
        if defect > WEIGHT_SUM_TOL:
            raise ConstructionError(
                f"weights sum to 1 {defect:.3e} away; cyclic vector not unit")

    @property
    def dimension(self) -> int:
        return len(self.sites)

    def dense(self) -> np.ndarray:
        """Dense diagonal realization."""
        if self.kind == "line":
            return np.diag(np.asarray(self.sites, dtype=float))
        return np.diag(np.exp(1j * np.asarray(self.sites)))

    def cyclic_vector(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.weights, dtype=float))


def model_to_json_dict(model: CyclicOperatorModel) -> dict:
    return {"kind": model.kind, "sites": list(model.sites),
            "weights": list(model.weights)}


def model_from_json_dict(obj: dict) -> CyclicOperatorModel:
    try:
        return CyclicOperatorModel.from_data(obj["kind"], obj["sites"], obj["weights"])
    except (KeyError, TypeError) as exc:
        raise ConstructionError(f"malformed model object: {exc}") from exc


def spectral_measure(model: CyclicOperatorModel):
    """Spectral measure of the cyclic vector: atoms at sites, model weights."""
    atoms = zip(model.sites, model.weights)
    if model.kind == "line":
        return LineAtomicMeasure.from_atoms(atoms)
    return CircleAtomicMeasure.from_atoms(atoms)


def aronszajn_krein_eval(K0: HerglotzRational, lam: float, z: complex) -> complex:
    """Perturbed transform K0(z) / (1 + lam K0(z))."""
    val = rational_eval(K0, z)
    den = 1.0 + lam * val
    if den == 0.0:
        raise PoleError(f"1 + lam*K0 vanishes at {z}")
    return val / den


# ---------------------------------------------------------------------------
# Self-adjoint family
# ---------------------------------------------------------------------------

def perturb_selfadjoint(model: CyclicOperatorModel, lam: float) -> LineAtomicMeasure:
    """Spectral measure of the rank-one update at coupling lam.

    Atoms are the secular roots of K0 = -1/lam, masses the residues
    1/(lam^2 K0'); lam = 0 returns the unperturbed measure.
    """
    if model.kind != "line":
        raise DomainError("self-adjoint perturbation needs a line model")
    mu0 = spectral_measure(model)
    if lam == 0.0:
        return mu0
    K0 = cauchy_rational_line(mu0)
    roots = secular_roots_line(K0, lam)
    masses = residue_masses_line(K0, lam, roots)
    return LineAtomicMeasure.from_atoms(zip(roots, masses))


def matrix_oracle_selfadjoint(model: CyclicOperatorModel, lam: float,
                              max_dimension: int = 4096) -> LineAtomicMeasure:
    """Independent oracle: dense eigendecomposition of diag + lam phi phi*."""
    if model.kind != "line":
        raise DomainError("self-adjoint oracle needs a line model")
    if model.dimension > max_dimension:
        raise DomainError(f"dimension {model.dimension} exceeds {max_dimension}")
    phi = model.cyclic_vector()
    a = np.diag(np.asarray(model.sites, dtype=float)) + lam * np.outer(phi, phi)
    evals, evecs = np.linalg.eigh(a)
    masses = (evecs.T @ phi) ** 2
    return LineAtomicMeasure.from_atoms(zip(evals, masses))


def simon_wolff_classify(mu: LineAtomicMeasure, probes: Sequence[float]) -> list[dict]:
    """Evaluate the second-moment integral at each probe; finite iff off-atom."""
    out = []
    for y in probes:
        val = simon_wolff_integral(mu, float(y))
        out.append({"probe": float(y), "value": val, "finite": math.isfinite(val)})
    return out


# ---------------------------------------------------------------------------
# Unitary family and the inner-function dictionary
# ---------------------------------------------------------------------------

def unitary_spectral_measure(matrix: np.ndarray, vector: np.ndarray,
                             unitarity_tol: float = 1e-9) -> CircleAtomicMeasure:
    """Spectral measure of ``vector`` for a unitary matrix.

    Uses a complex Schur decomposition: for a normal matrix the Schur factor
    is diagonal and the Schur basis is a genuinely orthonormal eigenbasis,
    which keeps masses accurate even for clustered eigenvalues.
    """
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    defect = np.linalg.norm(matrix.conj().T @ matrix - np.eye(n), 2)
    if defect > unitarity_tol:
        raise DomainError(f"matrix is not unitary: ||U*U - I|| = {defect:.3e}")
    t, q = scipy.linalg.schur(matrix, output="complex")
    evals = np.diag(t)
    masses = np.abs(q.conj().T @ np.asarray(vector, dtype=complex)) ** 2
    angles = np.angle(evals) % TWO_PI
    return CircleAtomicMeasure.from_atoms(zip(angles, masses))


def rank_one_unitary_update(matrix: np.ndarray, vector: np.ndarray,
                            alpha: complex) -> np.ndarray:
    """U + (alpha - 1) (., U^{-1} v) v for unitary U (U^{-1} = U*)."""
    matrix = np.asarray(matrix, dtype=complex)
    v = np.asarray(vector, dtype=complex)
    uinv_v = matrix.conj().T @ v
    return matrix + (alpha - 1.0) * np.outer(v, np.conj(uinv_v))


def matrix_oracle_unitary(model: CyclicOperatorModel, alpha: complex
                          ) -> CircleAtomicMeasure:
    """Dense oracle for the unitary rank-one family."""
    if model.kind != "circle":
        raise DomainError("unitary oracle needs a circle model")
    u = model.dense()
    v = model.cyclic_vector().astype(complex)
    return unitary_spectral_measure(rank_one_unitary_update(u, v, alpha), v)


def inner_from_unitary(model: CyclicOperatorModel,
                       contract_tol: float = 1e-10) -> BlaschkeProduct:
    """The inner function theta with K nu_1 = 1/(1 - theta), theta(0) = 0.

    nu_1 is the model's spectral measure; theta = 1 - 1/K nu_1 is a degree-N
    Blaschke product because Re K nu_1 > 1/2 on the disk for a probability
    measure.  The returned product is verified against the defining identity
    on sampled disk points.
    """
    if model.kind != "circle":
        raise DomainError("inner_from_unitary needs a circle model")
    nu1 = spectral_measure(model)
    K = cauchy_rational_disk(nu1)
    p = np.asarray(K.num)
    q = np.asarray(K.den)
    # theta = (P - Q)/P; its zeros are the roots of P - Q, all inside.
    diff = np.zeros(max(p.size, q.size), dtype=complex)
    diff[: p.size] += p
    diff[: q.size] -= q
    roots = np.roots(diff[::-1]) if diff.size > 1 else np.zeros(0, dtype=complex)
    zeros = []
    for r in roots:
        if abs(r) <= 1e-10:
            r = 0.0 + 0.0j
        if abs(r) > 1.0 - 1e-12:
            raise ConstructionError(
                f"inner-function zero {r} escaped the open disk")
        zeros.append(complex(r))

    anchor = None
    for z0 in (0.37 + 0.11j, 0.21 - 0.33j, -0.29 + 0.17j, 0.05 + 0.41j):
        if not zeros or min(abs(z0 - zj) for zj in zeros) > 1e-6:
            anchor = z0
            break
    if anchor is None:
        raise ConstructionError("no anchor point clear of the zeros")
    target = 1.0 - 1.0 / rational_eval(K, anchor)
    bare = 1.0 + 0.0j
    for zj in zeros:
        bare *= (anchor - zj) / (1.0 - np.conj(zj) * anchor)
    c = target / bare
    c /= abs(c)
    theta = BlaschkeProduct(tuple(zeros), complex(c))

    sample = 0.6 * np.exp(2j * np.pi * np.arange(16) / 16.0)
    kvals = np.array([rational_eval(K, z) for z in sample])
    tvals = blaschke_eval(theta, sample)
    defect = np.max(np.abs(kvals * (1.0 - tvals) - 1.0))
    if defect > contract_tol:
        raise ConstructionError(
            f"K*(1-theta) = 1 fails by {defect:.3e} on sampled disk points")
    if abs(blaschke_eval(theta, 0.0)) > contract_tol:
        raise ConstructionError("theta(0) != 0 for a unit-mass model")
    return theta


def inner_from_selfadjoint(model: CyclicOperatorModel) -> HalfPlaneInner:
    """Half-plane inner function of the line model via the conformal transfer.

    Level sets {theta = alpha(lam)} with alpha(lam) = (lam - i)/(lam + i)
    coincide with the secular root sets {K = -1/lam}.
    """
    if model.kind != "line":
        raise DomainError("inner_from_selfadjoint needs a line model")
    return cayley_transfer(cauchy_rational_line(spectral_measure(model)))


def _disk_transform_and_derivative(nu: CircleAtomicMeasure, z):
    xi = nu.points()
    m = np.asarray(nu.masses)
    zarr = np.atleast_1d(np.asarray(z, dtype=complex))
    den = 1.0 - np.conj(xi)[None, :] * zarr[:, None]
    k = np.sum(m[None, :] / den, axis=1)
    kp = np.sum(m[None, :] * np.conj(xi)[None, :] / den ** 2, axis=1)
    return k, kp


def perturb_unitary(model: CyclicOperatorModel, alpha: complex
                    ) -> CircleAtomicMeasure:
    """Spectral measure of the unitary rank-one update at parameter alpha.

    Atoms are the level set {theta = alpha} of the model's inner function;
    masses are residues of alpha*K/(1 + (alpha-1)K) at the atoms, computed
    from the unperturbed transform.  alpha = 1 returns the base measure.
    """
    if model.kind != "circle":
        raise DomainError("unitary perturbation needs a circle model")
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise DomainError(f"|alpha| = {abs(alpha)} is not unimodular")
    alpha /= abs(alpha)
    nu1 = spectral_measure(model)
    if abs(alpha - 1.0) < 1e-14:
        return nu1
    theta = inner_from_unitary(model)
    pts = level_set(theta, alpha)
    k, kp = _disk_transform_and_derivative(nu1, pts)
    residues = -np.conj(pts) * alpha * k / ((alpha - 1.0) * kp)
    if np.max(np.abs(residues.imag)) > 1e-8:
        raise ResidueError(
            f"atom mass has imaginary part {np.max(np.abs(residues.imag)):.3e}")
    masses = residues.real
    if np.any(masses <= 0.0):
        raise ResidueError("non-positive atom mass from residue extraction")
    angles = np.angle(pts) % TWO_PI
    return CircleAtomicMeasure.from_atoms(zip(angles, masses))


# ---------------------------------------------------------------------------
# Clark measures
# ---------------------------------------------------------------------------

def clark_measure(theta: BlaschkeProduct, alpha: complex) -> CircleAtomicMeasure:
    """Clark measure of theta at unimodular alpha.

    Atoms at the boundary level set {theta = alpha}; the mass at an atom xi
    is 1/|theta'(xi)|, the residue of the normalized transform at xi.  For a
    finite Blaschke product |theta'| > 0 everywhere on the circle so every
    level set is simple and every alpha is regular.
    """
    pts = level_set(theta, alpha)
    deriv = boundary_derivative_modulus(theta, pts)
    if np.any(deriv < 1e-12):
        raise ResidueError("vanishing angular derivative at a level-set point")
    angles = np.angle(pts) % TWO_PI
    return CircleAtomicMeasure.from_atoms(zip(angles, 1.0 / deriv))


@dataclass(frozen=True)
class ClarkFamily:
    """The measure family {mu_alpha} generated by one inner function."""

    theta: BlaschkeProduct

    def measure(self, alpha: complex) -> CircleAtomicMeasure:
        return clark_measure(self.theta, alpha)

    def expected_total_mass(self, alpha: complex) -> float:
        """Total mass Re((alpha + theta(0)) / (alpha - theta(0)))."""
        t0 = blaschke_eval(self.theta, 0.0)
        return ((alpha + t0) / (alpha - t0)).real


def circle_measure_deviation(a: CircleAtomicMeasure, b: CircleAtomicMeasure
                             ) -> tuple[float, float]:
    """Max angular and mass deviation under the best cyclic atom alignment.

    Both atom lists are sorted by angle, but an atom sitting numerically on
    either side of the 0/2*pi seam shifts the whole ordering by one; the
    cyclic scan makes the comparison seam-proof.
    """
    if len(a) != len(b):
        return math.inf, math.inf
    pa, ma = np.asarray(a.angles), np.asarray(a.masses)
    pb, mb = np.asarray(b.angles), np.asarray(b.masses)
    best = (math.inf, math.inf)
    for shift in range(len(a)):
        da = np.abs(np.angle(np.exp(1j * (np.roll(pb, -shift) - pa)))).max()
        if da < best[0]:
            best = (float(da), float(np.abs(np.roll(mb, -shift) - ma).max()))
    return best


def verify_clark_correspondence(model: CyclicOperatorModel, alphas,
                                include_oracle: bool = False,
                                atom_tol: float = 1e-9,
                                mass_tol: float = 1e-8) -> dict:
    """Check that the Clark family of the model's inner function reproduces
    the unitary perturbation family atom-by-atom.

    Optionally also compares both against the dense-matrix oracle.  Returns
    a report with per-alpha and maximal deviations; never raises on a
    mismatch (the report carries the failures).
    """
    theta = inner_from_unitary(model)
    per_alpha = []
    max_atom = 0.0
    max_mass = 0.0
    for alpha in alphas:
        alpha = complex(alpha)
        clark = clark_measure(theta, alpha)
        pert = perturb_unitary(model, alpha)
        routes = [("clark", clark), ("perturb", pert)]
        if include_oracle:
            routes.append(("oracle", matrix_oracle_unitary(model, alpha)))
        entry = {"alpha": alpha, "atom_deviation": 0.0, "mass_deviation": 0.0,
                 "mass_sums": [total_mass(m) for _, m in routes]}
        base = routes[0][1]
        for _, other in routes[1:]:
            da, dm = circle_measure_deviation(base, other)
            entry["atom_deviation"] = max(entry["atom_deviation"], da)
            entry["mass_deviation"] = max(entry["mass_deviation"], dm)
        per_alpha.append(entry)
        max_atom = max(max_atom, entry["atom_deviation"])
        max_mass = max(max_mass, entry["mass_deviation"])
    return {
        "max_atom_deviation": max_atom,
        "max_mass_deviation": max_mass,
        "atom_tolerance": atom_tol,
        "mass_tolerance": mass_tol,
        "pass": max_atom <= atom_tol and max_mass <= mass_tol,
        "per_alpha": per_alpha,
    }


# ---------------------------------------------------------------------------
# Disintegration identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisintegrationResult:
    estimate: float
    expected: float
    quadrature_error: float
    tail: float = 0.0

    @property
    def defect(self) -> float:
        return abs(self.estimate - self.expected)


def disintegration_check_line(model: CyclicOperatorModel, borel: BorelSetSpec,
                              window: float = 100.0, tol: float = 1e-3
                              ) -> DisintegrationResult:
    """Verify that integrating lam -> mu_lam(B) over the coupling recovers |B|.

    The window [-window, window] is integrated adaptively with breakpoints
    at the couplings where a secular root crosses an endpoint of B (the
    integrand jumps there).  Beyond the window each root branch sweeps a
    computable interval, so the two tails are added exactly: the branch
    through gap i sweeps from its position at lam = +/-window to the zero of
    the transform in that gap, and the outside branch sweeps off to
    infinity.
    """
    if borel.space != "line":
        raise DomainError("line disintegration needs a line Borel set")
    mu0 = spectral_measure(model)
    K = cauchy_rational_line(mu0)

    breakpoints = [0.0]
    for a, b in borel.pieces:
        for endpoint in (a, b):
            if any(endpoint == t for t in mu0.positions):
                continue
            kval = rational_eval(K, endpoint).real
            if kval != 0.0:
                breakpoints.append(-1.0 / kval)

    def integrand(lam: float) -> float:
        return measure_of(perturb_selfadjoint(model, lam), borel)

    value, err = integrate_line(vectorize_scalar(integrand), -window, window,
                                tol=0.5 * tol, breakpoints=breakpoints)

    zeros = cauchy_zeros_line(K)
    roots_plus = secular_roots_line(K, window)
    roots_minus = secular_roots_line(K, -window)
    tail = 0.0
    for r, zero in zip(roots_plus[:-1], zeros):
        tail += borel.intersect_interval_length(r, zero)
    tail += borel.intersect_interval_length(roots_plus[-1], math.inf)
    for zero, r in zip(zeros, roots_minus[1:]):
        tail += borel.intersect_interval_length(zero, r)
    tail += borel.intersect_interval_length(-math.inf, roots_minus[0])

    return DisintegrationResult(estimate=value + tail,
                                expected=borel.total_length(),
                                quadrature_error=err, tail=tail)


def _circle_membership_mask(angles: np.ndarray, borel: BorelSetSpec) -> np.ndarray:
    mask = np.zeros(angles.shape, dtype=bool)
    for s, e in borel.pieces:
        start = s % TWO_PI
        length = e - s
        mask |= (angles - start) % TWO_PI <= length
    return mask


def disintegration_check_circle(theta: BlaschkeProduct, borel: BorelSetSpec,
                                tol: float = 1e-6) -> DisintegrationResult:
    """Verify that averaging the Clark family over alpha recovers m(B).

    The integrand alpha -> mu_alpha(B) jumps exactly when a level-set point
    crosses an endpoint of B, i.e. at alpha = theta(endpoint); the circle of
    alphas is split there and each smooth piece is integrated by doubling
    trapezoid sums.
    """
    if borel.space != "circle":
        raise DomainError("circle disintegration needs a circle Borel set")
    breakpoints = []
    for s, e in borel.pieces:
        for b in (s, s + (e - s)):
            val = blaschke_eval(theta, cmath.exp(1j * b))
            breakpoints.append(cmath.phase(val) % TWO_PI)

    def integrand(s_arr: np.ndarray) -> np.ndarray:
        alphas = np.exp(1j * np.asarray(s_arr))
        pts = level_set_batch(theta, alphas)
        masses = 1.0 / boundary_derivative_modulus(theta, pts)
        mask = _circle_membership_mask(np.angle(pts) % TWO_PI, borel)
        return np.sum(masses * mask, axis=1)

    value, err = integrate_circle(integrand, tol=0.5 * tol * TWO_PI,
                                  breakpoints=breakpoints)
    return DisintegrationResult(estimate=value / TWO_PI,
                                expected=borel.total_length() / TWO_PI,
                                quadrature_error=err / TWO_PI)
