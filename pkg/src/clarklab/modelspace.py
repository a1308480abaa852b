"""Finite-dimensional model space of a Blaschke product and its operators.

For a degree-N Blaschke product theta, the model space (the orthogonal
complement of theta * H^2 in H^2) is N-dimensional and carries the
compressed shift.  The basis used throughout is the Takenaka-Malmquist
orthonormal system built from theta's zeros in their stored order,

    e_k(z) = sqrt(1-|z_k|^2)/(1-conj(z_k) z) * prod_{j<k} (z-z_j)/(1-conj(z_j) z),

which is orthonormal in closed form (repeated zeros give the confluent
variant automatically) and reduces to the monomials {1, z, ..., z^{N-1}}
when theta = z^N.

Inner products are boundary means over a uniform grid whose size is chosen
from the decay rate of the integrands' Fourier tails (set by the largest
zero modulus), so they are spectrally exact; the Gram matrix is verified to
be the identity at construction.

The operator content:

* ``t_alpha_matrix``   -- the unitary rank-one perturbations of the
  compressed shift, parametrized by a unimodular alpha (theta(0) = 0
  required; the formula is not valid otherwise and no generalization is
  guessed);
* ``v_alpha`` / ``v_alpha_star`` -- the Clark operator from L^2 of a Clark
  measure onto the model space (ratio of transforms) and its adjoint
  (boundary evaluation at the atoms);
* ``hat_conjugate``    -- f -> theta * conj(f) on the boundary, an
  involution on {f : f(0) = 0};
* ``lemma7_decompose`` -- split f0 * hat(f0) = g + theta h with g, h in the
  model space (exact at finite degree: the product lies in the double space,
  which is the orthogonal sum of the space and theta times it);
* ``knu_alpha``        -- the closed-form transform of |f|^2 d(mu_alpha)
  assembled from g, h and the hat data.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DomainError, ResidueError
from .herglotz import (BlaschkeProduct, blaschke_eval, blaschke_to_json_dict,
                       boundary_derivative_modulus)
from .measures import CircleAtomicMeasure, TWO_PI
from .rankone import clark_measure

GRAM_TOL = 1e-10


def theta_fingerprint(theta: BlaschkeProduct) -> str:
    """Stable hash of the Blaschke data; guards vectors against basis mismatch."""
    payload = json.dumps(blaschke_to_json_dict(theta), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def tm_basis_values(zeros: tuple[complex, ...], z) -> np.ndarray:
    """Takenaka-Malmquist basis values, shape (N,) + shape(z)."""
    zarr = np.asarray(z, dtype=complex)
    out = np.empty((len(zeros),) + zarr.shape, dtype=complex)
    carry = np.ones(zarr.shape, dtype=complex)
    for k, zk in enumerate(zeros):
        den = 1.0 - np.conj(zk) * zarr
        out[k] = math.sqrt(1.0 - abs(zk) ** 2) / den * carry
        carry = carry * (zarr - zk) / den
    return out


def _auto_grid_size(zeros) -> int:
    rho = max((abs(z) for z in zeros), default=0.0)
    if rho < 0.5:
        return 512
    need = math.log(1e-15 * (1.0 - rho)) / math.log(rho)
    return int(min(1 << 22, max(512, 1 << int(need).bit_length())))


@dataclass(frozen=True)
class ModelSpace:
    """Immutable model-space context: basis data on a boundary grid."""

    theta: BlaschkeProduct
    fingerprint: str
    grid: np.ndarray          # (M,) unimodular grid points
    basis: np.ndarray         # (N, M) boundary values of the TM basis
    theta_values: np.ndarray  # (M,) boundary values of theta
    basis_at_zero: np.ndarray  # (N,)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    # -- linear algebra over the boundary grid --------------------------------

    def inner(self, f_vals: np.ndarray, g_vals: np.ndarray) -> complex:
        """H^2 inner product <f, g> as a boundary mean."""
        return complex(np.mean(f_vals * np.conj(g_vals)))

    def project(self, f_vals: np.ndarray) -> np.ndarray:
        """Coefficients <f, e_k> of the model-space projection of f."""
        return (self.basis.conj() @ f_vals) / self.grid.size

    def vector(self, coeffs) -> "ModelVector":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.dimension,):
            raise ConstructionError(
                f"expected {self.dimension} coefficients, got {coeffs.shape}")
        return ModelVector(tuple(coeffs), self.fingerprint)

    def constant_one(self) -> "ModelVector":
        """The constant function 1 (lies in the space since theta(0) = 0)."""
        return self.vector(np.conj(self.basis_at_zero))

    def coefficients(self, vec: "ModelVector") -> np.ndarray:
        if vec.space_fingerprint != self.fingerprint:
            raise DomainError("model vector belongs to a different space")
        return np.asarray(vec.coeffs, dtype=complex)

    def boundary_values(self, vec: "ModelVector") -> np.ndarray:
        return self.coefficients(vec) @ self.basis

    def eval_vector(self, vec: "ModelVector", z):
        vals = tm_basis_values(self.theta.zeros, z)
        c = self.coefficients(vec)
        out = np.tensordot(c, vals, axes=(0, 0))
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return complex(out)
        return out


@dataclass(frozen=True)
class ModelVector:
    """Element of a model space, stored as TM-basis coefficients.

    The fingerprint ties the coefficients to the generating Blaschke data.
    """

    coeffs: tuple[complex, ...]
    space_fingerprint: str

    def norm(self) -> float:
        return math.sqrt(math.fsum(abs(c) ** 2 for c in self.coeffs))


def build_model_space(theta: BlaschkeProduct, grid_size: int | None = None
                      ) -> ModelSpace:
    """Construct the model space of theta with a verified orthonormal basis."""
    if theta.degree < 1:
        raise DomainError("model space needs a nonconstant inner function")
    m = grid_size or _auto_grid_size(theta.zeros)
    for _ in range(3):
        grid = np.exp(2j * np.pi * np.arange(m) / m)
        basis = tm_basis_values(theta.zeros, grid)
        gram = basis @ basis.conj().T / m
        defect = float(np.max(np.abs(gram - np.eye(theta.degree))))
        if defect <= GRAM_TOL:
            theta_values = blaschke_eval(theta, grid)
            at_zero = tm_basis_values(theta.zeros, np.array(0.0 + 0.0j))
            return ModelSpace(theta=theta, fingerprint=theta_fingerprint(theta),
                              grid=grid, basis=basis, theta_values=theta_values,
                              basis_at_zero=at_zero.reshape(-1))
        m *= 4
    raise ConstructionError(
        f"basis Gram defect {defect:.3e} > {GRAM_TOL} even at grid size {m // 4}; "
        "zeros too close to the boundary")


def vector_to_json_dict(vec: ModelVector) -> dict:
    return {"fingerprint": vec.space_fingerprint,
            "coeffs": [[c.real, c.imag] for c in vec.coeffs]}


def vector_from_json_dict(ms: ModelSpace, obj: dict) -> ModelVector:
    if obj.get("fingerprint") != ms.fingerprint:
        raise DomainError("vector fingerprint does not match this model space")
    return ms.vector([complex(re, im) for re, im in obj["coeffs"]])


def _require_theta_vanishes_at_zero(ms: ModelSpace, tol: float = 1e-10):
    t0 = blaschke_eval(ms.theta, 0.0)
    if abs(t0) > tol:
        raise DomainError(f"theta(0) = {t0} must vanish for this operation")


def t_alpha_matrix(ms: ModelSpace, alpha: complex,
                   unitarity_tol: float = 1e-10) -> np.ndarray:
    """Matrix of the unitary rank-one perturbation of the compressed shift.

    f -> z*(f - (f, theta/z) theta/z) + (f, theta/z) alpha in the TM basis.
    Requires theta(0) = 0 (so theta/z and the constants live in the space).
    """
    _require_theta_vanishes_at_zero(ms)
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise DomainError(f"|alpha| = {abs(alpha)} is not unimodular")
    alpha /= abs(alpha)
    m = ms.grid.size
    shift = np.einsum("m,km,jm->jk", ms.grid, ms.basis, ms.basis.conj()) / m
    backshifted = ms.theta_values / ms.grid
    v = (ms.basis.conj() @ backshifted) / m
    u = np.conj(ms.basis_at_zero)
    t = shift + alpha * np.outer(u, np.conj(v))
    defect = np.linalg.norm(t.conj().T @ t - np.eye(ms.dimension), 2)
    if defect > unitarity_tol:
        raise ConstructionError(
            f"perturbed shift is not unitary: defect {defect:.3e}")
    return t


def v_alpha(ms: ModelSpace, alpha: complex, values_at_atoms,
            mu: CircleAtomicMeasure | None = None) -> ModelVector:
    """Clark operator: values of f at the atoms of mu_alpha -> model vector.

    The image is K(f mu_alpha) / K(mu_alpha) = K(f mu_alpha) * (1 - conj(alpha) theta);
    near an atom the kernel/zero pair is evaluated by its analytic limit so
    grid points may sit arbitrarily close to (or exactly on) an atom.
    """
    alpha = complex(alpha)
    mu = mu if mu is not None else clark_measure(ms.theta, alpha)
    vals = np.asarray(values_at_atoms, dtype=complex)
    if vals.shape != (len(mu),):
        raise DomainError(f"expected {len(mu)} atom values, got {vals.shape}")
    atoms = mu.points()
    masses = np.asarray(mu.masses)
    one_minus = 1.0 - np.conj(alpha) * ms.theta_values
    f_vals = np.zeros(ms.grid.size, dtype=complex)
    for xi_j, m_j, f_j in zip(atoms, masses, vals):
        den = 1.0 - np.conj(xi_j) * ms.grid
        near = np.abs(den) < 1e-9
        bracket = np.empty_like(den)
        bracket[~near] = one_minus[~near] / den[~near]
        if np.any(near):
            bracket[near] = boundary_derivative_modulus(ms.theta, ms.grid[near])
        f_vals += f_j * m_j * bracket
    return ms.vector(ms.project(f_vals))


def v_alpha_star(ms: ModelSpace, alpha: complex, vec: ModelVector,
                 mu: CircleAtomicMeasure | None = None) -> np.ndarray:
    """Adjoint Clark operator: boundary values of the vector at the atoms."""
    mu = mu if mu is not None else clark_measure(ms.theta, complex(alpha))
    return np.asarray([ms.eval_vector(vec, xi) for xi in mu.points()],
                      dtype=complex)


def intertwine_check(ms: ModelSpace, alpha: complex) -> float:
    """Spectral-norm residual of T_alpha = V_alpha Y_alpha V_alpha^*.

    Y_alpha is multiplication by the atom positions on L^2(mu_alpha); the
    Clark operator is assembled column by column from the normalized point
    masses.
    """
    alpha = complex(alpha)
    mu = clark_measure(ms.theta, alpha)
    n = ms.dimension
    if len(mu) != n:
        raise ResidueError(f"Clark measure has {len(mu)} atoms, expected {n}")
    masses = np.asarray(mu.masses)
    v_mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        values = np.zeros(n, dtype=complex)
        values[j] = 1.0 / math.sqrt(masses[j])
        v_mat[:, j] = ms.coefficients(v_alpha(ms, alpha, values, mu=mu))
    y = np.diag(mu.points())
    t = t_alpha_matrix(ms, alpha)
    return float(np.linalg.norm(t - v_mat @ y @ v_mat.conj().T, 2))


def hat_conjugate(ms: ModelSpace, vec: ModelVector,
                  zero_tol: float = 1e-10) -> ModelVector:
    """The conjugate-linear involution f -> theta * conj(f) on {f(0) = 0}."""
    f0 = ms.eval_vector(vec, 0.0)
    if abs(f0) > zero_tol:
        raise DomainError(f"hat conjugation needs f(0) = 0, got {f0}")
    f_vals = ms.boundary_values(vec)
    return ms.vector(ms.project(ms.theta_values * np.conj(f_vals)))


# Deterministic off-grid boundary samples for residual checks: a golden-angle
# sequence never resonates with the uniform quadrature grid.
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _offgrid_samples(count: int = 64) -> np.ndarray:
    angles = (0.7391 + TWO_PI * _GOLDEN * np.arange(count)) % TWO_PI
    return np.exp(1j * angles)


def lemma7_decompose(ms: ModelSpace, vec: ModelVector,
                     residual_tol: float = 1e-9) -> tuple[ModelVector, ModelVector]:
    """Split f0 * hat(f0) = g + theta * h with g, h in the model space.

    f0 = f - f(0).  The product lies in the model space of theta^2, which is
    the orthogonal sum of the space and theta times it, so g and h are exact
    orthogonal projections; the boundary identity is re-verified on 64
    off-grid samples.
    """
    f0_coeff = ms.coefficients(vec) - ms.eval_vector(vec, 0.0) * np.conj(ms.basis_at_zero)
    f0 = ms.vector(f0_coeff)
    f0_hat = hat_conjugate(ms, f0)
    p_vals = ms.boundary_values(f0) * ms.boundary_values(f0_hat)
    g = ms.vector(ms.project(p_vals))
    h = ms.vector(ms.project(p_vals * np.conj(ms.theta_values)))

    xi = _offgrid_samples()
    resid = (ms.eval_vector(f0, xi) * ms.eval_vector(f0_hat, xi)
             - ms.eval_vector(g, xi)
             - blaschke_eval(ms.theta, xi) * ms.eval_vector(h, xi))
    worst = float(np.max(np.abs(resid)))
    if worst > residual_tol:
        raise ResidueError(
            f"product decomposition residual {worst:.3e} exceeds {residual_tol}; "
            "basis conditioning insufficient")
    return g, h


def knu_alpha(ms: ModelSpace, vec: ModelVector, alpha: complex, z: complex) -> complex:
    """Closed-form Cauchy transform of |f|^2 d(mu_alpha) at z, |z| < 1.

    Assembles (g + alpha h + f(0) hat(f0) + alpha conj(f(0)) f0
    + alpha |f(0)|^2) / (alpha - theta); for f(0) = 0 this reduces to
    (g + alpha h)/(alpha - theta).
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"|z| = {abs(z)} not inside the unit disk")
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise DomainError(f"|alpha| = {abs(alpha)} is not unimodular")
    alpha /= abs(alpha)
    f0_val = ms.eval_vector(vec, 0.0)
    f0_coeff = ms.coefficients(vec) - f0_val * np.conj(ms.basis_at_zero)
    f0 = ms.vector(f0_coeff)
    f0_hat = hat_conjugate(ms, f0)
    g, h = lemma7_decompose(ms, vec)
    numerator = (ms.eval_vector(g, z) + alpha * ms.eval_vector(h, z)
                 + f0_val * ms.eval_vector(f0_hat, z)
                 + alpha * np.conj(f0_val) * ms.eval_vector(f0, z)
                 + alpha * abs(f0_val) ** 2)
    return complex(numerator / (alpha - blaschke_eval(ms.theta, z)))
