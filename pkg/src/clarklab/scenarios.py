"""Scenario configuration, seeded generators, check registry, run reports.

A scenario is a JSON file naming a seed, optional tolerance overrides and a
list of checks; each check pulls its inputs (operator models, inner
functions, perturbation families, Borel sets, parameter grids) either
explicitly from the file or from the seeded generator.  All randomness
derives from the single scenario seed through a counter-based Philox
generator keyed by (seed, check index, item index), so reruns are
bit-identical and checks can execute concurrently without sharing state.

Report values are serialized as shortest round-trip decimal strings of the
underlying binary64 numbers; wall-clock timings are kept out of the
serialized report unless explicitly requested, which keeps repeated runs
byte-identical.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ScenarioError
from .herglotz import BlaschkeProduct, blaschke_eval, blaschke_from_json_dict
from .measures import (BorelSetSpec, LineAtomicMeasure, TWO_PI,
                       cauchy_transform_disk, measure_from_json_dict,
                       simon_wolff_integral)
from .modelspace import (build_model_space, hat_conjugate, intertwine_check,
                         lemma7_decompose, knu_alpha, t_alpha_matrix, v_alpha,
                         v_alpha_star)
from .rankone import (CyclicOperatorModel, circle_measure_deviation,
                      clark_measure, disintegration_check_circle,
                      disintegration_check_line, inner_from_unitary,
                      matrix_oracle_selfadjoint, matrix_oracle_unitary,
                      model_from_json_dict, perturb_selfadjoint,
                      perturb_unitary)
from .rankn import (AnalyticCurve, RankNPerturbationFamily,
                    curve_disintegration_check, family_from_json_dict,
                    family_model_space, herglotz_positivity_check,
                    knu_alpha_beta, phi_density, recursive_unitary,
                    spectral_measure_of_vector, theorem4_axis_criterion,
                    theorem9_nullset_check)

DEFAULT_TOLERANCES = {
    "algebraic": 1e-9,   # exact identities evaluated in closed form
    "oracle": 1e-8,      # cross-checks against dense eigendecompositions
    "quadrature": 1e-4,  # identities with nested numerical integration
}


# ---------------------------------------------------------------------------
# Seeded generators
# ---------------------------------------------------------------------------

def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))


def _random_sites(rng: np.random.Generator, n: int, kind: str) -> np.ndarray:
    gap = 1.0 / (4.0 * n)
    if kind == "line":
        span = 2.0 - (n - 1) * gap
        u = np.sort(rng.uniform(0.0, span, n))
        return -1.0 + u + gap * np.arange(n)
    span = TWO_PI - n * gap
    u = np.sort(rng.uniform(0.0, span, n))
    return u + gap * np.arange(n)


def random_model_rng(rng: np.random.Generator, n: int, kind: str
                     ) -> CyclicOperatorModel:
    if n < 1:
        raise ScenarioError(f"model size must be >= 1, got {n}")
    sites = _random_sites(rng, n, kind)
    weights = rng.dirichlet(np.ones(n))
    weights = weights / math.fsum(weights)
    return CyclicOperatorModel.from_data(kind, sites, weights)


def random_model(seed: int, n: int, kind: str) -> CyclicOperatorModel:
    """Deterministic random model: sites with minimum separation 1/(4N),
    symmetric-Dirichlet weights, fully determined by the seed."""
    return random_model_rng(_rng(int(seed)), n, kind)


def random_unimodular(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.exp(1j * rng.uniform(0.0, TWO_PI, count))


def random_blaschke(rng: np.random.Generator, degree: int,
                    max_radius: float = 0.8,
                    zero_at_origin: bool = False) -> BlaschkeProduct:
    free = degree - 1 if zero_at_origin else degree
    radii = max_radius * np.sqrt(rng.uniform(0.0, 1.0, free))
    angles = rng.uniform(0.0, TWO_PI, free)
    zeros = list(radii * np.exp(1j * angles))
    if zero_at_origin:
        zeros = [0.0 + 0.0j] + zeros
    c = complex(np.exp(1j * rng.uniform(0.0, TWO_PI)))
    return BlaschkeProduct(tuple(zeros), c)


def random_orthogonal_unit_vector(rng: np.random.Generator, base: np.ndarray,
                                  min_component: float = 1e-3) -> np.ndarray:
    """Unit vector orthogonal to ``base`` with no vanishing component
    (orthogonality gives f(0) = 0 in the model-space picture; nonvanishing
    components keep it cyclic for a diagonal base operator)."""
    n = base.size
    for _ in range(256):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v = v - (np.vdot(base, v)) * base / np.vdot(base, base)
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            continue
        v = v / norm
        if np.min(np.abs(v)) >= min_component:
            return v
    raise ScenarioError("could not draw a cyclic orthogonal vector")


def random_family(rng: np.random.Generator, dimension: int, n: int
                  ) -> RankNPerturbationFamily:
    base = random_model_rng(rng, dimension, "circle")
    phi1 = base.cyclic_vector().astype(complex)
    vectors = [phi1]
    for _ in range(n - 1):
        vectors.append(random_orthogonal_unit_vector(rng, phi1))
    return RankNPerturbationFamily(base, tuple(vectors))


# ---------------------------------------------------------------------------
# Spec resolution
# ---------------------------------------------------------------------------

def _resolve_model(spec: Any, rng: np.random.Generator) -> tuple[CyclicOperatorModel, str]:
    if isinstance(spec, dict) and "random" in spec:
        r = spec["random"]
        model = random_model_rng(rng, int(r["N"]), r.get("kind", "line"))
        return model, f"random(N={r['N']},kind={r.get('kind', 'line')})"
    if isinstance(spec, dict) and "kind" in spec:
        return model_from_json_dict(spec), f"explicit({spec['kind']},N={len(spec['sites'])})"
    raise ScenarioError(f"checks[].models: unrecognized model spec {spec!r}")


def _resolve_theta(spec: Any, rng: np.random.Generator,
                   zero_at_origin: bool = False) -> tuple[BlaschkeProduct, str]:
    if isinstance(spec, dict) and "power" in spec:
        k = int(spec["power"])
        return BlaschkeProduct((0.0 + 0.0j,) * k, 1.0 + 0.0j), f"z^{k}"
    if isinstance(spec, dict) and "random_degree" in spec:
        deg = int(spec["random_degree"])
        theta = random_blaschke(rng, deg, float(spec.get("max_radius", 0.8)),
                                zero_at_origin or bool(spec.get("zero_at_origin", False)))
        return theta, f"random(degree={deg})"
    if isinstance(spec, dict) and "zeros" in spec:
        return blaschke_from_json_dict(spec), f"explicit(degree={len(spec['zeros'])})"
    raise ScenarioError(f"checks[].thetas: unrecognized inner-function spec {spec!r}")


def _resolve_borel(spec: Any) -> BorelSetSpec:
    try:
        return BorelSetSpec(spec["space"], tuple((float(a), float(b))
                                                 for a, b in spec["pieces"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"checks[].borel: malformed Borel set spec: {exc}") from exc


def _resolve_family(spec: Any, rng: np.random.Generator
                    ) -> tuple[RankNPerturbationFamily, str]:
    if isinstance(spec, dict) and "random" in spec:
        r = spec["random"]
        fam = random_family(rng, int(r["N"]), int(r.get("n", 2)))
        return fam, f"random(N={r['N']},n={r.get('n', 2)})"
    if isinstance(spec, dict) and "base" in spec:
        fam = family_from_json_dict(spec)
        return fam, f"explicit(N={fam.base.dimension},n={fam.n})"
    raise ScenarioError(f"checks[].families: unrecognized family spec {spec!r}")


def _resolve_curve(spec: Any, rng: np.random.Generator) -> tuple[AnalyticCurve, str]:
    if not isinstance(spec, dict) or "components" not in spec:
        raise ScenarioError(f"checks[].curves: unrecognized curve spec {spec!r}")
    comps = []
    labels = []
    for comp in spec["components"]:
        theta, label = _resolve_theta(comp, rng)
        comps.append(theta)
        labels.append(label)
    return AnalyticCurve(tuple(comps)), "(" + ",".join(labels) + ")"


# ---------------------------------------------------------------------------
# Records and reports
# ---------------------------------------------------------------------------

@dataclass
class CheckRecord:
    check: str
    parameters: dict
    observed: Any
    expected: Any
    tolerance: float
    passed: bool
    wall_ms: float | None = None


@dataclass
class RunReport:
    scenario: str
    seed: int
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        passed = sum(1 for r in self.records if r.passed)
        return {"total": len(self.records), "passed": passed,
                "failed": len(self.records) - passed}


def _jsonify(value: Any) -> Any:
    """Report encoding: binary64 values become shortest round-trip decimal
    strings so no bits are lost in transit."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return [repr(value.real), repr(value.imag)]
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.complexfloating)):
        return _jsonify(value.item())
    return str(value)


def report_to_json(report: RunReport, timings: bool = False) -> str:
    payload = {
        "scenario": report.scenario,
        "seed": report.seed,
        "summary": report.summary(),
        "records": [
            {
                "check": r.check,
                "parameters": _jsonify(r.parameters),
                "observed": _jsonify(r.observed),
                "expected": _jsonify(r.expected),
                "tolerance": repr(r.tolerance),
                "pass": bool(r.passed),
                "wall_ms": (repr(r.wall_ms) if (timings and r.wall_ms is not None)
                            else None),
            }
            for r in report.records
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# Check handlers.  Each receives (scenario seed, check index, spec,
# tolerances) and returns a list of CheckRecords.
# ---------------------------------------------------------------------------

def _check_secular_oracle(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    lambdas = [float(x) for x in spec.get("lambdas", [0.5, -0.5])]
    for i, mspec in enumerate(spec["models"]):
        model, label = _resolve_model(mspec, _rng(seed, idx, i))
        for lam in lambdas:
            got = perturb_selfadjoint(model, lam)
            want = matrix_oracle_selfadjoint(model, lam)
            pos_dev = float(np.max(np.abs(np.asarray(got.positions)
                                          - np.asarray(want.positions))))
            mass_dev = float(np.max(np.abs(np.asarray(got.masses)
                                           - np.asarray(want.masses))))
            pos_tol = 1e-9 * (1.0 + abs(lam))
            params = {"model": label, "index": i, "lambda": lam}
            records.append(CheckRecord("secular_oracle.positions", params,
                                       pos_dev, 0.0, pos_tol, pos_dev <= pos_tol))
            records.append(CheckRecord("secular_oracle.masses", params,
                                       mass_dev, 0.0, tol["oracle"],
                                       mass_dev <= tol["oracle"]))
    return records


def _check_clark_correspondence(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    for i, mspec in enumerate(spec["models"]):
        rng = _rng(seed, idx, i)
        model, label = _resolve_model(mspec, rng)
        alphas = random_unimodular(rng, int(spec.get("alpha_count", 8)))
        theta = inner_from_unitary(model)
        atom_dev = 0.0
        mass_dev = 0.0
        for alpha in alphas:
            routes = [clark_measure(theta, alpha),
                      perturb_unitary(model, alpha),
                      matrix_oracle_unitary(model, alpha)]
            for other in routes[1:]:
                da, dm = circle_measure_deviation(routes[0], other)
                atom_dev = max(atom_dev, da)
                mass_dev = max(mass_dev, dm)
        params = {"model": label, "index": i, "alphas": len(alphas)}
        records.append(CheckRecord("clark_correspondence.atoms", params,
                                   atom_dev, 0.0, tol["algebraic"],
                                   atom_dev <= tol["algebraic"]))
        records.append(CheckRecord("clark_correspondence.masses", params,
                                   mass_dev, 0.0, tol["oracle"],
                                   mass_dev <= tol["oracle"]))
    return records


def _check_disintegration_line(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    window = float(spec.get("window", 100.0))
    check_tol = float(spec.get("tol", 1e-3))
    for i, mspec in enumerate(spec["models"]):
        model, label = _resolve_model(mspec, _rng(seed, idx, i))
        for j, bspec in enumerate(spec["borel_sets"]):
            borel = _resolve_borel(bspec)
            res = disintegration_check_line(model, borel, window=window,
                                            tol=check_tol)
            params = {"model": label, "index": i, "borel": j, "window": window}
            records.append(CheckRecord("disintegration_line", params,
                                       res.estimate, res.expected, check_tol,
                                       res.defect <= check_tol))
    return records


def _check_disintegration_circle(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    check_tol = float(spec.get("tol", 1e-6))
    for i, tspec in enumerate(spec["thetas"]):
        theta, label = _resolve_theta(tspec, _rng(seed, idx, i))
        for j, bspec in enumerate(spec["borel_sets"]):
            borel = _resolve_borel(bspec)
            res = disintegration_check_circle(theta, borel, tol=check_tol)
            params = {"theta": label, "index": i, "borel": j}
            records.append(CheckRecord("disintegration_circle", params,
                                       res.estimate, res.expected, check_tol,
                                       res.defect <= check_tol))
    return records


def _check_modelspace_suite(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    n_alphas = int(spec.get("alpha_count", 4))
    n_vectors = int(spec.get("vector_count", 20))
    for i, degree in enumerate(spec["degrees"]):
        rng = _rng(seed, idx, i)
        degree = int(degree)
        theta = random_blaschke(rng, degree, zero_at_origin=True)
        ms = build_model_space(theta)
        alphas = random_unimodular(rng, n_alphas)
        unit_dev = 0.0
        intertwine_dev = 0.0
        spectral_dev = 0.0
        for alpha in alphas:
            t = t_alpha_matrix(ms, alpha)
            unit_dev = max(unit_dev, float(np.linalg.norm(
                t.conj().T @ t - np.eye(degree), 2)))
            intertwine_dev = max(intertwine_dev, intertwine_check(ms, alpha))
            mu = clark_measure(theta, alpha)
            eig_angles = np.sort(np.angle(np.linalg.eigvals(t)) % TWO_PI)
            spectral_dev = max(spectral_dev, float(np.max(np.abs(np.angle(
                np.exp(1j * (eig_angles - np.asarray(mu.angles))))))))
        iso_dev = 0.0
        for _ in range(n_vectors):
            alpha = complex(random_unimodular(rng, 1)[0])
            mu = clark_measure(theta, alpha)
            vals = rng.normal(size=degree) + 1j * rng.normal(size=degree)
            f = v_alpha(ms, alpha, vals, mu=mu)
            l2 = math.sqrt(float(np.sum(np.asarray(mu.masses) * np.abs(vals) ** 2)))
            iso_dev = max(iso_dev, abs(f.norm() - l2))
        params = {"degree": degree, "alphas": n_alphas}
        records.append(CheckRecord("modelspace.unitarity", params, unit_dev,
                                   0.0, 1e-10, unit_dev <= 1e-10))
        records.append(CheckRecord("modelspace.intertwine", params,
                                   intertwine_dev, 0.0, tol["algebraic"],
                                   intertwine_dev <= tol["algebraic"]))
        records.append(CheckRecord("modelspace.spectral", params, spectral_dev,
                                   0.0, tol["algebraic"],
                                   spectral_dev <= tol["algebraic"]))
        records.append(CheckRecord("modelspace.isometry", params, iso_dev,
                                   0.0, tol["algebraic"],
                                   iso_dev <= tol["algebraic"]))
    return records


def _check_lemma7_suite(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    n_samples = int(spec.get("samples", 64))
    for i, tspec in enumerate(spec["thetas"]):
        rng = _rng(seed, idx, i)
        theta, label = _resolve_theta(tspec, rng, zero_at_origin=True)
        ms = build_model_space(theta)
        for rep in range(int(spec.get("vector_count", 2))):
            coeffs = rng.normal(size=theta.degree) + 1j * rng.normal(size=theta.degree)
            coeffs /= np.linalg.norm(coeffs)
            f = ms.vector(coeffs)
            g, h = lemma7_decompose(ms, f)
            xi = np.exp(1j * rng.uniform(0.0, TWO_PI, n_samples))
            f0_c = ms.coefficients(f) - ms.eval_vector(f, 0.0) * np.conj(ms.basis_at_zero)
            f0 = ms.vector(f0_c)
            f0h = hat_conjugate(ms, f0)
            resid = np.abs(ms.eval_vector(f0, xi) * ms.eval_vector(f0h, xi)
                           - ms.eval_vector(g, xi)
                           - blaschke_eval(ms.theta, xi) * ms.eval_vector(h, xi))
            boundary_dev = float(np.max(resid))
            alpha = complex(random_unimodular(rng, 1)[0])
            z = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            mu = clark_measure(theta, alpha)
            fvals = np.abs(v_alpha_star(ms, alpha, f, mu=mu)) ** 2
            weighted = type(mu).from_atoms(zip(mu.angles, fvals * np.asarray(mu.masses)))
            direct = cauchy_transform_disk(weighted, z)
            closed = knu_alpha(ms, f, alpha, z)
            transform_dev = abs(direct - closed)
            params = {"theta": label, "index": i, "rep": rep}
            records.append(CheckRecord("lemma7.boundary", params, boundary_dev,
                                       0.0, tol["algebraic"],
                                       boundary_dev <= tol["algebraic"]))
            records.append(CheckRecord("lemma7.transform", params,
                                       transform_dev, 0.0, tol["algebraic"],
                                       transform_dev <= tol["algebraic"]))
    return records


def _check_two_parameter_oracle(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    na = int(spec.get("alpha_count", 8))
    nb = int(spec.get("beta_count", 8))
    nz = int(spec.get("z_count", 4))
    for i, fspec in enumerate(spec["families"]):
        rng = _rng(seed, idx, i)
        family, label = _resolve_family(fspec, rng)
        ms, f = family_model_space(family)
        alphas = random_unimodular(rng, na)
        betas = random_unimodular(rng, nb)
        zs = 0.7 * np.sqrt(rng.uniform(0, 1, nz)) * random_unimodular(rng, nz)
        dev = 0.0
        phi2 = family.vectors[1]
        for alpha in alphas:
            for beta in betas:
                u = recursive_unitary(family, [alpha, beta],
                                      check_cyclicity=False)
                nu = spectral_measure_of_vector(u, phi2)
                for z in zs:
                    direct = cauchy_transform_disk(nu, z)
                    closed = knu_alpha_beta(ms, f, alpha, beta, z)
                    dev = max(dev, abs(direct - closed))
        params = {"family": label, "index": i, "grid": f"{na}x{nb}x{nz}"}
        records.append(CheckRecord("two_parameter_oracle", params, dev, 0.0,
                                   tol["oracle"], dev <= tol["oracle"]))
    return records


def _check_positivity_bounds(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    na = int(spec.get("alpha_count", 32))
    nz = int(spec.get("z_count", 32))
    max_r = float(spec.get("max_z_radius", 0.95))
    for i, fspec in enumerate(spec["families"]):
        rng = _rng(seed, idx, i)
        family, label = _resolve_family(fspec, rng)
        ms, f = family_model_space(family)
        alphas = random_unimodular(rng, na)
        zs = max_r * np.sqrt(rng.uniform(0, 1, nz)) * random_unimodular(rng, nz)
        smallest = herglotz_positivity_check(ms, f, alphas, zs)
        params = {"family": label, "index": i}
        records.append(CheckRecord("positivity.min_real_part", params,
                                   smallest, 0.5, 1e-9, smallest > 0.5 - 1e-9))
        for j, cspec in enumerate(spec.get("curves", [])):
            curve, clabel = _resolve_curve(cspec, _rng(seed, idx, i, j))
            bound = 1.0 / (1.0 - abs(blaschke_eval(curve.components[1], 0.0)))
            worst = 0.0
            for z in zs:
                worst = max(worst, abs(phi_density(ms, f, curve, z)))
            excess = worst - bound
            params_c = {"family": label, "curve": clabel, "index": i}
            records.append(CheckRecord("positivity.phi_bound", params_c,
                                       excess, 0.0, 1e-9, excess <= 1e-9))
    return records


def _check_curve_disintegration(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    check_tol = float(spec.get("tol", 1e-4))
    for i, case in enumerate(spec["cases"]):
        rng = _rng(seed, idx, i)
        family, flabel = _resolve_family(case["family"], rng)
        curve, clabel = _resolve_curve(case["curve"], rng)
        borel = _resolve_borel(case["borel"])
        res = curve_disintegration_check(family, curve, borel, tol=check_tol)
        params = {"family": flabel, "curve": clabel, "index": i}
        records.append(CheckRecord("curve_disintegration", params,
                                   res.average, res.density_integral,
                                   check_tol, res.defect <= check_tol))
    return records


def _check_simon_wolff(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    for i, case in enumerate(spec["cases"]):
        mu = measure_from_json_dict(case["measure"])
        if not isinstance(mu, LineAtomicMeasure):
            raise ScenarioError("checks[].cases[].measure: simon_wolff needs a line measure")
        probes = [float(p) for p in case["probes"]]
        mismatches = 0
        for p in probes:
            val = simon_wolff_integral(mu, p)
            expected_finite = p not in mu.positions
            if math.isfinite(val) != expected_finite:
                mismatches += 1
        params = {"index": i, "probes": len(probes)}
        records.append(CheckRecord("simon_wolff.classification", params,
                                   mismatches, 0, 0.0, mismatches == 0))
    return records


def _check_theorem4_axis(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    for i, fspec in enumerate(spec["families"]):
        rng = _rng(seed, idx, i)
        family, label = _resolve_family(fspec, rng)
        probes = random_unimodular(rng, int(spec.get("probe_count", 16)))
        reports = theorem4_axis_criterion(family, probes)
        bad = sum(1 for rep in reports for rec in rep["records"]
                  if not rec["finite"])
        atom_probes = [complex(np.exp(1j * a)) for a in family.base.sites]
        at_atoms = theorem4_axis_criterion(family, atom_probes)
        bad_atoms = sum(1 for rep in at_atoms for rec in rep["records"]
                        if rec["finite"])
        params = {"family": label, "index": i}
        records.append(CheckRecord("theorem4.off_atoms_finite", params, bad, 0,
                                   0.0, bad == 0))
        records.append(CheckRecord("theorem4.at_atoms_infinite", params,
                                   bad_atoms, 0, 0.0, bad_atoms == 0))
    return records


def _check_theorem9_nullset(seed, idx, spec, tol) -> list[CheckRecord]:
    records = []
    for i, case in enumerate(spec["cases"]):
        rng = _rng(seed, idx, i)
        family, flabel = _resolve_family(case["family"], rng)
        curve, clabel = _resolve_curve(case["curve"], rng)
        null_angles = [float(a) for a in case.get("null_angles", [])]
        xi_angles = rng.uniform(0.0, TWO_PI, int(case.get("xi_count", 32)))
        report = theorem9_nullset_check(family, curve, null_angles, xi_angles)
        params = {"family": flabel, "curve": clabel, "index": i,
                  "null_points": len(null_angles)}
        records.append(CheckRecord("theorem9.nullset", params,
                                   len(report["violations"]), 0, 0.0,
                                   report["pass"]))
    return records


CHECKS: dict[str, Callable] = {
    "secular_oracle": _check_secular_oracle,
    "clark_correspondence": _check_clark_correspondence,
    "disintegration_line": _check_disintegration_line,
    "disintegration_circle": _check_disintegration_circle,
    "modelspace_suite": _check_modelspace_suite,
    "lemma7_suite": _check_lemma7_suite,
    "two_parameter_oracle": _check_two_parameter_oracle,
    "positivity_bounds": _check_positivity_bounds,
    "curve_disintegration": _check_curve_disintegration,
    "simon_wolff": _check_simon_wolff,
    "theorem4_axis": _check_theorem4_axis,
    "theorem9_nullset": _check_theorem9_nullset,
}


# ---------------------------------------------------------------------------
# Scenario loading and execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    tolerances: dict
    checks: tuple


def load_scenario(source) -> Scenario:
    """Parse and validate a scenario from a path, JSON text, or dict."""
    if isinstance(source, dict):
        obj = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") \
            else str(source)
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(
                f"scenario JSON parse error at line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ScenarioError("scenario: top level must be an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError("name: required non-empty string")
    seed = obj.get("seed")
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed: required non-negative integer")
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in obj.get("tolerances", {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ScenarioError(f"tolerances.{key}: unknown tolerance class")
        if not isinstance(val, (int, float)) or val <= 0:
            raise ScenarioError(f"tolerances.{key}: must be a positive number")
        tolerances[key] = float(val)
    checks = obj.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ScenarioError("checks: required non-empty list")
    for i, chk in enumerate(checks):
        if not isinstance(chk, dict) or "check" not in chk:
            raise ScenarioError(f"checks[{i}]: must be an object with a 'check' field")
        if chk["check"] not in CHECKS:
            raise ScenarioError(f"checks[{i}].check: unknown check {chk['check']!r}")
    return Scenario(name=name, seed=seed, tolerances=tolerances,
                    checks=tuple(checks))


def run_scenario(source, workers: int = 1) -> RunReport:
    """Execute every check in the scenario; deterministic for a fixed seed.

    Records are assembled in check order regardless of completion order, so
    the report is identical for any worker count.
    """
    scenario = load_scenario(source)

    def run_one(pair):
        idx, chk = pair
        handler = CHECKS[chk["check"]]
        start = time.perf_counter()
        records = handler(scenario.seed, idx, chk, scenario.tolerances)
        elapsed = (time.perf_counter() - start) * 1e3
        for rec in records:
            rec.wall_ms = elapsed / max(1, len(records))
        return records

    items = list(enumerate(scenario.checks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_one, items))
    else:
        chunks = [run_one(item) for item in items]

    report = RunReport(scenario=scenario.name, seed=scenario.seed)
    for chunk in chunks:
        report.records.extend(chunk)
    return report
