import cmath
import math

import numpy as np
import pytest

from clarklab.errors import ConstructionError, CyclicityError, DomainError
from clarklab.herglotz import BlaschkeProduct, blaschke_eval
from clarklab.measures import BorelSetSpec, cauchy_transform_disk, total_mass
from clarklab.rankone import CyclicOperatorModel, rank_one_unitary_update
from clarklab.rankn import (AnalyticCurve, RankNPerturbationFamily,
                            curve_disintegration_check, curve_sample,
                            family_from_json_dict, family_model_space,
                            family_to_json_dict, herglotz_positivity_check,
                            knu_alpha_beta, krylov_is_cyclic,
                            orthogonal_collapse_matrix, phi_density,
                            recursive_unitary, spectral_measure_of_vector,
                            theorem4_axis_criterion, theorem9_nullset_check)
from clarklab.scenarios import random_family, _rng

Z1 = BlaschkeProduct((0j,), 1.0)

BASE = CyclicOperatorModel.from_data("circle", [0.0, math.pi], [0.5, 0.5])
PHI1 = np.array([1.0, 1.0]) / math.sqrt(2.0)
PHI2 = np.array([1.0, -1.0]) / math.sqrt(2.0)
FAMILY2 = RankNPerturbationFamily(BASE, (PHI1, PHI2))


def _moebius(zero: complex, c: complex = 1.0) -> BlaschkeProduct:
    return BlaschkeProduct((complex(zero),), complex(c))


class TestFamily:
    def test_requires_unit_vectors(self):
        with pytest.raises(ConstructionError):
            RankNPerturbationFamily(BASE, (PHI1, 2.0 * PHI2))

    def test_requires_cyclic_vectors(self):
        dead = np.array([1.0, 0.0])
        with pytest.raises(CyclicityError):
            RankNPerturbationFamily(BASE, (PHI1, dead))

    def test_krylov_rank_detects(self):
        u = BASE.dense()
        assert krylov_is_cyclic(u, PHI1)
        assert not krylov_is_cyclic(u, np.array([1.0, 0.0]))

    def test_json_round_trip(self):
        back = family_from_json_dict(family_to_json_dict(FAMILY2))
        assert back.base == FAMILY2.base
        assert np.allclose(back.vectors[1], FAMILY2.vectors[1])


class TestRecursion:
    def test_rank_one_base_case(self):
        alpha = cmath.exp(0.9j)
        got = recursive_unitary(RankNPerturbationFamily(BASE, (PHI1,)), [alpha])
        want = rank_one_unitary_update(BASE.dense(), PHI1.astype(complex), alpha)
        assert np.max(np.abs(got - want)) < 1e-14

    def test_identity_parameters(self):
        got = recursive_unitary(FAMILY2, [1.0, 1.0])
        assert np.max(np.abs(got - BASE.dense())) < 1e-14

    def test_stagewise_unitarity(self, rng):
        fam = random_family(_rng(5), 6, 3)
        for _ in range(4):
            alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 3))
            u = recursive_unitary(fam, alphas)
            assert np.linalg.norm(u.conj().T @ u - np.eye(6), 2) <= 1e-10

    def test_orthogonal_collapse(self, rng):
        # pairwise orthogonal vectors: the recursion equals the one-shot sum
        fam = random_family(_rng(6), 5, 2)
        for _ in range(6):
            alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 2))
            a = recursive_unitary(fam, alphas)
            b = orthogonal_collapse_matrix(fam, alphas)
            assert np.max(np.abs(a - b)) <= 1e-10

    def test_parameter_count_checked(self):
        with pytest.raises(DomainError):
            recursive_unitary(FAMILY2, [1.0])


class TestSpectralMeasureOfVector:
    def test_identity_matrix(self):
        nu = spectral_measure_of_vector(np.eye(3), np.ones(3) / math.sqrt(3.0))
        assert len(nu) == 1
        assert nu.angles[0] == 0.0
        assert nu.masses[0] == pytest.approx(1.0)

    def test_two_point(self):
        nu = spectral_measure_of_vector(np.diag([1.0, -1.0]),
                                        np.array([1.0, 1.0]) / math.sqrt(2.0))
        assert np.asarray(nu.angles) == pytest.approx([0.0, math.pi])
        assert np.asarray(nu.masses) == pytest.approx([0.5, 0.5])

    def test_masses_sum_to_one(self, rng):
        fam = random_family(_rng(7), 6, 2)
        u = recursive_unitary(fam, [1j, -1.0])
        nu = spectral_measure_of_vector(u, fam.vectors[1])
        assert total_mass(nu) == pytest.approx(1.0, abs=1e-12)

    def test_non_unitary_rejected(self):
        with pytest.raises(DomainError):
            spectral_measure_of_vector(np.diag([1.0, 2.0]), np.ones(2))


class TestTwoParameterTransform:
    def test_beta_one_reduces(self):
        ms, f = family_model_space(FAMILY2)
        alpha = cmath.exp(0.4j)
        z = 0.3 + 0.2j
        # beta = 1 leaves the first-stage transform unchanged
        w = knu_alpha_beta(ms, f, alpha, 1.0, z)
        assert w == pytest.approx(alpha / (alpha - z * z), abs=1e-10)

    def test_worked_origin_value(self):
        ms, f = family_model_space(FAMILY2)
        assert knu_alpha_beta(ms, f, 1.0, 1j, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_against_oracle_grid(self, rng):
        fam = random_family(_rng(8), 5, 2)
        ms, f = family_model_space(fam)
        dev = 0.0
        for _ in range(20):
            alpha = complex(np.exp(2j * np.pi * rng.uniform()))
            beta = complex(np.exp(2j * np.pi * rng.uniform()))
            z = 0.7 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            u = recursive_unitary(fam, [alpha, beta], check_cyclicity=False)
            nu = spectral_measure_of_vector(u, fam.vectors[1])
            dev = max(dev, abs(cauchy_transform_disk(nu, z)
                               - knu_alpha_beta(ms, f, alpha, beta, z)))
        assert dev <= 1e-8


class TestCurves:
    def test_diagonal_sample(self):
        curve = AnalyticCurve((Z1, Z1))
        assert curve_sample(curve, 1j) == pytest.approx([1j, 1j])

    def test_power_sample(self):
        curve = AnalyticCurve((Z1, BlaschkeProduct((0j, 0j), 1.0)))
        xi = cmath.exp(1j * math.pi / 3.0)
        assert curve_sample(curve, xi) == pytest.approx(
            [xi, cmath.exp(2j * math.pi / 3.0)])

    def test_nonconstant_components_cover(self, rng):
        curve = AnalyticCurve((_moebius(0.3 + 0.1j), _moebius(-0.2j)))
        samples = np.array([curve_sample(curve, z)
                            for z in np.exp(2j * np.pi * rng.uniform(0, 1, 256))])
        for k in range(2):
            angles = np.sort(np.angle(samples[:, k]) % (2 * np.pi))
            gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
            assert np.max(gaps) < 1.0

    def test_constant_component_rejected(self):
        with pytest.raises(ConstructionError):
            AnalyticCurve((Z1, BlaschkeProduct((), 1.0)))


class TestPhiDensity:
    def test_origin_curve_gives_one(self, rng):
        ms, f = family_model_space(FAMILY2)
        curve = AnalyticCurve((Z1, Z1))
        for _ in range(5):
            z = 0.8 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            assert phi_density(ms, f, curve, z) == pytest.approx(1.0, abs=1e-12)

    def test_modulus_bound(self, rng):
        fam = random_family(_rng(9), 4, 2)
        ms, f = family_model_space(fam)
        i2 = _moebius(0.5, -1.0)   # I2(0) = 1/2
        curve = AnalyticCurve((_moebius(0.3 + 0.2j), i2))
        bound = 1.0 / (1.0 - abs(blaschke_eval(i2, 0.0)))
        for _ in range(64):
            z = 0.97 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            assert abs(phi_density(ms, f, curve, z)) <= bound + 1e-9

    def test_against_transform_average(self):
        # trapezoid oracle of the xi-averaged transforms at fixed z
        ms, f = family_model_space(FAMILY2)
        curve = AnalyticCurve((Z1, _moebius(0.5, -1.0)))
        for z in (0.0, 0.3 + 0.2j):
            m = 1024
            acc = 0.0 + 0.0j
            for t in 2.0 * np.pi * np.arange(m) / m:
                point = curve_sample(curve, cmath.exp(1j * t))
                u = recursive_unitary(FAMILY2, point, check_cyclicity=False)
                nu = spectral_measure_of_vector(u, PHI2)
                acc += cauchy_transform_disk(nu, z)
            acc /= m
            assert phi_density(ms, f, curve, z) == pytest.approx(acc, abs=1e-6)

    def test_mean_value_is_one(self, rng):
        # full-circle average of every family measure has unit mass, so
        # phi(0) = 1 whatever the curve
        fam = random_family(_rng(10), 5, 2)
        ms, f = family_model_space(fam)
        curve = AnalyticCurve((_moebius(0.4 + 0.2j), _moebius(-0.3 + 0.25j)))
        assert phi_density(ms, f, curve, 0.0) == pytest.approx(1.0, abs=1e-10)


class TestCurveDisintegration:
    def test_origin_curve_is_arc_length(self):
        curve = AnalyticCurve((Z1, Z1))
        borel = BorelSetSpec("circle", ((0.3, 1.4),))
        res = curve_disintegration_check(FAMILY2, curve, borel, tol=1e-4)
        assert res.density_integral == pytest.approx(1.1 / (2 * math.pi), abs=1e-10)
        assert res.defect <= 1e-4

    def test_nonconstant_density(self):
        fam = random_family(_rng(11), 3, 2)
        curve = AnalyticCurve((_moebius(0.4 + 0.2j), _moebius(-0.3 + 0.25j)))
        borel = BorelSetSpec("circle", ((1.0, 2.5),))
        res = curve_disintegration_check(fam, curve, borel, tol=1e-4)
        assert res.defect <= 1e-4
        # density genuinely differs from arc length here
        assert abs(res.density_integral - borel.total_length() / (2 * math.pi)) > 1e-3


class TestPositivity:
    def test_square_value_at_origin(self):
        ms, f = family_model_space(FAMILY2)
        assert herglotz_positivity_check(ms, f, [1.0], [0.0]) == pytest.approx(1.0)

    def test_grid_minimum(self, rng):
        fam = random_family(_rng(12), 6, 2)
        ms, f = family_model_space(fam)
        alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 64))
        zs = 0.9 * np.sqrt(rng.uniform(0, 1, 64)) * np.exp(
            2j * np.pi * rng.uniform(0, 1, 64))
        assert herglotz_positivity_check(ms, f, alphas, zs) > 0.5

    def test_boundary_proximity(self, rng):
        fam = random_family(_rng(12), 4, 2)
        ms, f = family_model_space(fam)
        alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 16))
        zs = 0.99 * np.exp(2j * np.pi * rng.uniform(0, 1, 32))
        assert herglotz_positivity_check(ms, f, alphas, zs) > 0.5


class TestAtomCountStability:
    def test_every_curve_measure_has_full_atom_count(self, rng):
        # finite-rank shadow of pure point: N atoms, none below mass 1e-12
        fam = random_family(_rng(18), 5, 2)
        curve = AnalyticCurve((_moebius(0.2 + 0.1j), _moebius(-0.15 + 0.2j)))
        for s in rng.uniform(0, 2 * math.pi, 12):
            point = curve_sample(curve, cmath.exp(1j * s))
            u = recursive_unitary(fam, point, check_cyclicity=False)
            nu = spectral_measure_of_vector(u, fam.vectors[1])
            assert len(nu) == 5
            assert min(nu.masses) > 1e-12


class TestAxisCriterion:
    def test_scalar_base(self):
        base = CyclicOperatorModel.from_data("circle", [0.5], [1.0])
        fam = RankNPerturbationFamily(base, (np.array([1.0 + 0j]),))
        out = theorem4_axis_criterion(fam, [1j, -1.0])
        assert all(rec["finite"] for rec in out[0]["records"])

    def test_off_atom_probes_finite(self, rng):
        fam = random_family(_rng(13), 4, 2)
        probes = np.exp(2j * np.pi * rng.uniform(0, 1, 16))
        out = theorem4_axis_criterion(fam, probes)
        assert all(rec["finite"] for rep in out for rec in rep["records"])

    def test_atom_probes_infinite(self):
        fam = random_family(_rng(14), 4, 2)
        probes = [cmath.exp(1j * a) for a in fam.base.sites]
        out = theorem4_axis_criterion(fam, probes)
        assert all(not rec["finite"] for rep in out for rec in rep["records"])


class TestNullsetCheck:
    def test_empty_set_vacuous(self, rng):
        fam = random_family(_rng(15), 4, 2)
        curve = AnalyticCurve((Z1, Z1))
        report = theorem9_nullset_check(fam, curve, [], rng.uniform(0, 6.28, 16))
        assert report["pass"]

    def test_generic_position(self, rng):
        fam = random_family(_rng(16), 4, 2)
        curve = AnalyticCurve((Z1, Z1))
        report = theorem9_nullset_check(fam, curve, [0.0],
                                        rng.uniform(0, 6.28, 64))
        assert report["pass"]

    def test_constructed_collision_detected(self):
        fam = random_family(_rng(17), 4, 2)
        curve = AnalyticCurve((Z1, Z1))
        xi0 = 1.2345
        point = curve_sample(curve, cmath.exp(1j * xi0))
        u = recursive_unitary(fam, point, check_cyclicity=False)
        nu = spectral_measure_of_vector(u, fam.vectors[1])
        planted = nu.angles[1]
        report = theorem9_nullset_check(fam, curve, [planted], [xi0, xi0 + 1.0])
        assert not report["pass"]
        assert any(v["xi_angle"] == xi0 for v in report["violations"])
        assert all(v["xi_angle"] != xi0 + 1.0 for v in report["violations"])
