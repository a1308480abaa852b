import cmath
import math

import numpy as np
import pytest

from clarklab.errors import ConstructionError, DomainError, PoleError
from clarklab.herglotz import (BlaschkeProduct, blaschke_eval,
                               boundary_derivative_modulus,
                               cauchy_rational_line, coupling_to_alpha,
                               halfplane_level_set, rational_from_coefficients)
from clarklab.measures import (BorelSetSpec, LineAtomicMeasure,
                               cauchy_transform_disk, poisson_integral_disk,
                               total_mass)
from clarklab.rankone import (ClarkFamily, CyclicOperatorModel,
                              aronszajn_krein_eval, circle_measure_deviation,
                              clark_measure, disintegration_check_circle,
                              disintegration_check_line,
                              inner_from_selfadjoint, inner_from_unitary,
                              matrix_oracle_selfadjoint, matrix_oracle_unitary,
                              model_from_json_dict, model_to_json_dict,
                              perturb_selfadjoint, perturb_unitary,
                              simon_wolff_classify, spectral_measure,
                              verify_clark_correspondence)
from clarklab.scenarios import random_model

SCALAR_LINE = CyclicOperatorModel.from_data("line", [0.0], [1.0])
TWO_LINE = CyclicOperatorModel.from_data("line", [-1.0, 1.0], [0.5, 0.5])
SCALAR_CIRCLE = CyclicOperatorModel.from_data("circle", [0.0], [1.0])
TWO_CIRCLE = CyclicOperatorModel.from_data("circle", [0.0, math.pi], [0.5, 0.5])
Z1 = BlaschkeProduct((0j,), 1.0)
Z2 = BlaschkeProduct((0j, 0j), 1.0)


class TestModel:
    def test_validation(self):
        with pytest.raises(ConstructionError):
            CyclicOperatorModel.from_data("line", [0.0, 0.0], [0.5, 0.5])
        with pytest.raises(ConstructionError):
            CyclicOperatorModel.from_data("line", [0.0, 1.0], [0.5, 0.6])
        with pytest.raises(ConstructionError):
            CyclicOperatorModel.from_data("ring", [0.0], [1.0])

    def test_spectral_measure(self):
        assert spectral_measure(SCALAR_LINE) == LineAtomicMeasure.from_atoms(
            [(0.0, 1.0)])
        mu = spectral_measure(TWO_LINE)
        assert mu.positions == (-1.0, 1.0)
        assert mu.masses == (0.5, 0.5)

    def test_dense_realization_matches(self):
        model = random_model(5, 6, "line")
        oracle = matrix_oracle_selfadjoint(model, 0.0)
        mu = spectral_measure(model)
        assert np.asarray(oracle.positions) == pytest.approx(
            np.asarray(mu.positions), abs=1e-12)
        assert np.asarray(oracle.masses) == pytest.approx(
            np.asarray(mu.masses), abs=1e-12)

    def test_json_round_trip(self):
        back = model_from_json_dict(model_to_json_dict(TWO_LINE))
        assert back == TWO_LINE


class TestAronszajnKrein:
    def test_zero_coupling(self):
        from clarklab.herglotz import rational_eval
        K0 = cauchy_rational_line(spectral_measure(TWO_LINE))
        for z in (1j, 2.0 + 0.5j):
            assert aronszajn_krein_eval(K0, 0.0, z) == rational_eval(K0, z)

    def test_scalar_shift(self):
        # K0 = -1/z perturbs to the transform of a point mass at lam
        K0 = rational_from_coefficients([-1.0], [0.0, 1.0])
        for lam in (2.0, -0.7):
            for z in (1j, 0.5 + 0.2j):
                assert aronszajn_krein_eval(K0, lam, z) == pytest.approx(
                    1.0 / (lam - z), rel=1e-13)

    def test_worked_value(self):
        K0 = rational_from_coefficients([-1.0], [0.0, 1.0])
        assert aronszajn_krein_eval(K0, 2.0, 1j) == pytest.approx((2 + 1j) / 5)

    def test_pole(self):
        K0 = rational_from_coefficients([-1.0], [0.0, 1.0])
        # 1 + lam*K0(z) = 0 at z = lam
        with pytest.raises((PoleError, ZeroDivisionError)):
            aronszajn_krein_eval(K0, 2.0, 2.0)


class TestPerturbSelfadjoint:
    def test_scalar_shift(self):
        mu = perturb_selfadjoint(SCALAR_LINE, 3.0)
        assert mu.positions == pytest.approx([3.0])
        assert mu.masses == pytest.approx([1.0])

    def test_zero_returns_unperturbed(self):
        assert perturb_selfadjoint(TWO_LINE, 0.0) == spectral_measure(TWO_LINE)

    def test_two_atom_against_oracle(self):
        got = perturb_selfadjoint(TWO_LINE, 3.0)
        want = matrix_oracle_selfadjoint(TWO_LINE, 3.0)
        assert np.asarray(got.positions) == pytest.approx(
            np.asarray(want.positions), abs=1e-12)
        assert np.asarray(got.masses) == pytest.approx(
            np.asarray(want.masses), abs=1e-12)

    def test_mass_conserved(self):
        for lam in (0.1, -5.0, 42.0):
            assert total_mass(perturb_selfadjoint(TWO_LINE, lam)) == pytest.approx(
                1.0, abs=1e-10)

    @pytest.mark.parametrize("n", [2, 8, 32])
    @pytest.mark.parametrize("lam", [0.1, -1.0, 10.0])
    def test_oracle_equivalence(self, n, lam):
        for seed in range(3):
            model = random_model(seed, n, "line")
            got = perturb_selfadjoint(model, lam)
            want = matrix_oracle_selfadjoint(model, lam)
            assert np.max(np.abs(np.asarray(got.positions)
                                 - np.asarray(want.positions))) \
                < 1e-9 * (1 + abs(lam))
            assert np.max(np.abs(np.asarray(got.masses)
                                 - np.asarray(want.masses))) < 1e-8

    def test_dimension_guard(self):
        with pytest.raises(DomainError):
            matrix_oracle_selfadjoint(TWO_LINE, 1.0, max_dimension=1)


class TestInnerFromUnitary:
    def test_scalar_is_identity(self):
        theta = inner_from_unitary(SCALAR_CIRCLE)
        assert theta.degree == 1
        assert theta.zeros == pytest.approx([0j])
        assert blaschke_eval(theta, 0.3) == pytest.approx(0.3, abs=1e-12)

    def test_two_atom_is_square(self):
        theta = inner_from_unitary(TWO_CIRCLE)
        assert theta.degree == 2
        assert blaschke_eval(theta, 0.5j) == pytest.approx(-0.25, abs=1e-12)

    def test_vanishes_at_origin(self):
        theta = inner_from_unitary(random_model(9, 6, "circle"))
        assert abs(blaschke_eval(theta, 0.0)) < 1e-10

    def test_defining_identity(self):
        model = random_model(13, 5, "circle")
        theta = inner_from_unitary(model)
        nu = spectral_measure(model)
        for z in (0.2 + 0.3j, -0.6j, 0.55):
            assert cauchy_transform_disk(nu, z) * (
                1.0 - blaschke_eval(theta, z)) == pytest.approx(1.0, abs=1e-10)

    def test_line_model_rejected(self):
        with pytest.raises(DomainError):
            inner_from_unitary(TWO_LINE)


class TestPerturbUnitary:
    def test_scalar(self):
        alpha = cmath.exp(2.2j)
        nu = perturb_unitary(SCALAR_CIRCLE, alpha)
        assert len(nu) == 1
        assert nu.angles[0] == pytest.approx(2.2)
        assert nu.masses[0] == pytest.approx(1.0)

    def test_two_atom_square_roots(self):
        alpha = cmath.exp(0.8j)
        nu = perturb_unitary(TWO_CIRCLE, alpha)
        assert np.asarray(nu.angles) == pytest.approx([0.4, 0.4 + math.pi])
        assert np.asarray(nu.masses) == pytest.approx([0.5, 0.5])

    def test_alpha_one_returns_base(self):
        assert perturb_unitary(TWO_CIRCLE, 1.0) == spectral_measure(TWO_CIRCLE)

    def test_against_dense_oracle(self, rng):
        for seed in (0, 1):
            model = random_model(seed, 7, "circle")
            for alpha in np.exp(2j * np.pi * rng.uniform(0, 1, 5)):
                got = perturb_unitary(model, alpha)
                want = matrix_oracle_unitary(model, alpha)
                da, dm = circle_measure_deviation(got, want)
                assert da < 1e-9
                assert dm < 1e-8
                assert total_mass(got) == pytest.approx(1.0, abs=1e-10)


class TestInnerFromSelfadjoint:
    def test_scalar_transfer(self):
        hp = inner_from_selfadjoint(SCALAR_LINE)
        assert abs(hp.eval(2j)) < 1.0
        for x in (-2.0, 0.3, 11.0):
            assert abs(abs(hp.eval(x)) - 1.0) < 1e-12

    def test_contractive_on_upper_half_plane(self, rng):
        hp = inner_from_selfadjoint(random_model(19, 4, "line"))
        zs = rng.uniform(-5, 5, 30) + 1j * rng.uniform(1e-3, 5, 30)
        assert np.max(np.abs(hp.eval(zs))) <= 1.0

    def test_level_set_matches_secular_root(self):
        hp = inner_from_selfadjoint(SCALAR_LINE)
        pts = halfplane_level_set(hp, coupling_to_alpha(3.0))
        assert pts == pytest.approx([3.0], abs=1e-9)

    def test_level_sets_match_perturbed_atoms(self):
        model = random_model(21, 4, "line")
        hp = inner_from_selfadjoint(model)
        for lam in (0.7, -2.5):
            atoms = perturb_selfadjoint(model, lam).positions
            pts = halfplane_level_set(hp, coupling_to_alpha(lam))
            assert np.sort(pts) == pytest.approx(np.asarray(atoms), abs=1e-8)


class TestClarkMeasure:
    def test_identity_inner(self):
        alpha = cmath.exp(1.3j)
        mu = clark_measure(Z1, alpha)
        assert len(mu) == 1
        assert mu.angles[0] == pytest.approx(1.3)
        assert mu.masses[0] == pytest.approx(1.0)

    def test_square_at_one(self):
        mu = clark_measure(Z2, 1.0)
        assert np.asarray(mu.angles) == pytest.approx([0.0, math.pi])
        assert np.asarray(mu.masses) == pytest.approx([0.5, 0.5])

    def test_square_at_i(self):
        mu = clark_measure(Z2, 1j)
        assert np.asarray(mu.angles) == pytest.approx(
            [math.pi / 4, 5 * math.pi / 4])
        assert np.asarray(mu.masses) == pytest.approx([0.5, 0.5])

    def test_poisson_contract(self, rng):
        zeros = 0.7 * np.sqrt(rng.uniform(0, 1, 5)) * np.exp(
            2j * np.pi * rng.uniform(0, 1, 5))
        theta = BlaschkeProduct(tuple(zeros), cmath.exp(0.9j))
        alpha = cmath.exp(2.7j)
        mu = clark_measure(theta, alpha)
        for _ in range(20):
            z = 0.8 * math.sqrt(rng.uniform()) * cmath.exp(
                2j * math.pi * rng.uniform())
            want = ((alpha + blaschke_eval(theta, z))
                    / (alpha - blaschke_eval(theta, z))).real
            assert poisson_integral_disk(mu, z) == pytest.approx(want, abs=1e-9)

    def test_point_mass_criterion(self, rng):
        theta = BlaschkeProduct(tuple(0.5 * np.exp(2j * np.pi
                                                   * rng.uniform(0, 1, 6))), 1.0)
        alpha = cmath.exp(0.4j)
        mu = clark_measure(theta, alpha)
        pts = mu.points()
        assert np.max(np.abs(blaschke_eval(theta, pts) - alpha)) <= 1e-9
        assert np.all(np.isfinite(boundary_derivative_modulus(theta, pts)))


class TestClarkFamily:
    def test_total_mass_formula(self, rng):
        theta = BlaschkeProduct((0.5 + 0j, -0.2 + 0.1j), cmath.exp(0.3j))
        fam = ClarkFamily(theta)
        for alpha in np.exp(2j * np.pi * rng.uniform(0, 1, 6)):
            mu = fam.measure(alpha)
            assert total_mass(mu) == pytest.approx(
                fam.expected_total_mass(alpha), abs=1e-10)

    def test_unit_mass_when_origin_zero(self, rng):
        fam = ClarkFamily(inner_from_unitary(random_model(3, 4, "circle")))
        for alpha in np.exp(2j * np.pi * rng.uniform(0, 1, 4)):
            assert total_mass(fam.measure(alpha)) == pytest.approx(1.0, abs=1e-10)

    def test_support_disjointness(self, rng):
        zeros = 0.6 * np.sqrt(rng.uniform(0, 1, 32)) * np.exp(
            2j * np.pi * rng.uniform(0, 1, 32))
        fam = ClarkFamily(BlaschkeProduct(tuple(zeros), 1.0))
        alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 5))
        for i in range(len(alphas)):
            for j in range(i + 1, len(alphas)):
                if abs(alphas[i] - alphas[j]) <= 1e-3:
                    continue
                a = fam.measure(alphas[i]).points()
                b = fam.measure(alphas[j]).points()
                assert np.min(np.abs(a[:, None] - b[None, :])) > 1e-9


class TestCorrespondence:
    def test_scalar(self):
        report = verify_clark_correspondence(SCALAR_CIRCLE, [1j])
        assert report["pass"]
        assert report["max_atom_deviation"] < 1e-12

    def test_two_atom_random_alphas(self, rng):
        alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 16))
        report = verify_clark_correspondence(TWO_CIRCLE, alphas,
                                             include_oracle=True)
        assert report["pass"]
        assert report["max_atom_deviation"] < 1e-9

    def test_mass_sums(self, rng):
        model = random_model(31, 16, "circle")
        alphas = np.exp(2j * np.pi * rng.uniform(0, 1, 8))
        report = verify_clark_correspondence(model, alphas, include_oracle=True)
        for entry in report["per_alpha"]:
            for s in entry["mass_sums"]:
                assert s == pytest.approx(1.0, abs=1e-9)


class TestDisintegrationLine:
    def test_scalar_exact(self):
        res = disintegration_check_line(SCALAR_LINE,
                                        BorelSetSpec("line", ((0.0, 1.0),)),
                                        window=50.0)
        assert res.estimate == pytest.approx(1.0, abs=1e-10)

    def test_two_atom(self):
        res = disintegration_check_line(TWO_LINE,
                                        BorelSetSpec("line", ((-0.5, 0.5),)),
                                        window=100.0, tol=1e-3)
        assert res.defect <= 1e-3
        assert res.expected == 1.0

    def test_additive_over_disjoint_pieces(self):
        b1 = BorelSetSpec("line", ((-0.5, 0.0),))
        b2 = BorelSetSpec("line", ((0.25, 0.5),))
        both = BorelSetSpec("line", ((-0.5, 0.0), (0.25, 0.5)))
        r1 = disintegration_check_line(TWO_LINE, b1, window=60.0)
        r2 = disintegration_check_line(TWO_LINE, b2, window=60.0)
        r12 = disintegration_check_line(TWO_LINE, both, window=60.0)
        assert r12.estimate == pytest.approx(r1.estimate + r2.estimate, abs=2e-3)


class TestDisintegrationCircle:
    def test_identity_inner_exact(self):
        arc = BorelSetSpec("circle", ((0.7, 0.7 + math.pi / 2),))
        res = disintegration_check_circle(Z1, arc)
        assert res.defect < 1e-10

    def test_square_quarter_arc(self):
        arc = BorelSetSpec("circle", ((0.3, 0.3 + math.pi / 2),))
        res = disintegration_check_circle(Z2, arc, tol=1e-6)
        assert res.expected == pytest.approx(0.25)
        assert res.defect <= 1e-6

    def test_full_circle(self):
        full = BorelSetSpec("circle", ((0.0, 2.0 * math.pi),))
        res = disintegration_check_circle(Z2, full, tol=1e-6)
        assert res.estimate == pytest.approx(1.0, abs=1e-6)


class TestSimonWolffClassify:
    def test_scalar(self):
        mu = LineAtomicMeasure.from_atoms([(0.0, 1.0)])
        out = simon_wolff_classify(mu, [0.0, 1.0])
        assert out[0]["finite"] is False
        assert out[1]["finite"] is True
        assert out[1]["value"] == pytest.approx(1.0)

    def test_all_atoms_infinite(self):
        mu = spectral_measure(random_model(2, 5, "line"))
        out = simon_wolff_classify(mu, mu.positions)
        assert all(not rec["finite"] for rec in out)
