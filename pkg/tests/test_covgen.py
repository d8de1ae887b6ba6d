"""Covariance-family generators: exact definitions, validation, determinism."""

import numpy as np
import pytest

from gaussdec import covgen, decouple, matcore
from gaussdec.errors import InvalidParameter


class TestDefinitions:
    def test_equicorrelated(self):
        m = covgen.generate(covgen.Equicorrelated(2, 0.5))
        np.testing.assert_array_equal(m, [[1.0, 0.5], [0.5, 1.0]])

    def test_ar1(self):
        m = covgen.generate(covgen.AR1(3, 0.5))
        np.testing.assert_array_equal(
            m, [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]]
        )

    def test_ar1_negative_rho(self):
        m = covgen.generate(covgen.AR1(3, -0.5))
        assert m[0, 1] == -0.5 and m[0, 2] == 0.25

    def test_diagonal(self):
        np.testing.assert_array_equal(
            covgen.generate(covgen.Diagonal((1.0, 4.0))), [[1.0, 0.0], [0.0, 4.0]]
        )

    def test_toeplitz(self):
        m = covgen.generate(covgen.Toeplitz((1.0, 0.3, 0.1)))
        assert m[0, 2] == 0.1 and m[2, 0] == 0.1 and m[1, 2] == 0.3

    def test_scaled_diagonal_matches_variances(self):
        fam = covgen.Scaled(covgen.Equicorrelated(3, 0.4), (1.0, 4.0, 9.0))
        m = covgen.generate(fam)
        np.testing.assert_allclose(np.diag(m), [1.0, 4.0, 9.0], atol=1e-14)
        assert abs(m[0, 1] - 0.4 * 2.0) <= 1e-14


class TestValidation:
    def test_equicorrelated_below_spd_threshold(self):
        # SPD needs rho > -1/(n-1) = -0.5 at n = 3
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.Equicorrelated(3, -0.6))

    @pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
    def test_ar1_rho_range(self, rho):
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.AR1(3, rho))

    def test_toeplitz_not_spd(self):
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.Toeplitz((1.0, 1.0, 1.0)))

    def test_diagonal_nonpositive(self):
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.Diagonal((1.0, 0.0)))

    def test_randomspd_bad_cond(self):
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.RandomSPD(4, seed=1, cond=1.0))

    def test_scaled_length_mismatch(self):
        with pytest.raises(InvalidParameter):
            covgen.generate(covgen.Scaled(covgen.AR1(3, 0.2), (1.0, 2.0)))


class TestRandomSPD:
    @pytest.mark.parametrize("n,target", [(4, 10.0), (8, 100.0), (16, 50.0), (32, 1000.0)])
    def test_condition_number(self, n, target):
        m = covgen.generate(covgen.RandomSPD(n, seed=n, cond=target))
        eigs = matcore.sym_eigen(m).eigenvalues
        cond = eigs[-1] / eigs[0]
        assert abs(cond - target) <= 0.1 * target

    def test_deterministic(self):
        a = covgen.generate(covgen.RandomSPD(6, seed=42, cond=30.0))
        b = covgen.generate(covgen.RandomSPD(6, seed=42, cond=30.0))
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        a = covgen.generate(covgen.RandomSPD(6, seed=1))
        b = covgen.generate(covgen.RandomSPD(6, seed=2))
        assert not np.array_equal(a, b)


ALL_FAMILIES = [
    covgen.AR1(4, 0.7),
    covgen.AR1(5, -0.4),
    covgen.Equicorrelated(4, 0.3),
    covgen.Equicorrelated(3, -0.45),
    covgen.Toeplitz((2.0, 0.5, 0.25)),
    covgen.RandomSPD(6, seed=3, cond=40.0),
    covgen.Diagonal((0.5, 2.0, 7.0)),
    covgen.Scaled(covgen.AR1(4, 0.6), (1.0, 2.0, 3.0, 4.0)),
]


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: type(f).__name__)
def test_every_family_passes_validation(fam):
    x = decouple.from_covariance(covgen.generate(fam))
    assert x.n == covgen.generate(fam).shape[0]


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: type(f).__name__)
def test_json_round_trip(fam):
    doc = covgen.family_to_json(fam)
    again = covgen.family_from_json(doc)
    np.testing.assert_array_equal(covgen.generate(fam), covgen.generate(again))


def test_unknown_kind_rejected():
    with pytest.raises(InvalidParameter):
        covgen.family_from_json({"kind": "wishart", "n": 3})
