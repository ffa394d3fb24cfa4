import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camsel.errors import InvalidInputError, InvalidParameterError
from camsel.scenario import (
    CameraSpec,
    CorrelationMatrix,
    Scenario,
    beta_moments,
    covariance,
    covariance_matrix,
    expected_resolution,
    nearest_correlation,
)

from oracles import beta_moments_fraction


@pytest.mark.parametrize(
    "a, b, mean, std",
    [(6, 3, 0.666667, 0.149071), (1, 1, 0.5, 0.288675), (2, 3, 0.4, 0.2)],
)
def test_beta_moments_examples(a, b, mean, std):
    m = beta_moments(a, b)
    assert m.mean == pytest.approx(mean, abs=5e-7)
    assert m.std == pytest.approx(std, abs=5e-7)


@pytest.mark.parametrize("a, b", [(6, 3), (2, 3), (2.5, 3.5), (0.5, 7)])
def test_beta_moments_match_exact_fractions(a, b):
    mean, var = beta_moments_fraction(a, b)
    m = beta_moments(a, b)
    assert m.mean == pytest.approx(float(mean), rel=1e-15)
    assert m.std**2 == pytest.approx(float(var), rel=1e-14)


@pytest.mark.parametrize("a, b", [(0, 1), (1, 0), (-1, 2), (float("nan"), 1)])
def test_beta_moments_rejects_bad_shapes(a, b):
    with pytest.raises(InvalidParameterError):
        beta_moments(a, b)


def test_beta_moments_agree_with_sampling():
    rng = np.random.default_rng(7)
    x = rng.beta(6, 3, size=10**6)
    m = beta_moments(6, 3)
    se = x.std() / 1e3
    assert abs(x.mean() - m.mean) < 3 * se


def test_camera_invariants():
    cam = CameraSpec(0, 1920, 1080, 6, 3)
    assert cam.resolution == 2073600
    with pytest.raises(InvalidParameterError, match="camera 4"):
        CameraSpec(4, 1280, 720, 2, 0)
    with pytest.raises(InvalidParameterError):
        CameraSpec(0, 0, 720, 2, 2)


def test_expected_resolution_examples():
    assert expected_resolution(CameraSpec(0, 1920, 1080, 6, 3)) == pytest.approx(1382400, rel=1e-15)
    assert expected_resolution(CameraSpec(0, 1280, 720, 2, 3)) == pytest.approx(368640, rel=1e-15)
    near_one = expected_resolution(CameraSpec(0, 1280, 720, 1e6, 1))
    assert near_one == pytest.approx(921600, rel=2e-6)


@given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(0.01, 10))
def test_expected_resolution_monotone_in_a(a, b, step):
    lo = expected_resolution(CameraSpec(0, 640, 480, a, b))
    hi = expected_resolution(CameraSpec(0, 640, 480, a + step, b))
    assert hi >= lo


def test_covariance_examples():
    c = CameraSpec(0, 1920, 1080, 6, 3)
    d = CameraSpec(1, 1280, 720, 2, 3)
    assert covariance(c, d, 0.0) == 0.0
    assert covariance(c, c, 1.0) == pytest.approx(2073600**2 * 18 / 810, rel=1e-14)
    assert covariance(c, c, 0.5) == pytest.approx(4.77757e10, rel=1e-6)
    with pytest.raises(InvalidParameterError):
        covariance(c, d, 1.5)


def test_covariance_matches_joint_simulation():
    # Pearson correlation rho exactly: p_j copies p_i with probability rho,
    # otherwise it is an independent draw from the same Beta.
    rng = np.random.default_rng(11)
    n, rho, r = 10**6, 0.5, 1920 * 1080
    pi = rng.beta(6, 3, n)
    pj = np.where(rng.random(n) < rho, pi, rng.beta(6, 3, n))
    emp = np.cov(r * pi, r * pj)[0, 1]
    c = CameraSpec(0, 1920, 1080, 6, 3)
    # standard error of a covariance estimate is about var / sqrt(n) here
    assert emp == pytest.approx(covariance(c, c, rho), abs=4 * covariance(c, c, 1.0) / 1e3)


def test_correlation_matrix_validation():
    with pytest.raises(InvalidParameterError):
        CorrelationMatrix([[1, 0.2], [0.3, 1]])
    with pytest.raises(InvalidParameterError):
        CorrelationMatrix([[0.9, 0.2], [0.2, 1]])
    with pytest.raises(InvalidParameterError):
        CorrelationMatrix([[1, 1.2], [1.2, 1]])
    with pytest.raises(InvalidInputError):
        CorrelationMatrix([[1, 0.2, 0.1], [0.2, 1, 0.1]])
    m = CorrelationMatrix([[1, -0.3], [-0.3, 1]])
    assert m.n == 2 and m.is_psd()


def test_nearest_correlation_repairs_indefinite():
    bad = np.array([[1, 0.9, 0.1], [0.9, 1, 0.9], [0.1, 0.9, 1]])
    assert np.linalg.eigvalsh(bad).min() < 0
    fixed = nearest_correlation(bad)
    assert np.linalg.eigvalsh(fixed).min() > -1e-12
    assert np.allclose(np.diag(fixed), 1.0)
    assert np.array_equal(fixed, fixed.T)


def test_scenario_invariants(shipped):
    cams = shipped.cameras
    with pytest.raises(InvalidInputError):
        Scenario(cams[:6], shipped.rho, 1036800, 4)
    with pytest.raises(InvalidParameterError):
        Scenario(cams, shipped.rho, 1036800, 0)
    with pytest.raises(InvalidParameterError):
        Scenario(cams, shipped.rho, 1036800, 8)
    with pytest.raises(InvalidParameterError):
        Scenario(cams, shipped.rho, 0, 4)
    with pytest.raises(InvalidParameterError):
        Scenario(cams, shipped.rho, 1, 4, trials=0)
    assert shipped.high_res_indices() == [0, 1, 2]


def test_covariance_matrix_examples(shipped):
    ident = shipped.replace(rho=CorrelationMatrix.identity(7))
    cov = covariance_matrix(ident)
    assert np.array_equal(cov, np.diag(np.diag(cov)))
    expected = (shipped.resolutions * shipped.sigmas) ** 2
    assert np.allclose(np.diag(cov), expected, rtol=1e-15)

    one = Scenario(shipped.cameras[:1], CorrelationMatrix.identity(1), 1.0, 1)
    assert covariance_matrix(one).shape == (1, 1)
    assert covariance_matrix(one)[0, 0] == pytest.approx(2073600**2 * 18 / 810, rel=1e-14)

    full = covariance_matrix(shipped)
    assert full[0, 1] == covariance(shipped.cameras[0], shipped.cameras[1], shipped.rho[0, 1])
    assert np.array_equal(full, full.T)
    assert np.all(np.diag(full) > 0)


correlation_matrices = st.integers(2, 8).flatmap(
    lambda n: st.lists(st.floats(-1, 1), min_size=n * 2, max_size=n * 2).map(
        lambda xs, n=n: _factor_corr(np.array(xs).reshape(n, 2))
    )
)


def _factor_corr(load):
    load = load / np.maximum(np.linalg.norm(load, axis=1), 1.0)[:, None]
    m = load @ load.T
    np.fill_diagonal(m, 1.0)
    return np.clip(m, -1, 1)


@settings(max_examples=60)
@given(correlation_matrices, st.data())
def test_covariance_matrix_is_psd_for_psd_rho(rho, data):
    n = rho.shape[0]
    cams = tuple(
        CameraSpec(
            i,
            data.draw(st.sampled_from([640, 1280, 1920])),
            data.draw(st.sampled_from([480, 720, 1080])),
            data.draw(st.floats(0.5, 8)),
            data.draw(st.floats(0.5, 8)),
        )
        for i in range(n)
    )
    cov = covariance_matrix(Scenario(cams, CorrelationMatrix(rho), 1.0, 1))
    assert np.array_equal(cov, cov.T)
    lam = np.linalg.eigvalsh(cov)
    assert lam.min() >= -1e-9 * np.abs(lam).max()
