import numpy as np
import pytest
from numpy.linalg import LinAlgError

from aircomp.numerics import (SeedSpec, derive_trial_stream, hermitian_solve,
                              sample_complex_gaussian)


def test_solve_identity():
    x = hermitian_solve(np.eye(2), np.array([1 + 1j, 2.0]))
    assert np.allclose(x, [1 + 1j, 2.0], atol=0, rtol=0)


def test_solve_diagonal():
    x = hermitian_solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
    assert np.allclose(x, [1.0, 1.0], atol=1e-15)


def test_solve_random_residual():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        a = r @ r.conj().T + 0.5 * np.eye(6)
        b = rng.normal(size=6) + 1j * rng.normal(size=6)
        x = hermitian_solve(a, b)
        resid = np.linalg.norm(a @ x - b)
        assert resid <= 1e-10 * (np.linalg.norm(a) * np.linalg.norm(x)
                                 + np.linalg.norm(b))


def test_solve_rejects_nonfinite():
    a = np.eye(2, dtype=complex)
    a[0, 0] = np.nan
    with pytest.raises(ValueError):
        hermitian_solve(a, np.ones(2))
    with pytest.raises(ValueError):
        hermitian_solve(np.eye(2), np.array([np.inf, 0.0]))


def test_solve_rejects_non_hermitian():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        hermitian_solve(a, np.ones(2))


def test_solve_singular_matrix():
    with pytest.raises(LinAlgError):
        hermitian_solve(np.ones((2, 2)), np.ones(2))


def test_solve_shape_checks():
    with pytest.raises(ValueError):
        hermitian_solve(np.eye(2), np.ones(3))
    with pytest.raises(ValueError):
        hermitian_solve(np.ones((2, 3)), np.ones(2))


def test_gaussian_moments_unit_variance():
    stream = derive_trial_stream(SeedSpec(11, 0))
    z = sample_complex_gaussian(stream, 1.0, size=10 ** 5)
    assert abs(np.mean(z)) < 0.02
    assert 0.9 <= np.mean(np.abs(z) ** 2) <= 1.1
    # circular symmetry: real/imag each carry half the power
    assert abs(np.var(z.real) - 0.5) < 0.02
    assert abs(np.var(z.imag) - 0.5) < 0.02


def test_gaussian_scaled_variance():
    stream = derive_trial_stream(SeedSpec(12, 0))
    z = sample_complex_gaussian(stream, 0.25, size=10 ** 5)
    assert abs(np.mean(np.abs(z) ** 2) - 0.25) < 0.05 * 0.25


def test_gaussian_determinism():
    a = sample_complex_gaussian(derive_trial_stream(SeedSpec(5, 7)), 1.0, size=50)
    b = sample_complex_gaussian(derive_trial_stream(SeedSpec(5, 7)), 1.0, size=50)
    assert np.array_equal(a, b)


def test_gaussian_scalar_draw():
    z = sample_complex_gaussian(derive_trial_stream(SeedSpec(1, 0)), 2.0)
    assert isinstance(z, complex)


def test_gaussian_invalid_variance():
    stream = derive_trial_stream(SeedSpec(1, 0))
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            sample_complex_gaussian(stream, bad)


def test_stream_determinism():
    a = derive_trial_stream(SeedSpec(42, 0)).normal(size=100)
    b = derive_trial_stream(SeedSpec(42, 0)).normal(size=100)
    assert np.array_equal(a, b)


def test_stream_distinct_trials():
    a = derive_trial_stream(SeedSpec(42, 0)).normal(size=100)
    b = derive_trial_stream(SeedSpec(42, 1)).normal(size=100)
    assert not np.any(a == b)


def test_stream_cross_correlation():
    # 100 trial streams, 1000 draws each: streams should look mutually
    # independent. The mean |correlation| over all pairs of independent
    # 1000-sample streams concentrates near sqrt(2/pi)/sqrt(1000) ~ 0.025;
    # the max over ~5000 pairs is noisier, so it only gets a loose bound.
    draws = np.stack([derive_trial_stream(SeedSpec(42, t)).normal(size=1000)
                      for t in range(100)])
    corr = np.corrcoef(draws)
    off = corr[np.triu_indices(100, k=1)]
    assert np.mean(np.abs(off)) < 0.05
    assert np.max(np.abs(off)) < 0.2


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1, 0)
    with pytest.raises(ValueError):
        SeedSpec(2 ** 64, 0)
    with pytest.raises(ValueError):
        SeedSpec(0, -2)
