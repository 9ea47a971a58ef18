import numpy as np
import pytest

from landausplit import PeriodicProfile


def test_cosine_is_plain_cosine():
    prof = PeriodicProfile.cosine()
    t = np.linspace(0, 1, 17)
    assert np.allclose(prof(t), np.cos(2 * np.pi * t), atol=1e-14)


def test_sup_normalization():
    prof = PeriodicProfile.from_coefficients([(1, 3.0), (3, 0.5j)], alpha0=0.4)
    t = np.linspace(0, 1, 8192, endpoint=False)
    assert np.max(np.abs(prof(t))) == pytest.approx(1.0, abs=1e-5)


def test_scale_covariance_of_normalization():
    base = PeriodicProfile.from_coefficients([(1, 0.5), (2, 0.1 + 0.2j)])
    scaled = PeriodicProfile.from_coefficients([(1, 5.0), (2, 1.0 + 2.0j)])
    for (l1, a1), (l2, a2) in zip(base.harmonics, scaled.harmonics):
        assert l1 == l2
        assert a1 == pytest.approx(a2, rel=1e-12)


def test_constant_profile():
    prof = PeriodicProfile.constant()
    assert not prof.has_oscillation
    assert prof(0.37) == pytest.approx(1.0)


def test_zero_profile_rejected():
    with pytest.raises(ValueError):
        PeriodicProfile.from_coefficients([])


def test_bad_harmonics_rejected():
    with pytest.raises(ValueError):
        PeriodicProfile.from_coefficients([(0, 1.0)])
    with pytest.raises(ValueError):
        PeriodicProfile.from_coefficients([(1, 1.0), (1, 2.0)])


def test_periodicity():
    prof = PeriodicProfile.from_coefficients([(1, 0.5), (4, 0.2j)])
    t = np.linspace(0, 1, 50)
    assert np.allclose(prof(t), prof(t + 3.0), atol=1e-12)


def test_from_samples_recovers_harmonics():
    t = np.arange(512) / 512
    vals = np.cos(2 * np.pi * t) + 0.5 * np.sin(4 * np.pi * t)
    prof = PeriodicProfile.from_samples(vals)
    got = dict(prof.harmonics)
    assert set(got) == {1, 2}
    # amplitudes up to the common sup normalization
    ratio = got[1] / 0.5
    assert got[2] == pytest.approx(ratio * (0.5 * -0.5j), rel=1e-10)
    tt = np.linspace(0, 1, 97)
    resampled = prof(tt)
    direct = np.cos(2 * np.pi * tt) + 0.5 * np.sin(4 * np.pi * tt)
    scale = np.max(np.abs(resampled)) / np.max(np.abs(direct))
    assert np.allclose(resampled, scale * direct, atol=1e-9)


def test_json_round_trip():
    prof = PeriodicProfile.from_coefficients([(1, 0.5), (2, 0.25j)], alpha0=0.1)
    back = PeriodicProfile.from_dict(prof.to_dict())
    assert back.alpha0 == pytest.approx(prof.alpha0, rel=1e-12)
    for (l1, a1), (l2, a2) in zip(prof.harmonics, back.harmonics):
        assert l1 == l2 and a1 == pytest.approx(a2, rel=1e-12)
