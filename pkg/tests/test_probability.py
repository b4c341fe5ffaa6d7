import math

import pytest

from epsfta.errors import InvalidModelError, NegativeTimeError
from epsfta.models.probability import (
    ConstantProbability,
    FailureRateOnly,
    FailureWithRepair,
    MissionProfile,
    event_unreliability,
    first_failure_probability,
    mtbf,
    steady_state_unavailability,
)


def test_failure_rate_only_two_year_mission():
    q = event_unreliability(FailureRateOnly(30e-9), 17520)
    assert q == pytest.approx(5.25462e-4, rel=1e-5)
    assert q == pytest.approx(1 - math.exp(-30e-9 * 17520), rel=1e-12)


def test_steady_state_with_repair():
    model = FailureWithRepair(1e-5, 1e-2)
    assert steady_state_unavailability(model) == pytest.approx(9.990e-4, rel=1e-4)
    assert event_unreliability(model, 1e7) == pytest.approx(steady_state_unavailability(model), rel=1e-12)


def test_repairable_unreliability_approaches_from_below():
    model = FailureWithRepair(1e-3, 1e-2)
    limit = steady_state_unavailability(model)
    values = [event_unreliability(model, t) for t in (0, 10, 100, 1000)]
    assert values[0] == 0.0
    assert values == sorted(values)
    assert all(v <= limit for v in values)


@pytest.mark.parametrize('model', [FailureRateOnly(1e-6), FailureWithRepair(1e-6, 1e-3)])
def test_zero_time_is_zero(model):
    assert event_unreliability(model, 0) == 0.0


def test_constant_probability_ignores_time():
    model = ConstantProbability(1e-4)
    assert event_unreliability(model, 0) == event_unreliability(model, 1e6) == 1e-4
    assert first_failure_probability(model, 10) == 1e-4


def test_first_failure_ignores_repair():
    model = FailureWithRepair(1e-4, 1.0)
    assert first_failure_probability(model, 1000) == pytest.approx(1 - math.exp(-0.1), rel=1e-12)
    assert first_failure_probability(model, 1000) > event_unreliability(model, 1000)


def test_zero_rates():
    assert event_unreliability(FailureWithRepair(0.0, 0.0), 100) == 0.0
    assert steady_state_unavailability(FailureRateOnly(0.0)) == 0.0
    assert mtbf(FailureRateOnly(0.0)) == math.inf


def test_non_repairable_steady_state_is_failed():
    assert steady_state_unavailability(FailureRateOnly(1e-9)) == 1.0


def test_mtbf():
    assert mtbf(FailureRateOnly(2e-6)) == pytest.approx(5e5)


def test_negative_time():
    with pytest.raises(NegativeTimeError):
        event_unreliability(FailureRateOnly(1e-6), -1)


@pytest.mark.parametrize('build', [
    lambda: ConstantProbability(1.5),
    lambda: ConstantProbability(-0.1),
    lambda: FailureRateOnly(-1e-6),
    lambda: FailureRateOnly(float('nan')),
    lambda: FailureWithRepair(1e-6, -1.0),
])
def test_invalid_models(build):
    with pytest.raises(InvalidModelError):
        build()


def test_mission_profile_grid():
    profile = MissionProfile.with_uniform_grid(100.0, 5)
    assert profile.time_grid == (0.0, 25.0, 50.0, 75.0, 100.0)
    assert MissionProfile.with_uniform_grid(100.0, 1).time_grid == ()


@pytest.mark.parametrize('kwargs', [
    {'mission_time': 0},
    {'mission_time': 10, 'time_grid': (0, 5, 5)},
    {'mission_time': 10, 'time_grid': (0, 20)},
])
def test_mission_profile_rejects(kwargs):
    with pytest.raises(InvalidModelError):
        MissionProfile(**kwargs)
