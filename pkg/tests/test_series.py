import numpy as np
import pytest

from qpt_echo.series import SurvivalSeries


def test_from_log_derives_m():
    s = SurvivalSeries.from_log([0.0, 1.0, 2.0], [0.0, -0.5, -800.0])
    assert s.m_values[0] == 1.0
    assert s.m_values[1] == np.exp(-0.5)
    assert s.m_values[2] == 0.0
    assert len(s) == 3


def test_zero_probability_maps_to_minus_inf():
    s = SurvivalSeries.from_probability([0.0, 1.0], [1.0, 0.0])
    assert s.log_m_values[1] == -np.inf


def test_read_only():
    s = SurvivalSeries.from_log([0.0, 1.0], [0.0, -1.0])
    with pytest.raises(ValueError):
        s.log_m_values[0] = 1.0


@pytest.mark.parametrize("times", [[0.0, 0.0], [1.0, 0.5]])
def test_rejects_non_increasing(times):
    with pytest.raises(ValueError):
        SurvivalSeries.from_log(times, [0.0, 0.0])


def test_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        SurvivalSeries.from_log([0.0, 1.0], [0.0])


def test_window_and_value_at():
    s = SurvivalSeries.from_log(np.arange(10.0), -np.arange(10.0) / 10, {"model": "x"})
    w = s.window(2.0, 5.0)
    assert list(w.times) == [2.0, 3.0, 4.0, 5.0]
    assert w.metadata["model"] == "x"
    t, lm = s.value_at(4.2)
    assert t == 4.0 and lm == pytest.approx(-0.4)
