"""辅助函数与配置"""
import math

import pytest

from config import Config
from core.chains import TIME_UNITS, T1
from utils.helpers import (
    format_phase,
    parse_time_expression,
    parse_vertex,
    parse_vertex_list,
    phase_error,
    phase_of,
    wrap_phase,
)


@pytest.mark.parametrize('angle, expected', [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi / 2, -math.pi / 2),
])
def test_wrap_phase(angle, expected):
    assert wrap_phase(angle) == pytest.approx(expected)


def test_phase_of_zero():
    assert phase_of(0j) == 0.0
    assert phase_of(-1j) == pytest.approx(-math.pi / 2)


def test_phase_error_treats_minus_pi_as_pi():
    assert phase_error(complex(-1, -1e-17), complex(-1, 1e-17)) <= 1e-15
    assert phase_error(1j, 1) == pytest.approx(math.pi / 2)
    assert phase_error(0, 1) == math.pi


@pytest.mark.parametrize('expr, expected', [
    ('2t1', 2 * T1),
    ('t1', T1),
    ('3 * T1', 3 * T1),
    ('1.25', 1.25),
])
def test_parse_time_expression(expr, expected):
    assert parse_time_expression(expr, TIME_UNITS) == pytest.approx(expected)


@pytest.mark.parametrize('expr', ['', '2t9', 'abc def'])
def test_parse_time_expression_rejects(expr):
    with pytest.raises(ValueError):
        parse_time_expression(expr, TIME_UNITS)


def test_parse_vertex():
    assert parse_vertex('1,2,3') == (1, 2, 3)
    assert parse_vertex('2, 3') == (0, 2, 3)
    assert parse_vertex('1:2,3') == (1, 2, 3)
    with pytest.raises(ValueError):
        parse_vertex('1,2,3,4')


def test_parse_vertex_list():
    assert parse_vertex_list('') == []
    assert parse_vertex_list('0,1,0; 0,2,1') == [(0, 1, 0), (0, 2, 1)]


def test_format_phase():
    assert format_phase(-math.pi) == '-1.000000π'


def test_default_config_is_valid():
    assert Config.validate() == []
    assert Config.worker_count() >= 1


def test_invalid_config_is_reported(monkeypatch):
    monkeypatch.setattr(Config, 'TOLERANCE', 0.0)
    monkeypatch.setattr(Config, 'WORKERS', -1)
    errors = Config.validate()
    assert any('TOLERANCE' in e for e in errors)
    assert any('WORKERS' in e for e in errors)
