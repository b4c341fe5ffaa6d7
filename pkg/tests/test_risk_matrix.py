import random

import pytest

from epsfta.config import bundled_file
from epsfta.errors import OutOfRangeError, SchemaViolationError, ThresholdConfigError
from epsfta.utils.cut_sets import CutSet
from epsfta.utils.risk_matrix import (
    BINS,
    DEFAULT_CONFIG,
    RiskColor,
    RiskConfig,
    RiskItem,
    classify,
    items_from_cut_sets,
    likelihood_bin,
    load_risk_items,
    render_text,
)


@pytest.mark.parametrize('probability, expected', [
    (0.0, 1),
    (5e-7, 1),
    (1e-6, 2),
    (5e-3, 3),
    (0.05, 4),
    (0.1, 5),
    (1.0, 5),
])
def test_likelihood_bins(probability, expected):
    assert likelihood_bin(probability) == expected


@pytest.mark.parametrize('probability', [-0.1, 1.5])
def test_probability_out_of_range(probability):
    with pytest.raises(OutOfRangeError):
        likelihood_bin(probability)


def test_corner_and_middle_colors():
    assert DEFAULT_CONFIG.color(1, 1) is RiskColor.GREEN
    assert DEFAULT_CONFIG.color(5, 5) is RiskColor.RED
    assert DEFAULT_CONFIG.color(3, 2) is RiskColor.YELLOW
    assert DEFAULT_CONFIG.color(4, 4) is RiskColor.RED
    assert DEFAULT_CONFIG.color(2, 2) is RiskColor.GREEN


def _random_config(rng):
    exponents = sorted(rng.sample(range(-12, 1), 4))
    yellow = rng.randint(2, 11)
    return RiskConfig(tuple(10.0 ** e for e in exponents), yellow, rng.randint(yellow, 11))


def test_colors_are_monotone():
    rng = random.Random(17)
    for _ in range(100):
        config = _random_config(rng)
        for l in BINS:
            for s in BINS:
                rank = config.color(l, s).rank
                if l < 5:
                    assert config.color(l + 1, s).rank >= rank
                if s < 5:
                    assert config.color(l, s + 1).rank >= rank


def test_higher_probability_never_lowers_color():
    rng = random.Random(19)
    for _ in range(100):
        config = _random_config(rng)
        probabilities = sorted(rng.random() ** 8 for _ in range(20))
        severity = rng.choice(BINS)
        ranks = [config.color(likelihood_bin(p, config), severity).rank for p in probabilities]
        assert ranks == sorted(ranks)


@pytest.mark.parametrize('kwargs', [
    {'thresholds': (1e-2, 1e-4, 1e-6, 1e-1)},
    {'thresholds': (1e-6, 1e-4, 1e-2)},
    {'thresholds': (0.0, 1e-4, 1e-2, 1e-1)},
    {'thresholds': (1e-6, 1e-4, 1e-2, 2.0)},
    {'yellow_sum': 9, 'red_sum': 8},
    {'yellow_sum': 1},
    {'red_sum': 12},
])
def test_invalid_config(kwargs):
    with pytest.raises(ThresholdConfigError):
        RiskConfig(**kwargs)


def test_config_files(tmp_path):
    assert RiskConfig.load(bundled_file('risk_thresholds')) == DEFAULT_CONFIG
    path = tmp_path / 'risk.yaml'
    path.write_text('likelihood_thresholds: [1.0e-5, 1.0e-3, 1.0e-2, 0.5]\nyellow_sum: 6\nred_sum: 9\n')
    config = RiskConfig.load(path)
    assert config.thresholds == (1e-5, 1e-3, 1e-2, 0.5)
    assert config.color(3, 2) is RiskColor.GREEN
    path.write_text('likelihood_thresholds: [1, 2]\n')
    with pytest.raises(ThresholdConfigError):
        RiskConfig.load(path)


def test_classify_bundled_register():
    items = load_risk_items(bundled_file('eps_risks'))
    matrix = classify(items)
    assert matrix.total == len(items) == 5
    assert sum(c.count for c in matrix.cells) == 5
    assert matrix.cell(3, 5).items == ('Bus open (FD-1)',)
    assert matrix.cell(3, 5).color is RiskColor.RED
    assert matrix.cell(2, 3).color is RiskColor.YELLOW
    assert [matrix.color_of(item) for item in items] == [
        RiskColor.RED, RiskColor.RED, RiskColor.YELLOW, RiskColor.YELLOW, RiskColor.YELLOW]
    assert len(matrix.as_records()) == 25


def test_render_text():
    matrix = classify([RiskItem('a', 5e-3, 2), RiskItem('b', 6e-3, 2)])
    lines = render_text(matrix).splitlines()
    assert lines[0].startswith('likelihood \\ severity')
    assert lines[1].split()[0] == '5'
    assert 'Y:2' in lines[3]
    assert lines[-1] == 'items: 2'


def test_bad_items(tmp_path):
    with pytest.raises(OutOfRangeError):
        RiskItem('x', 0.5, 6)
    path = tmp_path / 'items.yaml'
    path.write_text('- {name: x, probability: 0.1}\n')
    with pytest.raises(SchemaViolationError):
        load_risk_items(path)


@pytest.mark.parametrize('severity', ['2.7', 'true', '"high"', '.nan'])
def test_non_integer_severity_rejected(tmp_path, severity):
    path = tmp_path / 'items.yaml'
    path.write_text(f"- {{name: ok, probability: 0.1, severity: 3}}\n"
                    f"- {{name: x, probability: 0.1, severity: {severity}}}\n")
    with pytest.raises(SchemaViolationError) as info:
        load_risk_items(path)
    assert info.value.field == 'items[1]'


def test_whole_number_severities_accepted(tmp_path):
    path = tmp_path / 'items.yaml'
    path.write_text('- {name: a, probability: 0.1, severity: 3.0}\n'
                    '- {name: b, probability: 0.1, severity: "4"}\n')
    assert [i.severity for i in load_risk_items(path)] == [3, 4]


def test_items_from_cut_sets():
    items = items_from_cut_sets([CutSet(('A',)), CutSet(('A', 'B'))], {'A': 0.1, 'B': 0.01}, severity=4)
    assert [(i.name, i.severity) for i in items] == [('{A}', 4), ('{A, B}', 4)]
    assert items[1].probability == pytest.approx(1e-3)
