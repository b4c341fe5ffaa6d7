import json
import math

import pytest

from epsfta.errors import ReportError
from epsfta.models.fault_tree import tree_summary
from epsfta.models.probability import FailureRateOnly, MissionProfile
from epsfta.utils.cut_sets import minimal_cut_sets
from epsfta.utils.quantifier import RESULT_ROWS, QuantResult, quantify_mission
from epsfta.utils.report_builder import Provenance, ReportDocument, emit_report
from epsfta.utils.risk_matrix import RiskItem, classify
from epsfta.utils.scenario_enumerator import TABLE_HEADER, enumerate_scenarios
from tests.helpers import make_tree


@pytest.fixture
def or_tree():
    return make_tree({'TOP': ('or', ['A', 'B'])}, name='or')


@pytest.fixture
def provenance():
    return Provenance.create('0' * 64, 'epsfta test', include_timestamp=False,
                             tree_name='or', mission_hours=1000.0, method='exact')


@pytest.fixture
def report(or_tree, provenance):
    models = {'A': FailureRateOnly(1e-6), 'B': FailureRateOnly(2e-6)}
    quant = quantify_mission(or_tree, models, MissionProfile(1000.0))
    return ReportDocument(
        provenance=provenance,
        quant=quant,
        cut_sets=minimal_cut_sets(or_tree),
        scenarios=enumerate_scenarios(or_tree),
        risk=classify([RiskItem('{A}', 1e-3, 3)]),
        summary=tree_summary(or_tree),
        curve=((0.0, 1.0), (1000.0, quant.reliability_mission)),
    )


def test_text_report(report):
    text = emit_report(report, 'text').decode('utf-8')
    assert text.startswith('---\n')
    assert 'input_sha256:' in text
    assert 'timestamp' not in text
    assert '# Reliability report: or' in text
    assert 'No. of Gates: 1' in text
    positions = [text.index(f"| {label} |") for label, _ in RESULT_ROWS]
    assert positions == sorted(positions)
    assert 'Minimal cut sets: 2' in text
    assert 'M = 2, N = 4' in text
    assert 'items: 1' in text


def test_structured_report_is_deterministic(report):
    first = emit_report(report, 'structured')
    assert first == emit_report(report, 'structured')
    data = json.loads(first)
    assert list(data) == sorted(data)
    assert data['provenance'] == {'input_sha256': '0' * 64, 'tool_version': 'epsfta test',
                                  'tree_name': 'or', 'mission_hours': 1000.0, 'method': 'exact'}
    assert data['results']['reliability_mission'] == pytest.approx(math.exp(-0.003), abs=1e-12)
    assert [c['events'] for c in data['cut_sets']] == [['A'], ['B']]
    assert data['scenarios']['F'] == 3
    assert len(data['risk_matrix']) == 25


def test_csv_prefers_scenario_table(report):
    lines = emit_report(report, 'csv').decode('utf-8').splitlines()
    assert tuple(lines[0].split(',')) == TABLE_HEADER
    assert [int(line.split(',')[0]) for line in lines[1:]] == [0, 1, 2]


def test_csv_results_and_cut_sets(or_tree, provenance, report):
    lines = emit_report(ReportDocument(provenance, quant=report.quant), 'csv').decode('utf-8').splitlines()
    assert lines[0] == 'value,result'
    assert [line.rsplit(',', 1)[0] for line in lines[1:]] == [f'"{label}"' for label, _ in RESULT_ROWS]

    lines = emit_report(ReportDocument(provenance, cut_sets=minimal_cut_sets(or_tree)), 'csv').decode().splitlines()
    assert lines == ['size,events', '1,A', '1,B']

    with pytest.raises(ReportError):
        emit_report(ReportDocument(provenance), 'csv')


def test_html_report(report):
    html = emit_report(report, 'html').decode('utf-8')
    assert '<title>or</title>' in html
    assert '<table>' in html
    assert 'Reliability, Predicted' in html


def test_non_finite_values_are_rejected(provenance):
    quant = QuantResult(1.0, 0.9, 0.99, math.inf, 0.0, 0.99)
    with pytest.raises(ReportError):
        ReportDocument(provenance, quant=quant)
    with pytest.raises(ReportError):
        ReportDocument(provenance, curve=((0.0, float('nan')),))


def test_provenance_is_required():
    with pytest.raises(ReportError):
        ReportDocument(None)


def test_unknown_format(report):
    with pytest.raises(ReportError):
        emit_report(report, 'pdf')


def test_provenance_timestamp():
    stamped = Provenance.create('ab', 'epsfta test')
    assert stamped.timestamp.endswith('+00:00')
    assert 'timestamp' in stamped.as_dict()
