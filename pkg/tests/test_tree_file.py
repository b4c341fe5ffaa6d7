import hashlib
import random

import pytest

from epsfta.config import bundled_file
from epsfta.errors import MissingModelError, SchemaViolationError, SemanticError, TreeSyntaxError, UnknownComponentError
from epsfta.models.fault_tree import EventKind
from epsfta.models.probability import ConstantProbability, FailureRateOnly, FailureWithRepair
from epsfta.utils.tree_file import (
    EventDefinition,
    GateDefinition,
    ModelSpec,
    TreeDocument,
    build_tree,
    load_tree,
    models_from_document,
    parse_tree_file,
    parse_tree_text,
    serialize_tree_document,
    write_tree_file,
)
from tests.helpers import random_coherent_tree

MINIMAL = """\
format_version: 1
top: TOP
events:
  - id: A
    model: {type: failure-rate, failure_rate: 1.0e-6}
  - id: B
    model: {type: constant-probability, probability: 1e-4}
gates:
  - id: TOP
    kind: or
    inputs: [A, B]
"""


def _random_model(rng):
    choice = rng.randrange(5)
    if choice == 0:
        return ModelSpec('constant-probability', probability=rng.random())
    if choice == 1:
        return ModelSpec('failure-rate', failure_rate=10 ** rng.uniform(-9, -3))
    if choice == 2:
        return ModelSpec('failure-with-repair', failure_rate=10 ** rng.uniform(-9, -3),
                         repair_rate=10 ** rng.uniform(-3, 0))
    if choice == 3:
        return ModelSpec('failure-with-repair', repair_rate=0.01)
    return None


def _random_document(rng, index):
    tree = random_coherent_tree(rng, max_events=8, max_depth=4)
    events = []
    for event_id in tree.stochastic_events:
        model = _random_model(rng)
        component = 'Diodes' if model is None or model.failure_rate is None and model.type != 'constant-probability' else None
        kind = EventKind.UNDEVELOPED if rng.random() < 0.2 else EventKind.BASIC
        events.append(EventDefinition(event_id, kind, f"event {event_id}: pin & cable", component, model))
    events.append(EventDefinition('H1', EventKind.HOUSE, house_state=rng.random() < 0.5))
    conditioned = index % 3 == 0
    if conditioned:
        events.append(EventDefinition('C1', EventKind.CONDITIONING, condition_holds=rng.random() < 0.5))
    gates = []
    for gate in tree.gates:
        inputs = gate.inputs + (('H1',) if gate.id == tree.top else ())
        condition = 'C1' if conditioned and gate.id == tree.top else None
        gates.append(GateDefinition(gate.id, gate.kind, inputs, rng.choice(['', f"gate {gate.id}"]), condition))
    return TreeDocument(tree.top, tuple(events), tuple(gates), name=f"corpus-{index}" if index % 2 else '')


def test_round_trip_corpus():
    rng = random.Random(23)
    corpus = [_random_document(rng, index) for index in range(19)]
    corpus.append(parse_tree_file(bundled_file('eps_example')))
    for document in corpus:
        text = serialize_tree_document(document)
        assert parse_tree_text(text) == document
        assert serialize_tree_document(parse_tree_text(text)) == text


def test_bundled_example():
    document = parse_tree_file(bundled_file('eps_example'))
    assert document.top == 'BAT-FIRE'
    assert document.name == 'eps_example'
    assert len(document.events) == 12
    assert len(document.gates) == 8
    tree = build_tree(document)
    assert (tree.gate_count, tree.event_count) == (8, 12)


@pytest.mark.parametrize('text', ['', '   \n', '# only a comment\n'])
def test_empty_file(text):
    with pytest.raises(TreeSyntaxError) as info:
        parse_tree_text(text, source='empty.yaml')
    assert info.value.code == 'SyntaxError'
    assert info.value.line == 1


def test_yaml_syntax_error_has_position():
    with pytest.raises(TreeSyntaxError) as info:
        parse_tree_text('format_version: 1\ntop: [unclosed\nevents: []\n')
    assert info.value.line is not None and info.value.line >= 2
    assert info.value.column is not None


def test_duplicate_id_is_semantic():
    text = MINIMAL.replace('  - id: B\n', '  - id: A\n')
    with pytest.raises(SemanticError) as info:
        parse_tree_text(text)
    assert 'DuplicateId' in info.value.codes


def test_dangling_reference_is_semantic():
    with pytest.raises(SemanticError) as info:
        parse_tree_text(MINIMAL.replace('inputs: [A, B]', 'inputs: [A, B, Z]'))
    assert info.value.codes == ('DanglingReference',)


def test_semantic_checks_can_be_skipped():
    document = parse_tree_text(MINIMAL.replace('inputs: [A, B]', 'inputs: [A, B, Z]'), validate=False)
    assert document.gates[0].inputs == ('A', 'B', 'Z')


@pytest.mark.parametrize('old, new, field', [
    ('  - id: A\n', '  - id: A\n    colour: red\n', 'events[0].colour'),
    ('probability: 1e-4', 'failure_rate: 1e-4', 'events[1].model.failure_rate'),
    ('{type: constant-probability, probability: 1e-4}', '{type: constant-probability}',
     'events[1].model.probability'),
    ('kind: or', 'kind: nand', 'gates[0].kind'),
    ('format_version: 1', 'format_version: 2', 'format_version'),
    ('failure_rate: 1.0e-6', 'failure_rate: lots', 'events[0].model.failure_rate'),
    ('inputs: [A, B]', 'inputs: A', 'gates[0].inputs'),
])
def test_schema_violations(old, new, field):
    with pytest.raises(SchemaViolationError) as info:
        parse_tree_text(MINIMAL.replace(old, new), source='tree.yaml')
    assert info.value.field == field
    assert str(info.value).startswith('tree.yaml: ')


def test_missing_format_version():
    with pytest.raises(SchemaViolationError) as info:
        parse_tree_text(MINIMAL.replace('format_version: 1\n', ''))
    assert info.value.field == 'format_version'


def test_numeric_strings_are_read_as_numbers():
    document = parse_tree_text(MINIMAL)
    assert document.events[1].model.probability == 1e-4
    assert document.events[0].model.failure_rate == 1e-6


def test_models_from_bundled_example(library):
    document = parse_tree_file(bundled_file('eps_example'))
    models = models_from_document(document, library)
    assert models['CAP-1'] == FailureRateOnly(3e-8)
    assert models['Event24'] == FailureWithRepair(2e-6, 0.01)
    assert models['Event25'].failure_rate == pytest.approx(2.5e-7)
    assert models['Event25'].repair_rate == 0.01
    assert models['FD-1'] == ConstantProbability(1e-4)
    with pytest.raises(MissingModelError):
        models_from_document(document, library, use_library_defaults=False)


def test_unknown_component(library):
    text = MINIMAL.replace('    model: {type: failure-rate, failure_rate: 1.0e-6}\n', '    component: Flux capacitor\n')
    with pytest.raises(UnknownComponentError):
        models_from_document(parse_tree_text(text), library)


def test_load_and_write(tmp_path, library):
    path = tmp_path / 'tree.yaml'
    path.write_text(MINIMAL)
    loaded = load_tree(path, library)
    assert loaded.sha256 == hashlib.sha256(MINIMAL.encode('utf-8')).hexdigest()
    assert loaded.tree.M == 2
    assert loaded.models == {'A': FailureRateOnly(1e-6), 'B': ConstantProbability(1e-4)}

    copy = write_tree_file(loaded.document, tmp_path / 'copy.yaml')
    assert parse_tree_file(copy) == loaded.document


def test_load_without_models(tmp_path, library):
    path = tmp_path / 'tree.yaml'
    path.write_text(MINIMAL.replace('    model: {type: failure-rate, failure_rate: 1.0e-6}\n', ''))
    with pytest.raises(MissingModelError):
        load_tree(path, library)
    loaded = load_tree(path, library, with_models=False)
    assert loaded.models == {}
    assert loaded.tree.M == 2
