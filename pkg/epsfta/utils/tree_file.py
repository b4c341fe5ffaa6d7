"""
EPSFTA Tree Files

Reading and writing fault-tree documents. A tree file is YAML:

    format_version: 1
    name: eps_example
    top: BAT-FIRE
    events:
      - id: FD-1
        kind: basic
        description: Pin and cable
        model: {type: constant-probability, probability: 1.0e-4}
      - id: CAP-1
        kind: basic
        description: Signal
        component: Logic elements
    gates:
      - id: BAT-FIRE
        kind: or
        inputs: [FD-1, CAP-1]

Event models are ``constant-probability`` (probability), ``failure-rate``
(failure_rate) or ``failure-with-repair`` (failure_rate, repair_rate). A
failure rate may be left out when the event names a library component; the
midpoint of the component's range is used instead.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from epsfta.errors import (
    MissingModelError,
    SchemaViolationError,
    SemanticError,
    TreeSyntaxError,
    TreeValidationError,
)
from epsfta.models.fault_tree import EventKind, EventNode, FaultTree, GateKind, GateNode, validate_tree
from epsfta.models.probability import ConstantProbability, FailureRateOnly, FailureWithRepair
from epsfta.utils.component_library import default_library

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

MODEL_TYPES = {
    'constant-probability': ('probability',),
    'failure-rate': ('failure_rate',),
    'failure-with-repair': ('failure_rate', 'repair_rate'),
}
_REQUIRED = {
    'constant-probability': ('probability',),
    'failure-rate': (),
    'failure-with-repair': ('repair_rate',),
}

_DOCUMENT_KEYS = ('format_version', 'name', 'top', 'events', 'gates')
_EVENT_KEYS = ('id', 'kind', 'description', 'component', 'model', 'house_state', 'condition_holds')
_GATE_KEYS = ('id', 'kind', 'description', 'inputs', 'condition')


@dataclass(frozen=True)
class ModelSpec:
    type: str
    probability: float = None
    failure_rate: float = None
    repair_rate: float = None


@dataclass(frozen=True)
class EventDefinition:
    id: str
    kind: EventKind = EventKind.BASIC
    description: str = ''
    component: str = None
    model: ModelSpec = None
    house_state: bool = None
    condition_holds: bool = True


@dataclass(frozen=True)
class GateDefinition:
    id: str
    kind: GateKind
    inputs: tuple
    description: str = ''
    condition: str = None


@dataclass(frozen=True)
class TreeDocument:
    top: str
    events: tuple
    gates: tuple
    name: str = ''
    format_version: int = FORMAT_VERSION

    @property
    def event_ids(self):
        return tuple(e.id for e in self.events)


# ============================================================================
# Parsing
# ============================================================================

class _Reader:
    """Schema checks with field-path diagnostics."""

    def __init__(self, source):
        self.source = source

    def fail(self, path, message):
        raise SchemaViolationError(path, message, source=self.source)

    def mapping(self, value, path, allowed):
        if not isinstance(value, dict):
            self.fail(path, f"expected a mapping, got {type(value).__name__}")
        unknown = sorted(str(k) for k in value if k not in allowed)
        if unknown:
            self.fail(f"{path}.{unknown[0]}" if path else unknown[0], 'unknown field')
        return value

    def text(self, value, path, required=True):
        if value is None:
            if required:
                self.fail(path, 'required field is missing')
            return None
        if isinstance(value, (dict, list, bool)):
            self.fail(path, 'expected a string')
        return str(value)

    def number(self, value, path, required=True):
        if value is None:
            if required:
                self.fail(path, 'required field is missing')
            return None
        if isinstance(value, bool):
            self.fail(path, 'expected a number')
        try:
            # YAML 1.1 reads 1e-4 (no dot) as a string
            return float(value)
        except (TypeError, ValueError):
            self.fail(path, f"expected a number, got {value!r}")

    def flag(self, value, path, default=None):
        if value is None:
            return default
        if not isinstance(value, bool):
            self.fail(path, f"expected true or false, got {value!r}")
        return value

    def choice(self, enum, value, path, default=None):
        if value is None and default is not None:
            return default
        try:
            return enum(str(value).lower())
        except ValueError:
            options = ', '.join(m.value for m in enum)
            self.fail(path, f"expected one of {options}, got {value!r}")

    def listing(self, value, path):
        if value is None:
            return []
        if not isinstance(value, list):
            self.fail(path, 'expected a list')
        return value


def _read_model(reader, raw, path):
    reader.mapping(raw, path, ('type', 'probability', 'failure_rate', 'repair_rate'))
    kind = reader.text(raw.get('type'), f"{path}.type")
    if kind not in MODEL_TYPES:
        reader.fail(f"{path}.type", f"expected one of {', '.join(MODEL_TYPES)}, got {kind!r}")
    allowed = MODEL_TYPES[kind]
    values = {}
    for key in ('probability', 'failure_rate', 'repair_rate'):
        if key in raw and key not in allowed:
            reader.fail(f"{path}.{key}", f"not used by a {kind} model")
        values[key] = reader.number(raw.get(key), f"{path}.{key}", required=key in _REQUIRED[kind])
    return ModelSpec(type=kind, **values)


def _read_event(reader, raw, path):
    reader.mapping(raw, path, _EVENT_KEYS)
    model = raw.get('model')
    return EventDefinition(
        id=reader.text(raw.get('id'), f"{path}.id"),
        kind=reader.choice(EventKind, raw.get('kind'), f"{path}.kind", default=EventKind.BASIC),
        description=reader.text(raw.get('description'), f"{path}.description", required=False) or '',
        component=reader.text(raw.get('component'), f"{path}.component", required=False),
        model=_read_model(reader, model, f"{path}.model") if model is not None else None,
        house_state=reader.flag(raw.get('house_state'), f"{path}.house_state"),
        condition_holds=reader.flag(raw.get('condition_holds'), f"{path}.condition_holds", default=True),
    )


def _read_gate(reader, raw, path):
    reader.mapping(raw, path, _GATE_KEYS)
    inputs = reader.listing(raw.get('inputs'), f"{path}.inputs")
    return GateDefinition(
        id=reader.text(raw.get('id'), f"{path}.id"),
        kind=reader.choice(GateKind, raw.get('kind'), f"{path}.kind"),
        inputs=tuple(reader.text(x, f"{path}.inputs[{i}]") for i, x in enumerate(inputs)),
        description=reader.text(raw.get('description'), f"{path}.description", required=False) or '',
        condition=reader.text(raw.get('condition'), f"{path}.condition", required=False),
    )


def _load_yaml(text, source):
    if not text.strip():
        raise TreeSyntaxError('empty tree file', line=1, column=1, source=source)
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        problem = getattr(e, 'problem', None) or str(e)
        if mark is not None:
            raise TreeSyntaxError(problem, line=mark.line + 1, column=mark.column + 1, source=source)
        raise TreeSyntaxError(problem, source=source)
    if data is None:
        raise TreeSyntaxError('tree file has no content', line=1, column=1, source=source)
    return data


def parse_tree_text(text, source='', validate=True):
    """Parse a tree document from YAML text.

    Args:
        text: file contents
        source: name used in diagnostics
        validate: also check the fault-tree invariants

    Returns:
        TreeDocument

    Raises:
        TreeSyntaxError, SchemaViolationError, SemanticError
    """
    reader = _Reader(source)
    data = reader.mapping(_load_yaml(text, source), '', _DOCUMENT_KEYS)

    version = data.get('format_version')
    if version is None:
        reader.fail('format_version', 'required field is missing')
    if version != FORMAT_VERSION:
        reader.fail('format_version', f"unsupported version {version!r}; expected {FORMAT_VERSION}")

    document = TreeDocument(
        top=reader.text(data.get('top'), 'top'),
        events=tuple(_read_event(reader, raw, f"events[{i}]")
                     for i, raw in enumerate(reader.listing(data.get('events'), 'events'))),
        gates=tuple(_read_gate(reader, raw, f"gates[{i}]")
                    for i, raw in enumerate(reader.listing(data.get('gates'), 'gates'))),
        name=reader.text(data.get('name'), 'name', required=False) or '',
        format_version=version,
    )
    if validate:
        build_tree(document, source)
    return document


def parse_tree_file(path, validate=True):
    """Parse and validate a tree file."""
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    return parse_tree_text(text, source=str(path), validate=validate)


# ============================================================================
# Writing
# ============================================================================

def _model_record(model):
    record = {'type': model.type}
    for key in MODEL_TYPES[model.type]:
        value = getattr(model, key)
        if value is not None:
            record[key] = value
    return record


def _event_record(event):
    record = {'id': event.id, 'kind': event.kind.value}
    if event.description:
        record['description'] = event.description
    if event.component is not None:
        record['component'] = event.component
    if event.model is not None:
        record['model'] = _model_record(event.model)
    if event.house_state is not None:
        record['house_state'] = event.house_state
    if event.condition_holds is not True:
        record['condition_holds'] = event.condition_holds
    return record


def _gate_record(gate):
    record = {'id': gate.id, 'kind': gate.kind.value}
    if gate.description:
        record['description'] = gate.description
    record['inputs'] = list(gate.inputs)
    if gate.condition is not None:
        record['condition'] = gate.condition
    return record


def document_record(document):
    """Plain dict in the fixed file key order."""
    record = {'format_version': document.format_version}
    if document.name:
        record['name'] = document.name
    record['top'] = document.top
    record['events'] = [_event_record(e) for e in document.events]
    record['gates'] = [_gate_record(g) for g in document.gates]
    return record


def serialize_tree_document(document):
    """YAML text for a document; parse_tree_text reads it back unchanged."""
    return yaml.safe_dump(document_record(document), sort_keys=False,
                          default_flow_style=False, allow_unicode=True)


def write_tree_file(document, path):
    path = Path(path)
    path.write_text(serialize_tree_document(document), encoding='utf-8')
    return path


# ============================================================================
# Tree and models
# ============================================================================

def build_tree(document, source=''):
    """Validated FaultTree for a document.

    Raises:
        SemanticError: carrying every fault-tree violation found
    """
    nodes = [EventNode(e.id, e.kind, e.description, e.house_state, e.condition_holds)
             for e in document.events]
    nodes += [GateNode(g.id, g.kind, g.inputs, g.condition, g.description) for g in document.gates]
    try:
        return validate_tree(FaultTree(nodes, document.top, document.name))
    except TreeValidationError as e:
        raise SemanticError(e, source=source)


def _model_for(event, library, use_library_defaults):
    spec = event.model
    rate = spec.failure_rate if spec is not None else None
    if spec is not None and spec.type == 'constant-probability':
        return ConstantProbability(spec.probability)
    if rate is None:
        if event.component is None or not use_library_defaults:
            raise MissingModelError(f"event {event.id!r} has no failure rate"
                                    + ('' if use_library_defaults else ' (library defaults disabled)'))
        entry = (library or default_library()).lookup(event.component)
        rate = entry.midpoint
        logger.debug("event %s: failure rate %.3g/h from library entry %r", event.id, rate, entry.name)
    if spec is not None and spec.type == 'failure-with-repair':
        return FailureWithRepair(rate, spec.repair_rate)
    return FailureRateOnly(rate)


def models_from_document(document, library=None, use_library_defaults=True):
    """Probability model for every Basic and Undeveloped event.

    Args:
        document: TreeDocument
        library: ComponentLibrary (default: the configured library)
        use_library_defaults: fill missing failure rates from component midpoints

    Returns:
        dict event id -> model
    """
    return {
        event.id: _model_for(event, library, use_library_defaults)
        for event in document.events
        if event.kind in (EventKind.BASIC, EventKind.UNDEVELOPED)
    }


@dataclass(frozen=True)
class LoadedTree:
    document: TreeDocument
    tree: FaultTree
    models: dict = field(default_factory=dict)
    sha256: str = ''
    source: str = ''


def load_tree(path, library=None, use_library_defaults=True, with_models=True):
    """Document, validated tree, event models and input hash of a tree file.

    With ``with_models`` false the models are left empty, so a tree whose
    events carry no rates can still be inspected, cut and enumerated.
    """
    path = Path(path)
    raw = path.read_bytes()
    source = str(path)
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise TreeSyntaxError(f"not UTF-8 text: {e}", source=source)
    document = parse_tree_text(text, source=source, validate=False)
    tree = build_tree(document, source)
    models = models_from_document(document, library, use_library_defaults) if with_models else {}
    logger.info("loaded %s: %d gates, %d events", source, tree.gate_count, tree.event_count)
    return LoadedTree(document, tree, models, hashlib.sha256(raw).hexdigest(), source)
