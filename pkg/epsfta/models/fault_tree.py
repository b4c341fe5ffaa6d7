"""
EPSFTA Fault Tree Model

Gates and events of a fault tree, validation of the tree invariants and
Boolean evaluation of the top event.

Events and gates share one id namespace. A validated FaultTree is immutable
and every function here is pure, so trees can be shared between threads.
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from epsfta.errors import TreeValidationError, UnknownEventError, Violation

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    BASIC = 'basic'
    HOUSE = 'house'
    UNDEVELOPED = 'undeveloped'
    CONDITIONING = 'conditioning'


class GateKind(str, Enum):
    OR = 'or'
    AND = 'and'
    XOR = 'xor'
    PRIORITY_AND = 'priority-and'


STOCHASTIC_KINDS = (EventKind.BASIC, EventKind.UNDEVELOPED)


@dataclass(frozen=True)
class EventNode:
    """A leaf of the tree.

    ``house_state`` is the fixed truth value of a House event.
    ``condition_holds`` is the fixed truth value of a Conditioning event;
    a conditioned gate can only occur while its condition holds.
    """
    id: str
    kind: EventKind
    description: str = ''
    house_state: bool = None
    condition_holds: bool = True

    @property
    def is_stochastic(self):
        return self.kind in STOCHASTIC_KINDS


@dataclass(frozen=True)
class GateNode:
    id: str
    kind: GateKind
    inputs: tuple
    condition: str = None
    description: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'inputs', tuple(self.inputs))


class FaultTree:
    """Nodes plus the id of the top gate.

    A tree built directly is *raw*; validate_tree() returns a validated copy
    that carries the node index and a topological order (inputs before the
    gates that consume them).
    """

    def __init__(self, nodes, top, name=''):
        self._nodes = tuple(nodes)
        self.top = top
        self.name = name
        self._index = None
        self._order = None

    def __repr__(self):
        state = 'validated' if self.is_validated else 'raw'
        return f"FaultTree({self.name or self.top!r}, {len(self._nodes)} nodes, {state})"

    def __eq__(self, other):
        if not isinstance(other, FaultTree):
            return NotImplemented
        return (self.top, self.name, self._nodes) == (other.top, other.name, other._nodes)

    def __hash__(self):
        return hash((self.top, self.name, self._nodes))

    @property
    def nodes(self):
        return self._nodes

    @property
    def is_validated(self):
        return self._index is not None

    def node(self, node_id):
        """Return the node with the given id (validated trees only)."""
        return self._require_index()[node_id]

    def __contains__(self, node_id):
        return node_id in self._require_index()

    @property
    def topological_order(self):
        self._require_index()
        return self._order

    @property
    def gates(self):
        return tuple(n for n in self._nodes if isinstance(n, GateNode))

    @property
    def events(self):
        return tuple(n for n in self._nodes if isinstance(n, EventNode))

    @property
    def stochastic_events(self):
        """Ids of Basic and Undeveloped events, sorted."""
        return tuple(sorted(n.id for n in self.events if n.is_stochastic))

    @property
    def house_events(self):
        return tuple(sorted(n.id for n in self.events if n.kind is EventKind.HOUSE))

    @property
    def gate_count(self):
        return len(self.gates)

    @property
    def event_count(self):
        return len(self.events)

    @property
    def M(self):
        return len(self.stochastic_events)

    @property
    def is_coherent(self):
        return all(g.kind is not GateKind.XOR for g in self.gates)

    def _require_index(self):
        if self._index is None:
            raise TreeValidationError([Violation(
                'NotValidated', self.top, 'run validate_tree() first')])
        return self._index

    @classmethod
    def _validated(cls, nodes, top, name, index, order):
        tree = cls(nodes, top, name)
        tree._index = index
        tree._order = order
        return tree


def _edges(node):
    """Outgoing references of a node: gate inputs plus its condition."""
    if isinstance(node, EventNode):
        return ()
    if node.condition is not None:
        return tuple(node.inputs) + (node.condition,)
    return tuple(node.inputs)


def validate_tree(raw_tree):
    """Check every FaultTree invariant.

    Args:
        raw_tree: FaultTree, validated or not

    Returns:
        A validated FaultTree with the same nodes

    Raises:
        TreeValidationError listing every violation found
    """
    violations = []
    index = {}
    for node in raw_tree.nodes:
        if node.id in index:
            violations.append(Violation('DuplicateId', node.id, 'id defined more than once'))
            continue
        index[node.id] = node

    for node in index.values():
        if isinstance(node, EventNode):
            has_state = node.house_state is not None
            if node.kind is EventKind.HOUSE and not has_state:
                violations.append(Violation('HouseStateMismatch', node.id, 'house event without house_state'))
            elif node.kind is not EventKind.HOUSE and has_state:
                violations.append(Violation('HouseStateMismatch', node.id, 'house_state on a non-house event'))
            continue

        if not node.inputs:
            violations.append(Violation('EmptyGate', node.id, 'gate has no inputs'))
        elif node.kind in (GateKind.XOR, GateKind.PRIORITY_AND) and len(node.inputs) < 2:
            violations.append(Violation('XorArityBelowTwo', node.id,
                                        f'{node.kind.value} gate needs at least two inputs'))

        for input_id in node.inputs:
            target = index.get(input_id)
            if target is None:
                violations.append(Violation('DanglingReference', input_id,
                                            f'input of gate {node.id} is not defined'))
            elif isinstance(target, EventNode) and target.kind is EventKind.CONDITIONING:
                violations.append(Violation('BadCondition', input_id,
                                            f'conditioning event used as an input of gate {node.id}'))

        if node.condition is not None:
            target = index.get(node.condition)
            if target is None:
                violations.append(Violation('DanglingReference', node.condition,
                                            f'condition of gate {node.id} is not defined'))
            elif not (isinstance(target, EventNode) and target.kind is EventKind.CONDITIONING):
                violations.append(Violation('BadCondition', node.condition,
                                            f'condition of gate {node.id} is not a conditioning event'))

    top = index.get(raw_tree.top)
    if not isinstance(top, GateNode):
        detail = 'top is not defined' if top is None else 'top resolves to an event'
        violations.append(Violation('TopIsNotGate', str(raw_tree.top), detail))

    order = []
    if isinstance(top, GateNode):
        order, cycles = _walk(index, raw_tree.top)
        for cycle in cycles:
            violations.append(Violation('CyclicTree', cycle[0], ' -> '.join(cycle)))
        reached = set(order)
        for node_id in index:
            if node_id not in reached:
                violations.append(Violation('UnreachableNode', node_id, 'not reachable from top'))

    if violations:
        raise TreeValidationError(violations)

    logger.debug("validated tree %s: %d gates, %d events",
                 raw_tree.name or raw_tree.top, raw_tree.gate_count, raw_tree.event_count)
    return FaultTree._validated(raw_tree.nodes, raw_tree.top, raw_tree.name, index, tuple(order))


def _walk(index, top):
    """Depth-first post-order from top; reports back edges as cycles."""
    order = []
    cycles = []
    state = {}
    stack = [(top, iter(_edges(index[top])))]
    path = [top]
    state[top] = 'open'
    while stack:
        node_id, children = stack[-1]
        for child in children:
            if child not in index:
                continue
            if state.get(child) == 'open':
                cycles.append(path[path.index(child):] + [child])
                continue
            if child not in state:
                state[child] = 'open'
                stack.append((child, iter(_edges(index[child]))))
                path.append(child)
                break
        else:
            stack.pop()
            path.pop()
            state[node_id] = 'done'
            order.append(node_id)
    return order, cycles


def ensure_valid(tree):
    """Return tree if already validated, else validate it."""
    return tree if tree.is_validated else validate_tree(tree)


def tree_summary(tree):
    """Counts in the manner of a fault-tree tool header."""
    tree = ensure_valid(tree)
    return {
        'top': tree.top,
        'gates': tree.gate_count,
        'events': tree.event_count,
        'stochastic_events': list(tree.stochastic_events),
        'house_events': list(tree.house_events),
        'M': tree.M,
        'coherent': tree.is_coherent,
    }


def _gate_value(kind, values):
    if kind is GateKind.OR:
        return any(values)
    if kind is GateKind.XOR:
        return sum(values) == 1
    # AND and PRIORITY-AND share static semantics
    return all(values)


def evaluate_nodes(tree, failed):
    """Truth value of every node for one failed set.

    Args:
        tree: FaultTree
        failed: ids of failed Basic/Undeveloped events

    Returns:
        dict node id -> bool
    """
    tree = ensure_valid(tree)
    failed = frozenset(failed)
    unknown = failed.difference(tree.stochastic_events)
    if unknown:
        raise UnknownEventError(f"not a stochastic event of the tree: {', '.join(sorted(unknown))}")

    values = {}
    for node_id in tree.topological_order:
        node = tree.node(node_id)
        if isinstance(node, EventNode):
            if node.kind is EventKind.HOUSE:
                values[node_id] = node.house_state
            elif node.kind is EventKind.CONDITIONING:
                values[node_id] = node.condition_holds
            else:
                values[node_id] = node_id in failed
            continue
        value = _gate_value(node.kind, [values[i] for i in node.inputs])
        if node.condition is not None:
            value = value and values[node.condition]
        values[node_id] = value
    return values


def evaluate(tree, failed):
    """Truth value of the top event when exactly ``failed`` events occurred."""
    tree = ensure_valid(tree)
    return evaluate_nodes(tree, failed)[tree.top]


def evaluate_batch(tree, columns, size):
    """Evaluate many assignments at once.

    Args:
        tree: validated FaultTree
        columns: dict stochastic event id -> bool array of length ``size``;
            missing events are taken as not failed
        size: number of assignments

    Returns:
        dict node id -> bool array
    """
    values = {}
    for node_id in tree.topological_order:
        node = tree.node(node_id)
        if isinstance(node, EventNode):
            if node.kind is EventKind.HOUSE:
                values[node_id] = np.full(size, node.house_state, dtype=bool)
            elif node.kind is EventKind.CONDITIONING:
                values[node_id] = np.full(size, node.condition_holds, dtype=bool)
            else:
                column = columns.get(node_id)
                values[node_id] = np.zeros(size, dtype=bool) if column is None else column
            continue
        stack = np.vstack([values[i] for i in node.inputs])
        if node.kind is GateKind.OR:
            value = stack.any(axis=0)
        elif node.kind is GateKind.XOR:
            value = stack.sum(axis=0) == 1
        else:
            value = stack.all(axis=0)
        if node.condition is not None:
            value = value & values[node.condition]
        values[node_id] = value
    return values


def assignment_blocks(count, block_bits=16):
    """Yield (start, bits) over the 2**count assignment space.

    ``bits`` is a bool matrix of shape (block, count); column j is event j
    and row r is assignment index ``start + r`` (bit j set = event j failed).
    Blocks come in ascending index order so sums over them are reproducible.
    """
    total = 1 << count
    block = 1 << min(block_bits, count)
    shifts = np.arange(count, dtype=np.int64)
    for start in range(0, total, block):
        index = np.arange(start, min(start + block, total), dtype=np.int64)
        bits = ((index[:, None] >> shifts) & 1).astype(bool)
        yield start, bits
