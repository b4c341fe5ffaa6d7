"""
Test helpers: compact tree construction, a random coherent tree generator
and brute-force oracles that share no code with the package's evaluators.
"""
import itertools

from epsfta.models.fault_tree import EventKind, EventNode, FaultTree, GateKind, GateNode, validate_tree


def make_tree(gates, top='TOP', house=None, conditions=None, undeveloped=(), name=''):
    """Validated tree from ``{gate id: (kind, inputs[, condition])}``.

    Every referenced id that is not a gate becomes a Basic event, a House
    event (``house``: id -> state), a Conditioning event (``conditions``:
    id -> holds) or an Undeveloped event.
    """
    house = house or {}
    conditions = conditions or {}
    nodes = []
    referenced = []
    for gate_id, spec in gates.items():
        kind, inputs = spec[0], spec[1]
        condition = spec[2] if len(spec) > 2 else None
        nodes.append(GateNode(gate_id, GateKind(kind), tuple(inputs), condition))
        referenced += list(inputs) + ([condition] if condition else [])
    seen = set()
    for node_id in referenced:
        if node_id in gates or node_id in seen:
            continue
        seen.add(node_id)
        if node_id in house:
            nodes.append(EventNode(node_id, EventKind.HOUSE, house_state=house[node_id]))
        elif node_id in conditions:
            nodes.append(EventNode(node_id, EventKind.CONDITIONING, condition_holds=conditions[node_id]))
        elif node_id in undeveloped:
            nodes.append(EventNode(node_id, EventKind.UNDEVELOPED))
        else:
            nodes.append(EventNode(node_id, EventKind.BASIC))
    return validate_tree(FaultTree(nodes, top, name))


def random_coherent_tree(rng, max_events=12, max_depth=5):
    """Random OR/AND tree over 2..max_events basic events.

    Every event is reachable; events may be shared between gates.
    """
    count = rng.randint(2, max_events)
    events = [f"E{i:02d}" for i in range(count)]
    gates = {}

    def build(depth):
        if depth >= max_depth or (depth > 0 and rng.random() < 0.35):
            return rng.choice(events)
        gate_id = f"G{len(gates):02d}"
        gates[gate_id] = None
        inputs = []
        for _ in range(rng.randint(2, 3)):
            child = build(depth + 1)
            if child not in inputs:
                inputs.append(child)
        gates[gate_id] = (rng.choice(('or', 'and')), inputs)
        return gate_id

    top = build(0)
    used = {i for spec in gates.values() for i in spec[1]}
    missing = [e for e in events if e not in used]
    kind, inputs = gates[top]
    gates[top] = (kind, inputs + missing)
    return make_tree(gates, top=top)


def oracle_evaluate(tree, failed):
    """Recursive evaluation straight from the gate definitions."""
    nodes = {n.id: n for n in tree.nodes}

    def value(node_id):
        node = nodes[node_id]
        if isinstance(node, EventNode):
            if node.kind is EventKind.HOUSE:
                return node.house_state
            if node.kind is EventKind.CONDITIONING:
                return node.condition_holds
            return node_id in failed
        inputs = [value(i) for i in node.inputs]
        if node.kind is GateKind.OR:
            result = any(inputs)
        elif node.kind is GateKind.XOR:
            result = inputs.count(True) == 1
        else:
            result = all(inputs)
        if node.condition is not None:
            result = result and value(node.condition)
        return result

    return value(tree.top)


def oracle_minimal_sets(tree):
    """Minimal failed sets that trigger the top event, by exhaustive search."""
    events = tree.stochastic_events
    satisfying = set()
    for bits in itertools.product((False, True), repeat=len(events)):
        failed = frozenset(e for e, b in zip(events, bits) if b)
        if oracle_evaluate(tree, failed):
            satisfying.add(failed)
    # monotone function: minimal iff dropping any one event breaks it
    return {s for s in satisfying if s and all(s - {e} not in satisfying for e in s)}


def oracle_top_probability(tree, q):
    """Independent-event weighted sum over all 2**M assignments."""
    events = tree.stochastic_events
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(events)):
        failed = frozenset(e for e, b in zip(events, bits) if b)
        if oracle_evaluate(tree, failed):
            weight = 1.0
            for e, b in zip(events, bits):
                weight *= q[e] if b else 1.0 - q[e]
            total += weight
    return total
