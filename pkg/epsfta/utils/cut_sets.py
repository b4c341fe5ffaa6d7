"""
EPSFTA Minimal Cut Sets

Top-down gate expansion (MOCUS style). Each node expands to a family of
event sets in disjunctive form: OR unions the families of its inputs, AND
takes their pairwise products, and absorption drops every set that contains
another one.

House events are constants: a true house event is the empty product, a
false one the empty family, which prunes its branch.
"""
import logging
from dataclasses import dataclass

from epsfta.errors import NonCoherentTreeError, UnconditionalTopError
from epsfta.models.fault_tree import EventKind, EventNode, GateKind, ensure_valid

logger = logging.getLogger(__name__)

_TRUE = frozenset({frozenset()})
_FALSE = frozenset()


@dataclass(frozen=True, order=True)
class CutSet:
    """Events whose joint occurrence triggers the top event, sorted."""
    events: tuple

    def __post_init__(self):
        events = tuple(self.events)
        if not events:
            raise ValueError('a cut set cannot be empty')
        if len(set(events)) != len(events):
            raise ValueError(f'duplicate events in cut set: {events}')
        object.__setattr__(self, 'events', tuple(sorted(events)))

    @property
    def size(self):
        return len(self.events)

    def as_record(self):
        return {'size': self.size, 'events': list(self.events)}

    def __str__(self):
        return '{' + ', '.join(self.events) + '}'


def _canonical_key(cut_set):
    return (cut_set.size, cut_set.events)


@dataclass(frozen=True)
class CutSetList:
    """Minimal cut sets in canonical order: by size, then lexicographic."""
    cut_sets: tuple

    def __iter__(self):
        return iter(self.cut_sets)

    def __len__(self):
        return len(self.cut_sets)

    def __getitem__(self, position):
        return self.cut_sets[position]

    def as_sets(self):
        return {frozenset(c.events) for c in self.cut_sets}

    def as_records(self):
        return [c.as_record() for c in self.cut_sets]

    def by_order(self):
        """Count of cut sets per size."""
        counts = {}
        for cut_set in self.cut_sets:
            counts[cut_set.size] = counts.get(cut_set.size, 0) + 1
        return dict(sorted(counts.items()))


def _minimize(family):
    """Absorption: keep only sets with no proper subset in the family."""
    kept = []
    for candidate in sorted(family, key=lambda s: (len(s), sorted(s))):
        if not any(k <= candidate for k in kept):
            kept.append(candidate)
    return frozenset(kept)


def _product(left, right):
    return _minimize({a | b for a in left for b in right})


def minimal_cut_sets(tree):
    """Compute every minimal cut set of a coherent tree.

    Args:
        tree: FaultTree (validated on demand)

    Returns:
        CutSetList in canonical order

    Raises:
        NonCoherentTreeError: the tree contains an XOR gate
        UnconditionalTopError: house events alone make the top event occur
    """
    tree = ensure_valid(tree)
    xor_gates = [g.id for g in tree.gates if g.kind is GateKind.XOR]
    if xor_gates:
        raise NonCoherentTreeError(
            f"XOR gates {', '.join(xor_gates)} make the tree non-coherent; "
            "quantify it by scenario enumeration instead")

    families = {}
    for node_id in tree.topological_order:
        node = tree.node(node_id)
        if isinstance(node, EventNode):
            if node.kind is EventKind.HOUSE:
                families[node_id] = _TRUE if node.house_state else _FALSE
            elif node.kind is EventKind.CONDITIONING:
                families[node_id] = _TRUE if node.condition_holds else _FALSE
            else:
                families[node_id] = frozenset({frozenset({node_id})})
            continue

        inputs = [families[i] for i in node.inputs]
        if node.condition is not None:
            inputs.append(families[node.condition])
        if node.kind is GateKind.OR and node.condition is None:
            family = _minimize(frozenset().union(*inputs))
        elif node.kind is GateKind.OR:
            family = _product(_minimize(frozenset().union(*inputs[:-1])), inputs[-1])
        else:
            family = _TRUE
            for item in inputs:
                family = _product(family, item)
                if not family:
                    break
        families[node_id] = family

    top_family = families[tree.top]
    if frozenset() in top_family:
        raise UnconditionalTopError(
            f"top event {tree.top} occurs with no failures (house events force it)")

    cut_sets = sorted((CutSet(tuple(s)) for s in top_family), key=_canonical_key)
    logger.debug("tree %s: %d minimal cut sets", tree.top, len(cut_sets))
    return CutSetList(tuple(cut_sets))


def format_cut_sets(cut_sets):
    """Plain-text listing, one cut set per line."""
    lines = [f"Minimal cut sets: {len(cut_sets)}"]
    for position, cut_set in enumerate(cut_sets, start=1):
        lines.append(f"{position:4d}  order {cut_set.size}  {' . '.join(cut_set.events)}")
    return '\n'.join(lines) + '\n'
