import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from robust_dff.core import Component, Example, Instance, Literal, Representation  # noqa: E402


def build_instance(groups, labels, concept=None, k=None, s=0):
    """Instance from a list of component bit-lists; separation found by search.

    ``groups[i]`` is a list of bit tuples; ids are assigned in order.
    ``concept`` optionally overrides labels per example id.
    """
    examples, members, comp_of = {}, [], {}
    for gi, bits_list in enumerate(groups):
        ids = set()
        for bits in bits_list:
            xid = len(examples)
            examples[xid] = Example(xid, tuple(bits))
            comp_of[xid] = gi
            ids.add(xid)
        members.append(ids)
    d = len(next(iter(examples.values())).bits)
    sep = {}
    for i, j in itertools.permutations(range(len(groups)), 2):
        if labels[i] == labels[j]:
            continue
        for f in range(d):
            vi = {examples[x].bits[f] for x in members[i]}
            vj = {examples[x].bits[f] for x in members[j]}
            if len(vi) == len(vj) == 1 and vi != vj:
                sep[(i, j)] = Literal(f, bool(vi.pop()))
                break
    concept_label = {x: labels[comp_of[x]] for x in examples}
    concept_label.update(concept or {})
    exc = frozenset(x for x in examples if concept_label[x] != labels[comp_of[x]])
    comps = tuple(Component(i, labels[i], frozenset(m)) for i, m in enumerate(members))
    return Instance(
        d=d,
        n_labels=max(max(labels), max(concept_label.values())) + 1,
        examples=examples,
        representation=Representation(comps, sep),
        component_of=comp_of,
        concept_label=concept_label,
        exceptions=exc,
        k=len(exc) if k is None else k,
        s=s,
    )


@pytest.fixture
def canonical():
    """m=2, d=1: component 0 is bit 1 (label 0), component 1 is bit 0 (label 1)."""
    return build_instance([[(1,)], [(0,)]], [0, 1])


@pytest.fixture
def three_components():
    return build_instance(
        [[(1, 0, 0, 0), (1, 0, 0, 1)], [(0, 1, 0, 0), (0, 1, 0, 1)], [(0, 0, 1, 0), (0, 0, 1, 1)]],
        [0, 1, 2],
    )


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
