"""Ground-truth data model: examples, components, representations, instances.

Examples are Boolean vectors over a finite feature universe of size ``d``.
Features are coordinate literals.  A :class:`Representation` is the teacher's
internal cover of the example universe by label-pure components, together
with a table giving, for every ordered pair of differently labelled
components, the literal that is true on the first and false on the second.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "Literal",
    "Example",
    "Component",
    "Representation",
    "Instance",
    "ValidationReport",
    "SizeLimitError",
    "BudgetExceededError",
    "validate_instance",
    "normalize_disjoint",
    "expand_representation",
    "hypercube_lower_bound_instance",
    "min_exception_free_size",
    "EXCEEDS_MAX",
    "instance_to_dict",
    "instance_from_dict",
    "dump_instance",
    "load_instance",
]

MAX_HYPERCUBE_DIM = 16
EXCEEDS_MAX = "exceeds-max"


class SizeLimitError(ValueError):
    """Requested construction is too large to enumerate explicitly."""


class BudgetExceededError(RuntimeError):
    """Exhaustive search ran out of its work budget."""


@dataclass(frozen=True, order=True)
class Literal:
    """A coordinate literal: true on ``x`` iff ``x[feature] == polarity``."""

    feature: int
    polarity: bool = True

    def __call__(self, x: "Example") -> bool:
        return ((x.code >> self.feature) & 1) == self.polarity

    def negate(self) -> "Literal":
        return Literal(self.feature, not self.polarity)

    def __invert__(self) -> "Literal":
        return self.negate()

    def __str__(self) -> str:
        return f"{'' if self.polarity else '~'}x{self.feature}"


@dataclass(frozen=True)
class Example:
    """An example with an opaque integer id and a bit vector.

    ``code`` packs the bits into an int (bit ``j`` is coordinate ``j``) so
    conjunctions can be evaluated with one mask comparison.
    """

    id: int
    bits: tuple[int, ...]
    code: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"example {self.id}: bits must be 0/1")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "code", sum(b << j for j, b in enumerate(bits)))

    @property
    def d(self) -> int:
        return len(self.bits)

    @classmethod
    def from_code(cls, id: int, code: int, d: int) -> "Example":
        return cls(id, tuple((code >> j) & 1 for j in range(d)))


@dataclass(frozen=True)
class Component:
    id: int
    label: int
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class Representation:
    """Components plus the pairwise separation table.

    ``separation[(i, j)]`` is defined for every ordered pair of components
    with different labels; it is true on all of ``G_i`` and false on all of
    ``G_j``.
    """

    components: tuple[Component, ...]
    separation: Mapping[tuple[int, int], Literal]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "separation", dict(self.separation))

    @property
    def m(self) -> int:
        return len(self.components)

    def component(self, i: int) -> Component:
        return self.components[i]

    def same_as(self, other: "Representation") -> bool:
        return self.components == other.components and self.separation == other.separation


@dataclass(frozen=True)
class Instance:
    """Full ground truth of a simulation: examples, representation, concept.

    ``exceptions`` is the set ``M`` of examples whose concept label differs
    from the label of their chosen component ``G(x) = component_of[x]``.
    """

    d: int
    n_labels: int
    examples: Mapping[int, Example]
    representation: Representation
    component_of: Mapping[int, int]
    concept_label: Mapping[int, int]
    exceptions: frozenset[int]
    k: int
    s: int = 0

    def __post_init__(self):
        object.__setattr__(self, "examples", dict(self.examples))
        object.__setattr__(self, "component_of", dict(self.component_of))
        object.__setattr__(self, "concept_label", dict(self.concept_label))
        object.__setattr__(self, "exceptions", frozenset(self.exceptions))

    @property
    def m(self) -> int:
        return self.representation.m

    def label(self, x: Example | int) -> int:
        return self.concept_label[x if isinstance(x, int) else x.id]

    def component_label(self, x: Example | int) -> int:
        xid = x if isinstance(x, int) else x.id
        return self.representation.components[self.component_of[xid]].label

    def is_exception(self, x: Example | int) -> bool:
        return (x if isinstance(x, int) else x.id) in self.exceptions

    def example_by_bits(self, bits: Iterable[int]) -> Example:
        code = sum(int(b) << j for j, b in enumerate(bits))
        lookup = self.__dict__.get("_by_code")
        if lookup is None:
            lookup = {x.code: x for x in self.examples.values()}
            object.__setattr__(self, "_by_code", lookup)
        return lookup[code]

    def with_representation(self, rep: Representation, component_of: Mapping[int, int]) -> "Instance":
        """Same examples and concept over a different representation."""
        labels = {c.id: c.label for c in rep.components}
        exc = frozenset(x for x, y in self.concept_label.items() if y != labels[component_of[x]])
        return Instance(
            d=self.d,
            n_labels=self.n_labels,
            examples=self.examples,
            representation=rep,
            component_of=component_of,
            concept_label=self.concept_label,
            exceptions=exc,
            k=len(exc),
            s=min(self.s, len(exc)),
        )


@dataclass
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> list[str]:
        return [k for k, _ in self.violations]

    def __bool__(self) -> bool:
        return self.ok


def _component_masks(rep: Representation, examples: Mapping[int, Example], d: int):
    """Per component: (AND of member codes, OR of member codes)."""
    full = (1 << d) - 1
    out = []
    for comp in rep.components:
        a, o = full, 0
        for xid in comp.members:
            c = examples[xid].code
            a &= c
            o |= c
        out.append((a, o))
    return out


def _uniformly(lit: Literal, masks: tuple[int, int], value: bool) -> bool:
    """Whether ``lit`` evaluates to ``value`` on every member of a component."""
    a, o = masks
    bit = 1 << lit.feature
    target = lit.polarity if value else not lit.polarity
    return bool(a & bit) if target else not (o & bit)


def validate_instance(instance: Instance) -> ValidationReport:
    """Check every structural and semantic invariant of an instance.

    Violations are returned, never raised.  Kinds: ``malformed``,
    ``coverage``, ``purity``, ``separation``, ``exception-count``.
    """
    report = ValidationReport()
    bad = report.violations.append
    d = instance.d
    rep = instance.representation
    examples = instance.examples

    for xid, x in examples.items():
        if x.id != xid:
            bad(("malformed", f"example key {xid} holds id {x.id}"))
        if len(x.bits) != d:
            bad(("malformed", f"example {xid} has {len(x.bits)} bits, expected {d}"))
    for pos, comp in enumerate(rep.components):
        if comp.id != pos:
            bad(("malformed", f"component at position {pos} has id {comp.id}"))
        if not 0 <= comp.label < instance.n_labels:
            bad(("malformed", f"component {comp.id} label {comp.label} outside label space"))
        for xid in comp.members - examples.keys():
            bad(("malformed", f"component {comp.id} lists unknown example {xid}"))
    for (i, j), lit in rep.separation.items():
        if not (0 <= i < rep.m and 0 <= j < rep.m):
            bad(("malformed", f"separation entry ({i},{j}) names an unknown component"))
        if not 0 <= lit.feature < d:
            bad(("malformed", f"separation ({i},{j}) uses feature {lit.feature} outside [0,{d})"))
    for xid in examples:
        if xid not in instance.concept_label:
            bad(("malformed", f"example {xid} has no concept label"))
        elif not 0 <= instance.concept_label[xid] < instance.n_labels:
            bad(("malformed", f"example {xid} concept label outside label space"))
    for xid in set(instance.component_of) | set(instance.concept_label) | set(instance.exceptions):
        if xid not in examples:
            bad(("malformed", f"dangling example id {xid}"))
    if report.violations:
        return report

    for xid in examples:
        ci = instance.component_of.get(xid)
        if ci is None:
            bad(("coverage", f"example {xid} has no chosen component"))
        elif not 0 <= ci < rep.m or xid not in rep.components[ci].members:
            bad(("coverage", f"example {xid} not a member of its chosen component {ci}"))
    covered = set().union(*(c.members for c in rep.components)) if rep.components else set()
    for xid in examples.keys() - covered:
        bad(("coverage", f"example {xid} not covered by any component"))
    if any(k == "coverage" for k, _ in report.violations):
        return report

    expected = {
        xid for xid, y in instance.concept_label.items()
        if y != rep.components[instance.component_of[xid]].label
    }
    if expected != set(instance.exceptions):
        bad(("purity", f"declared exceptions {sorted(instance.exceptions)} != deviating examples {sorted(expected)}"))
    for comp in rep.components:
        for xid in sorted(comp.members):
            if instance.concept_label[xid] != comp.label and xid not in expected:
                bad(("purity", f"example {xid} in component {comp.id} has label {instance.concept_label[xid]}"))

    masks = _component_masks(rep, examples, d)
    for gi, gj in itertools.permutations(rep.components, 2):
        if gi.label == gj.label:
            continue
        lit = rep.separation.get((gi.id, gj.id))
        if lit is None:
            bad(("separation", f"no separating literal for components ({gi.id},{gj.id})"))
            continue
        rev = rep.separation.get((gj.id, gi.id))
        if rev is not None and rev != lit.negate():
            bad(("separation", f"separation ({gj.id},{gi.id}) is not the negation of ({gi.id},{gj.id})"))
        if not _uniformly(lit, masks[gi.id], True):
            bad(("separation", f"{lit} not true on all of component {gi.id}"))
        if not _uniformly(lit, masks[gj.id], False):
            bad(("separation", f"{lit} not false on all of component {gj.id}"))

    if len(instance.exceptions) > instance.k:
        bad(("exception-count", f"{len(instance.exceptions)} exceptions exceed k={instance.k}"))
    return report


def normalize_disjoint(rep: Representation, component_of: Mapping[int, int]) -> Representation:
    """Make components pairwise disjoint while keeping their count.

    An example lying in several components is kept only in the one named by
    ``component_of``; this is the fixed point of the pairwise replacement
    ``G'_i = (G_i - G_j) | {x in G_i & G_j : G(x) = G_i}``.  Separation
    literals stay valid since components only shrink.
    """
    comps = tuple(
        Component(c.id, c.label, frozenset(x for x in c.members if component_of[x] == c.id))
        for c in rep.components
    )
    return Representation(comps, rep.separation)


def _separating_literal(x: Example, masks: tuple[int, int], d: int) -> Literal | None:
    """A literal true on ``x`` and false on a whole component, if any."""
    for j in range(d):
        lit = Literal(j, bool((x.code >> j) & 1))
        if _uniformly(lit, masks, False):
            return lit
    return None


def expand_representation(instance: Instance) -> tuple[Representation, dict[int, int]]:
    """Build an exception-free representation of the instance's concept.

    Exceptions are processed one at a time.  The (disjoint) component ``G``
    holding exception ``x`` is replaced by the pieces ``G & {z : z_j != x_j}``
    for each feature ``j`` plus the singleton ``{x}`` carrying ``x``'s concept
    label.  Pieces keep the literals of their parent.  A component whose label
    differs from ``x``'s new label but which has no inherited literal against
    ``{x}`` (it had the same label as ``G``) gets a direct literal when one
    exists and is split the same way otherwise.  Members are assigned to the
    lowest-feature piece containing them, so pieces come out disjoint.

    Returns the representation and its ``component_of`` map.
    """
    d = instance.d
    examples = instance.examples
    concept = instance.concept_label
    comp_of = dict(instance.component_of)
    rep = normalize_disjoint(instance.representation, comp_of)
    groups: list[tuple[int, set[int]]] = [(c.label, set(c.members)) for c in rep.components]
    sep: dict[tuple[int, int], Literal] = dict(rep.separation)

    def split(gi: int, x: Example) -> list[int]:
        label, members = groups[gi]
        pieces: dict[int, set[int]] = {}
        for zid in sorted(members - {x.id}):
            diff = examples[zid].code ^ x.code
            if not diff:
                raise ValueError(f"examples {zid} and {x.id} have identical bits")
            pieces.setdefault((diff & -diff).bit_length() - 1, set()).add(zid)
        inherited = [(key, lit) for key, lit in sep.items() if gi in key]
        groups[gi] = (label, set())
        out = []
        for n, j in enumerate(sorted(pieces)):
            if n == 0:
                nid = gi
                groups[gi] = (label, pieces[j])
            else:
                groups.append((label, pieces[j]))
                nid = len(groups) - 1
                for (a, b), lit in inherited:
                    sep[(nid if a == gi else a, nid if b == gi else b)] = lit
            for zid in pieces[j]:
                comp_of[zid] = nid
            out.append(nid)
        return out

    def link(xg: int, x: Example, gi: int, hint: Literal | None) -> None:
        members = groups[gi][1]
        lit = hint
        if lit is None or not lit(x) or any(lit(examples[z]) for z in members):
            lit = _separating_literal(x, _masks_of(members, examples, d), d)
        if lit is not None:
            sep[(xg, gi)], sep[(gi, xg)] = lit, lit.negate()
            return
        for piece in split(gi, x):
            pl = _separating_literal(x, _masks_of(groups[piece][1], examples, d), d)
            sep[(xg, piece)], sep[(piece, xg)] = pl, pl.negate()

    for xid in sorted(instance.exceptions):
        x = examples[xid]
        home = comp_of[xid]
        if concept[xid] == groups[home][0]:
            continue
        before = dict(sep)
        split(home, x)
        groups.append((concept[xid], {xid}))
        xg = len(groups) - 1
        comp_of[xid] = xg
        for gi in range(xg):
            label, members = groups[gi]
            if label != concept[xid] and members:
                link(xg, x, gi, before.get((home, gi)))

    keep = [i for i, (_, mem) in enumerate(groups) if mem]
    remap = {old: new for new, old in enumerate(keep)}
    comps = tuple(Component(remap[i], groups[i][0], frozenset(groups[i][1])) for i in keep)
    separation = {
        (remap[a], remap[b]): lit
        for (a, b), lit in sep.items()
        if a in remap and b in remap and groups[a][0] != groups[b][0]
    }
    comp_of = {x: remap[c] for x, c in comp_of.items()}
    return normalize_disjoint(Representation(comps, separation), comp_of), comp_of


def _masks_of(members: Iterable[int], examples: Mapping[int, Example], d: int) -> tuple[int, int]:
    a, o = (1 << d) - 1, 0
    for z in members:
        a &= examples[z].code
        o |= examples[z].code
    return a, o


def hypercube_lower_bound_instance(d: int) -> Instance:
    """One component covering ``{0,1}^d`` labelled 0; only the origin is labelled 1.

    Example ids equal the integer whose binary digits are the bits, so the
    all-zeros point has id 0.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > MAX_HYPERCUBE_DIM:
        raise SizeLimitError(f"d={d} exceeds explicit enumeration cap {MAX_HYPERCUBE_DIM}")
    examples = {c: Example.from_code(c, c, d) for c in range(1 << d)}
    rep = Representation((Component(0, 0, frozenset(examples)),), {})
    concept = {c: 0 for c in examples}
    concept[0] = 1
    return Instance(
        d=d,
        n_labels=2,
        examples=examples,
        representation=rep,
        component_of={c: 0 for c in examples},
        concept_label=concept,
        exceptions=frozenset({0}),
        k=1,
        s=1,
    )


def min_exception_free_size(instance: Instance, max_size: int, budget: int = 5_000_000) -> int | str:
    """Smallest number of label-pure, pairwise-separable groups partitioning the examples.

    Exhaustive backtracking over set partitions (restricted growth order),
    pruned by purity and by pairwise separability of differently labelled
    groups, which can only be lost as groups grow.  Returns ``EXCEEDS_MAX``
    when no partition with at most ``max_size`` groups exists.
    """
    d = instance.d
    full = (1 << d) - 1
    ids = sorted(instance.examples)
    codes = [instance.examples[i].code for i in ids]
    labels = [instance.concept_label[i] for i in ids]
    n = len(ids)
    work = 0

    def separable(a1, o1, a2, o2):
        # some coordinate constant on both groups with opposite values
        return bool((a1 & ~o2) | (a2 & ~o1))

    def feasible(size: int) -> bool:
        g_and = [full] * size
        g_or = [0] * size
        g_lab = [-1] * size

        def place(i: int, used: int) -> bool:
            nonlocal work
            work += 1
            if work > budget:
                raise BudgetExceededError(f"search exceeded {budget} steps")
            if i == n:
                return True
            c, y = codes[i], labels[i]
            for g in range(min(used + 1, size)):
                if g_lab[g] not in (-1, y):
                    continue
                na, no = g_and[g] & c, g_or[g] | c
                ok = True
                for h in range(used):
                    if h != g and g_lab[h] != y and not separable(na, no, g_and[h], g_or[h]):
                        ok = False
                        break
                if not ok:
                    continue
                saved = g_and[g], g_or[g], g_lab[g]
                g_and[g], g_or[g], g_lab[g] = na, no, y
                if place(i + 1, max(used, g + 1)):
                    return True
                g_and[g], g_or[g], g_lab[g] = saved
            return False

        return place(0, 0)

    for size in range(1, max_size + 1):
        if n and feasible(size):
            return size
    return EXCEEDS_MAX


# -- serialization ---------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    rep = instance.representation
    return {
        "d": instance.d,
        "labels": instance.n_labels,
        "k": instance.k,
        "s": instance.s,
        "examples": [{"id": x.id, "bits": "".join(map(str, x.bits))} for _, x in sorted(instance.examples.items())],
        "components": [{"id": c.id, "label": c.label, "members": sorted(c.members)} for c in rep.components],
        "separation": [
            {"i": i, "j": j, "feature": lit.feature, "polarity": lit.polarity}
            for (i, j), lit in sorted(rep.separation.items())
        ],
        "componentOf": {str(x): c for x, c in sorted(instance.component_of.items())},
        "conceptLabel": {str(x): y for x, y in sorted(instance.concept_label.items())},
        "exceptions": sorted(instance.exceptions),
    }


def instance_from_dict(data: Mapping) -> Instance:
    examples = {}
    for e in data["examples"]:
        bits = e["bits"]
        bits = tuple(int(b) for b in (bits if isinstance(bits, (list, tuple)) else str(bits)))
        examples[int(e["id"])] = Example(int(e["id"]), bits)
    comps = tuple(Component(int(c["id"]), int(c["label"]), frozenset(map(int, c["members"]))) for c in data["components"])
    sep = {(int(r["i"]), int(r["j"])): Literal(int(r["feature"]), bool(r["polarity"])) for r in data["separation"]}
    return Instance(
        d=int(data["d"]),
        n_labels=int(data["labels"]),
        examples=examples,
        representation=Representation(comps, sep),
        component_of={int(x): int(c) for x, c in data["componentOf"].items()},
        concept_label={int(x): int(y) for x, y in data["conceptLabel"].items()},
        exceptions=frozenset(map(int, data["exceptions"])),
        k=int(data.get("k", len(data["exceptions"]))),
        s=int(data.get("s", 0)),
    )


def dump_instance(instance: Instance, fp) -> None:
    json.dump(instance_to_dict(instance), fp, indent=1, sort_keys=True)
    fp.write("\n")


def load_instance(fp) -> Instance:
    return instance_from_dict(json.load(fp))
