"""Instance and stream generators.

All generators are pure functions of their parameters and seed.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import Component, Example, Instance, Literal, Representation

__all__ = [
    "GenerationError",
    "PLACEMENTS",
    "gen_random_instance",
    "adversarial_stream",
    "AdaptiveAdversary",
    "lower_bound_instance",
    "lower_bound_stream",
    "pair_index",
    "StochasticSampler",
    "stochastic_sampler",
]

PLACEMENTS = ("front", "back", "random", "burst", "spread")


class GenerationError(ValueError):
    """Parameters admit no valid instance or distribution."""


def gen_random_instance(m, d, n_labels, k, s, examples_per_component, seed, max_tries=64) -> Instance:
    """Random instance with ``m`` components, ``k`` planted exceptions.

    Each pair ``i < j`` of differently labelled components owns one
    coordinate that is 1 on all of ``G_i`` and 0 on all of ``G_j``; every
    other coordinate is random.  Exceptions are existing members relabelled
    to a different label, so bits (and separation) are untouched.  Every
    component keeps at least one non-exception member and all bit vectors are
    distinct.
    """
    if m < 1 or d < 1 or n_labels < 1 or examples_per_component < 1:
        raise GenerationError("m, d, n_labels, examples_per_component must be positive")
    if not 0 <= s <= k:
        raise GenerationError(f"need 0 <= s <= k, got s={s}, k={k}")
    if k and n_labels < 2:
        raise GenerationError("exceptions need at least two labels")
    if k > m * (examples_per_component - 1):
        raise GenerationError(f"k={k} exceeds the {m * (examples_per_component - 1)} relabelable members")
    rng = np.random.default_rng(seed)
    labels = [int(v) for v in rng.integers(n_labels, size=m)]
    pairs = [(i, j) for i, j in itertools.combinations(range(m), 2) if labels[i] != labels[j]]
    if len(pairs) > d:
        raise GenerationError(f"d={d} < {len(pairs)} separating coordinates needed")
    coord = {p: c for c, p in enumerate(pairs)}
    fixed = {i: {} for i in range(m)}
    for (i, j), c in coord.items():
        fixed[i][c] = 1
        fixed[j][c] = 0
    for i in range(m):
        if 2 ** (d - len(fixed[i])) < examples_per_component:
            raise GenerationError(f"component {i} has too few free coordinates for distinct examples")

    examples: dict[int, Example] = {}
    members: list[set[int]] = [set() for _ in range(m)]
    seen: set[int] = set()
    for i in range(m):
        for _ in range(examples_per_component):
            for _ in range(max_tries):
                bits = rng.integers(0, 2, size=d)
                for c, v in fixed[i].items():
                    bits[c] = v
                x = Example(len(examples), tuple(int(b) for b in bits))
                if x.code not in seen:
                    break
            else:
                raise GenerationError("could not draw distinct examples; increase d")
            seen.add(x.code)
            examples[x.id] = x
            members[i].add(x.id)

    comp_of = {x: i for i in range(m) for x in members[i]}
    concept = {x: labels[comp_of[x]] for x in examples}
    eligible = [x for i in range(m) for x in sorted(members[i])[1:]]
    exc = [int(v) for v in rng.choice(eligible, size=k, replace=False)] if k else []
    for x in exc:
        others = [y for y in range(n_labels) if y != concept[x]]
        concept[x] = others[int(rng.integers(len(others)))]
    sep = {}
    for (i, j), c in coord.items():
        sep[(i, j)] = Literal(c, True)
        sep[(j, i)] = Literal(c, False)
    comps = tuple(Component(i, labels[i], frozenset(members[i])) for i in range(m))
    return Instance(
        d=d,
        n_labels=n_labels,
        examples=examples,
        representation=Representation(comps, sep),
        component_of=comp_of,
        concept_label=concept,
        exceptions=frozenset(exc),
        k=k,
        s=s,
    )


def adversarial_stream(instance: Instance, n: int, seed, placement="random", exception_first=False) -> list[int]:
    """Stream of ``n`` example ids in which every exception appears exactly once.

    Non-exceptions are drawn uniformly with replacement.  ``placement``
    decides where the exceptions go: ``front`` (right after the first
    example), ``back``, ``random``, ``burst`` (one contiguous block at a
    random offset) or ``spread`` (evenly spaced).  With ``exception_first``
    one exception serves as the initial labelled example.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}")
    rng = np.random.default_rng(seed)
    exc = sorted(instance.exceptions)
    normal = sorted(set(instance.examples) - instance.exceptions)
    if n < 1 + len(exc):
        raise GenerationError(f"stream length {n} cannot hold {len(exc)} exceptions")
    exc = [exc[i] for i in rng.permutation(len(exc))]
    head = []
    if exception_first and exc:
        head = [exc.pop(0)]
    body_len = n - len(head) - len(exc)
    body = [normal[i] for i in rng.integers(len(normal), size=body_len)] if normal else []
    first, rest = (head, body) if head else (body[:1], body[1:])
    slots = len(rest) + 1
    if placement == "front":
        pos = [0] * len(exc)
    elif placement == "back":
        pos = [slots - 1] * len(exc)
    elif placement == "random":
        pos = sorted(int(p) for p in rng.integers(slots, size=len(exc)))
    elif placement == "burst":
        pos = [int(rng.integers(slots))] * len(exc)
    else:
        pos = [int(round((i + 1) * (slots - 1) / (len(exc) + 1))) for i in range(len(exc))]
    out = list(first)
    e = 0
    for i in range(slots):
        while e < len(exc) and pos[e] == i:
            out.append(exc[e])
            e += 1
        if i < len(rest):
            out.append(rest[i])
    return out


class AdaptiveAdversary:
    """Learner-aware stream source.

    Each round it looks at what the learner would currently predict and, with
    probability ``aggression``, presents an example the learner gets wrong
    (exceptions first while unused and admissible); otherwise a uniform
    non-exception.  Every exception is presented at most once.
    """

    def __init__(self, instance: Instance, n: int, seed, aggression: float = 0.8):
        self.instance = instance
        self.n = n
        self.aggression = aggression
        self._rng = np.random.default_rng(seed)
        self._normal = sorted(set(instance.examples) - instance.exceptions)
        self._pending = sorted(instance.exceptions)

    def first(self) -> int:
        return self._normal[int(self._rng.integers(len(self._normal)))]

    def next(self, learner, teacher) -> int:
        ex = self.instance.examples
        label = self.instance.concept_label
        if self._rng.random() < self.aggression:
            for xid in list(self._pending):
                x = ex[xid]
                out = learner.predict_one(x)
                if out.predicted != label[xid] and teacher.admissible(x, out.predicted, out.explanation):
                    self._pending.remove(xid)
                    return xid
            order = self._rng.permutation(len(self._normal))
            for i in order:
                xid = self._normal[int(i)]
                if learner.predict_one(ex[xid]).predicted != label[xid]:
                    return xid
        return self._normal[int(self._rng.integers(len(self._normal)))]


def pair_index(i: int, j: int, m: int) -> int:
    """Position of ``(i, j)``, ``i < j``, in the lexicographic list of pairs."""
    if not 0 <= i < j < m:
        raise ValueError(f"need 0 <= i < j < m, got ({i}, {j})")
    return i * m - i * (i + 1) // 2 + (j - i - 1)


def lower_bound_instance(m: int, S: frozenset[tuple[int, int]]) -> Instance:
    """The hidden-assignment family: one example per pair of components.

    Pair ``(i, j)`` owns coordinates ``2p`` and ``2p + 1`` (``p`` its pair
    index); component ``G_i`` requires the coordinate ``2p + S_ij`` to be 1
    for every ``j > i`` and 0 for every ``j < i``.  Example ``x_ij`` sets both
    coordinates of every other pair touching ``i`` or ``j`` to the value that
    keeps it out of the third component, and sets ``(2p, 2p + 1) = (0, 1)``,
    so it lies in ``G_i`` exactly when ``(i, j)`` is in ``S``.

    One more example, with id ``len(pairs)``, serves as the initial labelled
    example: it is 1 on both coordinates of every pair touching component 0
    and 0 elsewhere, which puts it in ``G_0`` whatever ``S`` is.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    pairs = list(itertools.combinations(range(m), 2))
    d = 2 * len(pairs)
    examples, members, comp_of, concept = {}, [set() for _ in range(m)], {}, {}
    for xid, (i, j) in enumerate(pairs):
        bits = [0] * d
        for a in (i, j):
            for l in range(m):
                if l in (i, j):
                    continue
                p = pair_index(min(a, l), max(a, l), m)
                # G_l needs 1 here when it is the lower index, 0 otherwise
                v = 0 if l < a else 1
                bits[2 * p] = bits[2 * p + 1] = v
        p = pair_index(i, j, m)
        bits[2 * p], bits[2 * p + 1] = 0, 1
        home = i if (i, j) in S else j
        examples[xid] = Example(xid, tuple(bits))
        members[home].add(xid)
        comp_of[xid] = home
        concept[xid] = home
    anchor = len(pairs)
    bits = [0] * d
    for j in range(1, m):
        p = pair_index(0, j, m)
        bits[2 * p] = bits[2 * p + 1] = 1
    examples[anchor] = Example(anchor, tuple(bits))
    members[0].add(anchor)
    comp_of[anchor] = 0
    concept[anchor] = 0
    sep = {}
    for i, j in pairs:
        lit = Literal(2 * pair_index(i, j, m) + int((i, j) in S), True)
        sep[(i, j)] = lit
        sep[(j, i)] = lit.negate()
    comps = tuple(Component(i, i, frozenset(members[i])) for i in range(m))
    return Instance(
        d=d,
        n_labels=m,
        examples=examples,
        representation=Representation(comps, sep),
        component_of=comp_of,
        concept_label=concept,
        exceptions=frozenset(),
        k=0,
        s=0,
    )


def lower_bound_stream(m: int, seed) -> tuple[Instance, list[int], frozenset]:
    """Draw the hidden set ``S`` uniformly and present all pair examples in random order.

    Returns the instance, the ordered example ids (the fixed initial example
    first) and ``S``.
    """
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(m), 2))
    S = frozenset(p for p, bit in zip(pairs, rng.integers(0, 2, size=len(pairs))) if bit)
    inst = lower_bound_instance(m, S)
    order = [len(pairs)] + [int(v) for v in rng.permutation(len(pairs))]
    return inst, order, S


class StochasticSampler:
    """i.i.d. example source with planned exception mass.

    Exceptions share total mass ``epsilon`` equally (each must stay within
    ``sigma``); non-exceptions share the rest uniformly.
    """

    def __init__(self, instance: Instance, epsilon: float, sigma: float, seed):
        if not 0 <= sigma <= epsilon <= 1:
            raise GenerationError(f"need 0 <= sigma <= epsilon <= 1, got sigma={sigma}, epsilon={epsilon}")
        self.instance = instance
        self.ids = np.array(sorted(instance.examples), dtype=np.int64)
        exc = np.isin(self.ids, sorted(instance.exceptions))
        n_exc, n_norm = int(exc.sum()), int((~exc).sum())
        if n_norm == 0:
            raise GenerationError("instance has no non-exception examples")
        mass = epsilon if n_exc else 0.0
        if n_exc and mass / n_exc > sigma + 1e-15:
            raise GenerationError(f"{n_exc} exceptions cannot hold mass {epsilon} with sigma={sigma}")
        w = np.where(exc, mass / max(n_exc, 1), (1.0 - mass) / n_norm)
        self.weights = w / w.sum()
        self.exception_mass = float(self.weights[exc].sum())
        self._rng = np.random.default_rng(seed)

    def weight_map(self) -> dict[int, float]:
        return {int(i): float(w) for i, w in zip(self.ids, self.weights)}

    def draw(self, n: int) -> list[int]:
        return [int(v) for v in self._rng.choice(self.ids, size=n, p=self.weights)]

    def __iter__(self):
        while True:
            yield from self.draw(4096)


def stochastic_sampler(instance: Instance, epsilon: float, sigma: float, seed) -> StochasticSampler:
    return StochasticSampler(instance, epsilon, sigma, seed)
