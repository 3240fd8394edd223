"""Independent reference computations used as test oracles.

Nothing here imports the package's algorithms; the only shared pieces are
the plain data classes used to build inputs.
"""

from __future__ import annotations

import mpmath

mpmath.mp.dps = 50


def q_ref(eps, t, delta):
    eps, t, delta = mpmath.mpf(eps), mpmath.mpf(t), mpmath.mpf(delta)
    L = mpmath.log(8 * t**3 / delta)
    return eps * t + mpmath.mpf(2) / 3 * L + mpmath.sqrt(2 * eps * t * L)


def gamma_ref(eps, r, t, delta):
    eps, r, t, delta = (mpmath.mpf(v) for v in (eps, r, t, delta))
    L = mpmath.log(8 * t**2 / delta)
    return (r + 4 * mpmath.sqrt(r) * L ** mpmath.mpf(1.5)) / (1 - 2 * eps) - r + 1


def thm3_ref(m, k, s):
    # per-rule mistakes times the number of rules, plus one mistake per creation
    per_rule = (s + 1) * (m - 1) + k + 1
    return (m + k) * (per_rule + 1)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _single_feature_separates(a_bits, b_bits):
    d = len(a_bits[0])
    for j in range(d):
        va = {x[j] for x in a_bits}
        vb = {x[j] for x in b_bits}
        if len(va) == 1 and len(vb) == 1 and va != vb:
            return True
    return False


def brute_min_partition_size(bits_by_id, label_by_id):
    """Smallest exception-free partition; exhaustive over all set partitions."""
    ids = sorted(bits_by_id)
    best = None
    for part in _set_partitions(ids):
        if best is not None and len(part) >= best:
            continue
        if any(len({label_by_id[x] for x in g}) > 1 for g in part):
            continue
        ok = True
        for i in range(len(part)):
            for j in range(i + 1, len(part)):
                if label_by_id[part[i][0]] == label_by_id[part[j][0]]:
                    continue
                if not _single_feature_separates([bits_by_id[x] for x in part[i]],
                                                 [bits_by_id[x] for x in part[j]]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = len(part)
    return best


class ReferenceLearner:
    """Literal transcription of the robust learner, for differential replay.

    Conjunctions are lists of ``(feature, polarity)`` pairs evaluated on bit
    tuples; counters are dicts.  Thresholds are fixed integers.
    """

    def __init__(self, m, k, s):
        self.m, self.k, self.s = m, k, s
        self.rules = []  # dicts: rep, label, conj, counts

    def start(self, x0_id, x0_bits, y0):
        self.x0 = (x0_id, x0_bits)
        self.y0 = y0

    def predict(self, bits):
        for rule in self.rules:
            if all(bits[f] == int(p) for f, p in rule["conj"]):
                return rule["label"], rule["rep"][0], rule
        return self.y0, self.x0[0], None

    def update(self, x_id, bits, feedback):
        """Returns the state-change tag."""
        if feedback is None:
            return "none"
        label, (feature, polarity) = feedback
        _, _, rule = self.predict(bits)
        if rule is None:
            self.rules.append({"rep": (x_id, bits), "label": label, "conj": [], "counts": {}})
            return "create"
        counts = rule["counts"]
        key = (feature, polarity)
        counts[key] = counts.get(key, 0) + 1
        if counts[key] > self.s:
            counts[key] = 0
            rule["conj"].append((feature, not polarity))
            if len(rule["conj"]) >= self.m:
                self.rules.remove(rule)
                return "delete"
            return "refine"
        b = self.m - 1 - len(rule["conj"])
        values = sorted((v for v in counts.values() if v > 0), reverse=True)
        if sum(values[b:]) > self.k:
            self.rules.remove(rule)
            return "delete"
        return "counter-inc"
