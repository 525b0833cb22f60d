"""Reference computations written independently of the package, using plain
dicts, sets and itertools.  Tests compare the package against these."""

import itertools
from collections import Counter
from fractions import Fraction


def compose(a, b):
    """a after b, permutations given as image tuples (1-based)."""
    da = {i + 1: y for i, y in enumerate(a)}
    db = {i + 1: y for i, y in enumerate(b)}
    return tuple(da[db[x]] for x in sorted(db))


def invert(a):
    out = {y: i + 1 for i, y in enumerate(a)}
    return tuple(out[k] for k in sorted(out))


def is_verifier_system(m, t, blocks):
    """Verifier-system conditions by bitmask: ids in range, blocks of t+1
    distinct servers, and every set of at most t servers misses a block."""
    if any(not 1 <= x <= m for b in blocks for x in b):
        return False, None
    if any(len(set(b)) != t + 1 or len(b) != t + 1 for b in blocks):
        return False, None
    masks = [sum(1 << (x - 1) for x in b) for b in blocks]
    for size in range(t + 1):
        for f in itertools.combinations(range(m), size):
            fm = sum(1 << x for x in f)
            if all(fm & bm for bm in masks):
                return False, frozenset(x + 1 for x in f)
    return True, None


def confinement_holds(m, t, blocks):
    if t == 0:
        return True
    slots = {}
    for k, b in enumerate(blocks):
        for p, x in enumerate(b):
            slots.setdefault(x, set()).add((k, p))
    for T in itertools.combinations(range(1, m + 1), t):
        if len(set().union(*(slots.get(x, set()) for x in T))) > t:
            return False
    return True


def share_distribution(secret, modulus, t, index):
    """Exact law of share ``index`` of an additive (t+1)-sharing of ``secret``
    over Z_modulus, by listing every draw."""
    law = Counter()
    for drawn in itertools.product(range(modulus), repeat=t):
        last = (secret - sum(drawn)) % modulus
        shares = drawn + (last,)
        law[shares[index]] += 1
    total = modulus ** t
    return {k: Fraction(n, total) for k, n in law.items()}


def json_view(records, parties):
    """Projection of transcript records (as JSON dicts) onto ``parties``."""
    out = []
    for r in records:
        to = r["to"] if isinstance(r["to"], list) else [r["to"]]
        if r["from"] in parties or any(x in parties for x in to):
            out.append(r["step"])
    return out
