"""Shared strategies and generators for the test suite.

Dyadic rationals (small integer / power of two) make every sum, difference and
halving in the interval transformers exact in double precision, so tests that
demand bit-exact equality draw from them.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from boxcert.intervals import BoxRegion, Interval
from boxcert.network import Network, NetworkBuilder


def dyadic(max_numerator: int = 2048, denominator_bits: int = 9) -> st.SearchStrategy[float]:
    scale = 2.0 ** -denominator_bits
    return st.integers(-max_numerator, max_numerator).map(lambda k: k * scale)


def dyadic_interval(max_numerator: int = 2048, denominator_bits: int = 9) -> st.SearchStrategy[Interval]:
    return st.tuples(
        dyadic(max_numerator, denominator_bits), dyadic(max_numerator, denominator_bits)
    ).map(lambda ab: Interval(min(ab), max(ab)))


def finite_interval(lo: float = -100.0, hi: float = 100.0) -> st.SearchStrategy[Interval]:
    values = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.tuples(values, values).map(lambda ab: Interval(min(ab), max(ab)))


def rand_dyadic(rng: random.Random, lo: int, hi: int, denominator_bits: int = 9) -> float:
    scale = 2.0 ** -denominator_bits
    return rng.randint(lo * 2**denominator_bits, hi * 2**denominator_bits) * scale


def rand_dyadic_interval(rng: random.Random, lo: int = -4, hi: int = 4, bits: int = 9) -> Interval:
    a = rand_dyadic(rng, lo, hi, bits)
    b = rand_dyadic(rng, lo, hi, bits)
    return Interval(min(a, b), max(a, b))


def random_network(rng: random.Random, max_extra_nodes: int = 8) -> Network:
    """A random small DAG over all node kinds with bounded weights."""
    dim = rng.randint(1, 3)
    b = NetworkBuilder(dim)
    ids = list(b.input_ids)
    for _ in range(rng.randint(1, max_extra_nodes)):
        kind = rng.choice(("affine", "relu", "sum", "concat"))
        if kind == "affine":
            pred = rng.choice(ids)
            cols = b.arity(pred)
            rows = rng.randint(1, 3)
            weights = [[rng.uniform(-2, 2) for _ in range(cols)] for _ in range(rows)]
            bias = [rng.uniform(-1, 1) for _ in range(rows)]
            ids.append(b.affine(pred, weights, bias))
        elif kind == "relu":
            ids.append(b.relu(rng.choice(ids)))
        elif kind == "sum":
            pred = rng.choice(ids)
            same = [p for p in ids if b.arity(p) == b.arity(pred)]
            picks = [pred] + [rng.choice(same) for _ in range(rng.randint(1, 2))]
            ids.append(b.sum(picks))
        else:
            picks = [rng.choice(ids) for _ in range(rng.randint(1, 3))]
            if sum(b.arity(p) for p in picks) <= 6:
                ids.append(b.concat(picks))
    return b.finish(ids[-1])


def random_box(rng: random.Random, dim: int, lo: float = -3.0, hi: float = 3.0) -> BoxRegion:
    pairs = []
    for _ in range(dim):
        a = rng.uniform(lo, hi)
        c = rng.uniform(lo, hi)
        pairs.append((min(a, c), max(a, c)))
    return BoxRegion.from_pairs(pairs)


def point_inside(rng: random.Random, box: BoxRegion) -> list[float]:
    return [rng.uniform(b.lo, b.hi) for b in box.bounds]


def shrink_box(rng: random.Random, box: BoxRegion) -> BoxRegion:
    """A random sub-box of the given box."""
    pairs = []
    for b in box.bounds:
        a = rng.uniform(b.lo, b.hi)
        c = rng.uniform(b.lo, b.hi)
        pairs.append((min(a, c), max(a, c)))
    return BoxRegion.from_pairs(pairs)
