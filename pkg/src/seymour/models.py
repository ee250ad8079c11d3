"""Seedable random tournaments and random digraphs.

Streams are numpy ``Philox`` generators keyed by ``SeedSequence(master_seed,
spawn_key=(trial_index,))``, so trial ``t`` of a run can be regenerated on any
worker, in any order, with the same result.

Every unordered pair ``{i, j}`` (``i < j``, row-major order) consumes exactly
one uniform ``x`` in [0, 1): ``x < p`` gives ``i -> j``, ``p <= x < 2p`` gives
``j -> i`` and anything else leaves the pair empty.  A tournament is the
``p = 1/2`` case, so ``gen_digraph(n, 1/2, s)`` and ``gen_tournament(n, s)``
return the same graph for the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .graph import Digraph, Tournament

HALF = Fraction(1, 2)

# uniforms drawn per block while filling rows; bounds peak memory to ~32 MB
_BLOCK = 1 << 22


def parse_probability(p) -> Fraction:
    """Accept ``0.3``, ``"0.3"``, ``"3/10"`` or a Fraction; return a Fraction."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(repr(p))
    try:
        return Fraction(str(p).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse probability {p!r}") from None


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: Fraction | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.p is not None:
            p = parse_probability(self.p)
            if not 0 <= p <= HALF:
                raise ValueError(f"p must lie in [0, 1/2], got {p}")
            object.__setattr__(self, "p", p)
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


def rng_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial_index,))
    return np.random.Generator(np.random.Philox(ss))


def _fill(n, p, rng):
    rows = np.zeros((n, K.n_words(n)), dtype=np.uint64)
    pf, two_pf = float(p), float(2 * p)
    i = 0
    while i < n - 1:
        # take as many whole rows as fit in one block
        j, count = i, 0
        while j < n - 1 and (count == 0 or count + (n - 1 - j) <= _BLOCK):
            count += n - 1 - j
            j += 1
        K.fill_pairs(rows, rng.random(count), pf, two_pf, i, j, n)
        i = j
    return rows


def gen_digraph(n: int, p, rng: np.random.Generator) -> Digraph:
    """Random digraph: each pair gets u->v w.p. p, v->u w.p. p, nothing w.p. 1-2p."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = parse_probability(p)
    if not 0 <= p <= HALF:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    return Digraph._trusted(n, _fill(n, p, rng))


def gen_tournament(n: int, rng: np.random.Generator) -> Tournament:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Tournament._trusted(n, _fill(n, HALF, rng))


def generate(params: ModelParams, trial_index: int = 0) -> Digraph:
    """Graph for one trial: a tournament when ``params.p`` is None."""
    rng = rng_stream(params.master_seed, trial_index)
    if params.p is None:
        return gen_tournament(params.n, rng)
    return gen_digraph(params.n, params.p, rng)
