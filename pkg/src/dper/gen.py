"""Instance generators for fuzzing and the smoke benchmark."""

from __future__ import annotations

import random

from .formula import Problem, validate

FUZZ_PROBS = (0.4, 0.5, 0.6)


def random_instance(rng: random.Random, max_vars: int = 12,
                    max_clauses: int = 20, probs=FUZZ_PROBS,
                    empty_clause_rate: float = 0.02) -> Problem:
    """Small random instance with a random existential/randomized split.

    Some variables may occur in no clause and either block may be empty, so
    the degenerate paths get exercised too.
    """
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(m):
        if rng.random() < empty_clause_rate:
            clauses.append(())
            continue
        k = rng.randint(1, min(3, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    X = frozenset(v for v in range(1, n + 1) if rng.random() < 0.5)
    Y = frozenset(range(1, n + 1)) - X
    p = Problem(num_vars=n, clauses=tuple(clauses), X=X, Y=Y,
                pr={y: rng.choice(probs) for y in Y})
    validate(p)
    return p


def band_instance(rng: random.Random, window: int, length: int = 3,
                  clauses_per_window: int = 2, probs=FUZZ_PROBS) -> Problem:
    """Sliding-window CNF whose project-join trees have width near `window`.

    Variables 1..n lie on a line and every clause picks its variables from
    one window, so the primal graph is a band.  Each window additionally
    contributes one clause spanning the whole window, which pins the width
    from below (width is never less than the largest clause).  The
    existential block is a prefix so that blockwise elimination does not
    inflate the width.
    """
    n = window * length
    x_cut = max(1, window // 2)
    clauses = []
    for start in range(1, n - window + 2, max(1, window // 2)):
        span = range(start, start + window)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in span))
    for start in range(1, n - window + 2):
        for _ in range(clauses_per_window):
            k = min(3, window)
            vs = rng.sample(range(start, start + window), k)
            clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    X = frozenset(range(1, x_cut + 1))
    Y = frozenset(range(x_cut + 1, n + 1))
    p = Problem(num_vars=n, clauses=tuple(clauses), X=X, Y=Y,
                pr={y: rng.choice(probs) for y in Y})
    validate(p)
    return p
