"""Independent reference computations for the context-tree estimator.

Everything here is exact rational arithmetic and direct enumeration, kept
deliberately separate from the implementation under test:

* add-half marginal likelihoods evaluated in closed form from counts,
* explicit enumeration of every complete suffix set up to a depth bound,
* the Bayes mixture as a literal weighted sum over those suffix sets,
* a linear-domain weighted-probability recursion evaluated bottom-up
  from per-node counts.

The sequence's missing past is padded with zeros, matching the estimator's
documented convention.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product


@lru_cache(maxsize=None)
def kt_prob_from_counts(counts: tuple[int, ...]) -> Fraction:
    """Dirichlet(1/2,...,1/2) marginal likelihood of a count vector."""
    m = len(counts)
    numerator = Fraction(1)
    for c in counts:
        for i in range(c):
            numerator *= Fraction(2 * i + 1, 2)
    denominator = Fraction(1)
    total = sum(counts)
    for k in range(total):
        denominator *= Fraction(2 * k + m, 2)
    return numerator / denominator


def enumerate_suffix_sets(depth: int, m: int) -> list[tuple[tuple[int, ...], ...]]:
    """Every complete suffix set of depth <= `depth` (contexts stored
    most-recent symbol first; a child appends the next-older symbol)."""

    def grow(prefix: tuple[int, ...], budget: int):
        yield (prefix,)
        if budget == 0:
            return
        child_sets = [list(grow(prefix + (s,), budget - 1)) for s in range(m)]
        for combo in product(*child_sets):
            merged: tuple[tuple[int, ...], ...] = ()
            for part in combo:
                merged += part
            yield merged

    return list(grow((), depth))


def prior_binary(suffix_set, depth: int) -> Fraction:
    """2^(-|S| - N(S) + 1) with N(S) the leaves shorter than the bound."""
    short = sum(1 for s in suffix_set if len(s) < depth)
    return Fraction(1, 2 ** (len(suffix_set) + short - 1))


def prior_mary(suffix_set, depth: int, m: int) -> Fraction:
    """2^-(internal nodes + leaves shorter than the bound); reduces to the
    binary formula at m=2."""
    internal = (len(suffix_set) - 1) // (m - 1)
    short = sum(1 for s in suffix_set if len(s) < depth)
    return Fraction(1, 2 ** (internal + short))


def _padded_context(sequence, position: int, depth: int) -> tuple[int, ...]:
    """The `depth` symbols before `position`, most recent first, zero padded."""
    ctx = []
    for back in range(1, depth + 1):
        i = position - back
        ctx.append(sequence[i] if i >= 0 else 0)
    return tuple(ctx)


def suffix_set_probability(sequence, suffix_set, depth: int, m: int) -> Fraction:
    """Probability of the sequence under one suffix model, parameters
    integrated out: the product of per-suffix add-half likelihoods."""
    counts: dict[tuple[int, ...], list[int]] = {s: [0] * m for s in suffix_set}
    for position, symbol in enumerate(sequence):
        ctx = _padded_context(sequence, position, depth)
        for suffix in suffix_set:
            if ctx[: len(suffix)] == suffix:
                counts[suffix][symbol] += 1
                break
        else:
            raise AssertionError("suffix set does not cover the context")
    prob = Fraction(1)
    for suffix in suffix_set:
        prob *= kt_prob_from_counts(tuple(counts[suffix]))
    return prob


def mixture_probability(sequence, depth: int, m: int = 2) -> Fraction:
    """The Bayes mixture: sum over suffix sets of prior times likelihood.
    Binary uses the closed-form prior; other alphabets the tree-cost one."""
    total = Fraction(0)
    for suffix_set in enumerate_suffix_sets(depth, m):
        if m == 2:
            weight = prior_binary(suffix_set, depth)
        else:
            weight = prior_mary(suffix_set, depth, m)
        total += weight * suffix_set_probability(sequence, suffix_set, depth, m)
    return total


def recursive_weighted_probability(sequence, depth: int, m: int = 2) -> Fraction:
    """Linear-domain evaluation: accumulate counts at every context of
    length <= depth, then fold P_w = 1/2 P_e + 1/2 prod(children) bottom-up
    (leaves at the depth bound keep P_w = P_e; absent children count as 1)."""
    counts: dict[tuple[int, ...], list[int]] = {}
    for position, symbol in enumerate(sequence):
        ctx = _padded_context(sequence, position, depth)
        for d in range(depth + 1):
            node = counts.setdefault(ctx[:d], [0] * m)
            node[symbol] += 1

    def weighted(context: tuple[int, ...]) -> Fraction:
        node = counts.get(context)
        if node is None:
            return Fraction(1)
        estimated = kt_prob_from_counts(tuple(node))
        if len(context) == depth:
            return estimated
        children = Fraction(1)
        for s in range(m):
            children *= weighted(context + (s,))
        return Fraction(1, 2) * estimated + Fraction(1, 2) * children

    return weighted(())
