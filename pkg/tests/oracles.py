"""Independent brute-force oracles for the test suite.

These are deliberately naive, structure-driven implementations (no
automata, no generating functions) so that failures in the package
cannot hide in a shared code path.
"""

from __future__ import annotations

import math

from shapegen.sexpr import Atom, Concat, Epsilon, RegexNode, Star, Union


def naive_words(regex: RegexNode, max_len: int) -> set[tuple[str, ...]]:
    """All words of length <= max_len, by direct set construction."""
    if isinstance(regex, Epsilon):
        return {()}
    if isinstance(regex, Atom):
        return {(regex.name,)} if max_len >= 1 else set()
    if isinstance(regex, Union):
        return naive_words(regex.left, max_len) | naive_words(regex.right, max_len)
    if isinstance(regex, Concat):
        left = naive_words(regex.left, max_len)
        right = naive_words(regex.right, max_len)
        return {a + b for a in left for b in right if len(a) + len(b) <= max_len}
    if isinstance(regex, Star):
        words = {()}
        frontier = {()}
        while frontier:
            inner = naive_words(regex.inner, max_len)
            frontier = {a + b for a in frontier for b in inner
                        if 0 < len(b) and len(a) + len(b) <= max_len} - words
            words |= frontier
        return words
    raise TypeError(regex)


def naive_counts(regex: RegexNode, max_len: int) -> list[int]:
    """Word counts per length 0..max_len via naive enumeration."""
    words = naive_words(regex, max_len)
    out = [0] * (max_len + 1)
    for w in words:
        out[len(w)] += 1
    return out


def naive_derivations(regex: RegexNode, word) -> int:
    """Number of parse derivations, plain recursion over splits."""
    w = tuple(word)

    def go(node, lo, hi):
        if isinstance(node, Epsilon):
            return 1 if lo == hi else 0
        if isinstance(node, Atom):
            return 1 if hi == lo + 1 and w[lo] == node.name else 0
        if isinstance(node, Union):
            return go(node.left, lo, hi) + go(node.right, lo, hi)
        if isinstance(node, Concat):
            return sum(go(node.left, lo, k) * go(node.right, k, hi)
                       for k in range(lo, hi + 1))
        if isinstance(node, Star):
            if lo == hi:
                return 1
            return sum(go(node.inner, lo, k) * go(node, k, hi)
                       for k in range(lo + 1, hi + 1))
        raise TypeError(node)

    return go(regex, 0, len(w))


def eval_linear(a: float, b: float, t: float) -> float:
    return a * t + b


def eval_exponential(a: float, b: float, c: float, t: float) -> float:
    return a + b * math.e ** (c * t)


def eval_sinusoid(a: float, b: float, c: float, e: float, t: float) -> float:
    return a * math.sin(b * t + c) + e
