"""Boltzmann sampling of shape words.

With parameter z below the convergence radius, a word u is drawn with
probability z^|u| / g(z), so words of equal length are equiprobable and
the mean length is controlled by z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .genfun import RationalFunction, convergence_radius, generating_function
from .lang import matches, min_word_length, subexpressions
from .sexpr import Atom, Concat, ConstraintExpr, Epsilon, RegexNode, Star, Union

__all__ = ["ShapeWord", "BoltzmannOracle", "WordTooLongError",
           "build_oracle", "sample_word", "word_probability"]

MAX_WORD_ATOMS = 1_000_000


class WordTooLongError(RuntimeError):
    """A draw exceeded the configured atom cap (z too close to Rconv)."""


@dataclass(frozen=True)
class ShapeWord:
    """A sequence of atom names plus the constraint it inherits."""
    atoms: tuple[str, ...]
    constraint: ConstraintExpr | None = None

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)


def _min_counts(regex: RegexNode) -> dict[int, tuple[int, int]]:
    """Per subexpression: (shortest word length, number of shortest words)."""
    out: dict[int, tuple[int, int]] = {}

    def go(n: RegexNode) -> tuple[int, int]:
        if id(n) in out:
            return out[id(n)]
        if isinstance(n, Epsilon):
            r = (0, 1)
        elif isinstance(n, Atom):
            r = (1, 1)
        elif isinstance(n, Union):
            l1, c1 = go(n.left)
            l2, c2 = go(n.right)
            if l1 < l2:
                r = (l1, c1)
            elif l2 < l1:
                r = (l2, c2)
            else:
                r = (l1, c1 + c2)
        elif isinstance(n, Concat):
            l1, c1 = go(n.left)
            l2, c2 = go(n.right)
            r = (l1 + l2, c1 * c2)
        elif isinstance(n, Star):
            r = (0, 1)
        else:
            raise TypeError(f"not a regex node: {n!r}")
        out[id(n)] = r
        return r

    go(regex)
    return out


class BoltzmannOracle:
    """Per-subexpression values of the generating function at a fixed z.

    Use :func:`build_oracle`; the constructor assumes precomputed caches.
    At z = 0 the Boltzmann distribution degenerates to the limit law,
    which puts all mass on the shortest words; sampling handles that
    case explicitly.
    """

    def __init__(self, regex: RegexNode, z: float,
                 values: dict[int, float], gfs: dict[int, RationalFunction]):
        self.regex = regex
        self.z = z
        self.values = values
        self.gfs = gfs
        self._mins = _min_counts(regex) if z == 0.0 else None

    def value(self, node: RegexNode) -> float:
        return self.values[id(node)]


def build_oracle(regex: RegexNode, z: float) -> BoltzmannOracle:
    """Evaluate g at z for every subexpression, checking z < Rconv of each."""
    if z < 0.0:
        raise ValueError(f"z must be nonnegative, got {z}")
    memo: dict[int, RationalFunction] = {}

    def gf(n: RegexNode) -> RationalFunction:
        if id(n) in memo:
            return memo[id(n)]
        if isinstance(n, Epsilon):
            g = RationalFunction.one()
        elif isinstance(n, Atom):
            g = RationalFunction.z()
        elif isinstance(n, Concat):
            g = gf(n.left) * gf(n.right)
        elif isinstance(n, Union):
            g = gf(n.left) + gf(n.right)
        elif isinstance(n, Star):
            g = RationalFunction.one() / (RationalFunction.one() - gf(n.inner))
        else:
            raise TypeError(f"not a regex node: {n!r}")
        memo[id(n)] = g
        return g

    values: dict[int, float] = {}
    for sub in subexpressions(regex):
        g = gf(sub)
        rc = convergence_radius(g)
        if z >= rc:
            raise ValueError(f"z = {z} is not below the convergence radius "
                             f"{rc:g} of a subexpression")
        v = g(z)
        if not math.isfinite(v):
            raise ValueError(f"generating function diverges at z = {z}")
        values[id(sub)] = v
    return BoltzmannOracle(regex, z, values, memo)


def sample_word(oracle: BoltzmannOracle, rng,
                max_atoms: int = MAX_WORD_ATOMS) -> ShapeWord:
    """Draw one word; rng only needs a .random() method.

    Stars loop with continuation probability 1 - 1/g rather than
    recursing, so depth is bounded by the AST.  Draws longer than
    max_atoms raise WordTooLongError.
    """
    out: list[str] = []
    z = oracle.z
    mins = oracle._mins

    def emit(name: str):
        out.append(name)
        if len(out) > max_atoms:
            raise WordTooLongError(f"draw exceeded {max_atoms} atoms")

    def go(n: RegexNode):
        if isinstance(n, Epsilon):
            return
        if isinstance(n, Atom):
            emit(n.name)
            return
        if isinstance(n, Concat):
            go(n.left)
            go(n.right)
            return
        if isinstance(n, Union):
            total = oracle.value(n)
            if total > 0.0:
                p_left = oracle.value(n.left) / total
            else:
                # z = 0 limit: branch toward the shorter words
                l1, c1 = mins[id(n.left)]
                l2, c2 = mins[id(n.right)]
                if l1 != l2:
                    p_left = 1.0 if l1 < l2 else 0.0
                else:
                    p_left = c1 / (c1 + c2)
            go(n.left if rng.random() < p_left else n.right)
            return
        if isinstance(n, Star):
            g = oracle.value(n)
            p_stop = 1.0 / g
            while rng.random() >= p_stop:
                go(n.inner)
            return
        raise TypeError(f"not a regex node: {n!r}")

    go(oracle.regex)
    return ShapeWord(tuple(out))


def word_probability(oracle: BoltzmannOracle, word) -> float:
    """Exact z^|u| / g(z) for a word of the language."""
    atoms = tuple(word.atoms if isinstance(word, ShapeWord) else word)
    if not matches(oracle.regex, atoms):
        raise ValueError(f"word {' '.join(atoms) or 'eps'} is not in the language")
    if oracle.z == 0.0:
        l0 = min_word_length(oracle.regex)
        if len(atoms) != l0:
            return 0.0
        _, c0 = _min_counts(oracle.regex)[id(oracle.regex)]
        return 1.0 / c0
    return oracle.z ** len(atoms) / oracle.value(oracle.regex)
