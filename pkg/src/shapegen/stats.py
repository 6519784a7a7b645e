"""Statistical diagnostics for sampled words and chains."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .lang import enumerate_words
from .sexpr import RegexNode
from .words import ShapeWord

__all__ = ["WordStats", "InsufficientDataError", "word_stats", "same_length_test"]

MAX_DISTINCT_WORDS = 10_000


class InsufficientDataError(ValueError):
    pass


@dataclass
class WordStats:
    count: int = 0
    length_hist: Counter = field(default_factory=Counter)
    word_freq: Counter = field(default_factory=Counter)
    freq_truncated: bool = False

    @property
    def mean_length(self) -> float:
        if self.count == 0:
            return float("nan")
        return sum(n * c for n, c in self.length_hist.items()) / self.count

    def add(self, word):
        atoms = tuple(word.atoms if isinstance(word, ShapeWord) else word)
        self.count += 1
        self.length_hist[len(atoms)] += 1
        if atoms in self.word_freq or len(self.word_freq) < MAX_DISTINCT_WORDS:
            self.word_freq[atoms] += 1
        else:
            self.freq_truncated = True

    def merge(self, other: "WordStats") -> "WordStats":
        out = WordStats(self.count + other.count,
                        self.length_hist + other.length_hist,
                        self.word_freq + other.word_freq,
                        self.freq_truncated or other.freq_truncated)
        if len(out.word_freq) > MAX_DISTINCT_WORDS:
            out.freq_truncated = True
        return out

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_length": self.mean_length if self.count else None,
            "length_histogram": {str(k): v for k, v in sorted(self.length_hist.items())},
            "distinct_words": len(self.word_freq),
            "freq_truncated": self.freq_truncated,
        }


def word_stats(words) -> WordStats:
    """Exact counts over a stream of words (sequences of atom names)."""
    ws = WordStats()
    for w in words:
        ws.add(w)
    return ws


def same_length_test(stats: WordStats, length: int, regex: RegexNode) -> float | None:
    """Chi-square p-value against the uniform law on all language words
    of the given length.

    Words of one length are equiprobable under the Boltzmann law, so a
    small p flags a broken sampler.  Returns None (nothing to test)
    when the language has fewer than two words of that length; raises
    InsufficientDataError when expected counts fall below 5.
    """
    support = [w for w in enumerate_words(regex, length) if len(w) == length]
    if len(support) < 2:
        return None
    if stats.freq_truncated:
        raise InsufficientDataError("word-frequency map was truncated; "
                                    "per-word counts are incomplete")
    observed = np.array([stats.word_freq.get(w, 0) for w in support], dtype=float)
    total = observed.sum()
    expected = total / len(support)
    if expected < 5:
        raise InsufficientDataError(
            f"expected count {expected:.2f} per word is below 5 "
            f"({int(total)} draws over {len(support)} words)")
    return float(sps.chisquare(observed).pvalue)
