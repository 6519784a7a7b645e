"""Rendering (word, valuation) pairs into piecewise signals.

Each atom occupies a half-open interval [0, d) in local time; a
concatenated signal evaluates atom i at t minus the accumulated
duration of its predecessors.  Boundary bookkeeping is exact (rational
accumulation); floats appear only in emitted sample values.
"""

from __future__ import annotations

import io
import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sexpr import AtomicShapeDecl
from .words import ShapeWord

__all__ = ["Signal", "RenderError", "render", "to_csv", "to_json",
           "boundary_jumps", "project_continuity", "atom_value"]


class RenderError(ValueError):
    pass


@dataclass
class Signal:
    variable: str
    times: np.ndarray
    values: np.ndarray
    total_duration: float
    segment_boundaries: tuple[float, ...]  # cumulative starts plus the total

    def samples(self):
        return list(zip(self.times.tolist(), self.values.tolist()))


def atom_value(decl: AtomicShapeDecl, valuation: dict[str, float], t: float) -> float:
    """Value of one atom at local time t."""
    p = [valuation[name] for name in decl.params]
    if decl.kind == "lin":
        a, b = p
        return a * t + b
    if decl.kind == "exp":
        a, b, c = p
        try:
            return a + b * math.exp(c * t)
        except OverflowError:
            return math.inf if b > 0 else -math.inf
    if decl.kind == "sin":
        a, b, c, e = p
        return a * math.sin(b * t + c) + e
    raise RenderError(f"unknown shape kind {decl.kind!r}")


def _atom_end_value(decl: AtomicShapeDecl, valuation: dict[str, float]) -> float:
    return atom_value(decl, valuation, valuation[decl.duration_param])


def _durations(decls: dict[str, AtomicShapeDecl], word, valuation) -> list[Fraction]:
    out = []
    for name in word:
        decl = decls[name]
        d = valuation[decl.duration_param]
        if not (d > 0):
            raise RenderError(f"nonpositive duration {decl.duration_param} = {d:g} "
                              f"for atom {name}")
        out.append(Fraction(d))
    return out


def render(decls: dict[str, AtomicShapeDecl], word, valuation: dict[str, float],
           dt: float = 0.01, variable: str = "x") -> Signal:
    """Sample the piecewise signal of a word on [0, total duration).

    The grid steps by dt from 0; segment boundaries are inserted as
    sample times even when off-grid.  A sample exactly on a boundary
    belongs to the following segment.
    """
    if dt <= 0:
        raise RenderError(f"dt must be positive, got {dt}")
    atoms = tuple(word.atoms if isinstance(word, ShapeWord) else word)
    durs = _durations(decls, atoms, valuation)
    starts: list[Fraction] = [Fraction(0)]
    for d in durs:
        starts.append(starts[-1] + d)
    total = starts[-1]

    dt_f = Fraction(dt)
    grid: set[Fraction] = set()
    k = 0
    while k * dt_f < total:
        grid.add(k * dt_f)
        k += 1
    grid.update(b for b in starts[:-1])
    times = sorted(grid)

    t_out = np.empty(len(times))
    v_out = np.empty(len(times))
    for i, t in enumerate(times):
        seg = bisect_right(starts, t) - 1
        local = float(t - starts[seg])
        t_out[i] = float(t)
        v_out[i] = atom_value(decls[atoms[seg]], valuation, local)
    return Signal(variable, t_out, v_out, float(total),
                  tuple(float(b) for b in starts))


def boundary_jumps(decls: dict[str, AtomicShapeDecl], word,
                   valuation: dict[str, float]) -> list[float]:
    """|end of segment i - start of segment i+1| at each internal boundary."""
    atoms = tuple(word.atoms if isinstance(word, ShapeWord) else word)
    jumps = []
    for a, b in zip(atoms, atoms[1:]):
        end = _atom_end_value(decls[a], valuation)
        start = atom_value(decls[b], valuation, 0.0)
        jumps.append(abs(end - start))
    return jumps


# parameter that shifts the atom's value additively, per kind
_OFFSET_INDEX = {"lin": 1, "exp": 0, "sin": 3}


def project_continuity(decls: dict[str, AtomicShapeDecl], word,
                       valuation: dict[str, float]) -> dict[str, float]:
    """Copy of the valuation with dependent offsets rewritten so
    segments start exactly where their predecessors ended.

    Offsets are assigned left to right, first boundary wins.  An offset
    that already parameterizes an earlier segment is left untouched:
    with shared parameters a repeated atom renders identically on every
    occurrence, so rewriting it would break joins that are already laid
    down.  Such cyclic joins keep their epsilon-loose residual.
    """
    atoms = tuple(word.atoms if isinstance(word, ShapeWord) else word)
    v = dict(valuation)
    assigned: set[str] = set()
    consumed: set[str] = set(decls[atoms[0]].all_params) if atoms else set()
    for a, b in zip(atoms, atoms[1:]):
        end = _atom_end_value(decls[a], v)
        decl = decls[b]
        off = decl.params[_OFFSET_INDEX[decl.kind]]
        if off not in assigned and off not in consumed:
            if decl.kind == "lin":
                v[off] = end
            elif decl.kind == "exp":
                v[off] = end - v[decl.params[1]]
            else:  # sin: a*sin(b*0 + c) + e == end
                v[off] = end - v[decl.params[0]] * math.sin(v[decl.params[2]])
            assigned.add(off)
        consumed.update(decl.all_params)
    return v


def to_csv(signal: Signal) -> str:
    """CSV text: header `t,<variable>`, times to 9 significant digits,
    values at full precision."""
    buf = io.StringIO()
    buf.write(f"t,{signal.variable}\n")
    for t, v in zip(signal.times, signal.values):
        buf.write(f"{float(t):.9g},{float(v)!r}\n")
    return buf.getvalue()


def to_json(signal: Signal, word=None, valuation: dict[str, float] | None = None) -> str:
    """JSON alternative to the CSV format: the samples plus, when
    given, the word and valuation that produced them."""
    doc = {
        "variable": signal.variable,
        "total_duration": signal.total_duration,
        "segment_boundaries": list(signal.segment_boundaries),
        "samples": [[float(t), float(v)] for t, v in
                    zip(signal.times, signal.values)],
    }
    if word is not None:
        doc["word"] = list(word.atoms if isinstance(word, ShapeWord) else word)
    if valuation is not None:
        doc["valuation"] = dict(valuation)
    return json.dumps(doc)
