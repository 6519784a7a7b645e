"""Regular-language machinery over atom alphabets.

Builds the position (Glushkov) automaton of a regex and uses it for
word membership, per-length word counting, bounded enumeration,
ambiguity detection via the squared product automaton, and
disambiguation via subset construction followed by state elimination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .sexpr import (
    Atom, Concat, Epsilon, RegexNode, Star, Union, nullable, EPSILON,
    format_regex,
)

__all__ = [
    "PositionAutomaton", "AmbiguityReport", "DisambiguationError",
    "build_automaton", "matches", "count_words_by_length", "enumerate_words",
    "count_derivations", "check_ambiguity", "disambiguate",
    "subexpressions", "regex_size", "min_word_length",
]


class DisambiguationError(RuntimeError):
    """State elimination exceeded the configured node budget."""


@dataclass(frozen=True)
class AmbiguityReport:
    ambiguous: bool
    witness: tuple[str, ...] | None = None


def subexpressions(node: RegexNode) -> list[RegexNode]:
    """All distinct subexpression objects (by identity), parents last."""
    seen: dict[int, RegexNode] = {}

    def walk(n: RegexNode):
        if id(n) in seen:
            return
        if isinstance(n, (Union, Concat)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Star):
            walk(n.inner)
        seen[id(n)] = n

    walk(node)
    return list(seen.values())


def regex_size(node: RegexNode) -> int:
    """Number of AST nodes, counting shared subtrees once per occurrence."""
    if isinstance(node, (Epsilon, Atom)):
        return 1
    if isinstance(node, (Union, Concat)):
        return 1 + regex_size(node.left) + regex_size(node.right)
    if isinstance(node, Star):
        return 1 + regex_size(node.inner)
    raise TypeError(f"not a regex node: {node!r}")


def min_word_length(node: RegexNode) -> int:
    if isinstance(node, Epsilon):
        return 0
    if isinstance(node, Atom):
        return 1
    if isinstance(node, Union):
        return min(min_word_length(node.left), min_word_length(node.right))
    if isinstance(node, Concat):
        return min_word_length(node.left) + min_word_length(node.right)
    if isinstance(node, Star):
        return 0
    raise TypeError(f"not a regex node: {node!r}")


# ---------------------------------------------------------------------------
# Position automaton
# ---------------------------------------------------------------------------

@dataclass
class PositionAutomaton:
    """Glushkov NFA: state 0 is initial, states 1..n are atom positions."""
    symbols: tuple[str, ...]            # symbols[p-1] = atom name of position p
    transitions: dict[int, dict[str, frozenset[int]]]
    accepting: frozenset[int]
    alphabet: tuple[str, ...]

    def step(self, states: frozenset[int], symbol: str) -> frozenset[int]:
        out: set[int] = set()
        for q in states:
            out |= self.transitions.get(q, {}).get(symbol, frozenset())
        return frozenset(out)


def build_automaton(regex: RegexNode) -> PositionAutomaton:
    positions: list[str] = []       # index p-1 -> atom name
    follow: dict[int, set[int]] = {}

    def build(n: RegexNode) -> tuple[bool, frozenset[int], frozenset[int]]:
        # returns (nullable, first, last)
        if isinstance(n, Epsilon):
            return True, frozenset(), frozenset()
        if isinstance(n, Atom):
            positions.append(n.name)
            p = len(positions)
            follow.setdefault(p, set())
            return False, frozenset([p]), frozenset([p])
        if isinstance(n, Union):
            n1, f1, l1 = build(n.left)
            n2, f2, l2 = build(n.right)
            return n1 or n2, f1 | f2, l1 | l2
        if isinstance(n, Concat):
            n1, f1, l1 = build(n.left)
            n2, f2, l2 = build(n.right)
            for p in l1:
                follow[p] |= f2
            first = f1 | f2 if n1 else f1
            last = l1 | l2 if n2 else l2
            return n1 and n2, first, last
        if isinstance(n, Star):
            _, f0, l0 = build(n.inner)
            for p in l0:
                follow[p] |= f0
            return True, f0, l0
        raise TypeError(f"not a regex node: {n!r}")

    null, first, last = build(regex)
    transitions: dict[int, dict[str, frozenset[int]]] = {}

    def add(src: int, targets):
        by_sym: dict[str, set[int]] = {}
        for p in targets:
            by_sym.setdefault(positions[p - 1], set()).add(p)
        transitions[src] = {a: frozenset(s) for a, s in by_sym.items()}

    add(0, first)
    for q, targets in follow.items():
        add(q, targets)
    accepting = set(last)
    if null:
        accepting.add(0)
    alphabet = tuple(dict.fromkeys(positions))
    return PositionAutomaton(tuple(positions), transitions, frozenset(accepting), alphabet)


def matches(regex: RegexNode, word) -> bool:
    """True iff the sequence of atom names is in the regex's language."""
    nfa = build_automaton(regex)
    cur = frozenset([0])
    for a in word:
        cur = nfa.step(cur, a)
        if not cur:
            return False
    return bool(cur & nfa.accepting)


def count_words_by_length(regex: RegexNode, max_len: int) -> list[int]:
    """Exact number of language words per length 0..max_len.

    Counts paths of the subset-constructed DFA, so it is independent of
    any generating-function arithmetic.
    """
    nfa = build_automaton(regex)
    start = frozenset([0])
    # discover reachable subsets
    states = {start: 0}
    trans: list[dict[str, int]] = [{}]
    queue = deque([start])
    while queue:
        s = queue.popleft()
        row = trans[states[s]]
        for a in nfa.alphabet:
            t = nfa.step(s, a)
            if not t:
                continue
            if t not in states:
                states[t] = len(states)
                trans.append({})
                queue.append(t)
            row[a] = states[t]
    accept = [bool(s & nfa.accepting) for s in states]
    counts = [0] * (max_len + 1)
    vec = {0: 1}
    counts[0] = int(accept[0])
    for n in range(1, max_len + 1):
        nxt: dict[int, int] = {}
        for q, c in vec.items():
            for t in trans[q].values():
                nxt[t] = nxt.get(t, 0) + c
        vec = nxt
        counts[n] = sum(c for q, c in vec.items() if accept[q])
    return counts


def enumerate_words(regex: RegexNode, max_len: int) -> list[tuple[str, ...]]:
    """All language words of length <= max_len, shortest first.

    Intended for small languages (oracles, uniformity null sets); the
    result grows with the language, not the automaton.
    """
    nfa = build_automaton(regex)
    start = frozenset([0])
    out: list[tuple[str, ...]] = []
    layer: dict[frozenset[int], list[tuple[str, ...]]] = {start: [()]}
    if start & nfa.accepting:
        out.append(())
    for _ in range(max_len):
        nxt: dict[frozenset[int], list[tuple[str, ...]]] = {}
        for s, words in layer.items():
            for a in nfa.alphabet:
                t = nfa.step(s, a)
                if not t:
                    continue
                bucket = nxt.setdefault(t, [])
                bucket.extend(w + (a,) for w in words)
        layer = nxt
        for s, words in layer.items():
            if s & nfa.accepting:
                out.extend(words)
    out.sort(key=lambda w: (len(w), w))
    return out


def count_derivations(regex: RegexNode, word) -> int:
    """Number of distinct parse derivations of the word.

    Dynamic program over (subexpression, span).  A star whose body can
    derive the empty word admits infinitely many derivations of any of
    its words; that case raises ValueError.
    """
    w = tuple(word)
    memo: dict[tuple[int, int, int], int] = {}

    def go(n: RegexNode, i: int, j: int) -> int:
        key = (id(n), i, j)
        if key in memo:
            return memo[key]
        if isinstance(n, Epsilon):
            r = 1 if i == j else 0
        elif isinstance(n, Atom):
            r = 1 if j == i + 1 and w[i] == n.name else 0
        elif isinstance(n, Union):
            r = go(n.left, i, j) + go(n.right, i, j)
        elif isinstance(n, Concat):
            r = sum(go(n.left, i, k) * go(n.right, k, j) for k in range(i, j + 1))
        elif isinstance(n, Star):
            if nullable(n.inner):
                raise ValueError("star of a nullable expression has unbounded derivation counts")
            if i == j:
                r = 1
            else:
                # first iteration consumes a nonempty prefix
                r = sum(go(n.inner, i, k) * go(n, k, j) for k in range(i + 1, j + 1))
        else:
            raise TypeError(f"not a regex node: {n!r}")
        memo[key] = r
        return r

    return go(regex, 0, len(w))


# ---------------------------------------------------------------------------
# Ambiguity
# ---------------------------------------------------------------------------

def _epsilon_multiplicity(n: RegexNode) -> int:
    """Number of derivations of the empty word; 2 stands for 'at least 2'."""
    if isinstance(n, Epsilon):
        return 1
    if isinstance(n, Atom):
        return 0
    if isinstance(n, Union):
        return min(2, _epsilon_multiplicity(n.left) + _epsilon_multiplicity(n.right))
    if isinstance(n, Concat):
        return min(2, _epsilon_multiplicity(n.left) * _epsilon_multiplicity(n.right))
    if isinstance(n, Star):
        # zero iterations, plus one empty iteration per empty-word derivation
        # of the body
        return 2 if _epsilon_multiplicity(n.inner) > 0 else 1
    raise TypeError(f"not a regex node: {n!r}")


def _product_witness(nfa: PositionAutomaton) -> tuple[str, ...] | None:
    """Shortest word with two distinct accepting runs, else None."""
    start = (0, 0, False)
    parents: dict[tuple[int, int, bool], tuple[tuple[int, int, bool], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        p, q, flagged = state
        succ_p = nfa.transitions.get(p, {})
        succ_q = nfa.transitions.get(q, {})
        for a in succ_p.keys() & succ_q.keys():
            for p2 in succ_p[a]:
                for q2 in succ_q[a]:
                    f2 = flagged or (p2 != q2)
                    # order-normalize so (p,q) and (q,p) are one state
                    nxt = (min(p2, q2), max(p2, q2), f2)
                    if nxt in parents:
                        continue
                    parents[nxt] = (state, a)
                    if f2 and p2 in nfa.accepting and q2 in nfa.accepting:
                        word: list[str] = [a]
                        cur = state
                        while parents[cur] is not None:
                            cur, sym = parents[cur]
                            word.append(sym)
                        word.reverse()
                        return tuple(word)
                    queue.append(nxt)
    return None


def check_ambiguity(regex: RegexNode) -> AmbiguityReport:
    """Decide ambiguity; if ambiguous, return a shortest witness word.

    Two distinct parse derivations either use different atom positions
    (caught by the squared position automaton) or differ only in how
    some subexpression derives the empty word (caught by the
    epsilon-multiplicity scan).
    """
    eps_ambiguous = any(_epsilon_multiplicity(s) >= 2 for s in subexpressions(regex))
    nfa = build_automaton(regex)
    weak = _product_witness(nfa)
    if not eps_ambiguous:
        return AmbiguityReport(weak is not None, weak)
    # An epsilon-level witness can be shorter than the positional one;
    # search words by increasing length and count derivations exactly.
    cap = len(nfa.symbols) + 1
    if weak is not None:
        cap = min(cap, len(weak))
    for w in enumerate_words(regex, cap):
        try:
            if count_derivations(regex, w) >= 2:
                return AmbiguityReport(True, w)
        except ValueError:
            # nullable star body: any word it derives is a witness
            return AmbiguityReport(True, w)
    return AmbiguityReport(True, weak)


# ---------------------------------------------------------------------------
# Disambiguation: subset construction + state elimination
# ---------------------------------------------------------------------------

def _simp_concat(a: RegexNode | None, b: RegexNode | None) -> RegexNode | None:
    if a is None or b is None:
        return None
    if isinstance(a, Epsilon):
        return b
    if isinstance(b, Epsilon):
        return a
    return Concat(a, b)


def _simp_union(a: RegexNode | None, b: RegexNode | None) -> RegexNode | None:
    if a is None:
        return b
    if b is None:
        return a
    if a == b:
        return a
    return Union(a, b)


def disambiguate(regex: RegexNode, max_nodes: int = 10_000) -> RegexNode:
    """Language-equal, certified-unambiguous rewrite of the regex.

    The position automaton is determinized and converted back by state
    elimination; each word then corresponds to exactly one DFA path, so
    the resulting expression is unambiguous.  Raises
    DisambiguationError when intermediate expressions exceed max_nodes
    (state elimination can blow up; rewrite the spec by hand instead).
    """
    nfa = build_automaton(regex)
    start = frozenset([0])
    subsets = {start: 0}
    dfa_trans: list[dict[str, int]] = [{}]
    queue = deque([start])
    while queue:
        s = queue.popleft()
        row = dfa_trans[subsets[s]]
        for a in nfa.alphabet:
            t = nfa.step(s, a)
            if not t:
                continue
            if t not in subsets:
                subsets[t] = len(subsets)
                dfa_trans.append({})
                queue.append(t)
            row[a] = subsets[t]
    accepting = {i for s, i in subsets.items() if s & nfa.accepting}

    # prune states that cannot reach acceptance
    n_states = len(dfa_trans)
    rev: dict[int, set[int]] = {i: set() for i in range(n_states)}
    for i, row in enumerate(dfa_trans):
        for t in row.values():
            rev[t].add(i)
    live = set(accepting)
    queue = deque(accepting)
    while queue:
        q = queue.popleft()
        for p in rev[q]:
            if p not in live:
                live.add(p)
                queue.append(p)
    if 0 not in live:
        raise ValueError("regex denotes the empty language; nothing to disambiguate")

    # generalized NFA arcs: (src, dst) -> regex; virtual INIT=-1, FINAL=-2
    INIT, FINAL = -1, -2
    arcs: dict[tuple[int, int], RegexNode] = {(INIT, 0): EPSILON}
    for i, row in enumerate(dfa_trans):
        if i not in live:
            continue
        for a, t in row.items():
            if t not in live:
                continue
            key = (i, t)
            arcs[key] = _simp_union(arcs.get(key), Atom(a))
    for i in accepting:
        arcs[(i, FINAL)] = EPSILON

    def total_nodes() -> int:
        return sum(regex_size(r) for r in arcs.values())

    remaining = [i for i in range(n_states) if i in live]
    while remaining:
        # cheapest state first: fewest in*out arc pairs
        def cost(q: int) -> int:
            ins = sum(1 for (s, t) in arcs if t == q and s != q)
            outs = sum(1 for (s, t) in arcs if s == q and t != q)
            return ins * outs
        q = min(remaining, key=cost)
        remaining.remove(q)
        self_loop = arcs.pop((q, q), None)
        loop_star = Star(self_loop) if self_loop is not None else None
        ins = [(s, r) for (s, t), r in arcs.items() if t == q]
        outs = [(t, r) for (s, t), r in arcs.items() if s == q]
        for (s, _) in ins:
            del arcs[(s, q)]
        for (t, _) in outs:
            del arcs[(q, t)]
        for s, rin in ins:
            for t, rout in outs:
                middle = rin if loop_star is None else _simp_concat(rin, loop_star)
                piece = _simp_concat(middle, rout)
                key = (s, t)
                arcs[key] = _simp_union(arcs.get(key), piece)
        if total_nodes() > max_nodes:
            raise DisambiguationError(
                f"state elimination exceeded {max_nodes} nodes; "
                "rewrite the expression unambiguously by hand")

    result = arcs.get((INIT, FINAL))
    if result is None:
        raise ValueError("regex denotes the empty language; nothing to disambiguate")
    report = check_ambiguity(result)
    if report.ambiguous:  # unreachable for a DFA-derived expression
        raise AssertionError(
            f"disambiguation produced an ambiguous result: {format_regex(result)}")
    return result
