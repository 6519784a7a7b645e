"""Compiling constraints into executable parameter spaces.

A compiled space carries the free dimensions, their bounding box, a
fast membership predicate for the epsilon-relaxed constraint, the
pinned (constant-eliminated) parameters, and a violation penalty used
by the initializer.
"""

from __future__ import annotations

import math

import numpy as np

from .sexpr import (
    Add, And, ArithExpr, Cmp, Const, ConstraintExpr, ExpFn, In, Mul, Neg,
    Or, Param, Pow, ShapeExpr, Sub,
)

__all__ = ["ParamSpace", "CompileError", "compile_constraint", "compile_spec"]

DEFAULT_EPS = 1e-3


class CompileError(ValueError):
    pass


def _exp(x: float) -> float:
    # overflow saturates so membership stays total
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Arithmetic helpers: substitution, folding, evaluation, intervals, codegen
# ---------------------------------------------------------------------------

def _subst(e: ArithExpr, pins: dict[str, float]) -> ArithExpr:
    if isinstance(e, Const):
        return e
    if isinstance(e, Param):
        return Const(pins[e.name]) if e.name in pins else e
    if isinstance(e, Add):
        return Add(_subst(e.left, pins), _subst(e.right, pins))
    if isinstance(e, Sub):
        return Sub(_subst(e.left, pins), _subst(e.right, pins))
    if isinstance(e, Mul):
        return Mul(_subst(e.left, pins), _subst(e.right, pins))
    if isinstance(e, Neg):
        return Neg(_subst(e.operand, pins))
    if isinstance(e, Pow):
        return Pow(_subst(e.base, pins), e.exponent)
    if isinstance(e, ExpFn):
        return ExpFn(_subst(e.operand, pins))
    raise TypeError(f"not an arithmetic node: {e!r}")


def _fold(e: ArithExpr) -> ArithExpr:
    """Constant folding with zero/one elimination; enables pin cascades."""
    if isinstance(e, (Const, Param)):
        return e
    if isinstance(e, Add):
        l, r = _fold(e.left), _fold(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value + r.value)
        if isinstance(l, Const) and l.value == 0:
            return r
        if isinstance(r, Const) and r.value == 0:
            return l
        return Add(l, r)
    if isinstance(e, Sub):
        l, r = _fold(e.left), _fold(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value - r.value)
        if isinstance(r, Const) and r.value == 0:
            return l
        return Sub(l, r)
    if isinstance(e, Mul):
        l, r = _fold(e.left), _fold(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value * r.value)
        if (isinstance(l, Const) and l.value == 0) or (isinstance(r, Const) and r.value == 0):
            return Const(0.0)
        if isinstance(l, Const) and l.value == 1:
            return r
        if isinstance(r, Const) and r.value == 1:
            return l
        return Mul(l, r)
    if isinstance(e, Neg):
        x = _fold(e.operand)
        if isinstance(x, Const):
            return Const(-x.value)
        if isinstance(x, Neg):
            return x.operand
        return Neg(x)
    if isinstance(e, Pow):
        b = _fold(e.base)
        if e.exponent == 0:
            return Const(1.0)
        if e.exponent == 1:
            return b
        if isinstance(b, Const):
            return Const(b.value ** e.exponent)
        return Pow(b, e.exponent)
    if isinstance(e, ExpFn):
        x = _fold(e.operand)
        if isinstance(x, Const):
            return Const(_exp(x.value))
        return ExpFn(x)
    raise TypeError(f"not an arithmetic node: {e!r}")


def _arith_eval(e: ArithExpr, env: dict[str, float]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Param):
        return env[e.name]
    if isinstance(e, Add):
        return _arith_eval(e.left, env) + _arith_eval(e.right, env)
    if isinstance(e, Sub):
        return _arith_eval(e.left, env) - _arith_eval(e.right, env)
    if isinstance(e, Mul):
        return _arith_eval(e.left, env) * _arith_eval(e.right, env)
    if isinstance(e, Neg):
        return -_arith_eval(e.operand, env)
    if isinstance(e, Pow):
        return _arith_eval(e.base, env) ** e.exponent
    if isinstance(e, ExpFn):
        return _exp(_arith_eval(e.operand, env))
    raise TypeError(f"not an arithmetic node: {e!r}")


def _arith_params(e: ArithExpr, out: set[str]):
    if isinstance(e, Param):
        out.add(e.name)
    elif isinstance(e, (Add, Sub, Mul)):
        _arith_params(e.left, out)
        _arith_params(e.right, out)
    elif isinstance(e, (Neg, ExpFn)):
        _arith_params(e.operand, out)
    elif isinstance(e, Pow):
        _arith_params(e.base, out)


def _interval(e: ArithExpr, boxes: dict[str, tuple[float, float]]) -> tuple[float, float]:
    """Conservative range of the expression over the given boxes."""
    if isinstance(e, Const):
        return e.value, e.value
    if isinstance(e, Param):
        return boxes[e.name]
    if isinstance(e, Add):
        a, b = _interval(e.left, boxes)
        c, d = _interval(e.right, boxes)
        return a + c, b + d
    if isinstance(e, Sub):
        a, b = _interval(e.left, boxes)
        c, d = _interval(e.right, boxes)
        return a - d, b - c
    if isinstance(e, Mul):
        a, b = _interval(e.left, boxes)
        c, d = _interval(e.right, boxes)
        prods = (a * c, a * d, b * c, b * d)
        return min(prods), max(prods)
    if isinstance(e, Neg):
        a, b = _interval(e.operand, boxes)
        return -b, -a
    if isinstance(e, Pow):
        a, b = _interval(e.base, boxes)
        k = e.exponent
        if k % 2 == 1 or a >= 0:
            return a ** k, b ** k
        if b <= 0:
            return b ** k, a ** k
        return 0.0, max(a ** k, b ** k)
    if isinstance(e, ExpFn):
        a, b = _interval(e.operand, boxes)
        return _exp(a), _exp(b)
    raise TypeError(f"not an arithmetic node: {e!r}")


def _gen_arith(e: ArithExpr, index: dict[str, int]) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Param):
        return f"x{index[e.name]}"
    if isinstance(e, Add):
        return f"({_gen_arith(e.left, index)} + {_gen_arith(e.right, index)})"
    if isinstance(e, Sub):
        return f"({_gen_arith(e.left, index)} - {_gen_arith(e.right, index)})"
    if isinstance(e, Mul):
        return f"({_gen_arith(e.left, index)} * {_gen_arith(e.right, index)})"
    if isinstance(e, Neg):
        return f"(-{_gen_arith(e.operand, index)})"
    if isinstance(e, Pow):
        return f"({_gen_arith(e.base, index)} ** {e.exponent})"
    if isinstance(e, ExpFn):
        return f"_exp({_gen_arith(e.operand, index)})"
    raise TypeError(f"not an arithmetic node: {e!r}")


def _gen_pred(c: ConstraintExpr, index: dict[str, int]) -> str:
    if isinstance(c, And):
        return "(" + " and ".join(_gen_pred(t, index) for t in c.terms) + ")"
    if isinstance(c, Or):
        return "(" + " or ".join(_gen_pred(t, index) for t in c.terms) + ")"
    if isinstance(c, Cmp):
        return f"({_gen_arith(c.lhs, index)} {c.op} {_gen_arith(c.rhs, index)})"
    if isinstance(c, In):
        x = f"x{index[c.param]}"
        return f"({c.lo!r} < {x} < {c.hi!r})"
    raise TypeError(f"not a constraint node: {c!r}")


# ---------------------------------------------------------------------------
# Constraint-tree transforms
# ---------------------------------------------------------------------------

def _conjuncts(c: ConstraintExpr) -> list[ConstraintExpr]:
    if isinstance(c, And):
        out: list[ConstraintExpr] = []
        for t in c.terms:
            out.extend(_conjuncts(t))
        return out
    return [c]


def _transform(c: ConstraintExpr, pins: dict[str, float], eps: float) -> ConstraintExpr | None:
    """Substitute pins, fold, relax equalities; None when trivially true."""
    if isinstance(c, (And, Or)):
        kids = [_transform(t, pins, eps) for t in c.terms]
        if isinstance(c, And):
            kept = tuple(k for k in kids if k is not None)
            if not kept:
                return None
            return kept[0] if len(kept) == 1 else And(kept)
        if any(k is None for k in kids):  # a true branch makes the Or true
            return None
        return Or(tuple(kids))
    if isinstance(c, In):
        if c.param in pins:
            v = pins[c.param]
            if not (c.lo < v < c.hi):
                raise CompileError(
                    f"pinned {c.param} = {v:g} lies outside its interval "
                    f"({c.lo:g}, {c.hi:g})")
            return None
        return c
    if isinstance(c, Cmp):
        lhs = _fold(_subst(c.lhs, pins))
        rhs = _fold(_subst(c.rhs, pins))
        if isinstance(lhs, Const) and isinstance(rhs, Const):
            ok = {"<": lhs.value < rhs.value, "<=": lhs.value <= rhs.value,
                  ">": lhs.value > rhs.value, ">=": lhs.value >= rhs.value,
                  "==": abs(lhs.value - rhs.value) < eps}[c.op]
            if not ok:
                raise CompileError(
                    f"constraint {c.op} between constants "
                    f"{lhs.value:g} and {rhs.value:g} is unsatisfiable")
            return None
        if c.op == "==":
            diff = _fold(Sub(lhs, rhs))
            return And((Cmp("<", diff, Const(eps)),
                        Cmp("<", _fold(Neg(diff)), Const(eps))))
        return Cmp(c.op, lhs, rhs)
    raise TypeError(f"not a constraint node: {c!r}")


def _collect_pins(gamma: ConstraintExpr, eps: float) -> dict[str, float]:
    """Fixpoint of `p == const` elimination over top-level conjuncts.

    Substituting known pins can turn further equalities constant
    (e.g. b4 == a3*d3 + b3 once a3 and b3 are pinned), so iterate.
    """
    pins: dict[str, float] = {}
    eqs = [c for c in _conjuncts(gamma) if isinstance(c, Cmp) and c.op == "=="]
    changed = True
    while changed:
        changed = False
        for eq in eqs:
            lhs = _fold(_subst(eq.lhs, pins))
            rhs = _fold(_subst(eq.rhs, pins))
            if isinstance(rhs, Param) and isinstance(lhs, Const):
                lhs, rhs = rhs, lhs
            if isinstance(lhs, Param) and isinstance(rhs, Const):
                if lhs.name in pins:
                    if pins[lhs.name] != rhs.value:
                        raise CompileError(
                            f"contradictory pins: {lhs.name} == {pins[lhs.name]:g} "
                            f"and {lhs.name} == {rhs.value:g}")
                    continue
                pins[lhs.name] = rhs.value
                changed = True
            elif isinstance(lhs, Const) and isinstance(rhs, Const):
                if lhs.value != rhs.value and abs(lhs.value - rhs.value) >= eps:
                    raise CompileError(
                        f"contradictory pins: an equality reduces to "
                        f"{lhs.value:g} == {rhs.value:g}")
    return pins


# ---------------------------------------------------------------------------
# ParamSpace
# ---------------------------------------------------------------------------

class ParamSpace:
    """Executable description of the relaxed constraint set.

    Immutable after compilation; membership and penalty may be called
    concurrently.  Valuations are arrays over the free dimensions in
    ``dims`` order.
    """

    def __init__(self, dims, lo, hi, pinned, epsilon, relaxed, gamma, params):
        self.dims: tuple[str, ...] = tuple(dims)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.pinned: dict[str, float] = dict(pinned)
        self.epsilon = float(epsilon)
        self.relaxed: ConstraintExpr | None = relaxed
        self.gamma: ConstraintExpr | None = gamma
        self.params: tuple[str, ...] = tuple(params)
        self._pred = self._compile_pred()

    @property
    def ndim(self) -> int:
        return len(self.dims)

    def _compile_pred(self):
        index = {name: i for i, name in enumerate(self.dims)}
        body = "True" if self.relaxed is None else _gen_pred(self.relaxed, index)
        unpack = "".join(f"    x{i} = v[{i}]\n" for i in range(len(self.dims)))
        src = f"def _pred(v):\n{unpack}    return {body}\n"
        ns: dict = {"_exp": _exp}
        exec(src, ns)
        return ns["_pred"]

    def _check_dim(self, v):
        if len(v) != len(self.dims):
            raise ValueError(f"valuation has {len(v)} values, space has "
                             f"{len(self.dims)} dimensions")

    def contains(self, v) -> bool:
        """Relaxed-constraint membership; total on numeric input."""
        self._check_dim(v)
        return bool(self._pred(v))

    def penalty(self, v) -> float:
        """0 iff the point is a member; otherwise the summed violation
        margins (Or blocks contribute their best branch)."""
        self._check_dim(v)
        env = {name: float(v[i]) for i, name in enumerate(self.dims)}

        def go(c: ConstraintExpr) -> float:
            if isinstance(c, And):
                return sum(go(t) for t in c.terms)
            if isinstance(c, Or):
                return min(go(t) for t in c.terms)
            if isinstance(c, Cmp):
                l = _arith_eval(c.lhs, env)
                r = _arith_eval(c.rhs, env)
                m = l - r if c.op in ("<", "<=") else r - l
                if math.isnan(m):
                    return math.inf
                return max(0.0, m)
            if isinstance(c, In):
                p = env[c.param]
                if math.isnan(p):
                    return math.inf
                return max(0.0, c.lo - p, p - c.hi)
            raise TypeError(f"not a constraint node: {c!r}")

        return 0.0 if self.relaxed is None else go(self.relaxed)

    def reinstate(self, v) -> dict[str, float]:
        """Full valuation over the original parameters, pins included."""
        self._check_dim(v)
        free = {name: float(v[i]) for i, name in enumerate(self.dims)}
        out: dict[str, float] = {}
        for p in self.params:
            if p in self.pinned:
                out[p] = self.pinned[p]
            else:
                out[p] = free[p]
        return out

    def sample_box(self, rng, n: int = 1) -> np.ndarray:
        """Uniform draws from the bounding box, shape (n, ndim)."""
        return rng.uniform(self.lo, self.hi, size=(n, len(self.dims)))


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

def _param_order(gamma: ConstraintExpr) -> tuple[str, ...]:
    seen: dict[str, None] = {}

    def arith(e: ArithExpr):
        if isinstance(e, Param):
            seen.setdefault(e.name)
        elif isinstance(e, (Add, Sub, Mul)):
            arith(e.left)
            arith(e.right)
        elif isinstance(e, (Neg, ExpFn)):
            arith(e.operand)
        elif isinstance(e, Pow):
            arith(e.base)

    def walk(c: ConstraintExpr):
        if isinstance(c, (And, Or)):
            for t in c.terms:
                walk(t)
        elif isinstance(c, Cmp):
            arith(c.lhs)
            arith(c.rhs)
        elif isinstance(c, In):
            seen.setdefault(c.param)

    walk(gamma)
    return tuple(seen)


def compile_constraint(gamma: ConstraintExpr, eps: float = DEFAULT_EPS,
                       params=None, pin_constants: bool = True) -> ParamSpace:
    """Compile a constraint into a ParamSpace.

    `p == const` conjuncts (including ones that become constant once
    other pins are substituted) eliminate dimensions; all remaining
    equalities are relaxed to open bands of half-width eps.  Every free
    parameter must end up with finite bounds, either from interval
    clauses or propagated through a relaxed `p == expr` equality.
    """
    if eps <= 0:
        raise CompileError(f"epsilon must be positive, got {eps}")
    universe = tuple(params) if params is not None else _param_order(gamma)
    pins = _collect_pins(gamma, eps) if pin_constants else {}
    relaxed = _transform(gamma, pins, eps)
    free = tuple(p for p in universe if p not in pins)
    if relaxed is not None:
        unknown = set(_param_order(relaxed)) - set(free)
        if unknown:
            raise CompileError(
                f"constraint references parameters outside the space: "
                f"{', '.join(sorted(unknown))}")
    space_pins = {p: v for p, v in pins.items() if p in set(universe)}

    # box: intersection of top-level interval clauses, then interval
    # propagation through relaxed equalities for derived parameters
    boxes: dict[str, tuple[float, float]] = {}
    for c in _conjuncts(gamma):
        if isinstance(c, In) and c.param not in pins:
            lo, hi = c.lo, c.hi
            if c.param in boxes:
                plo, phi = boxes[c.param]
                lo, hi = max(lo, plo), min(hi, phi)
            boxes[c.param] = (lo, hi)
    eq_conjuncts = [c for c in _conjuncts(gamma) if isinstance(c, Cmp) and c.op == "=="]
    changed = True
    while changed:
        changed = False
        for eq in eq_conjuncts:
            lhs = _fold(_subst(eq.lhs, pins))
            rhs = _fold(_subst(eq.rhs, pins))
            if isinstance(rhs, Param) and not isinstance(lhs, Param):
                lhs, rhs = rhs, lhs
            if not isinstance(lhs, Param) or lhs.name in pins or lhs.name in boxes:
                continue
            deps: set[str] = set()
            _arith_params(rhs, deps)
            if deps <= boxes.keys():
                lo, hi = _interval(rhs, boxes)
                boxes[lhs.name] = (lo - eps, hi + eps)
                changed = True

    lo_list, hi_list = [], []
    for p in free:
        if p not in boxes:
            raise CompileError(f"unbounded parameter {p!r}: no interval clause "
                               "and no bounds derivable from equalities")
        lo, hi = boxes[p]
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise CompileError(f"empty or unbounded box for {p!r}: ({lo:g}, {hi:g})")
        lo_list.append(lo)
        hi_list.append(hi)

    return ParamSpace(free, lo_list, hi_list, space_pins, eps, relaxed, gamma, universe)


def compile_spec(spec: ShapeExpr, eps: float = DEFAULT_EPS) -> ParamSpace:
    """Compile a parsed spec's constraint over its regex-reachable parameters."""
    universe = spec.used_params()
    if spec.constraint is None:
        if universe:
            raise CompileError("spec has parameters but no constraint block")
        return ParamSpace((), [], [], {}, eps, None, None, ())
    return compile_constraint(spec.constraint, eps, params=universe)
