"""Shape-expression text format: AST types, parser, and printer.

A spec file declares named atomic shapes (linear, exponential and
sinusoid segments, each with a duration), a regular expression over
those names, and one global constraint on the shape parameters:

    shape A = lin(a1, b1, d1);          # value(t) = a1*t + b1 on [0, d1)
    shape B = exp(a2, b2, c2, d2);      # value(t) = a2 + b2*exp(c2*t)
    shape S = sin(a3, b3, c3, e3, d3);  # value(t) = a3*sin(b3*t + c3) + e3
    expr = (A . B)* . A | A;
    constraint = a1 == 0 && b1 in (4, 10) && b2 == a1*d1 + b1;

``.`` is concatenation, ``|`` union, ``*`` star, ``+`` plus (sugar for
``x . x*``), ``eps`` the empty word.  Precedence: ``*``/``+`` over ``.``
over ``|``.  Constraints combine comparisons (<, <=, >, >=, ==) and
interval memberships ``p in (lo, hi)`` with ``&&`` and ``||``;
arithmetic allows +, -, *, integer powers ``^`` and ``exp()``.
Comments run from ``#`` to end of line; whitespace is insignificant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "ParseError",
    "AtomicShapeDecl",
    "RegexNode", "Epsilon", "Atom", "Union", "Concat", "Star",
    "ArithExpr", "Const", "Param", "Add", "Sub", "Mul", "Neg", "Pow", "ExpFn",
    "ConstraintExpr", "And", "Or", "Cmp", "In",
    "ShapeExpr",
    "parse_spec", "parse_regex", "parse_constraint", "print_spec",
    "regex_params", "nullable", "EPSILON",
]

# Parameter counts per shape kind, duration included (always last).
KIND_ARITY = {"lin": 3, "exp": 4, "sin": 5}


class ParseError(ValueError):
    """Lexical, syntactic or semantic error in a spec, with position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# AST types (immutable; shareable across threads)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicShapeDecl:
    """A named parametric segment; ``duration_param`` is its last argument."""
    name: str
    kind: str                     # 'lin' | 'exp' | 'sin'
    params: tuple[str, ...]       # non-duration parameters, in order
    duration_param: str

    @property
    def all_params(self) -> tuple[str, ...]:
        return self.params + (self.duration_param,)


class RegexNode:
    """Base class for regular-expression nodes over atom names."""
    __slots__ = ()


@dataclass(frozen=True)
class Epsilon(RegexNode):
    pass


@dataclass(frozen=True)
class Atom(RegexNode):
    name: str


@dataclass(frozen=True)
class Union(RegexNode):
    left: RegexNode
    right: RegexNode


@dataclass(frozen=True)
class Concat(RegexNode):
    left: RegexNode
    right: RegexNode


@dataclass(frozen=True)
class Star(RegexNode):
    inner: RegexNode


EPSILON = Epsilon()


class ArithExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(ArithExpr):
    value: float


@dataclass(frozen=True)
class Param(ArithExpr):
    name: str


@dataclass(frozen=True)
class Add(ArithExpr):
    left: ArithExpr
    right: ArithExpr


@dataclass(frozen=True)
class Sub(ArithExpr):
    left: ArithExpr
    right: ArithExpr


@dataclass(frozen=True)
class Mul(ArithExpr):
    left: ArithExpr
    right: ArithExpr


@dataclass(frozen=True)
class Neg(ArithExpr):
    operand: ArithExpr


@dataclass(frozen=True)
class Pow(ArithExpr):
    base: ArithExpr
    exponent: int


@dataclass(frozen=True)
class ExpFn(ArithExpr):
    operand: ArithExpr


class ConstraintExpr:
    __slots__ = ()


@dataclass(frozen=True)
class And(ConstraintExpr):
    terms: tuple[ConstraintExpr, ...]


@dataclass(frozen=True)
class Or(ConstraintExpr):
    terms: tuple[ConstraintExpr, ...]


@dataclass(frozen=True)
class Cmp(ConstraintExpr):
    op: str                       # '<' | '<=' | '>' | '>=' | '=='
    lhs: ArithExpr
    rhs: ArithExpr


@dataclass(frozen=True)
class In(ConstraintExpr):
    param: str
    lo: float
    hi: float


@dataclass(frozen=True)
class ShapeExpr:
    """A parsed spec: shape declarations, regex, and global constraint."""
    decls: tuple[AtomicShapeDecl, ...]
    regex: RegexNode
    constraint: ConstraintExpr | None

    @property
    def decl_map(self) -> dict[str, AtomicShapeDecl]:
        return {d.name: d for d in self.decls}

    def used_decls(self) -> tuple[AtomicShapeDecl, ...]:
        """Declarations of atoms that actually occur in the regex."""
        used = _atom_names(self.regex)
        return tuple(d for d in self.decls if d.name in used)

    def used_params(self) -> tuple[str, ...]:
        """Parameters of regex-reachable atoms, in declaration order."""
        seen: dict[str, None] = {}
        for d in self.used_decls():
            for p in d.all_params:
                seen.setdefault(p)
        return tuple(seen)


def _atom_names(node: RegexNode) -> set[str]:
    if isinstance(node, Atom):
        return {node.name}
    if isinstance(node, (Union, Concat)):
        return _atom_names(node.left) | _atom_names(node.right)
    if isinstance(node, Star):
        return _atom_names(node.inner)
    return set()


def nullable(node: RegexNode) -> bool:
    """True iff the empty word belongs to the node's language."""
    if isinstance(node, Epsilon):
        return True
    if isinstance(node, Atom):
        return False
    if isinstance(node, Union):
        return nullable(node.left) or nullable(node.right)
    if isinstance(node, Concat):
        return nullable(node.left) and nullable(node.right)
    if isinstance(node, Star):
        return True
    raise TypeError(f"not a regex node: {node!r}")


def regex_params(spec: ShapeExpr) -> tuple[str, ...]:
    return spec.used_params()


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {
    "==": "EQEQ", "<=": "LE", ">=": "GE", "&&": "ANDAND", "||": "OROR",
    "(": "LPAREN", ")": "RPAREN", ",": "COMMA", ";": "SEMI", "=": "EQ",
    "<": "LT", ">": "GT", "+": "PLUS", "-": "MINUS", "*": "STAR",
    ".": "DOT", "|": "PIPE", "^": "CARET", "/": "SLASH",
}


@dataclass
class _Token:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            toks.append(_Token("NUMBER", text[i:j], line, col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _PUNCT:
            toks.append(_Token(_PUNCT[two], two, line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            toks.append(_Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(_Token("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser (recursive descent with backtracking only inside constraints)
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> _Token:
        t = self.peek()
        if t.kind != kind:
            want = what or kind
            raise ParseError(f"expected {want}, found {t.value!r}", t.line, t.col)
        return self.next()

    def error(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # --- top level ---------------------------------------------------------

    def parse_spec(self) -> ShapeExpr:
        decls: list[AtomicShapeDecl] = []
        regex: RegexNode | None = None
        constraint: ConstraintExpr | None = None
        while self.peek().kind != "EOF":
            t = self.peek()
            if t.kind != "IDENT":
                self.error(f"expected 'shape', 'expr' or 'constraint', found {t.value!r}")
            if t.value == "shape":
                decls.append(self.shape_decl())
            elif t.value == "expr":
                if regex is not None:
                    self.error("duplicate 'expr' block")
                self.next()
                self.expect("EQ", "'='")
                regex = self.regex()
                self.expect("SEMI", "';'")
            elif t.value == "constraint":
                if constraint is not None:
                    self.error("duplicate 'constraint' block")
                self.next()
                self.expect("EQ", "'='")
                constraint = self.constraint()
                self.expect("SEMI", "';'")
            else:
                self.error(f"expected 'shape', 'expr' or 'constraint', found {t.value!r}")
        if regex is None:
            raise ParseError("spec has no 'expr' block")
        return _validate(ShapeExpr(tuple(decls), regex, constraint))

    def shape_decl(self) -> AtomicShapeDecl:
        self.next()  # 'shape'
        name_tok = self.expect("IDENT", "shape name")
        self.expect("EQ", "'='")
        kind_tok = self.expect("IDENT", "shape kind")
        if kind_tok.value not in KIND_ARITY:
            raise ParseError(f"unknown shape kind {kind_tok.value!r} (expected lin, exp or sin)",
                             kind_tok.line, kind_tok.col)
        self.expect("LPAREN", "'('")
        params = [self.expect("IDENT", "parameter name").value]
        while self.peek().kind == "COMMA":
            self.next()
            params.append(self.expect("IDENT", "parameter name").value)
        self.expect("RPAREN", "')'")
        self.expect("SEMI", "';'")
        arity = KIND_ARITY[kind_tok.value]
        if len(params) != arity:
            raise ParseError(
                f"shape kind {kind_tok.value!r} takes exactly {arity} parameters "
                f"(duration last), got {len(params)}", name_tok.line, name_tok.col)
        dups = {p for p in params if params.count(p) > 1}
        if dups:
            raise ParseError(f"duplicate parameter {sorted(dups)[0]!r} in shape {name_tok.value!r}",
                             name_tok.line, name_tok.col)
        return AtomicShapeDecl(name_tok.value, kind_tok.value,
                               tuple(params[:-1]), params[-1])

    # --- regexes -----------------------------------------------------------

    def regex(self) -> RegexNode:
        node = self.regex_concat()
        while self.peek().kind == "PIPE":
            self.next()
            node = Union(node, self.regex_concat())
        return node

    def regex_concat(self) -> RegexNode:
        node = self.regex_postfix()
        while self.peek().kind == "DOT":
            self.next()
            node = Concat(node, self.regex_postfix())
        return node

    def regex_postfix(self) -> RegexNode:
        node = self.regex_primary()
        while self.peek().kind in ("STAR", "PLUS"):
            t = self.next()
            if nullable(node):
                raise ParseError("nullable star argument", t.line, t.col)
            if t.kind == "STAR":
                node = Star(node)
            else:
                node = Concat(node, Star(node))  # plus desugars immediately
        return node

    def regex_primary(self) -> RegexNode:
        t = self.peek()
        if t.kind == "IDENT":
            self.next()
            if t.value == "eps":
                return EPSILON
            return Atom(t.value)
        if t.kind == "LPAREN":
            self.next()
            node = self.regex()
            self.expect("RPAREN", "')'")
            return node
        self.error(f"expected atom name, 'eps' or '(', found {t.value!r}")

    # --- constraints -------------------------------------------------------

    def constraint(self) -> ConstraintExpr:
        terms = [self.constraint_and()]
        while self.peek().kind == "OROR":
            self.next()
            terms.append(self.constraint_and())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def constraint_and(self) -> ConstraintExpr:
        terms = [self.constraint_prim()]
        while self.peek().kind == "ANDAND":
            self.next()
            terms.append(self.constraint_prim())
        return terms[0] if len(terms) == 1 else And(tuple(terms))

    def constraint_prim(self) -> ConstraintExpr:
        t = self.peek()
        if t.kind == "IDENT" and self.toks[self.pos + 1].kind == "IDENT" \
                and self.toks[self.pos + 1].value == "in":
            name = self.next().value
            self.next()  # 'in'
            self.expect("LPAREN", "'('")
            lo = self.const_number()
            self.expect("COMMA", "','")
            hi = self.const_number()
            self.expect("RPAREN", "')'")
            return In(name, lo, hi)
        # Either a comparison or a parenthesized sub-constraint; the two can
        # only be told apart by trying, so back up on failure.
        save = self.pos
        try:
            lhs = self.arith()
            op_tok = self.peek()
            op = {"LT": "<", "LE": "<=", "GT": ">", "GE": ">=", "EQEQ": "=="}.get(op_tok.kind)
            if op is None:
                self.error("expected comparison operator")
            self.next()
            rhs = self.arith()
            return Cmp(op, lhs, rhs)
        except ParseError:
            if t.kind != "LPAREN":
                raise
            self.pos = save
        self.expect("LPAREN", "'('")
        node = self.constraint()
        self.expect("RPAREN", "')'")
        return node

    def const_number(self) -> float:
        neg = False
        while self.peek().kind in ("MINUS", "PLUS"):
            if self.next().kind == "MINUS":
                neg = not neg
        t = self.expect("NUMBER", "number")
        v = float(t.value)
        return -v if neg else v

    def arith(self) -> ArithExpr:
        node = self.arith_term()
        while self.peek().kind in ("PLUS", "MINUS"):
            t = self.next()
            rhs = self.arith_term()
            node = Add(node, rhs) if t.kind == "PLUS" else Sub(node, rhs)
        return node

    def arith_term(self) -> ArithExpr:
        node = self.arith_factor()
        while True:
            k = self.peek().kind
            if k == "STAR":
                self.next()
                node = Mul(node, self.arith_factor())
            elif k == "SLASH":
                self.error("division is not supported in constraints")
            else:
                return node

    def arith_factor(self) -> ArithExpr:
        node = self.arith_unary()
        if self.peek().kind == "CARET":
            t = self.next()
            e = self.expect("NUMBER", "integer exponent")
            if "." in e.value or "e" in e.value or "E" in e.value:
                raise ParseError("exponent must be a nonnegative integer", e.line, e.col)
            node = Pow(node, int(e.value))
        return node

    def arith_unary(self) -> ArithExpr:
        if self.peek().kind == "MINUS":
            self.next()
            inner = self.arith_unary()
            if isinstance(inner, Const):  # negative literal, not a Neg node
                return Const(-inner.value)
            return Neg(inner)
        return self.arith_atom()

    def arith_atom(self) -> ArithExpr:
        t = self.peek()
        if t.kind == "NUMBER":
            self.next()
            return Const(float(t.value))
        if t.kind == "IDENT":
            self.next()
            if t.value == "exp" and self.peek().kind == "LPAREN":
                self.next()
                inner = self.arith()
                self.expect("RPAREN", "')'")
                return ExpFn(inner)
            return Param(t.value)
        if t.kind == "LPAREN":
            self.next()
            node = self.arith()
            self.expect("RPAREN", "')'")
            return node
        self.error(f"expected number, parameter or '(', found {t.value!r}")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _constraint_params(c: ConstraintExpr | None) -> set[str]:
    out: set[str] = set()

    def arith(e: ArithExpr):
        if isinstance(e, Param):
            out.add(e.name)
        elif isinstance(e, (Add, Sub, Mul)):
            arith(e.left)
            arith(e.right)
        elif isinstance(e, (Neg, ExpFn)):
            arith(e.operand)
        elif isinstance(e, Pow):
            arith(e.base)

    def walk(node: ConstraintExpr):
        if isinstance(node, (And, Or)):
            for t in node.terms:
                walk(t)
        elif isinstance(node, Cmp):
            arith(node.lhs)
            arith(node.rhs)
        elif isinstance(node, In):
            out.add(node.param)

    if c is not None:
        walk(c)
    return out


def _bounding_clauses(c: ConstraintExpr | None):
    """Parameters appearing in In clauses and in equality clauses."""
    in_params: set[str] = set()
    eq_params: set[str] = set()

    def walk(node: ConstraintExpr):
        if isinstance(node, (And, Or)):
            for t in node.terms:
                walk(t)
        elif isinstance(node, In):
            in_params.add(node.param)
        elif isinstance(node, Cmp) and node.op == "==":
            eq_params.update(_constraint_params(Cmp("==", node.lhs, node.rhs)))

    if c is not None:
        walk(c)
    return in_params, eq_params


def _validate(spec: ShapeExpr) -> ShapeExpr:
    names = [d.name for d in spec.decls]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ParseError(f"duplicate shape declaration {sorted(dup)[0]!r}")
    declared = set(names)
    undeclared = _atom_names(spec.regex) - declared
    if undeclared:
        raise ParseError(f"undeclared atom {sorted(undeclared)[0]!r} in expr")
    # Box-boundedness: parameters of regex-reachable atoms must be mentioned
    # by an interval clause or take part in some equality (the compiler then
    # derives or checks finite bounds).
    in_params, eq_params = _bounding_clauses(spec.constraint)
    for p in spec.used_params():
        if p not in in_params and p not in eq_params:
            raise ParseError(f"unbounded parameter {p!r}: no interval clause")
    return spec


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def parse_spec(text: str) -> ShapeExpr:
    """Parse and validate a complete spec file."""
    return _Parser(text).parse_spec()


def parse_regex(text: str) -> RegexNode:
    """Parse a bare regular expression (no declarations, no validation)."""
    p = _Parser(text)
    node = p.regex()
    p.expect("EOF", "end of input")
    return node


def parse_constraint(text: str) -> ConstraintExpr:
    """Parse a bare constraint expression."""
    p = _Parser(text)
    node = p.constraint()
    p.expect("EOF", "end of input")
    return node


# ---------------------------------------------------------------------------
# Printer (canonical text; parse(print(e)) reproduces e structurally)
# ---------------------------------------------------------------------------

def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format_regex(node: RegexNode) -> str:
    # precedence levels: union=0, concat=1, postfix=2; the parser is
    # left-associative, so right operands print one level tighter
    def go(n: RegexNode, level: int) -> str:
        if isinstance(n, Epsilon):
            return "eps"
        if isinstance(n, Atom):
            return n.name
        if isinstance(n, Union):
            s = f"{go(n.left, 0)} | {go(n.right, 1)}"
            return f"({s})" if level > 0 else s
        if isinstance(n, Concat):
            s = f"{go(n.left, 1)} . {go(n.right, 2)}"
            return f"({s})" if level > 1 else s
        if isinstance(n, Star):
            return f"{go(n.inner, 2)}*"
        raise TypeError(f"not a regex node: {n!r}")
    return go(node, 0)


def _fmt_arith(e: ArithExpr, level: int = 0) -> str:
    # levels: add=0, mul=1, unary=2, atom=3
    if isinstance(e, Const):
        s = _fmt_num(e.value)
        return f"({s})" if (e.value < 0 and level >= 2) else s
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Add):
        s = f"{_fmt_arith(e.left, 0)} + {_fmt_arith(e.right, 1)}"
        return f"({s})" if level > 0 else s
    if isinstance(e, Sub):
        s = f"{_fmt_arith(e.left, 0)} - {_fmt_arith(e.right, 1)}"
        return f"({s})" if level > 0 else s
    if isinstance(e, Mul):
        s = f"{_fmt_arith(e.left, 1)}*{_fmt_arith(e.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(e, Neg):
        s = f"-{_fmt_arith(e.operand, 2)}"
        return f"({s})" if level > 2 else s
    if isinstance(e, Pow):
        return f"{_fmt_arith(e.base, 3)}^{e.exponent}"
    if isinstance(e, ExpFn):
        return f"exp({_fmt_arith(e.operand, 0)})"
    raise TypeError(f"not an arithmetic node: {e!r}")


def format_constraint(c: ConstraintExpr) -> str:
    # levels: or=0, and=1
    def go(node: ConstraintExpr, level: int) -> str:
        if isinstance(node, Or):
            s = " || ".join(go(t, 1) for t in node.terms)
            return f"({s})" if level > 0 else s
        if isinstance(node, And):
            s = " && ".join(go(t, 2) for t in node.terms)
            return f"({s})" if level > 1 else s
        if isinstance(node, Cmp):
            return f"{_fmt_arith(node.lhs)} {node.op} {_fmt_arith(node.rhs)}"
        if isinstance(node, In):
            return f"{node.param} in ({_fmt_num(node.lo)}, {_fmt_num(node.hi)})"
        raise TypeError(f"not a constraint node: {node!r}")
    return go(c, 0)


def print_spec(spec: ShapeExpr) -> str:
    """Render a ShapeExpr back to spec text; round-trips through parse_spec."""
    lines = []
    for d in spec.decls:
        args = ", ".join(d.all_params)
        lines.append(f"shape {d.name} = {d.kind}({args});")
    lines.append(f"expr = {format_regex(spec.regex)};")
    if spec.constraint is not None:
        lines.append(f"constraint = {format_constraint(spec.constraint)};")
    return "\n".join(lines) + "\n"
