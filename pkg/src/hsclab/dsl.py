"""Expression DSL for Hermitian metric entries, plus chart boxes and specs.

Grammar (byte offsets reported on errors)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := base ("^" integer)?
    base   := number | "i" | "z" digits
            | ("conj" | "exp") "(" expr ")"
            | "(" expr ")" | "-" base

Binary operators are left-associative; "^" binds tighter than "*" and "/",
which bind tighter than "+" and "-".  `number` is a non-negative integer or
decimal literal, "i" is the imaginary unit, and variables are z1..zn
(1-based, as written in source).  Exponents are integers and may be
negative ("^-2").

Expressions evaluate either to plain complex values or to second-order
Wirtinger jets; both evaluators accept a batch of points.
"""

from __future__ import annotations

import json
import re as _re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .wirtinger import Jet2, constant, seed

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Lit:
    value: complex


@dataclass(frozen=True)
class Var:
    k: int  # 1-based, matching the z1..zn source form


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Conj:
    arg: "Expr"


@dataclass(frozen=True)
class Exp:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Sub:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Mul:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Div:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Lit, Var, Neg, Conj, Exp, Add, Sub, Mul, Div, Pow]


class ParseError(ValueError):
    """Syntax or semantic error in DSL source; `offset` is a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class VariableIndexError(ParseError):
    pass


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = _re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(src) - len(stripped))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, n: int | None):
        self.src = src
        self.n = n
        self.tokens = _tokenize(src)
        self.idx = 0

    def peek(self):
        return self.tokens[self.idx]

    def advance(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", off)
        return self.advance()

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", off)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if text == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.factor()
                node = Mul(node, rhs) if text == "*" else Div(node, rhs)
            else:
                return node

    def factor(self) -> Expr:
        node = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            node = Pow(node, self.integer())
        return node

    def integer(self) -> int:
        sign = 1
        kind, text, off = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
            kind, text, off = self.peek()
        if kind != "num" or "." in text:
            raise ParseError("expected integer exponent", off)
        self.advance()
        return sign * int(text)

    def base(self) -> Expr:
        kind, text, off = self.advance()
        if kind == "num":
            return Lit(complex(float(text)))
        if kind == "ident":
            if text == "i":
                return Lit(1j)
            if text in ("conj", "exp"):
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Conj(inner) if text == "conj" else Exp(inner)
            m = _re.fullmatch(r"z(\d+)", text)
            if m:
                k = int(m.group(1))
                if k < 1 or (self.n is not None and k > self.n):
                    raise VariableIndexError(
                        f"variable z{k} out of range 1..{self.n}", off)
                return Var(k)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "op" and text == "-":
            return Neg(self.base())
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input",
                         off)


def parse(src: str, n: int | None = None) -> Expr:
    """Parse DSL source into an AST, checking variable indices against n."""
    return _Parser(src, n).parse()


# ---------------------------------------------------------------------------
# Printer

_ATOM, _POW, _MUL, _ADD, _NEG = 40, 30, 20, 10, 5


def _level(e: Expr) -> int:
    match e:
        case Lit(v):
            return _ATOM if (v.imag == 0 and v.real >= 0) or v == 1j else _NEG
        case Var() | Conj() | Exp():
            return _ATOM
        case Pow():
            return _POW
        case Mul() | Div():
            return _MUL
        case Add() | Sub():
            return _ADD
        case Neg():
            return _NEG
    raise TypeError(f"not an Expr: {e!r}")


def _fmt_real(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return np.format_float_positional(v, unique=True, trim="-")


def _wrap(e: Expr, minimum: int) -> str:
    s = to_source(e)
    return s if _level(e) >= minimum else f"({s})"


def to_source(e: Expr) -> str:
    """Render an AST back to DSL source.  parse(to_source(parse(s))) == parse(s).

    Literals produced by substitution (negative reals, general complex
    values) print as parenthesized arithmetic, which re-parses to an
    equivalent but compound AST; everything the grammar itself can produce
    round-trips node-for-node.
    """
    match e:
        case Lit(v):
            if v == 1j:
                return "i"
            if v.imag == 0:
                if v.real >= 0:
                    return _fmt_real(v.real)
                return f"(-{_fmt_real(-v.real)})"
            sign = "+" if v.imag >= 0 else "-"
            return f"({_fmt_real(v.real)}{sign}{_fmt_real(abs(v.imag))}*i)"
        case Var(k):
            return f"z{k}"
        case Neg(a):
            return "-" + _wrap(a, _ATOM)
        case Conj(a):
            return f"conj({to_source(a)})"
        case Exp(a):
            return f"exp({to_source(a)})"
        case Add(l, r):
            return f"{_wrap(l, _ADD)}+{_wrap(r, _ADD + 1)}"
        case Sub(l, r):
            return f"{_wrap(l, _ADD)}-{_wrap(r, _ADD + 1)}"
        case Mul(l, r):
            return f"{_wrap(l, _MUL)}*{_wrap(r, _MUL + 1)}"
        case Div(l, r):
            return f"{_wrap(l, _MUL)}/{_wrap(r, _MUL + 1)}"
        case Pow(b, k):
            return f"{_wrap(b, _POW + 1)}^{k}"
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation

def eval_value(e: Expr, points) -> np.ndarray | complex:
    """Evaluate at points of shape (..., n); plain complex arithmetic.

    Constant subtrees evaluate to scalars and broadcast; the caller is
    responsible for broadcasting a fully constant result if it needs the
    batch shape.
    """
    pts = np.asarray(points, dtype=complex)
    match e:
        case Lit(v):
            return v
        case Var(k):
            return pts[..., k - 1]
        case Neg(a):
            return -eval_value(a, pts)
        case Conj(a):
            return np.conjugate(eval_value(a, pts))
        case Exp(a):
            return np.exp(eval_value(a, pts))
        case Add(l, r):
            return eval_value(l, pts) + eval_value(r, pts)
        case Sub(l, r):
            return eval_value(l, pts) - eval_value(r, pts)
        case Mul(l, r):
            return eval_value(l, pts) * eval_value(r, pts)
        case Div(l, r):
            return eval_value(l, pts) / eval_value(r, pts)
        case Pow(b, k):
            base = eval_value(b, pts)
            return base ** k if k >= 0 else (1.0 / base) ** (-k)
    raise TypeError(f"not an Expr: {e!r}")


def eval_jet(e: Expr, n: int, points) -> Jet2:
    """Evaluate to a second-order Wirtinger jet at points of shape (..., n)."""
    pts = np.asarray(points, dtype=complex)
    out = _eval_jet(e, n, pts)
    if not isinstance(out, Jet2):
        out = constant(n, out, pts.shape[:-1])
    return out


def _eval_jet(e: Expr, n: int, pts):
    match e:
        case Lit(v):
            return v
        case Var(k):
            return seed(n, pts, k - 1)
        case Neg(a):
            return -_eval_jet(a, n, pts)
        case Conj(a):
            inner = _eval_jet(a, n, pts)
            return inner.conjugate() if isinstance(inner, Jet2) else np.conjugate(inner)
        case Exp(a):
            inner = _eval_jet(a, n, pts)
            return inner.exp() if isinstance(inner, Jet2) else np.exp(inner)
        case Add(l, r):
            return _eval_jet(l, n, pts) + _eval_jet(r, n, pts)
        case Sub(l, r):
            return _eval_jet(l, n, pts) - _eval_jet(r, n, pts)
        case Mul(l, r):
            return _eval_jet(l, n, pts) * _eval_jet(r, n, pts)
        case Div(l, r):
            num, den = _eval_jet(l, n, pts), _eval_jet(r, n, pts)
            if isinstance(den, Jet2):
                return num * den.reciprocal()
            return num * (1.0 / den)
        case Pow(b, k):
            base = _eval_jet(b, n, pts)
            if isinstance(base, Jet2):
                return base ** k
            return base ** k if k >= 0 else (1.0 / base) ** (-k)
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Structural helpers

def map_vars(e: Expr, fn) -> Expr:
    """Rebuild an AST with every Var node replaced by fn(k) (an Expr)."""
    match e:
        case Lit(_):
            return e
        case Var(k):
            return fn(k)
        case Neg(a):
            return Neg(map_vars(a, fn))
        case Conj(a):
            return Conj(map_vars(a, fn))
        case Exp(a):
            return Exp(map_vars(a, fn))
        case Add(l, r):
            return Add(map_vars(l, fn), map_vars(r, fn))
        case Sub(l, r):
            return Sub(map_vars(l, fn), map_vars(r, fn))
        case Mul(l, r):
            return Mul(map_vars(l, fn), map_vars(r, fn))
        case Div(l, r):
            return Div(map_vars(l, fn), map_vars(r, fn))
        case Pow(b, k):
            return Pow(map_vars(b, fn), k)
    raise TypeError(f"not an Expr: {e!r}")


def shift_vars(e: Expr, offset: int) -> Expr:
    """Renumber z_k to z_{k+offset}."""
    return map_vars(e, lambda k: Var(k + offset))


def scale_expr(factor: complex | Expr, e: Expr) -> Expr:
    """Multiply an entry by a scalar factor, folding trivial shapes.

    Keeps c * (a/b) in the form (c*a)/b so that assembled metrics print in
    the same shape as the bundled catalog entries.
    """
    if not isinstance(factor, tuple(EXPR_TYPES)):
        factor = Lit(complex(factor))
    if factor == Lit(complex(1)):
        return e
    match e:
        case Lit(v):
            if isinstance(factor, Lit):
                return Lit(factor.value * v)
            return e if v != 1 else factor
        case Div(l, r):
            return Div(scale_expr(factor, l), r)
    if e == Lit(complex(1)):
        return factor
    return Mul(factor, e)


EXPR_TYPES = (Lit, Var, Neg, Conj, Exp, Add, Sub, Mul, Div, Pow)


def random_expr(rng: np.random.Generator, n: int, depth: int = 3) -> Expr:
    """Random AST over the full operator set; structural only, no guards."""
    if depth <= 0 or rng.random() < 0.25:
        match int(rng.integers(4)):
            case 0:
                return Lit(complex(round(float(rng.uniform(0.2, 2.0)), 3)))
            case 1:
                return Lit(1j)
            case 2:
                return Var(int(rng.integers(1, n + 1)))
            case _:
                return Conj(Var(int(rng.integers(1, n + 1))))
    match int(rng.integers(8)):
        case 0:
            return Add(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
        case 1:
            return Sub(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
        case 2 | 3:
            return Mul(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
        case 4:
            return Div(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
        case 5:
            return Neg(random_expr(rng, n, depth - 1))
        case 6:
            return Conj(random_expr(rng, n, depth - 1))
        case _:
            if rng.random() < 0.5:
                return Exp(random_expr(rng, n, depth - 1))
            return Pow(random_expr(rng, n, depth - 1), int(rng.integers(2, 4)))


# ---------------------------------------------------------------------------
# Chart boxes

@dataclass(frozen=True)
class Rect:
    """Closed rectangle for one complex coordinate: re and im intervals."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        return (self.re_min - tol <= z.real <= self.re_max + tol
                and self.im_min - tol <= z.imag <= self.im_max + tol)


Box = tuple  # tuple[Rect, ...], one per coordinate


def box_contains(box, point, tol: float = 1e-9) -> bool:
    pt = np.asarray(point, dtype=complex).reshape(-1)
    return all(r.contains(complex(z), tol) for r, z in zip(box, pt, strict=True))


def box_sample(box, rng: np.random.Generator, count: int) -> np.ndarray:
    """Uniform samples in the box, shape (count, n)."""
    cols = []
    for r in box:
        re = rng.uniform(r.re_min, r.re_max, count)
        im = rng.uniform(r.im_min, r.im_max, count)
        cols.append(re + 1j * im)
    return np.stack(cols, axis=-1)


def box_grid(box, per_axis: int) -> np.ndarray:
    """Full grid over all 2n real axes (endpoints included), shape (P, n).

    Points come out in lexicographic order over
    (re_1, im_1, re_2, im_2, ...), which doubles as the tie-break order
    for scan winners.
    """
    axes = []
    for r in box:
        axes.append(np.linspace(r.re_min, r.re_max, per_axis))
        axes.append(np.linspace(r.im_min, r.im_max, per_axis))
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = [m.reshape(-1) for m in mesh]
    cols = [flat[2 * k] + 1j * flat[2 * k + 1] for k in range(len(box))]
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# Metric specs

class MetricError(ValueError):
    """Base for metric validation failures; carries the witness point."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class HermitianDefectError(MetricError):
    pass


class NotPositiveDefiniteError(MetricError):
    pass


@dataclass(frozen=True)
class MetricSpec:
    """A metric (or metric family) given by entry expressions on a box.

    `entries` is a d x d matrix of Expr in the coordinates z1..zn with
    d <= n.  For an honest metric d == n.  d < n marks a fiber family:
    the metric directions are the first d coordinates and the remaining
    ones enter as parameters (restrict() to fixed parameter values to get
    honest metrics).  `box` has one Rect per coordinate.
    """

    name: str
    n: int
    entries: tuple
    box: tuple

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_family(self) -> bool:
        return self.dim < self.n


def metric_values(spec: MetricSpec, points) -> np.ndarray:
    """Entry matrix at points (..., n) -> (..., d, d)."""
    pts = np.asarray(points, dtype=complex)
    batch = pts.shape[:-1]
    d = spec.dim
    out = np.empty(batch + (d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            out[..., i, j] = eval_value(spec.entries[i][j], pts)
    return out


@dataclass(frozen=True)
class ValidationReport:
    name: str
    samples: int
    seed: int
    hermitian_defect: float
    min_eigenvalue: float

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "seed": self.seed,
            "hermitian_defect": self.hermitian_defect,
            "min_eigenvalue": self.min_eigenvalue,
        }


HERMITIAN_TOL = 1e-10
PD_TOL = 1e-12


def validate(spec: MetricSpec, samples: int = 1000, seed: int = 0) -> ValidationReport:
    """Sample the box and check the entry matrix is Hermitian and positive
    definite everywhere.

    The Hermitian tolerance is relative to the matrix scale at the worst
    point (entries of a legal spec may be large near a chart edge).
    Raises HermitianDefectError or NotPositiveDefiniteError with the
    witness point attached.
    """
    rng = np.random.default_rng(seed)
    pts = box_sample(spec.box, rng, samples)
    g = metric_values(spec, pts)
    defect = np.abs(g - np.conjugate(np.swapaxes(g, -1, -2))).max(axis=(-1, -2))
    scale = np.maximum(1.0, np.abs(g).max(axis=(-1, -2)))
    rel = defect / scale
    worst = int(np.argmax(rel))
    if rel[worst] > HERMITIAN_TOL:
        raise HermitianDefectError(
            f"{spec.name}: Hermitian defect {defect[worst]:.3e} at sample {worst}",
            point=pts[worst])
    sym = 0.5 * (g + np.conjugate(np.swapaxes(g, -1, -2)))
    eigs = np.linalg.eigvalsh(sym)
    mins = eigs[..., 0]
    worst = int(np.argmin(mins))
    if mins[worst] <= PD_TOL:
        raise NotPositiveDefiniteError(
            f"{spec.name}: min eigenvalue {mins[worst]:.3e} at sample {worst}",
            point=pts[worst])
    return ValidationReport(spec.name, samples, seed,
                            float(rel.max()), float(mins.min()))


# ---------------------------------------------------------------------------
# Metric file format

def spec_to_dict(spec: MetricSpec) -> dict:
    return {
        "name": spec.name,
        "n": spec.n,
        "entries": [[to_source(e) for e in row] for row in spec.entries],
        "box": [{"re": [r.re_min, r.re_max], "im": [r.im_min, r.im_max]}
                for r in spec.box],
    }


def spec_from_dict(data: dict) -> MetricSpec:
    n = int(data["n"])
    entries = tuple(tuple(parse(src, n) for src in row) for row in data["entries"])
    d = len(entries)
    if any(len(row) != d for row in entries):
        raise ValueError("entries must form a square matrix")
    if d > n:
        raise ValueError(f"entry matrix is {d}x{d} but only {n} coordinates declared")
    box = tuple(Rect(float(b["re"][0]), float(b["re"][1]),
                     float(b["im"][0]), float(b["im"][1])) for b in data["box"])
    if len(box) != n:
        raise ValueError(f"box must have {n} rectangles, got {len(box)}")
    return MetricSpec(str(data["name"]), n, entries, box)


def save_spec(spec: MetricSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_spec(path) -> MetricSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Bundled metrics

# Disk-domain metrics get the axis-aligned square inscribed in the radius
# 0.95 disk, so every box point keeps |z| <= 0.95 < 1.
DISK_HALF = 0.95 / np.sqrt(2.0)


def _square_box(n: int, half: float) -> tuple:
    return tuple(Rect(-half, half, -half, half) for _ in range(n))


_FIBER_ENTRY = "exp(2*z2*conj(z2))/(1+(z1*conj(z1))^2*exp(4*z2*conj(z2)))"
_BASE_ENTRY = "1/(1+z1*conj(z1))"
_WARP_FIBER_ENTRY = "exp(z2*conj(z2))/(1+z1*conj(z1))^2"

_CATALOG_RE = _re.compile(r"^([a-zA-Z_][a-zA-Z_0-9]*)(?:\((.*)\))?$")


def _diag_spec(name: str, sources: list, box) -> MetricSpec:
    n = len(sources)
    entries = tuple(
        tuple(parse(sources[i] if i == j else "0", n) for j in range(n))
        for i in range(n))
    return MetricSpec(name, n, entries, box)


def catalog(name: str) -> MetricSpec:
    """Bundled metric by name.

    Names: flat(n), poincare, fs_affine, paper_base, paper_fiber,
    paper_G(lam), warp_demo.  flat takes an integer dimension; paper_G a
    positive real warp factor (paper_G alone means paper_G(1)).
    """
    m = _CATALOG_RE.match(name.strip())
    if not m:
        raise KeyError(f"malformed catalog name {name!r}")
    head, arg = m.group(1), m.group(2)
    if head == "flat":
        n = int(arg) if arg is not None else 1
        if n < 1:
            raise KeyError("flat(n) needs n >= 1")
        return _diag_spec(f"flat({n})", ["1"] * n, _square_box(n, 1.0))
    if head == "poincare":
        return _diag_spec("poincare", ["1/(1-z1*conj(z1))^2"], _square_box(1, DISK_HALF))
    if head == "fs_affine":
        return _diag_spec("fs_affine", ["1/(1+z1*conj(z1))^2"], _square_box(1, DISK_HALF))
    if head == "paper_base":
        return _diag_spec("paper_base", [_BASE_ENTRY], _square_box(1, DISK_HALF))
    if head == "paper_fiber":
        # One fiber direction z1, one base parameter z2: a 1x1 family on a
        # two-coordinate box.
        return MetricSpec("paper_fiber", 2, ((parse(_FIBER_ENTRY, 2),),),
                          _square_box(2, DISK_HALF))
    if head == "paper_G":
        lam = float(arg) if arg else 1.0
        if not lam > 0:
            raise KeyError("paper_G(lam) needs lam > 0")
        base = scale_expr(lam, shift_vars(parse(_BASE_ENTRY, 1), 1))
        entries = ((parse(_FIBER_ENTRY, 2), Lit(0j)), (Lit(0j), base))
        label = f"paper_G({_fmt_real(lam)})"
        return MetricSpec(label, 2, entries, _square_box(2, DISK_HALF))
    if head == "warp_demo":
        entries = ((parse(_WARP_FIBER_ENTRY, 2), Lit(0j)),
                   (Lit(0j), shift_vars(parse(_BASE_ENTRY, 1), 1)))
        return MetricSpec("warp_demo", 2, entries, _square_box(2, DISK_HALF))
    raise KeyError(f"unknown catalog name {name!r}")


CATALOG_NAMES = ("flat(n)", "poincare", "fs_affine", "paper_base",
                 "paper_fiber", "paper_G(lam)", "warp_demo")
