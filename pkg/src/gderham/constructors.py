"""Ready-made presentations: R, E, top local cohomology, and D/(D*xd).

Each constructor lays out an explicit monomial basis per grading label
inside a finite box, fills in the multiplication and derivative
matrices, and sets the vanishing flags that its known support justifies.
The default boxes ([-(n+6), 6] coarse, [-7, 6]^n fine) cover every
nonzero cohomology label of these modules with margin.

The recipe mini-language understood by parse_recipe:

    R(n=2)   E(n=3)   Hvars(n=3,S=1,2)   XD
    shift(E(n=1),-2)   sum(E(n=1),E(n=1))
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Iterable, Sequence

from .errors import CoarseModeUnsupported, RecipeError
from .grading import GradingSpec, Label, Mode, Window, ladd, lsub
from .gmodule import GradedMap, GradedPresentation, direct_sum, shift
from .linalg import ExactMatrix


def monomials_of_total(n: int, total: int) -> list[tuple[int, ...]]:
    """Exponent vectors >= 0 with the given coordinate sum, in lex order."""
    if total < 0:
        return []
    if n == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        out.extend((first,) + rest for rest in monomials_of_total(n - 1, total - first))
    return out


def inverse_monomials_of_total(n: int, total: int) -> list[tuple[int, ...]]:
    """Exponent vectors <= -1 with the given coordinate sum, in lex order."""
    rev = monomials_of_total(n, -total - n)
    return sorted(tuple(-a - 1 for a in alpha) for alpha in rev)


def _normalize_box(spec: GradingSpec, window) -> tuple[Label, Label]:
    if window is None:
        if spec.mode is Mode.COARSE:
            return (-(spec.n + 6),), (6,)
        return (-7,) * spec.n, (6,) * spec.n
    if isinstance(window, Window):
        return window.lo, window.hi
    lo, hi = window
    if isinstance(lo, int):
        lo = (lo,) * spec.rank
    if isinstance(hi, int):
        hi = (hi,) * spec.rank
    return spec.check_label(lo), spec.check_label(hi)


def _build(spec: GradingSpec, window: Window,
           basis_fn: Callable[[Label], list],
           x_fn: Callable[[int, object], tuple],
           dop_fn: Callable[[int, object], tuple],
           name_fn: Callable[[object], str]) -> GradedPresentation:
    dims: dict[Label, int] = {}
    index: dict[Label, dict] = {}
    names: dict[Label, tuple[str, ...]] = {}
    for label in window.box_labels():
        elts = basis_fn(label)
        if elts:
            dims[label] = len(elts)
            index[label] = {e: k for k, e in enumerate(elts)}
            names[label] = tuple(name_fn(e) for e in elts)
    x = [dict() for _ in range(spec.n)]
    dop = [dict() for _ in range(spec.n)]
    for label, idx in index.items():
        for i in range(spec.n):
            for action_fn, table, target in (
                    (x_fn, x, ladd(label, spec.deg(i))),
                    (dop_fn, dop, lsub(label, spec.deg(i)))):
                if not window.covered(target):
                    continue
                entries = []
                for elt, col in idx.items():
                    new_elt, coeff = action_fn(i, elt)
                    if new_elt is None or not coeff:
                        continue
                    row = index.get(target, {}).get(new_elt)
                    if row is None:
                        raise AssertionError(
                            f"action left the declared support at {label}")
                    entries.append((row, col, Fraction(coeff)))
                if entries:
                    table[i][label] = ExactMatrix(
                        dims.get(target, 0), dims[label], entries)
    return GradedPresentation(spec, window, dims, x, dop, names)


def _exp_name(symbol: str, exponents: tuple[int, ...]) -> str:
    return f"{symbol}({','.join(str(e) for e in exponents)})"


def polynomial_ring(spec: GradingSpec, window=None) -> GradedPresentation:
    """The polynomial ring with monomial basis x^a, a >= 0."""
    lo, hi = _normalize_box(spec, window)
    win = Window(lo, hi,
                 tuple(v <= 0 for v in lo),
                 (False,) * spec.rank)

    def basis(label):
        if spec.mode is Mode.COARSE:
            return monomials_of_total(spec.n, label[0])
        return [label] if all(v >= 0 for v in label) else []

    def x_act(i, alpha):
        return tuple(a + (1 if j == i else 0) for j, a in enumerate(alpha)), 1

    def dop_act(i, alpha):
        if alpha[i] == 0:
            return None, 0
        return tuple(a - (1 if j == i else 0) for j, a in enumerate(alpha)), alpha[i]

    return _build(spec, win, basis, x_act, dop_act, lambda e: _exp_name("x", e))


def injective_hull_E(spec: GradingSpec, window=None) -> GradedPresentation:
    """Top local cohomology at all the variables: inverse monomials x^b, b <= -1."""
    lo, hi = _normalize_box(spec, window)
    top = -1 if spec.mode is Mode.FINE else -spec.n
    win = Window(lo, hi,
                 (False,) * spec.rank,
                 tuple(v >= top for v in hi))

    def basis(label):
        if spec.mode is Mode.COARSE:
            return inverse_monomials_of_total(spec.n, label[0])
        return [label] if all(v <= -1 for v in label) else []

    def x_act(i, beta):
        if beta[i] >= -1:
            return None, 0
        return tuple(b + (1 if j == i else 0) for j, b in enumerate(beta)), 1

    def dop_act(i, beta):
        return tuple(b - (1 if j == i else 0) for j, b in enumerate(beta)), beta[i]

    return _build(spec, win, basis, x_act, dop_act, lambda e: _exp_name("x", e))


def local_coh_vars(spec: GradingSpec, variables: Iterable[int],
                   window=None) -> GradedPresentation:
    """Top local cohomology at the ideal generated by a subset of variables.

    ``variables`` is a nonempty set of 1-based indices S; the basis is
    the monomials x^b with b_i <= -1 for i in S and b_j >= 0 otherwise.
    Requires FINE mode: the coarse pieces of these modules are infinite
    dimensional as soon as S is proper.
    """
    if spec.mode is not Mode.FINE:
        raise CoarseModeUnsupported("local cohomology at a variable subset "
                                    "needs the fine grading")
    s = sorted(set(variables))
    if not s or s[0] < 1 or s[-1] > spec.n:
        raise ValueError(f"variable subset {s} out of range 1..{spec.n}")
    negative = tuple(i + 1 in set(s) for i in range(spec.n))
    lo, hi = _normalize_box(spec, window)
    win = Window(lo, hi,
                 tuple((not neg) and v <= 0 for neg, v in zip(negative, lo)),
                 tuple(neg and v >= -1 for neg, v in zip(negative, hi)))

    def basis(label):
        ok = all((v <= -1) if neg else (v >= 0)
                 for neg, v in zip(negative, label))
        return [label] if ok else []

    def x_act(i, beta):
        if negative[i] and beta[i] >= -1:
            return None, 0
        return tuple(b + (1 if j == i else 0) for j, b in enumerate(beta)), 1

    def dop_act(i, beta):
        if beta[i] == 0:
            return None, 0
        return tuple(b - (1 if j == i else 0) for j, b in enumerate(beta)), beta[i]

    return _build(spec, win, basis, x_act, dop_act, lambda e: _exp_name("x", e))


def cyclic_xd(window=None) -> GradedPresentation:
    """The one-variable cyclic module D/(D*xd).

    Basis: the class of x^a at label a >= 0 and of d^b at label -b.  The
    action follows normal-form reduction in the quotient: xd = 0 and
    dx = 1 there, so x*d^b = (1-b) d^(b-1) and d*x^a = a x^(a-1) with
    d*1 = d.
    """
    spec = GradingSpec(1, Mode.COARSE)
    lo, hi = _normalize_box(spec, window)
    win = Window(lo, hi, (False,), (False,))

    def basis(label):
        a = label[0]
        return [("x", a)] if a >= 0 else [("d", -a)]

    def x_act(_i, elt):
        kind, e = elt
        if kind == "x":
            return ("x", e + 1), 1
        if e == 1:
            return None, 0
        return ("d", e - 1), 1 - e

    def dop_act(_i, elt):
        kind, e = elt
        if kind == "d":
            return ("d", e + 1), 1
        if e == 0:
            return ("d", 1), 1
        return ("x", e - 1), e

    def name(elt):
        kind, e = elt
        if kind == "x":
            return "1" if e == 0 else f"x^{e}"
        return f"d^{e}"

    return _build(spec, win, basis, x_act, dop_act, name)


def ses_xd(window=None) -> tuple[GradedMap, GradedMap]:
    """The degreewise short exact sequence E -> D/(D*xd) -> R (n = 1).

    The first map sends x^(-b) to the class of d^b scaled by
    (-1)^(b-1)/(b-1)!, which is the image of the canonical identification
    of E with D/(D*x) followed by right multiplication by d.  The second
    map is the quotient map killing the d^b classes.
    """
    spec = GradingSpec(1, Mode.COARSE)
    e_pres = injective_hull_E(spec, window)
    m_pres = cyclic_xd(window)
    r_pres = polynomial_ring(spec, window)
    f_blocks = {}
    g_blocks = {}
    for label in m_pres.window.box_labels():
        a = label[0]
        if a <= -1:
            b = -a
            coeff = Fraction((-1) ** (b - 1), factorial(b - 1))
            f_blocks[label] = ExactMatrix(1, 1, [(0, 0, coeff)])
        else:
            g_blocks[label] = ExactMatrix.identity(1)
    first = GradedMap(e_pres, m_pres, 0, f_blocks)
    second = GradedMap(m_pres, r_pres, 0, g_blocks)
    return first, second


# -- recipe mini-language ---------------------------------------------------

_RECIPE_TOKEN = re.compile(r"\s*([A-Za-z_]\w*|-?\d+|[(),=])")


def _tokenize_recipe(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _RECIPE_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise RecipeError(f"bad recipe token at {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _RecipeParser:
    def __init__(self, tokens: list[str], mode: Mode | None, window):
        self.tokens = tokens
        self.pos = 0
        self.mode = mode
        self.window = window

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise RecipeError("unexpected end of recipe")
        if expected is not None and tok != expected:
            raise RecipeError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def _int(self) -> int:
        tok = self.take()
        try:
            return int(tok)
        except ValueError:
            raise RecipeError(f"expected an integer, got {tok!r}") from None

    def _keyword_args(self) -> dict:
        """Parse k=v pairs inside parens; the S key consumes an int list."""
        args: dict = {}
        self.take("(")
        while True:
            key = self.take()
            self.take("=")
            if key == "S":
                values = [self._int()]
                while self.peek() == ",":
                    save = self.pos
                    self.take(",")
                    nxt = self.peek()
                    if nxt is not None and re.fullmatch(r"-?\d+", nxt) \
                            and self.tokens[self.pos + 1:self.pos + 2] != ["="]:
                        values.append(self._int())
                    else:
                        self.pos = save
                        break
                args[key] = values
            else:
                args[key] = self._int()
            if self.peek() == ",":
                self.take(",")
                continue
            break
        self.take(")")
        return args

    def parse(self) -> GradedPresentation:
        name = self.take()
        if name == "XD":
            if self.peek() == "(":
                self.take("(")
                self.take(")")
            return cyclic_xd(self.window)
        if name in ("R", "E"):
            args = self._keyword_args()
            if "n" not in args:
                raise RecipeError(f"{name} needs n=<count>")
            spec = GradingSpec(args["n"], self.mode or Mode.COARSE)
            maker = polynomial_ring if name == "R" else injective_hull_E
            return maker(spec, self.window)
        if name == "Hvars":
            args = self._keyword_args()
            if "n" not in args or "S" not in args:
                raise RecipeError("Hvars needs n=<count>,S=<i,j,...>")
            if self.mode is Mode.COARSE:
                raise CoarseModeUnsupported(
                    "Hvars presentations exist only in fine mode")
            spec = GradingSpec(args["n"], Mode.FINE)
            return local_coh_vars(spec, args["S"], self.window)
        if name == "shift":
            self.take("(")
            inner = self.parse()
            amounts = []
            while self.peek() == ",":
                self.take(",")
                amounts.append(self._int())
            self.take(")")
            if not amounts:
                raise RecipeError("shift needs a lattice point")
            if len(amounts) == 1 and inner.spec.rank > 1:
                raise RecipeError(
                    f"shift in fine mode needs {inner.spec.rank} coordinates")
            if len(amounts) not in (1, inner.spec.rank):
                raise RecipeError("wrong number of shift coordinates")
            point = tuple(amounts) if len(amounts) == inner.spec.rank \
                else (amounts[0],)
            return shift(inner, point)
        if name == "sum":
            self.take("(")
            parts = [self.parse()]
            while self.peek() == ",":
                self.take(",")
                parts.append(self.parse())
            self.take(")")
            out = parts[0]
            for part in parts[1:]:
                out = direct_sum(out, part)
            return out
        raise RecipeError(f"unknown recipe {name!r}")


def parse_recipe(text: str, mode: Mode | None = None,
                 window=None) -> GradedPresentation:
    """Build a presentation from a recipe string like "sum(E(n=1),E(n=1))"."""
    parser = _RecipeParser(_tokenize_recipe(text), mode, window)
    out = parser.parse()
    if parser.peek() is not None:
        raise RecipeError(f"trailing input from {parser.peek()!r}")
    return out
