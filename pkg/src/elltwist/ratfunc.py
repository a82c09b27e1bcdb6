"""Exact arithmetic in the rational function field Q(c).

Polynomials are dense tuples of ``Fraction`` coefficients, lowest degree
first, with no trailing zeros.  A ``RationalFunctionC`` keeps numerator and
denominator coprime with a monic denominator, so equality is structural.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

Poly = tuple  # tuple[Fraction, ...]

ZERO_POLY: Poly = ()
ONE_POLY: Poly = (Fraction(1),)


def _norm(p: Iterable) -> Poly:
    p = [x if type(x) is Fraction else Fraction(x) for x in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_deg(p: Poly) -> int:
    return len(p) - 1  # -1 for the zero polynomial


def poly_add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _norm(out)


def poly_neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_neg(b))


def poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO_POLY
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _norm(out)


def poly_scale(a: Poly, k) -> Poly:
    return _norm(x * k for x in a)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(r) - 1 < db:
        return ZERO_POLY, _norm(r)
    quo = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        coef = r[k + db] / lead
        quo[k] = coef
        if coef:
            for j, y in enumerate(b):
                r[k + j] -= coef * y
    return _norm(quo), _norm(r[:db])


def poly_monic(a: Poly) -> Poly:
    if not a:
        return a
    return poly_scale(a, 1 / a[-1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return poly_monic(a)


def poly_eval(a: Poly, x):
    acc = 0
    for coef in reversed(a):
        acc = acc * x + coef
    return acc


def poly_eval_complex(a: Poly, x: complex) -> complex:
    acc = 0j
    for coef in reversed(a):
        acc = acc * x + float(coef)
    return acc


def poly_str(a: Poly, var: str = "c") -> str:
    if not a:
        return "0"
    terms = []
    for k in range(len(a) - 1, -1, -1):
        coef = a[k]
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += sign + body
    return out


class RationalFunctionC:
    """Element of Q(c) in canonical form num/den, den monic, gcd 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence = ZERO_POLY, den: Sequence = ONE_POLY):
        n = _norm(num)
        d = _norm(den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        if not n:
            self.num, self.den = ZERO_POLY, ONE_POLY
            return
        g = poly_gcd(n, d)
        if len(g) > 1:
            n = poly_divmod(n, g)[0]
            d = poly_divmod(d, g)[0]
        lead = d[-1]
        self.num = poly_scale(n, 1 / lead)
        self.den = poly_scale(d, 1 / lead)

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFunctionC":
        """Wrap polynomials already in canonical form (no gcd step)."""
        out = cls.__new__(cls)
        out.num, out.den = (num, den) if num else (ZERO_POLY, ONE_POLY)
        return out

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, x) -> "RationalFunctionC":
        return cls((Fraction(x),))

    @classmethod
    def c(cls) -> "RationalFunctionC":
        return cls((0, 1))

    @classmethod
    def coerce(cls, x) -> "RationalFunctionC":
        if isinstance(x, RationalFunctionC):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into Q(c)")

    @classmethod
    def parse(cls, text: str) -> "RationalFunctionC":
        """Parse expressions in c with + - * / ^ and parentheses."""
        return _Parser(text).parse()

    # field operations ---------------------------------------------------
    def __add__(self, other):
        try:
            o = RationalFunctionC.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            if self.den == ONE_POLY:
                return RationalFunctionC._raw(poly_add(self.num, o.num), ONE_POLY)
            return RationalFunctionC(poly_add(self.num, o.num), self.den)
        return RationalFunctionC(
            poly_add(poly_mul(self.num, o.den), poly_mul(o.num, self.den)),
            poly_mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        out = RationalFunctionC.__new__(RationalFunctionC)
        out.num, out.den = poly_neg(self.num), self.den
        return out

    def __sub__(self, other):
        try:
            o = RationalFunctionC.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = RationalFunctionC.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == ONE_POLY and o.den == ONE_POLY:
            return RationalFunctionC._raw(poly_mul(self.num, o.num), ONE_POLY)
        return RationalFunctionC(poly_mul(self.num, o.num), poly_mul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunctionC":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(c)")
        return RationalFunctionC(self.den, self.num)

    def __truediv__(self, other):
        try:
            o = RationalFunctionC.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RationalFunctionC.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = RationalFunctionC.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        try:
            o = RationalFunctionC.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    # substitutions ----------------------------------------------------------
    def subs_inverse(self) -> "RationalFunctionC":
        """a(c) -> a(1/c)."""
        if not self.num:
            return self
        dn, dd = len(self.num) - 1, len(self.den) - 1
        num = tuple(reversed(self.num))
        den = tuple(reversed(self.den))
        # a(1/c) = c^-dn rev(num) / (c^-dd rev(den))
        if dd > dn:
            num = (Fraction(0),) * (dd - dn) + num
        elif dn > dd:
            den = (Fraction(0),) * (dn - dd) + den
        return RationalFunctionC(num, den)

    def __call__(self, c0):
        if isinstance(c0, (int, Fraction)):
            return poly_eval(self.num, Fraction(c0)) / poly_eval(self.den, Fraction(c0))
        c0 = complex(c0)
        return poly_eval_complex(self.num, c0) / poly_eval_complex(self.den, c0)

    # rendering ---------------------------------------------------------------
    def __str__(self):
        num = poly_str(self.num)
        if self.den == ONE_POLY:
            return num
        den = _factor_str(self.den)
        if len([x for x in self.num if x != 0]) > 1 or "/" in num:
            num = f"({num})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunctionC({str(self)!r})"


def _factor_str(p: Poly) -> str:
    """Render a monic polynomial, pulling out powers of c and of (c-1)."""
    parts = []
    k = 0
    while len(p) > 1 and p[0] == 0:
        p = p[1:]
        k += 1
    if k:
        parts.append("c" if k == 1 else f"c^{k}")
    m = 0
    cm1 = (Fraction(-1), Fraction(1))
    while len(p) > 1:
        quo, rem = poly_divmod(p, cm1)
        if rem:
            break
        p = quo
        m += 1
    if m:
        parts.append("(c-1)" if m == 1 else f"(c-1)^{m}")
    if p != ONE_POLY:
        s = poly_str(p)
        parts.append(f"({s})" if len([x for x in p if x != 0]) > 1 else s)
    return "*".join(parts)


class _Parser:
    _token = re.compile(r"\s*(?:(\d+)|(c)|(\S))")

    def __init__(self, text: str):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m:
                break
            if m.group(1):
                self.toks.append(("num", int(m.group(1))))
            elif m.group(2):
                self.toks.append(("c", None))
            else:
                self.toks.append(("op", m.group(3)))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> RationalFunctionC:
        val = self._expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.i}")
        return val

    def _expr(self):
        val = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            op = self._take()[1]
            rhs = self._term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _term(self):
        val = self._unary()
        while True:
            tok = self._peek()
            if tok in (("op", "*"), ("op", "/")):
                self._take()
                rhs = self._unary()
                val = val * rhs if tok[1] == "*" else val / rhs
            elif tok[0] in ("num", "c") or tok == ("op", "("):
                val = val * self._unary()  # implicit product, e.g. 2c
            else:
                return val

    def _unary(self):
        if self._peek() == ("op", "-"):
            self._take()
            return -self._unary()
        if self._peek() == ("op", "+"):
            self._take()
            return self._unary()
        return self._power()

    def _power(self):
        base = self._atom()
        if self._peek() == ("op", "^"):
            self._take()
            neg = False
            if self._peek() == ("op", "-"):
                self._take()
                neg = True
            kind, k = self._take()
            if kind != "num":
                raise ValueError("exponent must be an integer literal")
            return base ** (-k if neg else k)
        return base

    def _atom(self):
        kind, val = self._take()
        if kind == "num":
            return RationalFunctionC.const(val)
        if kind == "c":
            return RationalFunctionC.c()
        if (kind, val) == ("op", "("):
            inner = self._expr()
            if self._take() != ("op", ")"):
                raise ValueError("unbalanced parenthesis")
            return inner
        raise ValueError(f"unexpected token {val!r}")


# ---------------------------------------------------------------------------
# matrices over Q(c): lists of lists of RationalFunctionC
# ---------------------------------------------------------------------------

Matrix = list  # list[list[RationalFunctionC]]

ZERO = RationalFunctionC.const(0)
ONE = RationalFunctionC.const(1)
C = RationalFunctionC.c()


def mat(rows) -> Matrix:
    return [[RationalFunctionC.coerce(x) if not isinstance(x, str) else RationalFunctionC.parse(x) for x in r] for r in rows]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ZERO
            for t in range(k):
                if a[i][t] and b[t][j]:
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def mat_map(a: Matrix, f) -> Matrix:
    return [[f(x) for x in r] for r in a]


def _echelon(a: Matrix):
    """Row-reduce a copy of `a`; return (reduced rows, pivot columns, det sign/scale)."""
    m = [list(r) for r in a]
    rows, cols = len(m), len(m[0]) if m else 0
    pivots = []
    det = ONE
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if m[i][col]), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
            det = -det
        p = m[r][col]
        det = det * p
        inv = p.inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    return m, pivots, det


def rank(a: Matrix) -> int:
    return len(_echelon(a)[1])


def det(a: Matrix) -> RationalFunctionC:
    n = len(a)
    m, pivots, d = _echelon(a)
    if len(pivots) < n:
        return ZERO
    return d


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(r) + idr for r, idr in zip(a, identity(n))]
    m, pivots, _ = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular over Q(c)")
    return [r[n:] for r in m]


def kernel(a: Matrix) -> list[list[RationalFunctionC]]:
    """Basis of the right null space."""
    m, pivots, _ = _echelon(a)
    cols = len(a[0])
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(v)
    return basis


def charpoly(a: Matrix) -> list[RationalFunctionC]:
    """Coefficients of det(lambda I - A), highest degree first (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [ONE]
    mk = identity(n)
    am = None
    for k in range(1, n + 1):
        am = matmul(a, mk)
        ck = -sum((am[i][i] for i in range(n)), ZERO) / k
        coeffs.append(ck)
        mk = [[am[i][j] + (ck if i == j else ZERO) for j in range(n)] for i in range(n)]
    return coeffs


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def mat_eval(a: Matrix, c0: complex):
    import numpy as np

    return np.array([[complex(x(c0)) for x in r] for r in a])


def mat_str(a: Matrix) -> list[list[str]]:
    return [[str(x) for x in r] for r in a]
