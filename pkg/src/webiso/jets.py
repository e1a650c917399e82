"""Truncated power series (jets) with exact rational coefficients.

A :class:`MultiJet` is the order-``W`` Taylor expansion of a function of
``n`` variables at a base point, written in the shifted variables
``t_i = x_i - base_i``.  A :class:`UniJet` is the one-variable analogue,
stored densely.  Both are immutable.

Orders are never raised silently: an operation that loses an order (a
derivative, a bracket) returns a jet whose declared order is the order it is
correct to, and jets of different orders refuse to combine until the caller
truncates one of them.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from .rationals import ONE, ZERO, Q, mpq, qstr

__all__ = [
    "JetError",
    "MultiJet",
    "UniJet",
    "monomials",
    "grlex_key",
    "jet_mul",
    "jet_add",
    "jet_scale",
    "jet_partial",
    "jet_power",
    "jet_inverse",
    "uni_compose",
    "uni_series_compose",
    "substitute_diagonal",
    "uni_reversion",
    "jet_compose",
    "exp_series",
    "log1p_series",
    "reciprocal_series",
]


class JetError(ValueError):
    """Incompatible jets or an ill-posed jet operation."""


def grlex_key(alpha: Sequence[int]):
    """Graded-lex sort key: total degree first, then ``x1`` before ``x2``."""
    return (sum(alpha), tuple(-a for a in alpha))


@lru_cache(maxsize=None)
def monomials(n: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors with ``|alpha| <= order`` in graded-lex order."""
    out: list[tuple[int, ...]] = []
    for d in range(order + 1):
        out.extend(_homogeneous(n, d))
    return tuple(out)


@lru_cache(maxsize=None)
def _homogeneous(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in _homogeneous(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def _scalar(value) -> bool:
    return isinstance(value, (int, mpq)) or type(value).__name__ == "Fraction"


# ---------------------------------------------------------------------------
# one variable
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UniJet:
    """Dense one-variable jet ``sum_k coeffs[k] (t - center)^k``."""

    order: int
    center: mpq
    coeffs: tuple

    def __post_init__(self):
        if self.order < 0:
            raise JetError("negative jet order")
        coeffs = tuple(Q(c) for c in self.coeffs)
        if len(coeffs) != self.order + 1:
            raise JetError(f"UniJet of order {self.order} needs {self.order + 1} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", Q(self.center))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int, center=0) -> "UniJet":
        """Pad with zeros or truncate ``coeffs`` to exactly ``order + 1`` terms."""
        cs = [Q(c) for c in coeffs][: order + 1]
        cs += [ZERO] * (order + 1 - len(cs))
        return cls(order, Q(center), tuple(cs))

    @classmethod
    def constant(cls, value, order: int, center=0) -> "UniJet":
        return cls.from_coeffs([value], order, center)

    @classmethod
    def identity(cls, order: int, center=0) -> "UniJet":
        """The coordinate function ``t`` itself, expanded at ``center``."""
        center = Q(center)
        return cls.from_coeffs([center, 1], order, center)

    @classmethod
    def from_polynomial(cls, poly: Sequence, order: int, center=0) -> "UniJet":
        """Expand ``sum_k poly[k] t^k`` (absolute variable) at ``center``."""
        center = Q(center)
        out = [ZERO] * (order + 1)
        for k, a in enumerate(poly):
            a = Q(a)
            if a == 0:
                continue
            for j in range(min(k, order) + 1):
                out[j] += a * math.comb(k, j) * center ** (k - j)
        return cls(order, center, tuple(out))

    def to_polynomial(self) -> list[mpq]:
        """Absolute-variable coefficients of the truncated series."""
        out = [ZERO] * (self.order + 1)
        c = self.center
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(k + 1):
                out[j] += a * math.comb(k, j) * (-c) ** (k - j)
        return out

    # -- basic queries ----------------------------------------------------
    @property
    def value(self) -> mpq:
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def degree(self) -> int:
        """Index of the last nonzero coefficient (-1 for the zero jet)."""
        for k in range(self.order, -1, -1):
            if self.coeffs[k] != 0:
                return k
        return -1

    def truncate(self, order: int) -> "UniJet":
        if order > self.order:
            raise JetError(f"cannot raise order {self.order} to {order}")
        return UniJet(order, self.center, self.coeffs[: order + 1])

    def recenter_value(self, center) -> "UniJet":
        """Same coefficients, different center (used for compositions)."""
        return UniJet(self.order, Q(center), self.coeffs)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "UniJet"):
        if self.order != other.order or self.center != other.center:
            raise JetError(
                f"UniJet mismatch: order {self.order} vs {other.order}, center {self.center} vs {other.center}"
            )

    def __add__(self, other):
        if _scalar(other):
            return UniJet(self.order, self.center, (self.coeffs[0] + Q(other),) + self.coeffs[1:])
        self._check(other)
        return UniJet(self.order, self.center, tuple(map(operator.add, self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return UniJet(self.order, self.center, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _scalar(other):
            q = Q(other)
            return UniJet(self.order, self.center, tuple(c * q for c in self.coeffs))
        self._check(other)
        W = self.order
        a, b = self.coeffs, other.coeffs
        out = [ZERO] * (W + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(W - i + 1):
                if b[j] != 0:
                    out[i + j] += ai * b[j]
        return UniJet(W, self.center, tuple(out))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, UniJet):
            return NotImplemented
        return self.order == other.order and self.center == other.center and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.center, self.coeffs))

    def derivative(self) -> "UniJet":
        """Formal derivative, declared at ``order - 1``."""
        if self.order == 0:
            raise JetError("derivative of an order-0 jet carries no information")
        return UniJet(self.order - 1, self.center, tuple(k * self.coeffs[k] for k in range(1, self.order + 1)))

    def integral(self, constant=0) -> "UniJet":
        """Antiderivative with the given value at the center, at ``order + 1``."""
        cs = [Q(constant)] + [self.coeffs[k] / (k + 1) for k in range(self.order + 1)]
        return UniJet(self.order + 1, self.center, tuple(cs))

    def reciprocal(self) -> "UniJet":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise JetError("reciprocal of a jet vanishing at its center")
        W = self.order
        out = [ZERO] * (W + 1)
        out[0] = 1 / a0
        for k in range(1, W + 1):
            s = ZERO
            for j in range(1, k + 1):
                if self.coeffs[j] != 0:
                    s += self.coeffs[j] * out[k - j]
            out[k] = -s / a0
        return UniJet(W, self.center, tuple(out))

    def __truediv__(self, other):
        if _scalar(other):
            return self * (1 / Q(other))
        return self * other.reciprocal()

    def __call__(self, other: "UniJet") -> "UniJet":
        return uni_series_compose(self, other)

    def __repr__(self):
        terms = ", ".join(qstr(c) for c in self.coeffs)
        return f"UniJet(order={self.order}, center={qstr(self.center)}, [{terms}])"


def uni_series_compose(theta: UniJet, g: UniJet) -> UniJet:
    """``theta o g`` for one-variable jets; ``g`` must take the value ``theta.center``."""
    if g.coeffs[0] != theta.center:
        raise JetError(f"composition center mismatch: g(center) = {g.coeffs[0]}, theta centered at {theta.center}")
    W = min(theta.order, g.order)
    u = UniJet(W, g.center, (ZERO,) + g.coeffs[1 : W + 1])
    acc = UniJet.constant(theta.coeffs[W], W, g.center)
    for k in range(W - 1, -1, -1):
        acc = acc * u + theta.coeffs[k]
    return acc


def uni_reversion(g: UniJet) -> UniJet:
    """Compositional inverse ``h`` with ``h o g = id``, centered at ``g(center)``."""
    W = g.order
    g1 = g.coeffs[1] if W >= 1 else ZERO
    if g1 == 0:
        raise JetError("reversion needs a nonzero linear coefficient")
    # v = t - center,  s = g(t) - g(center) = sum_{k>=1} g_k v^k ;  want v = sum h_k s^k
    s = UniJet(W, ZERO, (ZERO,) + g.coeffs[1:])
    powers = [UniJet.constant(1, W, ZERO)]
    for _ in range(W):
        powers.append(powers[-1] * s)
    h = [ZERO] * (W + 1)
    h[1] = 1 / g1
    for k in range(2, W + 1):
        acc = ZERO
        for j in range(1, k):
            acc += h[j] * powers[j].coeffs[k]
        h[k] = -acc / powers[k].coeffs[k]
    h[0] = g.center
    return UniJet(W, g.coeffs[0], tuple(h))


def exp_series(order: int, center=0) -> UniJet:
    """exp(s - center) as a jet at ``center`` (the factor exp(center) is left out)."""
    cs = [ONE]
    for k in range(1, order + 1):
        cs.append(cs[-1] / k)
    return UniJet(order, Q(center), tuple(cs))


def log1p_series(order: int) -> UniJet:
    """ln(1 + s) at s = 0."""
    cs = [ZERO] + [mpq((-1) ** (k + 1), k) for k in range(1, order + 1)]
    return UniJet(order, ZERO, tuple(cs))


def reciprocal_series(order: int, center) -> UniJet:
    """1/s expanded at ``s = center``."""
    c = Q(center)
    if c == 0:
        raise JetError("1/s has no expansion at 0")
    cs = [mpq((-1) ** k) / c ** (k + 1) for k in range(order + 1)]
    return UniJet(order, c, tuple(cs))


# ---------------------------------------------------------------------------
# several variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MultiJet:
    """Sparse order-``order`` jet of a function of ``n`` variables at ``base``."""

    n: int
    order: int
    base: tuple
    coeffs: Mapping

    def __post_init__(self):
        if self.n < 1:
            raise JetError("dimension must be positive")
        base = tuple(Q(b) for b in self.base)
        if len(base) != self.n:
            raise JetError(f"base point has {len(base)} coordinates, expected {self.n}")
        clean = {}
        for alpha, c in self.coeffs.items():
            if len(alpha) != self.n:
                raise JetError(f"exponent {alpha} has wrong length")
            if sum(alpha) > self.order:
                raise JetError(f"exponent {alpha} exceeds order {self.order}")
            c = Q(c)
            if c != 0:
                clean[tuple(alpha)] = c
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -------------------------------------------------------
    @classmethod
    def _raw(cls, n, order, base, coeffs) -> "MultiJet":
        """Trusted constructor: ``coeffs`` already clean, base already rational."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "order", order)
        object.__setattr__(obj, "base", base)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @classmethod
    def zero(cls, n: int, order: int, base=None) -> "MultiJet":
        return cls(n, order, base if base is not None else (0,) * n, {})

    @classmethod
    def constant(cls, value, n: int, order: int, base=None) -> "MultiJet":
        return cls(n, order, base if base is not None else (0,) * n, {(0,) * n: value})

    @classmethod
    def variable(cls, i: int, n: int, order: int, base=None) -> "MultiJet":
        """The coordinate ``x_i`` (1-based) expanded at ``base``: ``base_i + t_i``."""
        if not 1 <= i <= n:
            raise JetError(f"variable index {i} out of range 1..{n}")
        base = tuple(Q(b) for b in (base if base is not None else (0,) * n))
        coeffs = {(0,) * n: base[i - 1]}
        if order >= 1:
            e = [0] * n
            e[i - 1] = 1
            coeffs[tuple(e)] = ONE
        return cls(n, order, base, coeffs)

    @classmethod
    def from_polynomial(cls, terms: Mapping, n: int, order: int, base=None) -> "MultiJet":
        """Expand a polynomial given in absolute variables ``{alpha: coeff}``."""
        base = tuple(Q(b) for b in (base if base is not None else (0,) * n))
        acc = cls.zero(n, order, base)
        xs = [cls.variable(i + 1, n, order, base) for i in range(n)]
        for alpha, c in terms.items():
            term = cls.constant(c, n, order, base)
            for i, e in enumerate(alpha):
                if e:
                    term = term * jet_power(xs[i], e)
            acc = acc + term
        return acc

    # -- queries ------------------------------------------------------------
    @property
    def constant_term(self) -> mpq:
        return self.coeffs.get((0,) * self.n, ZERO)

    def coefficient(self, alpha: Sequence[int]) -> mpq:
        return self.coeffs.get(tuple(alpha), ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def lowest_order(self):
        """Smallest total degree carrying a nonzero coefficient (``math.inf`` if none)."""
        return min((sum(a) for a in self.coeffs), default=math.inf)

    def homogeneous_part(self, d: int) -> dict:
        return {a: c for a, c in self.coeffs.items() if sum(a) == d}

    @cached_property
    def _by_degree(self):
        buckets = [[] for _ in range(self.order + 1)]
        for alpha, c in self.coeffs.items():
            buckets[sum(alpha)].append((alpha, c))
        return buckets

    @cached_property
    def _packed_by_degree(self):
        """Buckets of ``(packed exponent, coeff)`` with one base-(W+1) digit per variable."""
        B = self.order + 1
        buckets = [[] for _ in range(self.order + 1)]
        for alpha, c in self.coeffs.items():
            key = 0
            for e in reversed(alpha):
                key = key * B + e
            buckets[sum(alpha)].append((key, c))
        return buckets

    def truncate(self, order: int) -> "MultiJet":
        if order > self.order:
            raise JetError(f"cannot raise order {self.order} to {order}")
        if order == self.order:
            return self
        return MultiJet._raw(self.n, order, self.base, {a: c for a, c in self.coeffs.items() if sum(a) <= order})

    def compatible(self, other: "MultiJet") -> bool:
        return self.n == other.n and self.order == other.order and self.base == other.base

    def _check(self, other: "MultiJet"):
        if not isinstance(other, MultiJet):
            raise JetError(f"cannot combine MultiJet with {type(other).__name__}")
        if self.n != other.n:
            raise JetError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.order != other.order:
            raise JetError(f"order mismatch: {self.order} vs {other.order}; truncate explicitly")
        if self.base != other.base:
            raise JetError("base point mismatch")

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if _scalar(other):
            other = MultiJet.constant(other, self.n, self.order, self.base)
        return jet_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return MultiJet._raw(self.n, self.order, self.base, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        if _scalar(other):
            other = MultiJet.constant(other, self.n, self.order, self.base)
        return jet_add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _scalar(other):
            return jet_scale(self, other)
        return jet_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _scalar(other):
            return jet_scale(self, 1 / Q(other))
        return jet_mul(self, jet_inverse(other))

    def __pow__(self, k: int):
        return jet_power(self, k)

    def __eq__(self, other):
        if not isinstance(other, MultiJet):
            return NotImplemented
        return self.compatible(other) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.order, self.base, frozenset(self.coeffs.items())))

    def partial(self, i: int) -> "MultiJet":
        return jet_partial(self, i)

    def shift_monomial(self, i: int, e: int, coeff=ONE) -> "MultiJet":
        """Multiply by ``coeff * t_i^e`` (cheap: no convolution)."""
        if e == 0 and coeff == 1:
            return self
        W = self.order
        out = {}
        for alpha, c in self.coeffs.items():
            if sum(alpha) + e > W:
                continue
            beta = list(alpha)
            beta[i - 1] += e
            out[tuple(beta)] = c * coeff
        return MultiJet._raw(self.n, W, self.base, {a: c for a, c in out.items() if c != 0})

    def restrict_to_axis(self, i: int) -> UniJet:
        """The one-variable jet of ``t -> f(base + t e_i)``, centered at ``base_i``."""
        cs = [ZERO] * (self.order + 1)
        for alpha, c in self.coeffs.items():
            if all(a == 0 for k, a in enumerate(alpha) if k != i - 1):
                cs[alpha[i - 1]] = c
        return UniJet(self.order, self.base[i - 1], tuple(cs))

    def dump(self) -> str:
        """One monomial per line, ``coeff  exponent-vector``, graded-lex order."""
        lines = []
        for alpha in sorted(self.coeffs, key=grlex_key):
            lines.append(f"{qstr(self.coeffs[alpha])}  ({', '.join(map(str, alpha))})")
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self):
        shown = ", ".join(f"{alpha}: {qstr(c)}" for alpha, c in sorted(self.coeffs.items(), key=lambda t: grlex_key(t[0]))[:6])
        more = " ..." if len(self.coeffs) > 6 else ""
        return f"MultiJet(n={self.n}, order={self.order}, base={tuple(map(qstr, self.base))}, {{{shown}{more}}})"


def jet_add(a: MultiJet, b: MultiJet) -> MultiJet:
    a._check(b)
    out = dict(a.coeffs)
    for alpha, c in b.coeffs.items():
        v = out.get(alpha, ZERO) + c
        if v == 0:
            out.pop(alpha, None)
        else:
            out[alpha] = v
    return MultiJet._raw(a.n, a.order, a.base, out)


def jet_scale(a: MultiJet, q) -> MultiJet:
    q = Q(q)
    if q == 0:
        return MultiJet._raw(a.n, a.order, a.base, {})
    return MultiJet._raw(a.n, a.order, a.base, {k: c * q for k, c in a.coeffs.items()})


def jet_mul(a: MultiJet, b: MultiJet, upto: int | None = None) -> MultiJet:
    """Truncated product.

    ``upto`` drops every term above that degree while keeping the declared
    order; it is for internal callers that know those terms are discarded
    later (Horner steps).
    """
    a._check(b)
    W = a.order if upto is None else min(upto, a.order)
    # exponents are packed into integers; digits cannot overflow since degrees stay <= order
    abuck, bbuck = a._packed_by_degree, b._packed_by_degree
    out: dict = {}
    get = out.get
    for da in range(W + 1):
        ta = abuck[da]
        if not ta:
            continue
        for db in range(W - da + 1):
            tb = bbuck[db]
            if not tb:
                continue
            for ka, ca in ta:
                for kb, cb in tb:
                    key = ka + kb
                    out[key] = get(key, ZERO) + ca * cb
    B = a.order + 1
    n = a.n
    coeffs = {}
    for key, v in out.items():
        if v == 0:
            continue
        alpha = []
        for _ in range(n):
            key, e = divmod(key, B)
            alpha.append(e)
        coeffs[tuple(alpha)] = v
    return MultiJet._raw(n, a.order, a.base, coeffs)


def jet_partial(a: MultiJet, i: int) -> MultiJet:
    """Formal partial derivative in ``x_i``, declared at order ``W - 1``."""
    if not 1 <= i <= a.n:
        raise JetError(f"variable index {i} out of range 1..{a.n}")
    if a.order == 0:
        raise JetError("derivative of an order-0 jet carries no information")
    k = i - 1
    out = {}
    for alpha, c in a.coeffs.items():
        e = alpha[k]
        if e == 0:
            continue
        beta = alpha[:k] + (e - 1,) + alpha[k + 1 :]
        if sum(beta) <= a.order - 1:
            out[beta] = c * e
    return MultiJet._raw(a.n, a.order - 1, a.base, out)


def uni_compose(theta: UniJet, a: MultiJet) -> MultiJet:
    """Expansion of ``theta o a``; ``theta`` must be centered at ``a(base)``."""
    if theta.center != a.constant_term:
        raise JetError(f"center mismatch: theta at {theta.center}, a(base) = {a.constant_term}")
    W = min(theta.order, a.order)
    a = a.truncate(W)
    zero_idx = (0,) * a.n
    u = MultiJet._raw(a.n, W, a.base, {k: v for k, v in a.coeffs.items() if k != zero_idx})
    acc = MultiJet.constant(theta.coeffs[W], a.n, W, a.base)
    # Horner; the partial sum at step k is later multiplied by u^k, so order W-k suffices
    for k in range(W - 1, -1, -1):
        prod = jet_mul(acc, u, upto=W - k)
        c = theta.coeffs[k]
        if c != 0:
            coeffs = dict(prod.coeffs)
            v = coeffs.get(zero_idx, ZERO) + c
            if v == 0:
                coeffs.pop(zero_idx, None)
            else:
                coeffs[zero_idx] = v
            prod = MultiJet._raw(a.n, W, a.base, coeffs)
        acc = prod
    return acc


def jet_inverse(a: MultiJet) -> MultiJet:
    c = a.constant_term
    if c == 0:
        raise JetError("cannot invert a jet vanishing at the base point")
    return uni_compose(reciprocal_series(a.order, c), a)


def jet_power(a: MultiJet, k: int) -> MultiJet:
    """Integer power by repeated squaring (negative powers go through the inverse)."""
    if not isinstance(k, int):
        raise JetError("only integer exponents are supported")
    if k < 0:
        return jet_power(jet_inverse(a), -k)
    result = MultiJet.constant(1, a.n, a.order, a.base)
    sq = a
    while k:
        if k & 1:
            result = result * sq
        k >>= 1
        if k:
            sq = sq * sq
    return result


def substitute_diagonal(a: MultiJet, g: Sequence[UniJet], check_invertible: bool = True) -> MultiJet:
    """Expansion of ``a(g_1(t_1), ..., g_n(t_n))`` at the point ``(g_i.center)``."""
    if len(g) != a.n:
        raise JetError(f"need {a.n} substitutions, got {len(g)}")
    W = a.order
    for i, gi in enumerate(g):
        if gi.order < W:
            raise JetError(f"substitution {i + 1} has order {gi.order} < {W}")
        if gi.coeffs[0] != a.base[i]:
            raise JetError(f"substitution {i + 1} takes value {gi.coeffs[0]} at its center, jet is based at {a.base[i]}")
        if check_invertible and gi.coeffs[1] == 0:
            raise JetError(f"substitution {i + 1} has zero linear coefficient (not invertible)")
    coeffs = dict(a.coeffs)
    for i, gi in enumerate(g):
        u = UniJet(W, gi.center, (ZERO,) + gi.coeffs[1 : W + 1])
        powers = [UniJet.constant(1, W, gi.center)]
        for _ in range(W):
            powers.append(powers[-1] * u)
        out: dict = {}
        for alpha, c in coeffs.items():
            e = alpha[i]
            rest = sum(alpha) - e
            pc = powers[e].coeffs
            for k in range(e, W - rest + 1):
                if pc[k] == 0:
                    continue
                beta = alpha[:i] + (k,) + alpha[i + 1 :]
                out[beta] = out.get(beta, ZERO) + c * pc[k]
        coeffs = {k: v for k, v in out.items() if v != 0}
    new_base = tuple(gi.center for gi in g)
    return MultiJet._raw(a.n, W, new_base, coeffs)


def jet_compose(h: MultiJet, subs: Sequence[MultiJet]) -> MultiJet:
    """``h(s_1, ..., s_m)`` where each ``s_j`` is a jet taking the value ``h.base[j]``."""
    if len(subs) != h.n:
        raise JetError(f"need {h.n} substitutions, got {len(subs)}")
    first = subs[0]
    for j, s in enumerate(subs):
        first._check(s)
        if s.constant_term != h.base[j]:
            raise JetError(f"substitution {j + 1} takes value {s.constant_term}, h is centered at {h.base[j]}")
    W = min(h.order, first.order)
    us = [s.truncate(W) - s.constant_term for s in subs]

    def horner(terms: dict, var: int) -> MultiJet:
        if var == h.n:
            c = terms.get((), ZERO)
            return MultiJet.constant(c, first.n, W, first.base)
        groups: dict[int, dict] = {}
        for alpha, c in terms.items():
            groups.setdefault(alpha[0], {})[alpha[1:]] = c
        top = max(groups, default=0)
        acc = MultiJet.zero(first.n, W, first.base)
        for k in range(top, -1, -1):
            acc = acc * us[var]
            if k in groups:
                acc = acc + horner(groups[k], var + 1)
        return acc

    return horner({a: c for a, c in h.coeffs.items() if sum(a) <= W}, 0)
