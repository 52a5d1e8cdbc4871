"""Sparse differential polynomials on the free jet space.

A :class:`DiffFunction` is a polynomial in the independent variables ``x^mu``
and the jet variables ``u^alpha_i`` with exact rational coefficients. All
values are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from gmpy2 import mpq

# Non-integral coefficients are stored as gmpy2 rationals; Fractions are
# accepted everywhere and converted on the way in.
MPQ = type(mpq())
Number = Union[int, Fraction, MPQ]
SCALARS = (int, Fraction, MPQ)
MultiIndex = tuple[int, ...]


# -- multi-indices -----------------------------------------------------------

def zero_index(m: int) -> MultiIndex:
    return (0,) * m


def unit_index(m: int, mu: int) -> MultiIndex:
    return tuple(1 if nu == mu else 0 for nu in range(m))


def shift_index(i: MultiIndex, mu: int, k: int = 1) -> MultiIndex | None:
    """Return ``i + k*(mu)``, or None when a component would go negative."""
    e = i[mu] + k
    if e < 0:
        return None
    return i[:mu] + (e,) + i[mu + 1:]


def add_index(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(i, j))


def sub_index(i: MultiIndex, j: MultiIndex) -> MultiIndex | None:
    out = tuple(a - b for a, b in zip(i, j))
    if any(e < 0 for e in out):
        return None
    return out


def index_order(i: MultiIndex) -> int:
    return sum(i)


def indices_below(i: MultiIndex) -> Iterator[MultiIndex]:
    """All ``j <= i`` componentwise."""
    return product(*(range(e + 1) for e in i))


def index_binomial(i: MultiIndex, j: MultiIndex) -> int:
    out = 1
    for a, b in zip(i, j):
        out *= comb(a, b)
    return out


def indices_up_to(m: int, order: int) -> list[MultiIndex]:
    """Multi-indices of length ``m`` and order ``<= order`` in graded-lex order."""
    out = [i for i in product(range(order + 1), repeat=m) if sum(i) <= order]
    out.sort(key=lambda i: (sum(i), i))
    return out


# -- signature ---------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Independent and dependent variable names.

    ``formal`` names extra dependent families appended after ``dependent``;
    they take part in every algebraic operation but are not physical fields.
    """

    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    formal: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        object.__setattr__(self, "formal", tuple(self.formal))
        if not self.independent:
            raise ValueError("at least one independent variable is required")
        if not self.dependent:
            raise ValueError("at least one dependent variable is required")
        names = self.independent + self.dependent + self.formal
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct: {names}")

    @property
    def m(self) -> int:
        return len(self.independent)

    @property
    def n(self) -> int:
        """Number of physical dependent variables."""
        return len(self.dependent)

    @property
    def names(self) -> tuple[str, ...]:
        """All dependent names, formal families included, by alpha index."""
        return self.dependent + self.formal

    @property
    def n_total(self) -> int:
        return len(self.dependent) + len(self.formal)

    def dep_index(self, name: str) -> int:
        return self.names.index(name)

    def with_formal_families(self, count: int, prefix: str = "th") -> tuple["Signature", list[list[int]]]:
        """Append ``count`` formal copies of the dependent set.

        Returns the extended signature and, per family, the alpha indices of
        its components.
        """
        taken = set(self.independent + self.names)
        p = prefix
        while True:
            new = [f"{p}{k + 1}{d}" for k in range(count) for d in self.dependent]
            if not taken.intersection(new):
                break
            p += "h"
        base = self.n_total
        ext = Signature(self.independent, self.dependent, self.formal + tuple(new))
        families = [[base + k * self.n + a for a in range(self.n)] for k in range(count)]
        return ext, families


# -- jet variables -----------------------------------------------------------

class JetVar(NamedTuple):
    """The jet coordinate ``u^alpha_i``; ``order`` caches ``|i|`` so tuples sort graded-lex."""

    alpha: int
    order: int
    i: MultiIndex


def jet(alpha: int, i: Sequence[int]) -> JetVar:
    i = tuple(i)
    if any(e < 0 for e in i):
        raise ValueError(f"negative multi-index {i}")
    return JetVar(alpha, sum(i), i)


@lru_cache(maxsize=None)
def shift_jet(a: JetVar, mu: int, k: int = 1) -> JetVar | None:
    i = shift_index(a.i, mu, k)
    if i is None:
        return None
    return JetVar(a.alpha, a.order + k, i)


# -- differential polynomials ------------------------------------------------

# A monomial is (x-part, jet-part): sorted tuples of (mu, exponent) and
# (JetVar, exponent), exponents >= 1.
XPart = tuple[tuple[int, int], ...]
JPart = tuple[tuple[JetVar, int], ...]
Monomial = tuple[XPart, JPart]

_ONE: Monomial = ((), ())


def _merge(p, q):
    if not p:
        return q
    if not q:
        return p
    d = dict(p)
    for k, e in q:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def _bump(p, key):
    """Multiply a sorted part by one more factor ``key``."""
    for pos, (k, e) in enumerate(p):
        if k == key:
            return p[:pos] + ((k, e + 1),) + p[pos + 1:]
        if key < k:
            return p[:pos] + ((key, 1),) + p[pos:]
    return p + ((key, 1),)


def _lower(p, pos):
    """Decrement the exponent at position ``pos`` of a sorted part."""
    k, e = p[pos]
    if e == 1:
        return p[:pos] + p[pos + 1:]
    return p[:pos] + ((k, e - 1),) + p[pos + 1:]


def monomial_degree(mono: Monomial) -> int:
    return sum(e for _, e in mono[0]) + sum(e for _, e in mono[1])


def monomial_key(mono: Monomial):
    """Canonical graded-lex key: total degree, then x-exponents, then jets."""
    return (monomial_degree(mono), mono[0], mono[1])


class DiffFunction:
    """A differential polynomial in normal form.

    Coefficients are ints or exact rationals, never zero. Two DiffFunctions are equal
    exactly when they are the same polynomial.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | Iterable[tuple[Monomial, Number]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Number] = {}
        for mono, c in items:
            xp, jp = mono
            mono = (tuple(sorted(xp)), tuple(sorted(jp)))
            acc[mono] = acc.get(mono, 0) + _coerce(c)
        self._terms = {k: v for k, v in acc.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "DiffFunction":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def constant(cls, c: Number) -> "DiffFunction":
        c = _coerce(c)
        return cls._raw({_ONE: c} if c else {})

    @classmethod
    def x(cls, mu: int) -> "DiffFunction":
        return cls._raw({(((mu, 1),), ()): 1})

    @classmethod
    def var(cls, a: JetVar) -> "DiffFunction":
        return cls._raw({((), ((a, 1),)): 1})

    @classmethod
    def u(cls, alpha: int, i: Sequence[int]) -> "DiffFunction":
        return cls.var(jet(alpha, i))

    # inspection
    @property
    def terms(self) -> Mapping[Monomial, Number]:
        return self._terms

    def sorted_terms(self) -> list[tuple[Monomial, Number]]:
        return sorted(self._terms.items(), key=lambda t: monomial_key(t[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def jet_support(self) -> set[JetVar]:
        return {a for (_, jp) in self._terms for a, _ in jp}

    def depends_on_jets(self) -> bool:
        return any(jp for (_, jp) in self._terms)

    def degree(self) -> int:
        return max((monomial_degree(k) for k in self._terms), default=0)

    def jet_order(self) -> int:
        return max((a.order for a in self.jet_support()), default=0)

    def constant_value(self) -> Number | None:
        """The value if this is a constant, else None."""
        if not self._terms:
            return 0
        if len(self._terms) == 1 and _ONE in self._terms:
            return self._terms[_ONE]
        return None

    # arithmetic
    def __eq__(self, other):
        if isinstance(other, SCALARS):
            other = DiffFunction.constant(other)
        if not isinstance(other, DiffFunction):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _as_function(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for k, c in other._terms.items():
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return DiffFunction._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffFunction._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_function(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_function(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, SCALARS):
            other = _coerce(other)
            if not other:
                return DiffFunction._raw({})
            if other == 1:
                return self
            return DiffFunction._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, DiffFunction):
            return NotImplemented
        acc: dict[Monomial, Number] = {}
        for (xa, ja), ca in self._terms.items():
            for (xb, jb), cb in other._terms.items():
                k = (_merge(xa, xb), _merge(ja, jb))
                acc[k] = acc.get(k, 0) + ca * cb
        return DiffFunction._raw({k: v for k, v in acc.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SCALARS):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (1 / mpq(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a natural number")
        out = DiffFunction.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __repr__(self):
        from .workbench.syntax import format_function

        return f"DiffFunction({format_function(self)!r})"


def _coerce(c: Number) -> Number:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, (Fraction, MPQ)):
        return int(c.numerator) if c.denominator == 1 else mpq(c)
    raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")


def _as_function(v) -> DiffFunction | None:
    if isinstance(v, DiffFunction):
        return v
    if isinstance(v, SCALARS):
        return DiffFunction.constant(v)
    return None


ZERO = DiffFunction._raw({})
ONE = DiffFunction.constant(1)


def total_sum(items: Iterable[DiffFunction]) -> DiffFunction:
    acc: dict[Monomial, Number] = {}
    for f in items:
        for k, c in f._terms.items():
            acc[k] = acc.get(k, 0) + c
    return DiffFunction._raw({k: v for k, v in acc.items() if v})


# -- derivatives -------------------------------------------------------------

def partial_x(F: DiffFunction, mu: int, m: int | None = None) -> DiffFunction:
    """Explicit derivative in ``x^mu``; jet variables are held fixed."""
    if mu < 0 or (m is not None and mu >= m):
        raise IndexError(f"independent index {mu} out of range")
    acc: dict[Monomial, Number] = {}
    for (xp, jp), c in F._terms.items():
        for pos, (nu, e) in enumerate(xp):
            if nu == mu:
                k = (_lower(xp, pos), jp)
                acc[k] = acc.get(k, 0) + c * e
                break
    return DiffFunction._raw({k: v for k, v in acc.items() if v})


def partial_jet(F: DiffFunction, a: JetVar) -> DiffFunction:
    acc: dict[Monomial, Number] = {}
    for (xp, jp), c in F._terms.items():
        for pos, (b, e) in enumerate(jp):
            if b == a:
                k = (xp, _lower(jp, pos))
                acc[k] = acc.get(k, 0) + c * e
                break
    return DiffFunction._raw({k: v for k, v in acc.items() if v})


def jet_gradient(F: DiffFunction) -> dict[JetVar, DiffFunction]:
    """All nonzero ``dF/du_a`` in one pass over the terms."""
    acc: dict[JetVar, dict[Monomial, Number]] = {}
    for (xp, jp), c in F._terms.items():
        for pos, (a, e) in enumerate(jp):
            part = acc.setdefault(a, {})
            k = (xp, _lower(jp, pos))
            part[k] = part.get(k, 0) + c * e
    return {a: DiffFunction._raw({k: v for k, v in t.items() if v}) for a, t in acc.items()}


def _total_d1(F: DiffFunction, mu: int) -> DiffFunction:
    acc: dict[Monomial, Number] = {}
    for (xp, jp), c in F._terms.items():
        for pos, (nu, e) in enumerate(xp):
            if nu == mu:
                k = (_lower(xp, pos), jp)
                acc[k] = acc.get(k, 0) + c * e
                break
        for pos, (a, e) in enumerate(jp):
            k = (xp, _bump(_lower(jp, pos), shift_jet(a, mu)))
            acc[k] = acc.get(k, 0) + c * e
    return DiffFunction._raw({k: v for k, v in acc.items() if v})


def total_derivative(F: DiffFunction, i: MultiIndex | int) -> DiffFunction:
    """``D^i F``; an int ``i`` means the single direction ``D_i``."""
    if isinstance(i, int):
        return _total_d1(F, i)
    for mu, e in enumerate(i):
        for _ in range(e):
            if not F:
                return F
            F = _total_d1(F, mu)
    return F


def divergence(psi: Sequence[DiffFunction]) -> DiffFunction:
    """``Div psi = D_mu psi^mu``."""
    return total_sum(_total_d1(p, mu) for mu, p in enumerate(psi) if p)


# -- evolutionary derivations ------------------------------------------------

Characteristic = tuple[DiffFunction, ...]


def ev_apply(phi: Sequence[DiffFunction], F: DiffFunction) -> DiffFunction:
    """Apply the evolutionary derivation with characteristic ``phi``.

    Jets of families beyond ``len(phi)`` are left untouched.
    """
    n = len(phi)
    parts = []
    for a in F.jet_support():
        if a.alpha >= n or not phi[a.alpha]:
            continue
        parts.append(total_derivative(phi[a.alpha], a.i) * partial_jet(F, a))
    return total_sum(parts)


def characteristic_bracket(phi: Sequence[DiffFunction], psi: Sequence[DiffFunction]) -> Characteristic:
    if len(phi) != len(psi):
        raise ValueError("characteristics have different lengths")
    return tuple(ev_apply(phi, b) - ev_apply(psi, a) for a, b in zip(phi, psi))
