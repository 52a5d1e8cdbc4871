"""Matrix differential operators ``P = P_i D^i`` with coefficients on the left."""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence

from .jetalgebra import (
    DiffFunction,
    MultiIndex,
    Signature,
    add_index,
    ev_apply,
    index_binomial,
    index_order,
    indices_below,
    partial_jet,
    sub_index,
    total_derivative,
    total_sum,
    unit_index,
    zero_index,
)

Entry = dict[MultiIndex, DiffFunction]


class DiffOperator:
    """A ``rows x cols`` matrix of differential polynomials in normal form.

    Entry ``(r, c)`` maps a multi-index ``i`` to the coefficient of ``D^i``
    acting on slot ``c``. Absent entries and absent multi-indices are zero.
    """

    __slots__ = ("rows", "cols", "m", "_entries", "_hash")

    def __init__(self, rows: int, cols: int, m: int,
                 entries: Mapping[tuple[int, int], Mapping[MultiIndex, DiffFunction]] = ()):
        self.rows = rows
        self.cols = cols
        self.m = m
        clean: dict[tuple[int, int], Entry] = {}
        for (r, c), terms in dict(entries).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry {(r, c)} outside a {rows}x{cols} operator")
            e = {}
            for i, f in terms.items():
                i = tuple(i)
                if len(i) != m:
                    raise ValueError(f"multi-index {i} does not have length {m}")
                if not isinstance(f, DiffFunction):
                    f = DiffFunction.constant(f)
                if f:
                    e[i] = e[i] + f if i in e else f
            e = {i: f for i, f in e.items() if f}
            if e:
                clean[(r, c)] = e
        self._entries = clean
        self._hash = None

    @classmethod
    def _raw(cls, rows, cols, m, entries):
        obj = cls.__new__(cls)
        obj.rows, obj.cols, obj.m = rows, cols, m
        obj._entries = entries
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, rows: int, cols: int, m: int) -> "DiffOperator":
        return cls._raw(rows, cols, m, {})

    @classmethod
    def identity(cls, n: int, m: int) -> "DiffOperator":
        one = DiffFunction.constant(1)
        return cls._raw(n, n, m, {(a, a): {zero_index(m): one} for a in range(n)})

    @classmethod
    def multiplication(cls, f: DiffFunction, m: int) -> "DiffOperator":
        return cls(1, 1, m, {(0, 0): {zero_index(m): f}})

    @classmethod
    def total_d(cls, mu: int, m: int) -> "DiffOperator":
        return cls(1, 1, m, {(0, 0): {unit_index(m, mu): DiffFunction.constant(1)}})

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["DiffOperator"]]) -> "DiffOperator":
        """Assemble a matrix from 1x1 operators."""
        rows = len(blocks)
        cols = len(blocks[0]) if rows else 0
        if any(len(row) != cols for row in blocks):
            raise ValueError("ragged operator matrix")
        m = blocks[0][0].m
        entries = {}
        for r, row in enumerate(blocks):
            for c, b in enumerate(row):
                if (b.rows, b.cols) != (1, 1):
                    raise ValueError("matrix entries must be scalar operators")
                if b.m != m:
                    raise ValueError("entries disagree on the number of independent variables")
                if (0, 0) in b._entries:
                    entries[(r, c)] = dict(b._entries[(0, 0)])
        return cls._raw(rows, cols, m, entries)

    # inspection
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def entry(self, r: int, c: int) -> Mapping[MultiIndex, DiffFunction]:
        return self._entries.get((r, c), {})

    def entries(self) -> Iterator[tuple[tuple[int, int], Mapping[MultiIndex, DiffFunction]]]:
        for rc in sorted(self._entries):
            yield rc, self._entries[rc]

    def coefficients(self) -> Iterator[DiffFunction]:
        for e in self._entries.values():
            yield from e.values()

    def is_zero(self) -> bool:
        return not self._entries

    def order(self) -> int:
        return max((index_order(i) for e in self._entries.values() for i in e), default=0)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.shape == other.shape and self.m == other.m and self._entries == other._entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.m, frozenset(
                (rc, frozenset(e.items())) for rc, e in self._entries.items())))
        return self._hash

    # linear structure
    def _check_same(self, other):
        if self.shape != other.shape or self.m != other.m:
            raise ValueError(f"operator shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        self._check_same(other)
        entries = {rc: dict(e) for rc, e in self._entries.items()}
        for rc, e in other._entries.items():
            tgt = entries.setdefault(rc, {})
            for i, f in e.items():
                s = tgt[i] + f if i in tgt else f
                if s:
                    tgt[i] = s
                else:
                    tgt.pop(i, None)
        return DiffOperator._raw(self.rows, self.cols, self.m, {rc: e for rc, e in entries.items() if e})

    def __neg__(self):
        return DiffOperator._raw(self.rows, self.cols, self.m,
                                 {rc: {i: -f for i, f in e.items()} for rc, e in self._entries.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self + (-other)

    def scale(self, f) -> "DiffOperator":
        """Left multiplication of every coefficient by a function or number."""
        entries = {}
        for rc, e in self._entries.items():
            e2 = {i: f * c for i, c in e.items()}
            e2 = {i: c for i, c in e2.items() if c}
            if e2:
                entries[rc] = e2
        return DiffOperator._raw(self.rows, self.cols, self.m, entries)

    def __matmul__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return compose(self, other)

    def __repr__(self):
        from .workbench.syntax import format_operator

        return f"DiffOperator({format_operator(self)!r})"


def _accumulate(target: dict, i: MultiIndex, f: DiffFunction):
    if i in target:
        s = target[i] + f
        if s:
            target[i] = s
        else:
            del target[i]
    elif f:
        target[i] = f


def commute_past(i: MultiIndex, f: DiffFunction) -> Entry:
    """Normal form of ``D^i o f``: sum over ``j <= i`` of ``C(i,j) (D^j f) D^(i-j)``."""
    out: Entry = {}
    if not f:
        return out
    for j in indices_below(i):
        g = total_derivative(f, j)
        if g:
            b = index_binomial(i, j)
            _accumulate(out, sub_index(i, j), g * b if b != 1 else g)
    return out


def compose(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """Normal form of ``P o Q``."""
    if P.cols != Q.rows:
        raise ValueError(f"cannot compose {P.shape} with {Q.shape}")
    if P.m != Q.m:
        raise ValueError("operators disagree on the number of independent variables")
    by_row: dict[int, list] = {}
    for (k, c), e in Q._entries.items():
        by_row.setdefault(k, []).append((c, e))
    entries: dict[tuple[int, int], Entry] = {}
    for (r, k), pe in P._entries.items():
        for c, qe in by_row.get(k, ()):
            tgt = entries.setdefault((r, c), {})
            for i, p in pe.items():
                for j, q in qe.items():
                    for l, g in commute_past(i, q).items():
                        _accumulate(tgt, add_index(l, j), p * g)
    return DiffOperator._raw(P.rows, Q.cols, P.m, {rc: e for rc, e in entries.items() if e})


def adjoint(P: DiffOperator) -> DiffOperator:
    """Lagrange adjoint: entry ``(c, r)`` of the result is ``(-D)^i o P^{rc}_i``."""
    entries: dict[tuple[int, int], Entry] = {}
    for (r, c), e in P._entries.items():
        tgt = entries.setdefault((c, r), {})
        for i, p in e.items():
            sign = -1 if index_order(i) % 2 else 1
            for l, g in commute_past(i, p).items():
                _accumulate(tgt, l, g * sign if sign < 0 else g)
    return DiffOperator._raw(P.cols, P.rows, P.m, {rc: e for rc, e in entries.items() if e})


def apply(P: DiffOperator, g: Sequence[DiffFunction]) -> tuple[DiffFunction, ...]:
    """Apply ``P`` to a tuple indexed by its columns."""
    if len(g) != P.cols:
        raise ValueError(f"operator has {P.cols} columns, argument has {len(g)} components")
    parts: list[list[DiffFunction]] = [[] for _ in range(P.rows)]
    for (r, c), e in P._entries.items():
        if not g[c]:
            continue
        for i, p in e.items():
            parts[r].append(p * total_derivative(g[c], i))
    return tuple(total_sum(ps) for ps in parts)


def pairing(f: Sequence[DiffFunction], g: Sequence[DiffFunction]) -> DiffFunction:
    """``<f, g> = f_a g^a``."""
    if len(f) != len(g):
        raise ValueError("pairing of tuples with different lengths")
    return total_sum(a * b for a, b in zip(f, g) if a and b)


def frechet(L: DiffFunction, sig: Signature) -> DiffOperator:
    """Row operator ``L_*`` with entries ``sum_i (dL/du^alpha_i) D^i``."""
    n = sig.n_total
    entries: dict[tuple[int, int], Entry] = {}
    for a in L.jet_support():
        if a.alpha >= n:
            raise ValueError(f"jet family {a.alpha} is not in the signature")
        d = partial_jet(L, a)
        if d:
            entries.setdefault((0, a.alpha), {})[a.i] = d
    return DiffOperator._raw(1, n, sig.m, entries)


def green_current(P: DiffOperator, f: Sequence[DiffFunction], g: Sequence[DiffFunction]) -> tuple[DiffFunction, ...]:
    """A current ``psi`` with ``<f, P g> - <P* f, g> = Div psi``.

    Built by repeated integration by parts ``K D_mu h = D_mu(K h) - (D_mu K) h``,
    always peeling the largest direction still present.
    """
    if len(f) != P.rows or len(g) != P.cols:
        raise ValueError(f"arguments do not match a {P.rows}x{P.cols} operator")
    m = P.m
    parts: list[list[DiffFunction]] = [[] for _ in range(m)]
    for (r, c), e in P.entries():
        if not f[r] or not g[c]:
            continue
        for i in sorted(e, reverse=True):
            K = f[r] * e[i]
            rest = list(i)
            while any(rest) and K:
                mu = max(nu for nu in range(m) if rest[nu])
                rest[mu] -= 1
                parts[mu].append(K * total_derivative(g[c], tuple(rest)))
                K = -total_derivative(K, mu)
    return tuple(total_sum(p) for p in parts)


def ev_on_operator(phi: Sequence[DiffFunction], P: DiffOperator) -> DiffOperator:
    """The commutator ``[ev_phi, P]``: ``ev_phi`` applied to every coefficient."""
    entries = {}
    for rc, e in P._entries.items():
        e2 = {}
        for i, p in e.items():
            q = ev_apply(phi, p)
            if q:
                e2[i] = q
        if e2:
            entries[rc] = e2
    return DiffOperator._raw(P.rows, P.cols, P.m, entries)


__all__ = [
    "DiffOperator",
    "adjoint",
    "apply",
    "commute_past",
    "compose",
    "ev_on_operator",
    "frechet",
    "green_current",
    "pairing",
]
