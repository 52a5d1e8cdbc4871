"""Mixed forms in the contact basis ``du^alpha_i - u^alpha_{i+(mu)} dx^mu`` and ``dx^mu``.

A basis monomial is written with all vertical factors first, each group
strictly sorted: ``du_{a1} ^ ... ^ du_{ap} ^ dx^{mu1} ^ ... ^ dx^{muq}``.
Evaluation on derivations uses the alternating sum divided by ``r!``, which is
the normalisation under which the Cartan formula carries its ``1/(q+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Mapping, Sequence

from .jetalgebra import (
    ZERO,
    DiffFunction,
    JetVar,
    partial_jet,
    shift_jet,
    total_derivative,
    total_sum,
)

Basis = tuple[tuple[JetVar, ...], tuple[int, ...]]


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def _canonical(V, H) -> tuple[int, Basis] | None:
    """Sort both factor groups; None if a factor repeats."""
    if len(set(V)) != len(V) or len(set(H)) != len(H):
        return None
    sign = _perm_sign(V) * _perm_sign(H)
    return sign, (tuple(sorted(V)), tuple(sorted(H)))


class MixedForm:
    """A finite sum ``coefficient * basis monomial`` in ``Omega^{p,q}`` (or a sum of bidegrees)."""

    __slots__ = ("m", "_terms")

    def __init__(self, m: int, terms: Mapping[Basis, DiffFunction] = ()):
        self.m = m
        clean: dict[Basis, DiffFunction] = {}
        for (V, H), f in dict(terms).items():
            if any(not 0 <= mu < m for mu in H):
                raise ValueError(f"horizontal index out of range in {H}")
            c = _canonical(tuple(V), tuple(H))
            if c is None:
                continue
            sign, key = c
            if not isinstance(f, DiffFunction):
                f = DiffFunction.constant(f)
            val = clean.get(key, ZERO) + (f if sign > 0 else -f)
            if val:
                clean[key] = val
            else:
                clean.pop(key, None)
        self._terms = clean

    @classmethod
    def _raw(cls, m, terms):
        obj = cls.__new__(cls)
        obj.m = m
        obj._terms = terms
        return obj

    @classmethod
    def function(cls, f: DiffFunction, m: int) -> "MixedForm":
        return cls(m, {((), ()): f})

    @classmethod
    def delta_u(cls, a: JetVar, m: int, coeff: DiffFunction | int = 1) -> "MixedForm":
        return cls(m, {((a,), ()): coeff})

    @classmethod
    def dx(cls, mu: int, m: int, coeff: DiffFunction | int = 1) -> "MixedForm":
        return cls(m, {((), (mu,)): coeff})

    @classmethod
    def top(cls, m: int, coeff: DiffFunction | int = 1) -> "MixedForm":
        """``coeff * dx^1 ^ ... ^ dx^m``."""
        return cls(m, {((), tuple(range(m))): coeff})

    @classmethod
    def top_minus(cls, mu: int, m: int, coeff: DiffFunction | int = 1) -> "MixedForm":
        """``coeff * (-1)^mu dx^1 ^ .. (omit mu) .. ^ dx^m`` (mu zero-based), so ``dx^mu ^ it = top``."""
        sign = -1 if mu % 2 else 1
        c = coeff if isinstance(coeff, DiffFunction) else DiffFunction.constant(coeff)
        return cls(m, {((), tuple(nu for nu in range(m) if nu != mu)): c * sign})

    @property
    def terms(self) -> Mapping[Basis, DiffFunction]:
        return self._terms

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(V), len(H)) for V, H in self._terms}

    def coefficient(self, V: Sequence[JetVar], H: Sequence[int]) -> DiffFunction:
        c = _canonical(tuple(V), tuple(H))
        if c is None:
            return ZERO
        sign, key = c
        f = self._terms.get(key, ZERO)
        return f if sign > 0 else -f

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, MixedForm):
            return NotImplemented
        return self.m == other.m and self._terms == other._terms

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, MixedForm):
            return NotImplemented
        acc = dict(self._terms)
        for k, f in other._terms.items():
            v = acc.get(k, ZERO) + f
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return MixedForm._raw(self.m, acc)

    def __neg__(self):
        return MixedForm._raw(self.m, {k: -f for k, f in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "MixedForm":
        return MixedForm._raw(self.m, {k: v for k, c in self._terms.items() if (v := f * c)})

    def __repr__(self):
        parts = []
        for (V, H), f in sorted(self._terms.items()):
            basis = " ^ ".join([f"du{a.alpha}{list(a.i)}" for a in V] + [f"dx{mu}" for mu in H])
            parts.append(f"({f!r})*[{basis}]")
        return "MixedForm(" + " + ".join(parts) + ")" if parts else "MixedForm(0)"


def _collect(m: int, parts: list[tuple[int, tuple, tuple, DiffFunction]]) -> MixedForm:
    acc: dict[Basis, list[DiffFunction]] = {}
    for sign, V, H, f in parts:
        c = _canonical(V, H)
        if c is None or not f:
            continue
        s, key = c
        acc.setdefault(key, []).append(f if s * sign > 0 else -f)
    out = {}
    for key, fs in acc.items():
        v = total_sum(fs)
        if v:
            out[key] = v
    return MixedForm._raw(m, out)


def wedge(a: MixedForm, b: MixedForm) -> MixedForm:
    if a.m != b.m:
        raise ValueError("forms over different numbers of independent variables")
    parts = []
    for (V1, H1), f in a._terms.items():
        for (V2, H2), g in b._terms.items():
            # moving V2 left past H1
            sign = -1 if (len(H1) * len(V2)) % 2 else 1
            parts.append((sign, V1 + V2, H1 + H2, f * g))
    return _collect(a.m, parts)


def d_v(omega: MixedForm) -> MixedForm:
    """Vertical differential: ``d_V(f b) = sum_a (d f / d u_a) du_a ^ b``."""
    parts = []
    for (V, H), f in omega._terms.items():
        for a in f.jet_support():
            parts.append((1, (a,) + V, H, partial_jet(f, a)))
    return _collect(omega.m, parts)


def d_h(omega: MixedForm) -> MixedForm:
    """Horizontal differential from ``d_H f = D_mu f dx^mu`` and ``d_H du_i = -du_{i+(mu)} ^ dx^mu``."""
    m = omega.m
    parts = []
    for (V, H), f in omega._terms.items():
        p = len(V)
        lead = -1 if p % 2 else 1
        for mu in range(m):
            # dx^mu moved right past the p vertical factors
            parts.append((lead, V, (mu,) + H, total_derivative(f, mu)))
        for s, v in enumerate(V):
            for mu in range(m):
                newV = V[:s] + (shift_jet(v, mu),) + V[s + 1:]
                parts.append((lead, newV, (mu,) + H, f))
    return _collect(m, parts)


# -- derivations ---------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    """``X = sum_a vertical[a] d/du_a + sum_mu horizontal[mu] D_mu`` with finite vertical support."""

    vertical: Mapping[JetVar, DiffFunction] = field(default_factory=dict)
    horizontal: tuple[DiffFunction, ...] = ()

    def apply(self, F: DiffFunction) -> DiffFunction:
        parts = [v * partial_jet(F, a) for a, v in self.vertical.items() if v]
        parts += [c * total_derivative(F, mu) for mu, c in enumerate(self.horizontal) if c]
        return total_sum(parts)

    def vertical_at(self, a: JetVar) -> DiffFunction:
        return self.vertical.get(a, ZERO)

    def horizontal_at(self, mu: int) -> DiffFunction:
        return self.horizontal[mu] if mu < len(self.horizontal) else ZERO


def derivation_bracket(X: Derivation, Y: Derivation, m: int) -> Derivation:
    """Commutator ``[X, Y]`` split into its vertical and horizontal parts."""
    horiz = tuple(X.apply(Y.horizontal_at(mu)) - Y.apply(X.horizontal_at(mu)) for mu in range(m))
    keys = set(X.vertical) | set(Y.vertical)
    for a in list(keys):
        for mu in range(m):
            lower = shift_jet(a, mu, -1)
            if lower is not None:
                keys.add(lower)
    vert = {}
    for a in keys:
        val = X.apply(Y.vertical_at(a)) - Y.apply(X.vertical_at(a))
        for mu in range(m):
            up = shift_jet(a, mu)
            val = val + Y.horizontal_at(mu) * X.vertical_at(up) - X.horizontal_at(mu) * Y.vertical_at(up)
        if val:
            vert[a] = val
    return Derivation(vert, horiz)


def _pair_basis(theta, X: Derivation) -> DiffFunction:
    kind, val = theta
    if kind == "v":
        return X.vertical_at(val)
    return X.horizontal_at(val)


def eval_form(omega: MixedForm, fields: Sequence[Derivation]) -> DiffFunction:
    """Alternating evaluation ``(1/r!) sum_sigma sgn(sigma) prod_s theta_s(X_sigma(s))``."""
    r = len(fields)
    parts = []
    for (V, H), f in omega._terms.items():
        if len(V) + len(H) != r:
            raise ValueError(f"form of degree {len(V) + len(H)} evaluated on {r} fields")
        thetas = [("v", a) for a in V] + [("h", mu) for mu in H]
        table = [[_pair_basis(t, X) for X in fields] for t in thetas]
        det = []
        for perm in permutations(range(r)):
            term = f
            for s, t in enumerate(perm):
                term = term * table[s][t]
                if not term:
                    break
            if term:
                det.append(term if _perm_sign(perm) > 0 else -term)
        parts.append(total_sum(det))
    return total_sum(parts) * Fraction(1, factorial(r))


def cartan_d_eval(omega: MixedForm, fields: Sequence[Derivation]) -> DiffFunction:
    """``d omega (X_0, ..., X_q)`` from the Cartan formula with its ``1/(q+1)``.

    Uses only evaluation of ``omega`` itself, the action of the fields and
    their brackets; independent of :func:`d_v` and :func:`d_h`.
    """
    m = omega.m
    q = len(fields) - 1
    parts = []
    for r, X in enumerate(fields):
        rest = list(fields[:r]) + list(fields[r + 1:])
        val = X.apply(eval_form(omega, rest))
        parts.append(val if r % 2 == 0 else -val)
    for r in range(q + 1):
        for s in range(r + 1, q + 1):
            rest = [Z for t, Z in enumerate(fields) if t not in (r, s)]
            val = eval_form(omega, [derivation_bracket(fields[r], fields[s], m)] + rest)
            parts.append(val if (r + s) % 2 == 0 else -val)
    return total_sum(parts) * Fraction(1, q + 1)
