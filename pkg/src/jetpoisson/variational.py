"""Euler operator, functionals modulo divergences, and the maps j, j*, nabla, nabla*.

Jet-indexed objects are plain dicts with finite support:

* JetVector / JetCovector: ``(alpha, i) -> DiffFunction``
* JetMatrix (output of :func:`nabla`): ``(alpha, mu, i) -> DiffFunction``
* the argument of :func:`nabla_star`: ``(mu, alpha, i) -> DiffFunction``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .jetalgebra import (
    ZERO,
    DiffFunction,
    MultiIndex,
    Signature,
    index_order,
    indices_up_to,
    jet_gradient,
    shift_index,
    total_derivative,
    total_sum,
    zero_index,
)

Covector = tuple[DiffFunction, ...]
JetKey = tuple[int, MultiIndex]
JetCovector = dict[JetKey, DiffFunction]
JetVector = dict[JetKey, DiffFunction]


def neg_total_derivative(F: DiffFunction, i: MultiIndex) -> DiffFunction:
    """``(-D)^i F``."""
    G = total_derivative(F, i)
    return -G if index_order(i) % 2 else G


def euler_component(L: DiffFunction, alpha: int) -> DiffFunction:
    """``sum_i (-D)^i dL/du^alpha_i``, evaluated Horner-style.

    Partials are pushed down one step at a time, highest order first:
    the accumulated value at ``i`` moves to ``i - (mu)`` as ``-D_mu`` of
    itself, with ``mu`` the largest direction of ``i``.
    """
    return _euler_from_gradient(jet_gradient(L), alpha)


def _euler_from_gradient(grad, alpha: int) -> DiffFunction:
    pending: dict[MultiIndex, list[DiffFunction]] = {}
    for a, G in grad.items():
        if a.alpha == alpha:
            pending.setdefault(a.i, []).append(G)
    if not pending:
        return ZERO
    result = ZERO
    while pending:
        i = max(pending, key=lambda k: (index_order(k), k))
        val = total_sum(pending.pop(i))
        if not val:
            continue
        if not any(i):
            result = val
            continue
        mu = max(nu for nu, e in enumerate(i) if e)
        pending.setdefault(shift_index(i, mu, -1), []).append(-total_derivative(val, mu))
    return result


def euler(L: DiffFunction, sig: Signature) -> Covector:
    """Variational derivative ``delta_alpha L = sum_i (-D)^i dL/du^alpha_i``."""
    grad = jet_gradient(L)
    return tuple(_euler_from_gradient(grad, alpha) for alpha in range(sig.n_total))


def is_divergence(L: DiffFunction) -> bool:
    """True iff every Euler component of ``L`` vanishes.

    Families absent from ``L`` contribute nothing, so no signature is needed.
    On polynomial jet functions this kernel is exactly the image of Div.
    """
    grad = jet_gradient(L)
    for alpha in sorted({a.alpha for a in grad}):
        if _euler_from_gradient(grad, alpha):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Functional:
    """The class of ``rep`` modulo total divergences."""

    rep: DiffFunction

    def __eq__(self, other):
        if not isinstance(other, Functional):
            return NotImplemented
        return functional_equal(self, other)

    __hash__ = None

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.rep + other.rep)

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(self.rep - other.rep)

    def is_zero(self) -> bool:
        return is_divergence(self.rep)


def functional_equal(K: Functional, L: Functional) -> bool:
    return is_divergence(K.rep - L.rep)


# -- jet prolongation and its dual --------------------------------------------

def j_prolong(phi: Sequence[DiffFunction], support: Iterable[MultiIndex] | int, m: int | None = None) -> JetVector:
    """Components ``phi^alpha_i = D^i phi^alpha`` for ``i`` in ``support``.

    ``support`` is either an explicit collection of multi-indices or a maximal
    order (then ``m`` is required).
    """
    if isinstance(support, int):
        if m is None:
            raise ValueError("m is required when support is given as an order")
        support = indices_up_to(m, support)
    support = list(support)
    out: JetVector = {}
    for alpha, f in enumerate(phi):
        if not f:
            continue
        for i in support:
            g = total_derivative(f, i)
            if g:
                out[(alpha, i)] = g
    return out


def j_star(f: Mapping[JetKey, DiffFunction], n: int) -> Covector:
    """``f_alpha = sum_i (-D)^i f^i_alpha``."""
    parts: list[list[DiffFunction]] = [[] for _ in range(n)]
    for (alpha, i), F in f.items():
        if F:
            parts[alpha].append(neg_total_derivative(F, i))
    return tuple(total_sum(p) for p in parts)


def nabla(phi: Mapping[JetKey, DiffFunction], m: int,
          at: Iterable[tuple[int, int, MultiIndex]] | None = None) -> dict[tuple[int, int, MultiIndex], DiffFunction]:
    """``eta^alpha_{mu i} = D_mu phi^alpha_i - phi^alpha_{i+(mu)}``.

    Missing components of ``phi`` are zero. By default every index where the
    result can be nonzero is evaluated; ``at`` restricts the evaluation.
    """
    if at is None:
        keys = set()
        for (alpha, i) in phi:
            for mu in range(m):
                keys.add((alpha, mu, i))
                lower = shift_index(i, mu, -1)
                if lower is not None:
                    keys.add((alpha, mu, lower))
        at = sorted(keys)
    out = {}
    for alpha, mu, i in at:
        val = ZERO
        here = phi.get((alpha, i))
        if here:
            val = total_derivative(here, mu)
        up = phi.get((alpha, shift_index(i, mu)))
        if up:
            val = val - up
        if val:
            out[(alpha, mu, i)] = val
    return out


def nabla_star(chi: Mapping[tuple[int, int, MultiIndex], DiffFunction], m: int) -> JetCovector:
    """Lagrange dual of :func:`nabla`: ``f^i_alpha = -D_mu chi^{mu i}_alpha - chi^{mu, i-(mu)}_alpha``.

    With this sign ``<chi, nabla phi> - <nabla* chi, phi> = Div(chi^mu_a phi^a)``.
    """
    parts: dict[JetKey, list[DiffFunction]] = {}
    for (mu, alpha, i), X in chi.items():
        if not X:
            continue
        parts.setdefault((alpha, i), []).append(-total_derivative(X, mu))
        parts.setdefault((alpha, shift_index(i, mu)), []).append(-X)
    out = {}
    for key in sorted(parts):
        v = total_sum(parts[key])
        if v:
            out[key] = v
    return out


def jet_pairing(f: Mapping[JetKey, DiffFunction], phi: Mapping[JetKey, DiffFunction]) -> DiffFunction:
    return total_sum(F * phi[k] for k, F in f.items() if k in phi)


def matrix_pairing(chi: Mapping[tuple[int, int, MultiIndex], DiffFunction],
                   eta: Mapping[tuple[int, int, MultiIndex], DiffFunction]) -> DiffFunction:
    """``<chi, eta> = chi^{mu i}_alpha eta^alpha_{mu i}``."""
    return total_sum(X * eta[(alpha, mu, i)] for (mu, alpha, i), X in chi.items()
                     if (alpha, mu, i) in eta)


def split_covector(f: Mapping[JetKey, DiffFunction], n: int, m: int):
    """Split ``f`` into its ``E*`` part ``g`` (concentrated at ``i = 0``) and a ``chi`` with ``f - g = nabla*(chi)``.

    Each component ``F`` at ``k != 0`` is moved down one step at a time: with
    ``mu`` the largest direction of ``k``, ``chi^{mu, k-(mu)} -= F`` and ``F``
    becomes ``-D_mu F`` at ``k - (mu)``. For ``m = 1`` this gives
    ``chi^i = -sum_j (-D)^j f^{i+j+1}``.
    """
    g_vals = j_star(f, n)
    g = {(alpha, zero_index(m)): v for alpha, v in enumerate(g_vals) if v}
    chi_parts: dict[tuple[int, int, MultiIndex], list[DiffFunction]] = {}
    for (alpha, k), F in f.items():
        k = tuple(k)
        while any(k) and F:
            mu = max(nu for nu in range(m) if k[nu])
            k = shift_index(k, mu, -1)
            chi_parts.setdefault((mu, alpha, k), []).append(-F)
            F = -total_derivative(F, mu)
    chi = {}
    for key in sorted(chi_parts):
        v = total_sum(chi_parts[key])
        if v:
            chi[key] = v
    return g, chi
