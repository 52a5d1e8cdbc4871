"""Sampled checks of the five structural assumptions on a signature."""

from __future__ import annotations

import random
from itertools import islice
from typing import Iterator

from ..jetalgebra import (
    DiffFunction,
    JetVar,
    Signature,
    divergence,
    ev_apply,
    indices_up_to,
    jet,
    partial_jet,
    shift_jet,
    total_derivative,
    total_sum,
)
from ..sampling import random_characteristic, random_current, random_function
from ..variational import euler, is_divergence, j_prolong, j_star, nabla, nabla_star

COLUMN_CAP = 64


class FreeGamma:
    """Structure constants of ``[D_mu, d/du_a] = Gamma^b_{mu a} d/du_b`` on the free jet space.

    Here ``[D_mu, d/du^alpha_i] = -d/du^alpha_{i-(mu)}``.
    """

    def row(self, mu: int, a: JetVar) -> dict[JetVar, int]:
        lower = shift_jet(a, mu, -1)
        return {} if lower is None else {lower: -1}

    def column(self, mu: int, b: JetVar) -> Iterator[tuple[JetVar, int]]:
        """All ``a`` with ``Gamma^b_{mu a} != 0``."""
        yield shift_jet(b, mu), -1


def _check(name, passed, detail, note=None):
    out = {"name": name, "passed": bool(passed), "detail": detail}
    if note:
        out["note"] = note
    return out


def validate_setup(sig: Signature, gamma=None, seed: int = 0, samples: int = 20) -> dict:
    """Run the checkable facets of each assumption on seeded random samples."""
    gamma = gamma or FreeGamma()
    rng = random.Random(seed)
    m = sig.m
    funcs = [random_function(rng, sig, 3, 3, 3) for _ in range(samples)]
    results = []

    # Assumption 1: commuting total derivatives and a column-finite Gamma with [D, d_a] = Gamma d_b.
    commute = all(total_derivative(total_derivative(F, mu), nu) == total_derivative(total_derivative(F, nu), mu)
                  for F in funcs for mu in range(m) for nu in range(m))
    relation = True
    finite = True
    for F in funcs:
        probe = F.jet_support() | {shift_jet(a, mu) for a in F.jet_support() for mu in range(m)}
        for a in sorted(probe):
            for mu in range(m):
                lhs = total_derivative(partial_jet(F, a), mu) - partial_jet(total_derivative(F, mu), a)
                rhs = total_sum(partial_jet(F, b) * c for b, c in gamma.row(mu, a).items())
                if lhs != rhs:
                    relation = False
                if len(list(islice(gamma.column(mu, a), COLUMN_CAP + 1))) > COLUMN_CAP:
                    finite = False
    results.append(_check("assumption_1", commute and relation and finite,
                          {"commuting_total_derivatives": commute, "gamma_relation": relation,
                           "gamma_column_finite": finite}))

    # Assumption 2: each sample has finitely many nonzero jet derivatives, all inside its support.
    ok2 = True
    for F in funcs:
        support = F.jet_support()
        order = F.jet_order() + 1
        for alpha in range(sig.n):
            for i in indices_up_to(m, order):
                a = jet(alpha, i)
                if a not in support and partial_jet(F, a):
                    ok2 = False
    results.append(_check("assumption_2", ok2, {"finite_jet_support": ok2}))

    # Assumption 3: Euler kills divergences; nonzero functions pair to a non-divergence.
    kills = all(not any(euler(divergence(random_current(rng, sig, 2, 2, 2)), sig)) for _ in range(samples))
    nondegenerate = True
    for F in funcs:
        if not F:
            continue
        probes = [F] + [DiffFunction.u(alpha, (0,) * m) for alpha in range(sig.n)] + \
                 [DiffFunction.u(alpha, (0,) * m) * F for alpha in range(sig.n)]
        if all(is_divergence(F * psi) for psi in probes):
            nondegenerate = False
    results.append(_check("assumption_3", kills and nondegenerate,
                          {"euler_kills_divergences": kills, "du_bois_reymond_samples": nondegenerate}))

    # Assumption 4: nabla o j = 0, [ev_phi, j] = 0, j* o nabla* = 0.
    ok_exact = ok_ev = ok_dual = True
    order = 3
    for _ in range(samples):
        phi = random_characteristic(rng, sig, 2, 2, 2)
        pro = j_prolong(phi, order + 1, m)
        inner = [(alpha, mu, i) for alpha in range(sig.n) for mu in range(m) for i in indices_up_to(m, order)]
        if nabla(pro, m, at=inner):
            ok_exact = False
        psi = random_characteristic(rng, sig, 2, 2, 2)
        for alpha in range(sig.n):
            for i in indices_up_to(m, 2):
                if ev_apply(phi, total_derivative(psi[alpha], i)) != total_derivative(ev_apply(phi, psi[alpha]), i):
                    ok_ev = False
        chi = {(rng.randrange(m), rng.randrange(sig.n), rng.choice(indices_up_to(m, 2))):
               random_function(rng, sig, 2, 2, 2) for _ in range(3)}
        if any(j_star(nabla_star(chi, m), sig.n)):
            ok_dual = False
    results.append(_check("assumption_4", ok_exact and ok_ev and ok_dual,
                          {"nabla_j_zero": ok_exact, "ev_commutes_with_j": ok_ev, "jstar_nablastar_zero": ok_dual}))

    results.append(_check("assumption_5", True, {},
                          note="a choice of representation Lambda-bar = j o Lambda o j*; no extra restriction"))
    return {"signature": {"independent": list(sig.independent), "dependent": list(sig.dependent)},
            "seed": seed, "samples": samples, "checks": results,
            "all_passed": all(r["passed"] for r in results)}
