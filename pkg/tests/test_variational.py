import random

import pytest

from jetpoisson.diffops import pairing
from jetpoisson.jetalgebra import ONE, ZERO, divergence, ev_apply, indices_up_to, total_derivative
from jetpoisson.sampling import random_characteristic, random_current, random_function
from jetpoisson.variational import (
    Functional,
    euler,
    functional_equal,
    is_divergence,
    j_prolong,
    j_star,
    jet_pairing,
    matrix_pairing,
    nabla,
    nabla_star,
    split_covector,
)

from helpers import ALL_SIGS, SIG1, SIG12, f
from oracles import SympyBridge, closed_form_split_chi

SIG_IDS = ["m1n1", "m1n2", "m2n1", "m2n2"]


def random_jet_covector(rng, sig, order=3, count=3):
    out = {}
    for _ in range(count):
        key = (rng.randrange(sig.n), rng.choice(indices_up_to(sig.m, order)))
        out[key] = random_function(rng, sig, 2, 2, 2)
    return {k: v for k, v in out.items() if v}


def random_chi(rng, sig, order=2, count=3):
    return {(rng.randrange(sig.m), rng.randrange(sig.n), rng.choice(indices_up_to(sig.m, order))):
            random_function(rng, sig, 2, 2, 2) for _ in range(count)}


# -- Euler operator ---------------------------------------------------------------

def test_euler_examples():
    assert euler(f("1/2*u^2"), SIG1) == (f("u"),)
    assert euler(f("u*u_x"), SIG1) == (ZERO,)
    assert euler(f("1/2*u_x^2"), SIG1) == (f("-u_xx"),)


@pytest.mark.parametrize("sig", ALL_SIGS, ids=SIG_IDS)
def test_euler_matches_sympy(sig):
    rng = random.Random(5)
    br = SympyBridge(sig)
    for _ in range(10):
        L = random_function(rng, sig, 3, 2, 3)
        assert euler(L, sig) == br.euler(L)


def test_euler_kills_divergences(sig, rng):
    for _ in range(20):
        psi = random_current(rng, sig, 3, 3, 3)
        assert not any(euler(divergence(psi), sig))


def test_euler_frechet_adjunction(sig, rng):
    for _ in range(20):
        L = random_function(rng, sig, 3, 3, 3)
        phi = random_characteristic(rng, sig)
        assert is_divergence(pairing(euler(L, sig), phi) - ev_apply(phi, L))


def test_ev_preserves_divergences(sig, rng):
    for _ in range(15):
        phi = random_characteristic(rng, sig)
        psi = random_current(rng, sig, 2, 2, 2)
        assert is_divergence(ev_apply(phi, divergence(psi)))


# -- functionals ------------------------------------------------------------------

def test_is_divergence_examples():
    assert is_divergence(f("u*u_x"))
    assert not is_divergence(f("u^2"))
    assert is_divergence(f("x*u_x + u"))
    assert euler(f("x*u_x + u"), SIG1) == (ZERO,)


def test_functional_equality_examples():
    assert functional_equal(Functional(f("u*u_x")), Functional(ZERO))
    assert Functional(f("u_x^2")) == Functional(f("-u*u_xx"))
    assert Functional(f("u^2")) != Functional(ZERO)
    assert Functional(f("u_x^2")) - Functional(f("-u*u_xx")) == Functional(ZERO)


def test_constants_are_zero_functionals():
    assert Functional(f("7")).is_zero()
    assert Functional(f("7")) == Functional(ZERO)


# -- j and nabla ------------------------------------------------------------------

def test_j_prolong_examples():
    assert j_prolong((f("u"),), [(2,)])[(0, (2,))] == f("u_xx")
    assert j_prolong((ZERO,), 3, 1) == {}
    assert j_prolong((f("u^2"),), [(1,)])[(0, (1,))] == f("2*u*u_x")
    with pytest.raises(ValueError):
        j_prolong((ONE,), 2)


def test_nabla_examples():
    pro = j_prolong((f("u"),), 4, 1)
    inner = [(0, 0, (k,)) for k in range(4)]
    assert nabla(pro, 1, at=inner) == {}
    eta = nabla({(0, (0,)): f("u")}, 1)
    assert eta == {(0, 0, (0,)): f("u_x")}
    assert nabla({}, 1) == {}
    eta = nabla({(0, (1,)): f("u")}, 1)
    assert eta == {(0, 0, (1,)): f("u_x"), (0, 0, (0,)): f("-u")}


def test_nabla_kills_prolongations(sig, rng):
    for _ in range(15):
        phi = random_characteristic(rng, sig)
        order = 3
        pro = j_prolong(phi, order + 1, sig.m)
        inner = [(a, mu, i) for a in range(sig.n) for mu in range(sig.m) for i in indices_up_to(sig.m, order)]
        assert nabla(pro, sig.m, at=inner) == {}


def test_nabla_star_examples():
    K = f("u^2 + x*u_x")
    assert nabla_star({}, 1) == {}
    out = nabla_star({(0, 0, (0,)): K}, 1)
    assert out == {(0, (0,)): -total_derivative(K, 0), (0, (1,)): -K}


def test_j_star_examples():
    assert j_star({(0, (0,)): f("u")}, 1) == (f("u"),)
    assert j_star({(0, (1,)): f("u")}, 1) == (f("-u_x"),)


def test_j_star_kills_nabla_star(sig, rng):
    for _ in range(20):
        assert not any(j_star(nabla_star(random_chi(rng, sig), sig.m), sig.n))


def test_green_formula_for_nabla(sig, rng):
    for _ in range(15):
        chi = random_chi(rng, sig)
        phi = random_jet_covector(rng, sig, order=2)
        lhs = matrix_pairing(chi, nabla(phi, sig.m)) - jet_pairing(nabla_star(chi, sig.m), phi)
        psi = []
        for mu in range(sig.m):
            psi.append(sum((X * phi[(a, i)] for (nu, a, i), X in chi.items() if nu == mu and (a, i) in phi), ZERO))
        assert lhs == divergence(psi)


# -- splitting ---------------------------------------------------------------------

def _difference(fv, g):
    keys = set(fv) | set(g)
    out = {k: fv.get(k, ZERO) - g.get(k, ZERO) for k in keys}
    return {k: v for k, v in out.items() if v}


def test_split_examples():
    fv = {(0, (0,)): f("u^2")}
    g, chi = split_covector(fv, 1, 1)
    assert g == fv and chi == {}
    assert split_covector({}, 1, 1) == ({}, {})
    fv = {(0, (1,)): f("u")}
    g, chi = split_covector(fv, 1, 1)
    assert g == {(0, (0,)): f("-u_x")}
    assert _difference(fv, g) == nabla_star(chi, 1)
    assert chi == closed_form_split_chi(fv, 1)


def test_split_identity(sig, rng):
    for _ in range(25):
        fv = random_jet_covector(rng, sig)
        g, chi = split_covector(fv, sig.n, sig.m)
        assert _difference(fv, g) == nabla_star(chi, sig.m)
        assert j_star(g, sig.n) == j_star(fv, sig.n)
        assert all(not any(i) for (_, i) in g)


@pytest.mark.parametrize("sig", [SIG1, SIG12], ids=["m1n1", "m1n2"])
def test_split_matches_closed_form_in_one_variable(sig):
    rng = random.Random(3)
    for _ in range(20):
        fv = random_jet_covector(rng, sig, order=4, count=4)
        _, chi = split_covector(fv, sig.n, 1)
        assert chi == closed_form_split_chi(fv, sig.n)
