import pytest

from jetpoisson.jetalgebra import jet, shift_jet
from jetpoisson.workbench.validate import FreeGamma, validate_setup

from helpers import SIG1, SIG2, SIG21


class WrongSignGamma(FreeGamma):
    def row(self, mu, a):
        return {b: -c for b, c in super().row(mu, a).items()}


class WrongIndexGamma(FreeGamma):
    def row(self, mu, a):
        return {} if shift_jet(a, mu, -1) is None else {a: -1}


class InfiniteColumnGamma(FreeGamma):
    def column(self, mu, b):
        k = 1
        while True:
            yield shift_jet(b, mu, k), -1
            k += 1


@pytest.mark.parametrize("sig", [SIG1, SIG21, SIG2], ids=["m1", "m2", "m2n2"])
def test_free_setup_passes(sig):
    out = validate_setup(sig, samples=10)
    assert out["all_passed"], out
    assert [c["name"] for c in out["checks"]] == [f"assumption_{k}" for k in range(1, 6)]
    assert "note" in out["checks"][4]


@pytest.mark.parametrize("gamma", [WrongSignGamma(), WrongIndexGamma(), InfiniteColumnGamma()],
                         ids=["sign", "index", "column"])
def test_corrupted_gamma_fails_assumption_1(gamma):
    out = validate_setup(SIG1, gamma=gamma, samples=5)
    checks = {c["name"]: c["passed"] for c in out["checks"]}
    assert not checks["assumption_1"]
    assert all(checks[f"assumption_{k}"] for k in range(2, 6))
    assert not out["all_passed"]


def test_free_gamma_column_inverts_row():
    g = FreeGamma()
    b = jet(0, (2,))
    for a, c in g.column(0, b):
        assert g.row(0, a) == {b: c}


def test_deterministic():
    assert validate_setup(SIG1, seed=3, samples=5) == validate_setup(SIG1, seed=3, samples=5)
