"""Lie-Poisson brackets of functionals and Jacobi-identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

from .diffops import DiffOperator, adjoint, apply, ev_on_operator, pairing
from .jetalgebra import (
    DiffFunction,
    Signature,
    indices_up_to,
    jet,
    total_sum,
)
from .variational import Functional, euler, is_divergence

HAMILTONIAN = "hamiltonian"
NOT_HAMILTONIAN = "not-hamiltonian"
INCONCLUSIVE = "inconclusive"


class NotSkewAdjointError(ValueError):
    pass


def is_skew_adjoint(op: DiffOperator) -> bool:
    if op.rows != op.cols:
        return False
    return (adjoint(op) + op).is_zero()


@dataclass(frozen=True)
class PoissonSetup:
    """A signature together with a skew-adjoint operator ``E* -> E``."""

    sig: Signature
    op: DiffOperator

    def __post_init__(self):
        n = self.sig.n
        if self.op.shape != (n, n):
            raise ValueError(f"operator must be {n}x{n}, got {self.op.rows}x{self.op.cols}")
        if self.op.m != self.sig.m:
            raise ValueError("operator and signature disagree on the number of independent variables")
        if not is_skew_adjoint(self.op):
            raise NotSkewAdjointError("operator is not skew-adjoint")

    def delta(self, K: DiffFunction) -> tuple[DiffFunction, ...]:
        """Euler derivative restricted to the physical dependent variables."""
        return euler(K, self.sig)[: self.sig.n]

    def flow(self, R: DiffFunction) -> tuple[DiffFunction, ...]:
        """Characteristic ``phi(R) = Lambda delta R``."""
        return apply(self.op, self.delta(R))


@dataclass(frozen=True)
class JacobiReport:
    method: str
    residual: DiffFunction
    verdict: str  # "zero" or "nonzero"
    triple: tuple[DiffFunction, ...] | None = None
    witness: tuple[DiffFunction, ...] | None = None

    @property
    def is_zero(self) -> bool:
        return self.verdict == "zero"


def _report(method, residual, triple=None, witness=None) -> JacobiReport:
    verdict = "zero" if is_divergence(residual) else "nonzero"
    return JacobiReport(method, residual, verdict, triple, witness)


def _rep(F) -> DiffFunction:
    return F.rep if isinstance(F, Functional) else F


def bracket_rep(setup: PoissonSetup, K: DiffFunction, L: DiffFunction) -> DiffFunction:
    """The representative ``<delta K, Lambda delta L>``."""
    return pairing(setup.delta(K), setup.flow(L))


def bracket(setup: PoissonSetup, K, L) -> Functional:
    return Functional(bracket_rep(setup, _rep(K), _rep(L)))


def _cyclic(K, L, M):
    return ((K, L, M), (L, M, K), (M, K, L))


def jacobi_direct_residual(setup: PoissonSetup, K, L, M) -> DiffFunction:
    parts = []
    for A, B, C in _cyclic(_rep(K), _rep(L), _rep(M)):
        parts.append(bracket_rep(setup, A, bracket_rep(setup, B, C)))
    return total_sum(parts)


def jacobi_direct(setup: PoissonSetup, K, L, M) -> JacobiReport:
    triple = (_rep(K), _rep(L), _rep(M))
    return _report("direct", jacobi_direct_residual(setup, *triple), triple)


def jacobi_mt_residual(setup: PoissonSetup, K, L, M) -> DiffFunction:
    """``sum_cyc <delta K, [ev_phi(L), Lambda] delta M>``."""
    K, L, M = _rep(K), _rep(L), _rep(M)
    deltas = {id(F): setup.delta(F) for F in (K, L, M)}
    flows = {}
    parts = []
    for A, B, C in _cyclic(K, L, M):
        if id(B) not in flows:
            flows[id(B)] = apply(setup.op, deltas[id(B)])
        comm = ev_on_operator(flows[id(B)], setup.op)
        if comm.is_zero():
            continue
        parts.append(pairing(deltas[id(A)], apply(comm, deltas[id(C)])))
    return total_sum(parts)


def jacobi_mt(setup: PoissonSetup, K, L, M) -> JacobiReport:
    triple = (_rep(K), _rep(L), _rep(M))
    return _report("theorem_mt", jacobi_mt_residual(setup, *triple), triple)


def hamiltonian_sufficient(setup: PoissonSetup) -> bool:
    """True when no coefficient depends on jets, so every ``[ev_phi, Lambda]`` vanishes.

    False means the criterion does not apply, not that the operator fails.
    """
    return not any(c.depends_on_jets() for c in setup.op.coefficients())


def universal_residual(setup: PoissonSetup) -> tuple[Signature, DiffFunction]:
    """``T = sum_cyc <th1, [ev_{Lambda th2}, Lambda] th3>`` over three formal covector families."""
    ext, families = setup.sig.with_formal_families(3)
    m = setup.sig.m
    theta = [tuple(DiffFunction.u(alpha, (0,) * m) for alpha in fam) for fam in families]
    parts = []
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        comm = ev_on_operator(apply(setup.op, theta[b]), setup.op)
        if comm.is_zero():
            continue
        parts.append(pairing(theta[a], apply(comm, theta[c])))
    return ext, total_sum(parts)


def default_basis(sig: Signature, max_degree: int = 3, max_order: int = 2) -> list[DiffFunction]:
    """Monomials in the jets ``u^alpha_i`` with ``|i| <= max_order`` of degree 1..max_degree.

    Divergences are dropped since they are the zero functional.
    """
    jets = [jet(alpha, i) for alpha in range(sig.n) for i in indices_up_to(sig.m, max_order)]
    basis = []
    for d in range(1, max_degree + 1):
        for combo in combinations_with_replacement(jets, d):
            F = DiffFunction.constant(1)
            for a in combo:
                F = F * DiffFunction.var(a)
            if not is_divergence(F):
                basis.append(F)
    return basis


def find_witness(setup: PoissonSetup, basis: Sequence[DiffFunction] | None = None) -> tuple[DiffFunction, ...] | None:
    """First triple of distinct basis elements whose Jacobi residual is not a divergence.

    Candidates are screened with the MT form and confirmed with the direct residual.
    """
    if basis is None:
        basis = default_basis(setup.sig)
    for triple in combinations(basis, 3):
        if not jacobi_mt(setup, *triple).is_zero and not jacobi_direct(setup, *triple).is_zero:
            return triple
    return None


@dataclass(frozen=True)
class HamiltonianVerdict:
    verdict: str
    universal: JacobiReport
    sufficient: bool
    witness: tuple[DiffFunction, ...] | None = None
    extended: Signature | None = field(default=None, compare=False)


def hamiltonian_universal(setup: PoissonSetup) -> JacobiReport:
    ext, T = universal_residual(setup)
    return _report("universal", T)


def classify(setup: PoissonSetup, basis: Iterable[DiffFunction] | None = None) -> HamiltonianVerdict:
    """Hamiltonian / not Hamiltonian (with a witness) / inconclusive."""
    sufficient = hamiltonian_sufficient(setup)
    ext, T = universal_residual(setup)
    report = _report("universal", T)
    if report.is_zero:
        return HamiltonianVerdict(HAMILTONIAN, report, sufficient, extended=ext)
    witness = find_witness(setup, None if basis is None else list(basis))
    if witness is not None:
        report = JacobiReport(report.method, report.residual, report.verdict, None, witness)
        return HamiltonianVerdict(NOT_HAMILTONIAN, report, sufficient, witness, extended=ext)
    return HamiltonianVerdict(INCONCLUSIVE, report, sufficient, extended=ext)
