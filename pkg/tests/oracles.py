"""Independent reference computations used by the tests.

Everything here goes through sympy (or plain closed forms), never through the
package's own total derivative, Euler operator or normal ordering.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp
from sympy.calculus.euler import euler_equations

from jetpoisson.jetalgebra import DiffFunction, Signature, jet


class SympyBridge:
    """Translate between DiffFunction and sympy expressions in undefined functions ``u(x, ...)``."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.xs = sp.symbols(" ".join(sig.independent) + " ", seq=True)
        self.us = [sp.Function(name)(*self.xs) for name in sig.names]

    def jet_expr(self, a):
        f = self.us[a.alpha]
        pairs = [(self.xs[mu], k) for mu, k in enumerate(a.i) if k]
        return sp.Derivative(f, *pairs) if pairs else f

    def to_sympy(self, F: DiffFunction):
        out = sp.Integer(0)
        for (xp, jp), c in F.terms.items():
            term = sp.Rational(Fraction(c).numerator, Fraction(c).denominator)
            for mu, e in xp:
                term *= self.xs[mu] ** e
            for a, e in jp:
                term *= self.jet_expr(a) ** e
            out += term
        return out

    def _jet_of(self, atom):
        if isinstance(atom, sp.Derivative):
            f = atom.expr
            counts = [0] * len(self.xs)
            for var, k in atom.variable_count:
                counts[self.xs.index(var)] += int(k)
            return jet(self.us.index(f), counts)
        return jet(self.us.index(atom), [0] * len(self.xs))

    def from_sympy(self, expr) -> DiffFunction:
        expr = sp.expand(sp.sympify(expr).doit())
        atoms = sorted(expr.atoms(sp.Derivative), key=str) + sorted(
            (a for a in expr.atoms(sp.core.function.AppliedUndef) if a in self.us), key=str)
        dummies = {}
        for k, atom in enumerate(atoms):
            dummies[atom] = sp.Symbol(f"_J{k}")
        plain = expr.subs({a: dummies[a] for a in atoms if isinstance(a, sp.Derivative)})
        plain = plain.subs({a: dummies[a] for a in atoms if not isinstance(a, sp.Derivative)})
        gens = list(self.xs) + [dummies[a] for a in atoms]
        out = DiffFunction()
        if plain == 0:
            return out
        poly = sp.Poly(plain, *gens)
        for exps, coeff in poly.terms():
            term = DiffFunction.constant(Fraction(int(coeff.p), int(coeff.q)))
            for mu in range(len(self.xs)):
                for _ in range(exps[mu]):
                    term = term * DiffFunction.x(mu)
            for k, atom in enumerate(atoms):
                for _ in range(exps[len(self.xs) + k]):
                    term = term * DiffFunction.var(self._jet_of(atom))
            out = out + term
        return out

    # reference operations
    def total_derivative(self, F: DiffFunction, i) -> DiffFunction:
        e = self.to_sympy(F)
        for mu, k in enumerate(i):
            if k:
                e = sp.diff(e, self.xs[mu], k)
        return self.from_sympy(e)

    def euler(self, L: DiffFunction) -> tuple[DiffFunction, ...]:
        # sympy collapses Eq(c, 0) to a boolean for constant c, so a marker
        # term s*f^2/2 is added and its contribution s*f removed afterwards.
        e = self.to_sympy(L)
        s = sp.Symbol("_marker")
        out = []
        for f in self.us:
            (eq,) = euler_equations(e + s * f**2 / 2, [f], list(self.xs))
            out.append(self.from_sympy(sp.expand(eq.lhs - eq.rhs - s * f)))
        return tuple(out)

    def apply_operator(self, P, g) -> tuple[DiffFunction, ...]:
        """Term-by-term ``sum_c sum_i P^{rc}_i * d^i g_c`` in sympy."""
        gs = [self.to_sympy(G) for G in g]
        rows = []
        for r in range(P.rows):
            acc = sp.Integer(0)
            for c in range(P.cols):
                for i, coef in P.entry(r, c).items():
                    d = gs[c]
                    for mu, k in enumerate(i):
                        if k:
                            d = sp.diff(d, self.xs[mu], k)
                    acc += self.to_sympy(coef) * d
            rows.append(self.from_sympy(acc))
        return tuple(rows)

    def substitute(self, F: DiffFunction, values: dict):
        """Replace each dependent variable by a concrete function of x; returns a sympy expression."""
        e = self.to_sympy(F)
        reps = {self.us[k]: v for k, v in values.items()}
        return sp.expand(e.subs(reps).doit())


def closed_form_split_chi(f: dict, n: int):
    """For one independent variable: ``chi^i = -sum_j (-D)^j f^{i+j+1}``, computed with sympy."""
    sig = Signature(("x",), tuple(f"u{k}" for k in range(n)))
    br = SympyBridge(sig)
    x = br.xs[0]
    top = max((i[0] for (_, i) in f), default=0)
    chi = {}
    for alpha in range(n):
        for i in range(top):
            acc = sp.Integer(0)
            for j in range(top):
                comp = f.get((alpha, (i + j + 1,)))
                if comp is not None:
                    acc += (-1) ** j * sp.diff(br.to_sympy(comp), x, j)
            val = br.from_sympy(-acc)
            if val:
                chi[(0, alpha, (i,))] = val
    return chi
