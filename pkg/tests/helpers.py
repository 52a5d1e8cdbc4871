from jetpoisson.jetalgebra import Signature
from jetpoisson.workbench.syntax import parse_expression, parse_operator

SIG1 = Signature(("x",), ("u",))
SIG12 = Signature(("x",), ("u", "v"))
SIG21 = Signature(("x", "y"), ("u",))
SIG2 = Signature(("x", "y"), ("u", "v"))
ALL_SIGS = [SIG1, SIG12, SIG21, SIG2]


def f(text: str, sig: Signature = SIG1):
    return parse_expression(text, sig)


def op(text: str, sig: Signature = SIG1):
    return parse_operator(text, sig)


# Malformed inputs: (text, signature, operator?, expected error position).
MALFORMED = [
    ("u +* u", SIG1, False, 3),
    ("u $ 2", SIG1, False, 2),
    ("u^-1", SIG1, False, 2),
    ("u^1/2", SIG1, False, 2),
    ("u^x", SIG1, False, 2),
    ("q*u", SIG1, False, 0),
    ("u_", SIG1, False, 1),
    ("u_q", SIG1, False, 0),
    ("u[1", SIG1, False, 1),
    ("u[a]", SIG1, False, 2),
    ("u[1,0]", SIG1, False, 0),
    ("u_x1", SIG1, False, 3),
    ("x_x", SIG1, False, 0),
    ("(u + 1", SIG1, False, 6),
    ("u + 1)", SIG1, False, 5),
    ("", SIG1, False, 0),
    ("u*", SIG1, False, 2),
    ("1/0", SIG1, False, 2),
    ("1/u", SIG1, False, 2),
    ("2u", SIG1, False, 0),
    ("D*u", SIG1, False, 0),
    ("u^2^3", SIG1, False, 3),
    ("u[]", SIG1, False, 2),
    ("u,", SIG1, False, 1),
    ("u_z", SIG2, False, 0),
    ("u[1]", SIG2, False, 0),
    ("D_x", SIG1, True, 0),
    ("[[D, 1], [D]]", SIG1, True, 9),
    ("[[D, 1]", SIG1, True, 7),
    ("D^1/2", SIG1, True, 2),
    ("D", SIG2, True, 0),
    ("D3", SIG2, True, 0),
]
