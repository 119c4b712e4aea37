"""Small polynomial builders shared by several test modules."""

from bergman_offdiag.polynomials import U, UBAR, V, VBAR, ScaledPolynomial


def var(m, block, i=0):
    return ScaledPolynomial.variable(m, block, i)


def pairing(m, a, b):
    """sum_i a_i b_i over the two given blocks."""
    total = ScaledPolynomial.zero(m)
    for i in range(m):
        total = total + var(m, a, i) * var(m, b, i)
    return total


def cpm_b2(m):
    x = pairing(m, U, VBAR)
    uu = pairing(m, U, UBAR)
    vv = pairing(m, V, VBAR)
    return ScaledPolynomial.constant(m, m * (m + 1)) / 2 - x * x / 2 + (uu * uu + vv * vv) / 4


def cp1_b4():
    x = var(1, U) * var(1, VBAR)
    uu = var(1, U) * var(1, UBAR)
    vv = var(1, V) * var(1, VBAR)
    s_sharp = (x * x * -2 + uu * uu + vv * vv)
    tail = ScaledPolynomial.constant(1, 2) + s_sharp / 2
    return (ScaledPolynomial.constant(1, -1) / 2 + x ** 3 / 3 - (uu ** 3 + vv ** 3) / 6
            + tail * tail / 8)
