"""Smoke test for the ghost_slopes_py extension module."""

from fractions import Fraction

import ghost_slopes_py as gs


def main():
    ctx = gs.Context(7, 2, 1)
    assert ctx.k_eps == 6
    assert ctx.dimensions(24) == (8, 1, 6)
    assert ctx.m_of_k(24) == 2
    assert ctx.ghost_zeros(2) == {12: 1, 18: 1, 24: 1, 30: 1}
    assert ctx.ghost_zeros(8)[48] == 6
    assert ctx.derivative_values(24) == ["17", "19", "25", "34"]
    assert [s for s, _ in ctx.derivative_slopes(24)] == ["2", "6", "9"]
    values, provenance = ctx.thresholds(24)
    assert values == ["9", "6", "2", "1", "6", "9"], values
    assert provenance.count("sweep") == 2
    assert ctx.newslopes(24, "10") == ["11"] * 6
    assert ctx.newslopes(24, "3/2") == ["7/2", "13/2", "10", "11", "29/2", "17"]
    assert '"linv_known":[["-10",2],["-7",2]]' in ctx.predict_json(24)
    m1, m2 = (Fraction(v) for v in ctx.moments(1002))
    assert abs(m1 - Fraction(1, 2)) < Fraction(1, 20)
    assert abs(m2 - Fraction(1, 3)) < Fraction(1, 20)
    assert Fraction(ctx.discrepancy(1002)) < Fraction(1, 10)

    assert gs.weight_distance(24, 66, 7) == "2"
    assert gs.weight_distance(24, 24, 7) is None
    assert gs.binomial_vandermonde([3, 1, 0]) == "-3"
    assert gs.d_matrix_det(10, 6, True) == "1"
    assert gs.formal_wedge_trace([[[1, 2], [3, 4]]] * 2) == "-2"

    try:
        gs.Context(4, 2, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("p = 4 accepted")
    try:
        ctx.dimensions(25)
    except ValueError:
        pass
    else:
        raise AssertionError("weight outside the class accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
