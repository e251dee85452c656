"""Operator parsing and the Frobenius method.

The holomorphic solution of the standard degree-5 hypergeometric
operator has the closed form sum (5d)!/(d!)^5 q^d; that series is the
oracle here, computed with math.factorial and nothing from the module
under test.
"""
import json
import math
from fractions import Fraction
from pathlib import Path

import pytest

from vshstools.picard_fuchs import (FrobeniusBasis, LogSeries,
                                    MirrorMapMismatch, NotMaximallyUnipotent,
                                    ParseError, PFOperator, bmodel_pipeline,
                                    companion_vhs, frobenius_solve,
                                    mirror_map_frobenius, parse_pf)
from vshstools.scalars import ONE, ZERO, Scalar
from vshstools.series import Series

DATA = Path(__file__).resolve().parent.parent / "data"

QUINTIC = (DATA / "quintic.pf.txt").read_text()


def test_sugar_and_json_agree():
    from_text = parse_pf(QUINTIC)
    from_json = parse_pf((DATA / "quintic.pf.json").read_text())
    assert from_text == from_json
    assert from_text.order_theta == 4
    assert from_text.max_q_degree == 1


def test_quintic_coefficients():
    op = parse_pf(QUINTIC)
    # theta^4 - 5q(5 theta+1)(5 theta+2)(5 theta+3)(5 theta+4) expands to
    # q-linear coefficients -120, -1250, -4375, -6250, 1 - 3125 q
    assert op.coefficient(0, 1) == Scalar(-120)
    assert op.coefficient(1, 1) == Scalar(-1250)
    assert op.coefficient(2, 1) == Scalar(-4375)
    assert op.coefficient(3, 1) == Scalar(-6250)
    assert op.coefficient(4, 0) == ONE
    assert op.coefficient(4, 1) == Scalar(-3125)
    assert op.coefficient(0, 0) == ZERO


def test_parser_precedence_and_sugar():
    assert parse_pf("theta^2 - q") == parse_pf("theta theta - q")
    assert parse_pf("(theta)^2 - q theta") == \
        parse_pf("theta^2 - q   theta")
    assert parse_pf("theta^2 - 2 q (theta + 1)^2") == \
        parse_pf("theta^2 - 2q(theta+1)(theta+1)")
    # theta q = q (theta + 1): normal ordering is part of multiplication
    assert parse_pf("theta^2 + theta q") == \
        parse_pf("theta^2 + q theta + q")
    assert parse_pf("theta^2 - 5*q") == parse_pf("theta^2 - 5 q")


def test_parse_errors():
    for text in ("theta^", "theta +", "(theta", "theta^2 %", "",
                 "theta^2 - 1/2 q", "x^2"):
        with pytest.raises(ParseError):
            parse_pf(text)
    # leading coefficient must be a unit at q = 0
    with pytest.raises(ParseError):
        parse_pf("q theta^2 - 1 q")


def test_parse_json_validation():
    ok = {"kind": "pf_operator", "order": 2,
          "coeffs": [["0", "1"], ["0"], ["1"]]}
    op = parse_pf(json.dumps(ok))
    assert op.order_theta == 2
    bad_order = dict(ok, order=3)
    with pytest.raises(ParseError):
        parse_pf(json.dumps(bad_order))


def test_not_maximally_unipotent():
    with pytest.raises(NotMaximallyUnipotent):
        parse_pf("theta^2 - theta")
    with pytest.raises(NotMaximallyUnipotent):
        parse_pf((DATA / "not-unipotent.pf.txt").read_text())
    assert parse_pf("theta^2 - q").is_maximally_unipotent()


def test_holomorphic_solution_closed_form():
    op = parse_pf(QUINTIC)
    basis = frobenius_solve(op, depth=2, order=8)
    for d in range(8):
        expected = Scalar(Fraction(math.factorial(5 * d),
                                   math.factorial(d) ** 5))
        assert basis.y0.coefficient(d) == expected


def test_all_solutions_annihilated():
    for name in ("quintic", "synthetic-a", "synthetic-b", "synthetic-c"):
        op = parse_pf((DATA / f"{name}.pf.txt").read_text())
        basis = frobenius_solve(op, depth=op.order_theta, order=6)
        assert len(basis.solutions) == op.order_theta
        for sol in basis.solutions:
            assert op.apply(sol).is_zero()


def test_log_series_theta_rule():
    # theta(f + g log q) = theta f + g + (theta g) log q
    f = Series([Scalar(1), Scalar(2)], 4)
    g = Series([Scalar(3), Scalar(5)], 4)
    ls = LogSeries([f, g])
    out = ls.theta()
    assert out.parts[0] == f.theta() + g
    assert out.parts[1] == g.theta()


def test_theta_squared_solutions():
    op = parse_pf("theta^2")
    basis = frobenius_solve(op, depth=2, order=4)
    one = Series.one(4)
    assert basis.y0 == one
    assert basis.solutions[1].parts[0].is_zero()
    assert basis.solutions[1].parts[1] == one
    assert mirror_map_frobenius(basis) == Series.coordinate(4)


def test_mirror_map_quintic():
    op = parse_pf(QUINTIC)
    basis = frobenius_solve(op, depth=2, order=6)
    mm = mirror_map_frobenius(basis)
    assert mm.coefficient(1) == ONE
    assert mm.coefficient(2) == Scalar(770)
    assert mm.coefficient(3) == Scalar(1014275)
    assert mm.coefficient(4) == Scalar(1703916750)
    assert mm.coefficient(5) == Scalar(3286569025625)


def test_companion_structure():
    op = parse_pf(QUINTIC)
    geo = companion_vhs(op, order=6)
    assert geo.levels2 == (3, 1, -1, -3)
    assert geo.parity == 1
    assert geo.pairing is None
    for j in range(3):
        assert geo.conn.entry(j + 1, j) == -Series.one(6)
    # residue must be nilpotent with a single Jordan block
    a0 = geo.conn.at0()
    assert all(a0[i][3].is_zero() for i in range(4))


def test_bmodel_pipeline_quintic():
    op = parse_pf(QUINTIC)
    report, table = bmodel_pipeline(op, Scalar(5), order=8)
    got = dict(table.entries)
    assert got[1] == Scalar(2875)
    assert got[2] == Scalar(609250)
    assert got[3] == Scalar(317206375)
    assert got[4] == Scalar(242467530000)
    assert got[5] == Scalar(229305888887625)
    basis = frobenius_solve(op, depth=2, order=8)
    assert report.mirror_coordinate == mirror_map_frobenius(basis)
    g = report.dn.a_series.entry(2, 1)
    assert g.coefficient(0) == ONE
    assert g.coefficient(1) == Scalar(575)
    assert g.coefficient(2) == Scalar(975375)


def test_trivial_operators_have_no_instantons():
    for text in ("theta^4", "theta^2"):
        op = parse_pf(text)
        report, table = bmodel_pipeline(op, Scalar(5), order=6)
        assert table.entries == {}
        assert report.mirror_coordinate == Series.coordinate(6)
