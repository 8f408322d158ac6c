import math

import numpy as np
import pytest

import sparse_rom as sr


def test_point_rules():
    assert sr.symmetrized_leja(5) == [0.0, 1.0, -1.0, sr.symmetrized_leja(5)[3], -sr.symmetrized_leja(5)[3]]
    leja = sr.leja_sequence(4)
    assert leja[:3] == [0.0, 1.0, -1.0]
    assert sorted(sr.leja_order([0.5, -0.2, 1.0])) == [-0.2, 0.5, 1.0]
    assert sr.point_rule("equidistant_natural", 3) == pytest.approx([-1.0, 0.0, 1.0])
    with pytest.raises(sr.Error):
        sr.point_rule("chebyshev", 3)


def test_canonical_sequence_is_downward_closed():
    seq = sr.canonical_sequence(2, 10)
    assert seq[0] == [0, 0]
    assert sr.is_downward_closed(seq)
    assert not sr.is_downward_closed([[0, 0], [2, 0]])


def test_interpolant_reproduces_polynomials():
    f = lambda y: [1.0 + y[0] - 2.0 * y[0] * y[1] + y[1] ** 2]
    interp = sr.SparseInterpolant.build(sr.canonical_sequence(2, 10), ["leja", "leja"], f)
    assert interp.snapshot_count == 10
    for y in ([0.3, -0.7], [-0.9, 0.1]):
        assert interp(y)[0] == pytest.approx(f(y)[0], abs=1e-12)


def test_enrich_and_dimension_errors():
    calls = []

    def f(y):
        calls.append(tuple(y))
        return [math.exp(y[0]), math.sin(y[0])]

    interp = sr.SparseInterpolant.build([[0], [1]], ["leja"], f, output_size=2, rule_length=6)
    richer = interp.enrich([[2], [3]], f)
    assert len(calls) == 4
    assert richer.snapshot_count == 4
    assert np.allclose(richer([0.2]), [math.exp(0.2), math.sin(0.2)], atol=1e-2)
    with pytest.raises(sr.DimensionError):
        interp([0.1, 0.2])
    with pytest.raises(sr.DimensionError):
        sr.SparseInterpolant.build([[0]], ["leja"], lambda y: [1.0, 2.0])


def test_flow_solve_small_mesh():
    r = sr.solve_flow("narrowing", [1.0], nx=16, ny=8)
    assert r["iterations"] >= 1
    assert r["trace"][-1] <= 1e-10
    assert len(r["velocity"]) == 2 * len(r["nodes"])
    with pytest.raises(sr.DomainError):
        sr.solve_flow("narrowing", [5.0], nx=16, ny=8)
    with pytest.raises(sr.ConfigError):
        sr.solve_flow("straight", [1.0])


def test_analytic_study(tmp_path):
    text = f"model = analytic\nanalytic = runge\nn_max = 12\noutput = {tmp_path / 'runge.csv'}\n"
    r = sr.run_study(text)
    assert r["N"] == list(range(1, 13))
    assert r["mean_rel_l2"][-1] < r["mean_rel_l2"][0]
    assert (tmp_path / "runge.csv").read_text().startswith("N,mean_rel_l2,max_rel_l2\n")
    rules = sr.compare_point_rules(text + "compare_rules = leja, equidistant_natural\n")
    assert [x["rule"] for x in rules] == ["leja", "equidistant_natural"]
    with pytest.raises(sr.ConfigError):
        sr.run_study("model = nowhere\n")
