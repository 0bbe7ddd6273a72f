import itertools

import numpy as np
import pytest

from conftest import dense_word, triple_outcome
from netcensus.errors import ConfigError, UndefinedSignificance, UnsupportedBipartition
from netcensus.fidelity import FidelityEstimate
from netcensus.graphs import Graph, chain, star
from netcensus.paulis import enumerate_stabilizer
from netcensus.states import Target, ghz_target, target_generators
from netcensus.thresholds import (
    ThresholdTable,
    assignment_value,
    build_threshold_table,
    count_classical_nodes,
    f_matrix,
    f_matrix_lambda_max,
    significance,
    threshold_bruteforce,
    threshold_bruteforce_over_subsets,
    threshold_closed_form,
)

# frozen reference decimals (20-digit evaluation of (1 + sqrt(1 + 2^(2-n)))/4)
FROZEN = {
    1: 0.68301270189221932338,
    2: 0.60355339059327376220,
    3: 0.55618621784789726227,
    4: 0.52950849718747371205,
    5: 0.51516504294495532165,
    6: 0.50769410160110378436,
    30: 0.50000000046566128687,
}


def test_closed_form_frozen_values():
    for n, want in FROZEN.items():
        assert threshold_closed_form(n) == pytest.approx(want, abs=1e-15)


def test_closed_form_monotone_and_limit():
    # strictly decreasing for as long as float64 resolves the excess over 1/2
    values = [threshold_closed_form(n) for n in range(1, 53)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(v > 0.5 for v in values)
    tail = [threshold_closed_form(n) for n in range(50, 61)]
    assert all(a >= b for a, b in zip(tail, tail[1:]))
    assert all(v >= 0.5 for v in tail)
    assert threshold_closed_form(200) == 0.5  # correctly-rounded limit, no overflow
    assert abs(threshold_closed_form(30) - 0.5) < 1e-4


def test_closed_form_input_validation():
    for bad in [0, -1, 1.5, True, "2"]:
        with pytest.raises(ConfigError):
            threshold_closed_form(bad)


def test_threshold_table():
    table = build_threshold_table(6)
    assert table.n_max == 6
    assert table.threshold(1) == threshold_closed_form(1)
    assert table.threshold(6) == threshold_closed_form(6)
    with pytest.raises(ConfigError):
        table.threshold(7)
    with pytest.raises(ConfigError):
        table.threshold(0)


def bruteforce_oracle(target: Target, v_c: tuple[int, ...]) -> float:
    """Independent maximization: dense contracted operator per assignment."""
    n = target.n
    v_q = tuple(k for k in range(n) if k not in v_c)
    best = -np.inf
    for etas in itertools.product(range(1, 9), repeat=len(v_c)):
        by_node = dict(zip(v_c, etas))
        op = np.zeros((1 << len(v_q), 1 << len(v_q)), dtype=complex)
        for coeff, s in enumerate_stabilizer(target_generators(target)):
            letters = s.letters
            word = "".join(letters[k] for k in v_q)
            classical = 1.0
            for k in v_c:
                classical *= triple_outcome(by_node[k], letters[k])
            op += coeff * classical * dense_word(word)
        best = max(best, float(np.linalg.eigvalsh(op)[-1]))
    return best


def test_bruteforce_matches_dense_oracle_nontrivial_graphs():
    cases = [
        (Target(chain(3)), (2,)),
        (Target(chain(4)), (1, 3)),
        (Target(star(4)), (0,)),
        (ghz_target(3), (0, 2)),
    ]
    for target, v_c in cases:
        res = threshold_bruteforce(target, v_c)
        assert res.value == pytest.approx(bruteforce_oracle(target, v_c), abs=1e-10)


def test_bruteforce_single_leaf_hits_threshold():
    res = threshold_bruteforce(ghz_target(2), (1,))
    assert res.value == pytest.approx(threshold_closed_form(1), abs=1e-10)
    assert res.assignment == (1,)  # all assignments tie; lexicographic winner
    assert res.n_assignments == 8
    assert res.state is not None


def test_bruteforce_star_leaves_ties_and_value():
    target = Target(star(3))
    res = threshold_bruteforce(target, (1, 2))
    want = threshold_closed_form(2)
    assert res.value == pytest.approx(want, abs=1e-10)
    # the returned assignment achieves the maximum ...
    assert assignment_value(target, (1, 2), res.assignment) == pytest.approx(
        res.value, abs=1e-10
    )
    # ... and so does the (3, 3) assignment highlighted by the worked example
    assert assignment_value(target, (1, 2), (3, 3)) == pytest.approx(
        want, abs=1e-10
    )


def test_bruteforce_input_validation():
    with pytest.raises(ConfigError):
        threshold_bruteforce(ghz_target(3), (0, 1, 2))  # nothing quantum left
    with pytest.raises(ConfigError):
        threshold_bruteforce(ghz_target(3), (3,))
    with pytest.raises(ConfigError):
        threshold_bruteforce(ghz_target(3), ())


def test_bruteforce_over_subsets_star4():
    target = Target(star(4))
    best, best_subset, per_subset = threshold_bruteforce_over_subsets(target, 2)
    assert len(per_subset) == 6  # C(4, 2)
    assert best.value == pytest.approx(threshold_closed_form(2), abs=1e-10)
    assert best_subset in [s for s, _ in per_subset]
    for _, value in per_subset:
        assert value <= best.value + 1e-12


def test_f_matrix_worked_example_center():
    f = f_matrix(Target(star(3)), (0,), (1,))
    want = np.array([[0.5, (1 + 1j) / 4.0], [(1 - 1j) / 4.0, 0.0]])
    assert np.allclose(f.entries, want, atol=1e-12)


def test_f_matrix_worked_example_leaves():
    f = f_matrix(Target(star(3)), (1, 2), (3, 3))
    want = np.array([[0.5, 0.25j], [-0.25j, 0.0]])
    assert np.allclose(f.entries, want, atol=1e-12)


def test_f_matrix_lambda_max_equals_bruteforce():
    cases = [
        (Target(star(3)), (0,), (1,)),
        (Target(star(3)), (1, 2), (3, 3)),
        (ghz_target(4), (2, 3), (1, 1)),
        (ghz_target(3), (2,), (5,)),
    ]
    for target, v_c, etas in cases:
        lam = f_matrix_lambda_max(f_matrix(target, v_c, etas))
        assert lam == pytest.approx(
            assignment_value(target, v_c, etas), abs=1e-10
        )


def test_f_matrix_rejects_rank_one_split():
    # unentangled bipartition: complete graph minus relevant edges
    target = Target(Graph(2))  # two isolated vertices, product state
    with pytest.raises(UnsupportedBipartition):
        f_matrix(target, (1,), (1,))


def test_count_verdicts():
    table = build_threshold_table(6)
    zero = count_classical_nodes(0.792, table)
    assert zero.n_c_inferred == 0
    assert zero.steering_confirmed and zero.ew_violated
    three = count_classical_nodes(0.538, table)
    assert three.n_c_inferred == 3
    assert not three.steering_confirmed and three.ew_violated
    boundary = count_classical_nodes(threshold_closed_form(1), table)
    assert boundary.n_c_inferred == 1
    low = count_classical_nodes(0.4, table)
    assert low.n_c_inferred == "indeterminate(>=6)"
    assert not low.ew_violated


def test_count_margin_and_estimate_input():
    table = build_threshold_table(6)
    est = FidelityEstimate(0.792, 0.006)
    verdict = count_classical_nodes(est, table)
    assert verdict.n_c_inferred == 0
    assert verdict.margin_sigma == pytest.approx(
        (0.792 - threshold_closed_form(1)) / 0.006
    )
    exact = count_classical_nodes(FidelityEstimate(0.792, 0.0), table)
    assert exact.margin_sigma is None


def test_significance_conventions():
    est = FidelityEstimate(0.75, 0.05)
    assert significance(est, "ew") == pytest.approx(5.0)
    assert significance(est, "EW") == pytest.approx(5.0)
    est2 = FidelityEstimate(0.54, 0.01)
    assert significance(est2, "count", 3) == pytest.approx(
        (0.54 - threshold_closed_form(2)) / 0.01
    )
    est3 = FidelityEstimate(0.9, 0.02)
    assert significance(est3, "count", 1) == pytest.approx((0.9 - 1.0) / 0.02)
    with pytest.raises(UndefinedSignificance):
        significance(FidelityEstimate(0.7, 0.0), "ew")
    with pytest.raises(ConfigError):
        significance(est, "banana")
    with pytest.raises(ConfigError):
        significance(est, "count")
