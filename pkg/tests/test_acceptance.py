"""End-to-end acceptance checks, one test per release criterion.

Each test asserts both the numerical claim (at its stated tolerance) and a
wall-clock budget, so a slow regression fails as loudly as a wrong number.
"""

import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from netcensus.cheating import ocs_check_matches_threshold, ocs_landscape
from netcensus.cli import main as cli_main
from netcensus.fidelity import fidelity_exact
from netcensus.graphs import chain, complete, ring, star
from netcensus.hybrid import HybridNetwork
from netcensus.paulis import enumerate_stabilizer, pauli_apply, pauli_dense
from netcensus.sampling import (
    NoiseSpec,
    estimate_fidelity_sampled,
    noise_exact_ensemble,
)
from netcensus.scenarios import (
    OracleCheckRequest,
    run_oracle_check,
    run_scenario,
    scenario_from_dict,
)
from netcensus.states import Target, ghz_state, ghz_target, target_generators, target_state
from netcensus.thresholds import (
    build_threshold_table,
    count_classical_nodes,
    f_matrix,
    threshold_closed_form,
)

GHZ6_IDENTITY_WEIGHT = 2.0**-6


def test_threshold_table_reproduces_reference_values():
    t0 = time.perf_counter()
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(cli_main, ["thresholds", "--max-nc", "18"])
        assert result.exit_code == 0
        rows = open("thresholds.csv").read().splitlines()[1:]
        assert len(rows) == 18
        values = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows}
    assert round(values[1], 4) == 0.6830
    assert round(values[2], 4) == 0.6036
    assert abs(threshold_closed_form(30) - 0.5) < 1e-4
    assert time.perf_counter() - t0 < 1.0


def test_assignment_search_matches_closed_form_over_graph_corpus():
    t0 = time.perf_counter()
    result = run_oracle_check(OracleCheckRequest())  # star/chain/ring, N<=6, n_c<=3
    families = {row[0] for row in result.summary.rows}
    assert families == {"star", "chain", "ring"}
    assert max(row[1] for row in result.summary.rows) == 6
    assert max(row[2] for row in result.summary.rows) == 3
    # The load-bearing direction always holds: no assignment beats a threshold.
    assert result.max_excess <= 1e-9
    # The criterion additionally demands the search *reaches* the closed form
    # on every (family, n, n_c).  Rings with n >= 5 and n_c >= 2 cannot: no
    # classical subset of that size splits the ring state with Schmidt rank 2
    # (every such cut has rank 4), so their true optimum sits strictly below
    # the closed form and this check fails honestly rather than being relaxed.
    shortfalls = [
        f"{row[0]}(n={row[1]}, n_c={row[2]}): best {row[3]:.12f} < "
        f"threshold {row[4]:.12f} (gap {row[5]:.3e})"
        for row in result.summary.rows
        if not row[6]
    ]
    assert result.passed is True, (
        "closed form not attained on: " + "; ".join(shortfalls)
    )
    assert result.max_abs_diff <= 1e-9
    assert time.perf_counter() - t0 < 120.0


def test_worked_coefficient_matrices_for_three_node_star():
    t0 = time.perf_counter()
    center = f_matrix(Target(star(3)), (0,), (1,)).entries
    want_center = np.array([[0.5, (1 + 1j) / 4.0], [(1 - 1j) / 4.0, 0.0]])
    assert np.max(np.abs(center - want_center)) <= 1e-12
    leaves = f_matrix(Target(star(3)), (1, 2), (3, 3)).entries
    want_leaves = np.array([[0.5, 0.25j], [-0.25j, 0.0]])
    assert np.max(np.abs(leaves - want_leaves)) <= 1e-12
    assert time.perf_counter() - t0 < 1.0


def test_optimal_strategy_saturates_but_never_exceeds_thresholds():
    t0 = time.perf_counter()
    thetas = np.linspace(0.0, math.pi / 2.0, 101)
    phis = np.linspace(-math.pi, math.pi, 101)
    for n_c in range(1, 7):
        value, threshold = ocs_check_matches_threshold(n_c)
        assert abs(value - threshold) <= 1e-9, f"n_c={n_c}"
        surface = ocs_landscape(1, n_c, thetas, phis)
        assert surface.max() <= threshold + 1e-9, f"n_c={n_c}"
    assert time.perf_counter() - t0 < 60.0


def test_witness_passes_while_one_node_is_classical():
    t0 = time.perf_counter()
    report, _ = run_scenario(
        scenario_from_dict(
            {
                "graph": {"type": "ghz", "n": 6},
                "adversary": {"kind": "ocs_optimal", "n_c": 1},
            }
        )
    )
    assert report.exact is True
    assert round(report.fidelity, 4) == 0.6830
    assert report.fidelity > 0.5  # the witness alone would call this entangled
    assert report.verdict.ew_violated is True
    assert report.verdict.n_c_inferred == 1
    assert time.perf_counter() - t0 < 1.0


def test_tuned_noise_levels_give_reference_verdicts():
    t0 = time.perf_counter()
    table = build_threshold_table(8)

    # white noise dialed so the exact six-node fidelity is 0.792
    p_white = (0.792 - GHZ6_IDENTITY_WEIGHT) / (1.0 - GHZ6_IDENTITY_WEIGHT)
    ens = noise_exact_ensemble(ghz_state(6), NoiseSpec("white", p_white))
    net = HybridNetwork.fully_quantum(ens)
    target = ghz_target(6)
    assert fidelity_exact(net, target).value == pytest.approx(0.792, abs=1e-12)
    confident = 0
    for seed in range(100):
        est = estimate_fidelity_sampled(net, target, 100_000, seed=seed).estimate
        verdict = count_classical_nodes(est, table)
        if verdict.n_c_inferred == 0 and verdict.margin_sigma > 3.0:
            confident += 1
    assert confident >= 95

    # the same noise acting on a one-classical-node strategy, dialed to 0.538
    f1 = threshold_closed_form(1)
    p_ocs = (0.538 - GHZ6_IDENTITY_WEIGHT) / (f1 - GHZ6_IDENTITY_WEIGHT)
    scenario = {
        "graph": {"type": "ghz", "n": 6},
        "adversary": {"kind": "ocs_optimal", "n_c": 1},
        "noise": {"kind": "white", "p": p_ocs},
    }
    report, _ = run_scenario(scenario_from_dict(scenario))
    assert report.fidelity == pytest.approx(0.538, abs=1e-12)
    assert report.verdict.n_c_inferred == 3
    sampled, _ = run_scenario(
        scenario_from_dict({**scenario, "shots": 100_000, "seed": 0})
    )
    assert sampled.verdict.n_c_inferred == 3
    assert time.perf_counter() - t0 < 600.0


def test_stabilizers_fix_their_graph_states_and_rebuild_projectors():
    t0 = time.perf_counter()
    corpus = []
    for n in range(2, 9):
        corpus.append(Target(star(n)))
        corpus.append(Target(chain(n)))
        corpus.append(Target(complete(n)))
        if n >= 3:
            corpus.append(Target(ring(n)))
        corpus.append(ghz_target(n))
    for target in corpus:
        state = target_state(target)
        for gen in target_generators(target):
            assert np.max(np.abs(pauli_apply(gen, state.amps) - state.amps)) <= 1e-10
        if target.n <= 6:
            dim = 1 << target.n
            rebuilt = np.zeros((dim, dim), dtype=complex)
            for coeff, string in enumerate_stabilizer(target_generators(target)):
                rebuilt += coeff * pauli_dense(string)
            projector = np.outer(state.amps, state.amps.conj())
            assert np.max(np.abs(rebuilt - projector)) <= 1e-12
    assert time.perf_counter() - t0 < 60.0


def test_shot_noise_scales_as_inverse_sqrt_with_calibrated_errors():
    t0 = time.perf_counter()
    ens = noise_exact_ensemble(ghz_state(3), NoiseSpec("white", 0.75))
    net = HybridNetwork.fully_quantum(ens)
    target = ghz_target(3)
    exact = fidelity_exact(net, target).value
    assert exact == pytest.approx(0.78125, abs=1e-12)

    shot_grid = [100, 1_000, 10_000, 100_000]
    rms = []
    for shots in shot_grid:
        errors = [
            estimate_fidelity_sampled(net, target, shots, seed=seed).estimate.value
            - exact
            for seed in range(80)
        ]
        rms.append(math.sqrt(np.mean(np.square(errors))))
    slope = np.polyfit(np.log(shot_grid), np.log(rms), 1)[0]
    assert -0.55 <= slope <= -0.45

    covered = 0
    n_seeds = 500
    for seed in range(1_000, 1_000 + n_seeds):
        est = estimate_fidelity_sampled(net, target, 1_000, seed=seed).estimate
        if abs(est.value - exact) <= est.std_error:
            covered += 1
    assert 0.63 <= covered / n_seeds <= 0.73
    assert time.perf_counter() - t0 < 600.0
