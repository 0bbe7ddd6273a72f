import math

import numpy as np
import pytest

from netcensus.cheating import OcsParams, ocs_hybrid, ocs_landscape
from netcensus.errors import ConfigError, ResourceCapExceeded
from netcensus.fidelity import fidelity_exact
from netcensus.graphs import star
from netcensus.hybrid import HybridNetwork, decohere_node
from netcensus.sampling import ShotRecord, split_seed
from netcensus.scenarios import (
    GraphModel,
    GridRequest,
    LandscapeRequest,
    OracleCheckRequest,
    ScenarioModel,
    TableResult,
    ThresholdsRequest,
    build_network,
    format_cell,
    graph_model_from_file,
    load_scenario,
    report_to_json,
    run_grid,
    run_landscape,
    run_oracle_check,
    run_scenario,
    run_thresholds,
    scenario_from_dict,
    settings_table,
    shot_records_table,
    table_to_csv,
)
from netcensus.states import Target, build_graph_state, ghz_state, ghz_target
from netcensus.thresholds import (
    build_threshold_table,
    count_classical_nodes,
    threshold_closed_form,
)


def scenario(**kwargs) -> ScenarioModel:
    data = {"graph": {"type": "ghz", "n": 3}}
    data.update(kwargs)
    return scenario_from_dict(data)


# -- validation ------------------------------------------------------------------


@pytest.mark.parametrize(
    "data",
    [
        {"graph": {"type": "moebius", "n": 3}},
        {"graph": {"type": "ghz"}},
        {"graph": {"type": "ghz", "n": 3, "edges": [[0, 1]]}},
        {"graph": {"type": "ghz", "n": 3}, "shots": 0},
        {"graph": {"type": "ghz", "n": 3}, "shots": -5},
        {"graph": {"type": "ghz", "n": 3}, "unknown_field": 1},
        {
            "graph": {"type": "ghz", "n": 3},
            "classical_nodes": [{"node": 2, "eta": 1}, {"node": 2, "eta": 3}],
        },
        {
            "graph": {"type": "ghz", "n": 3},
            "classical_nodes": [{"node": 2, "eta": 1, "distribution": [1.0] + [0.0] * 7}],
        },
        {"graph": {"type": "ghz", "n": 3}, "classical_nodes": [{"node": 2}]},
        {"graph": {"type": "ghz", "n": 3}, "classical_nodes": [{"node": 2, "eta": 9}]},
        {
            "graph": {"type": "ghz", "n": 3},
            "classical_nodes": [{"node": 2, "channel": "measure_z", "gamma": 0.2}],
        },
        {
            "graph": {"type": "ghz", "n": 3},
            "classical_nodes": [
                {"node": 1, "channel": "measure_z"},
                {"node": 2, "eta": 1},
            ],
        },
        {"graph": {"type": "ghz", "n": 3}, "adversary": {"kind": "none", "n_c": 1}},
        {"graph": {"type": "ghz", "n": 3}, "adversary": {"kind": "ocs_optimal"}},
        {
            "graph": {"type": "ghz", "n": 3},
            "adversary": {"kind": "ocs_optimal", "n_c": 1, "theta": 0.4},
        },
        {"graph": {"type": "ghz", "n": 3}, "adversary": {"kind": "ocs_custom", "n_c": 1}},
        {
            "graph": {"type": "ghz", "n": 3},
            "adversary": {"kind": "ocs_custom", "n_c": 1, "v_c": [1, 2], "theta": 0.4, "phi": 0.0},
        },
        {
            "graph": {"type": "ghz", "n": 3},
            "adversary": {"kind": "ocs_custom", "n_c": 1, "theta": 0.4, "phi": 0.0},
            "classical_nodes": [{"node": 2, "channel": "measure_z"}],
        },
    ],
)
def test_invalid_scenarios_raise_config_error(data):
    with pytest.raises(ConfigError):
        scenario_from_dict(data)


def test_build_network_rejects_bad_subsets():
    with pytest.raises(ConfigError):
        build_network(
            scenario(adversary={"kind": "ocs_optimal", "n_c": 3})
        )
    with pytest.raises(ConfigError):
        build_network(
            scenario(adversary={"kind": "ocs_optimal", "v_c": [1, 5]})
        )
    # spec for a node outside the adversary's classical set
    with pytest.raises(ConfigError):
        build_network(
            scenario(
                adversary={"kind": "ocs_custom", "v_c": [2], "theta": 0.4, "phi": 0.0},
                classical_nodes=[{"node": 1, "eta": 1}],
            )
        )
    # per-node eta clashing with an explicit adversary assignment
    with pytest.raises(ConfigError):
        build_network(
            scenario(
                adversary={
                    "kind": "ocs_custom",
                    "v_c": [2],
                    "theta": 0.4,
                    "phi": 0.0,
                    "assignment": [5],
                },
                classical_nodes=[{"node": 2, "eta": 1}],
            )
        )
    with pytest.raises(ConfigError):
        build_network(
            scenario(
                classical_nodes=[{"node": 0, "eta": 1}, {"node": 1, "eta": 1},
                                 {"node": 2, "eta": 1}],
            )
        )
    with pytest.raises(ResourceCapExceeded):
        build_network(scenario(graph={"type": "ghz", "n": 25}))


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("graph: [unbalanced\n")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    listy = tmp_path / "list.yaml"
    listy.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_scenario(listy)


def test_graph_model_from_file(tmp_path):
    path = tmp_path / "g.yaml"
    path.write_text("type: ring\nn: 4\n")
    gm = graph_model_from_file(path)
    assert gm.type == "ring" and gm.n == 4
    assert gm.to_target().frame == "graph"
    bad = tmp_path / "bad.yaml"
    bad.write_text("type: dodecahedron\n")
    with pytest.raises(ConfigError):
        graph_model_from_file(bad)


# -- network construction ---------------------------------------------------------


def test_static_ghz_network_shares_reduced_ghz():
    sm = scenario(
        graph={"type": "ghz", "n": 4}, classical_nodes=[{"node": 3, "eta": 1}]
    )
    net, target = build_network(sm)
    assert net.v_q == (0, 1, 2) and net.v_c == (3,)
    branch = net.quantum_state.branches[0][1]
    assert np.allclose(branch.amps, ghz_state(3).amps)
    assert target.frame == "ghz"


def test_static_graph_network_shares_induced_subgraph_state():
    sm = scenario(
        graph={"type": "star", "n": 4}, classical_nodes=[{"node": 2, "eta": 4}]
    )
    net, _ = build_network(sm)
    assert net.v_q == (0, 1, 3)
    from netcensus.graphs import Graph

    induced = Graph(3, ((0, 1), (0, 2)))  # star(4) restricted to {0, 1, 3}
    branch = net.quantum_state.branches[0][1]
    assert np.allclose(branch.amps, build_graph_state(induced).amps)


def test_channel_node_matches_manual_decoherence():
    sm = scenario(classical_nodes=[{"node": 2, "channel": "measure_z"}])
    net, target = build_network(sm)
    manual = decohere_node(
        HybridNetwork.fully_quantum(ghz_state(3)), 2, "measure_z"
    )
    got = fidelity_exact(net, target).value
    want = fidelity_exact(manual, ghz_target(3)).value
    assert got == pytest.approx(want, abs=1e-12)
    assert net.v_c == (2,)


def test_ocs_optimal_network_reaches_threshold():
    for n_c in (1, 2):
        sm = scenario(
            graph={"type": "ghz", "n": 4},
            adversary={"kind": "ocs_optimal", "n_c": n_c},
        )
        net, target = build_network(sm)
        value = fidelity_exact(net, target).value
        assert value == pytest.approx(threshold_closed_form(n_c), abs=1e-9)


def test_ocs_custom_matches_landscape_value():
    theta, phi = 0.35, -0.6
    sm = scenario(
        adversary={
            "kind": "ocs_custom",
            "v_c": [2],
            "theta": theta,
            "phi": phi,
            "assignment": [4],
        }
    )
    net, target = build_network(sm)
    got = fidelity_exact(net, target).value
    want = ocs_landscape(2, 1, [theta], [phi], [4])[0, 0]
    assert got == pytest.approx(want, abs=1e-12)


def test_ocs_custom_frame_invariance():
    theta, phi = 0.5, 1.2
    ghz_sm = scenario(
        adversary={"kind": "ocs_custom", "v_c": [2], "theta": theta, "phi": phi}
    )
    star_sm = scenario(
        graph={"type": "star", "n": 3},
        adversary={"kind": "ocs_custom", "v_c": [2], "theta": theta, "phi": phi},
    )
    f_ghz = fidelity_exact(*build_network(ghz_sm)).value
    f_star = fidelity_exact(*build_network(star_sm)).value
    assert f_star == pytest.approx(f_ghz, abs=1e-12)


def test_noise_applied_after_static_nodes():
    sm = scenario(
        graph={"type": "ghz", "n": 3},
        classical_nodes=[{"node": 2, "eta": 1}],
        noise={"kind": "white", "p": 0.8},
    )
    net, _ = build_network(sm)
    assert net.quantum_state.mixed_weight == pytest.approx(0.2)
    total = sum(w for w, _ in net.quantum_state.branches)
    assert total == pytest.approx(0.8)


def test_white_noise_scenario_fidelity():
    sm = scenario(
        graph={"type": "ghz", "n": 6}, noise={"kind": "white", "p": 0.75}
    )
    report, _ = run_scenario(sm)
    assert report.fidelity == pytest.approx(0.75390625, abs=1e-12)


# -- scenario runner ---------------------------------------------------------------


def test_exact_scenario_report_fields():
    sm = scenario(
        graph={"type": "ghz", "n": 6},
        adversary={"kind": "ocs_optimal", "n_c": 1},
        name="probe",
    )
    report, records = run_scenario(sm)
    assert records == []
    assert report.name == "probe"
    assert report.exact is True
    assert report.n == 6
    assert report.frame == "ghz"
    assert report.v_c == [5]
    assert report.fidelity == pytest.approx(threshold_closed_form(1), abs=1e-9)
    assert report.std_error == 0.0
    assert report.s_ew is None and report.s_count is None
    assert report.verdict.n_c_inferred == 1
    assert report.verdict.ew_violated is True
    # the fidelity sits exactly on the one-node threshold: not above it
    assert report.verdict.steering_confirmed is False
    assert report.declared_n_c == 1
    assert report.thresholds == [threshold_closed_form(k) for k in range(1, 9)]
    assert report.settings == []
    assert report.elapsed_seconds >= 0.0


def test_sampled_scenario_report_fields():
    sm = scenario(
        graph={"type": "ghz", "n": 3},
        noise={"kind": "white", "p": 0.9},
        shots=400,
        seed=7,
        declared_n_c=1,
        save_shots=True,
    )
    report, records = run_scenario(sm)
    assert report.exact is False
    assert report.shots_per_setting == 400
    assert report.n_settings == 2 ** (3 - 1) + 1
    assert len(report.settings) == report.n_settings
    assert len(records) == report.n_settings
    assert all(isinstance(r, ShotRecord) for r in records)
    assert report.std_error > 0.0
    assert report.s_ew is not None and report.s_count is not None
    exact_value = 0.9 + 0.1 / 8.0
    assert report.fidelity == pytest.approx(exact_value, abs=5 * report.std_error)
    # deterministic: same scenario, same outcome
    again, _ = run_scenario(sm)
    assert again.fidelity == report.fidelity
    assert again.std_error == report.std_error


def test_scenario_verdict_is_pure_function_of_value_and_table():
    sm = scenario(
        graph={"type": "ghz", "n": 3},
        noise={"kind": "white", "p": 0.8},
        shots=300,
        seed=3,
    )
    report, _ = run_scenario(sm)
    from netcensus.fidelity import FidelityEstimate

    table = build_threshold_table(sm.n_max)
    redo = count_classical_nodes(
        FidelityEstimate(report.fidelity, report.std_error), table
    )
    assert redo.n_c_inferred == report.verdict.n_c_inferred
    assert redo.ew_violated == report.verdict.ew_violated
    assert redo.steering_confirmed == report.verdict.steering_confirmed


# -- table runners ------------------------------------------------------------------


def test_run_thresholds_rows_and_bruteforce():
    table = run_thresholds(ThresholdsRequest(n_max=4, bruteforce_max=2))
    assert table.header == ["n_c", "F_closed_form", "F_bruteforce", "abs_diff"]
    assert len(table.rows) == 4
    for row in table.rows[:2]:
        assert row[2] is not None and row[3] <= 1e-12
    for row in table.rows[2:]:
        assert row[2] is None and row[3] is None
    assert table.rows[0][1] == pytest.approx(threshold_closed_form(1))


def test_run_grid_exact_matches_general_hybrid_path():
    req = GridRequest(n_q_values=[1, 2], n_c_values=[1, 2, 3])
    table = run_grid(req)
    assert table.header == ["n_q", "n_c", "F", "F_threshold", "verdict", "S(EW)", "S(n_c)"]
    assert len(table.rows) == 6
    for n_q, n_c, value, thr, verdict, s_ew, s_nc in table.rows:
        target = ghz_target(n_q + n_c)
        slow = fidelity_exact(ocs_hybrid(target, n_c=n_c), target).value
        assert value == pytest.approx(slow, abs=1e-12)
        assert thr == pytest.approx(threshold_closed_form(n_c), abs=1e-12)
        assert verdict == str(n_c)
        assert s_ew is None and s_nc is None


def test_run_grid_sampled_deterministic_rows():
    req = GridRequest(n_q_values=[1], n_c_values=[1, 2], shots=200, seed=5)
    a = run_grid(req)
    b = run_grid(req)
    assert a.rows == b.rows
    for row in a.rows:
        assert row[5] is not None and row[6] is not None
    # per-row seeds are split from the master seed by row index
    n_q, n_c = 1, 2
    target = ghz_target(n_q + n_c)
    net = ocs_hybrid(target, n_c=n_c)
    from netcensus.sampling import estimate_fidelity_sampled

    redo = estimate_fidelity_sampled(net, target, 200, seed=split_seed(5, 1))
    assert a.rows[1][2] == pytest.approx(redo.estimate.value, abs=1e-15)


def test_run_grid_empty_and_cap():
    assert run_grid(GridRequest(n_q_values=[], n_c_values=[1])).rows == []
    with pytest.raises(ResourceCapExceeded):
        run_grid(GridRequest(n_q_values=[20], n_c_values=[5]))


def test_run_landscape_shape_and_max():
    req = LandscapeRequest(n_c=1, n_theta=41, n_phi=41)
    res = run_landscape(req)
    assert res.table.header == ["theta", "phi", "fidelity"]
    assert len(res.table.rows) == 41 * 41
    assert res.threshold == pytest.approx(threshold_closed_form(1))
    assert res.max_fidelity <= res.threshold + 1e-12
    # theta-major ordering: first block shares theta, phi sweeps
    assert res.table.rows[0][0] == res.table.rows[1][0]
    assert res.table.rows[0][1] != res.table.rows[1][1]
    assert res.max_fidelity == pytest.approx(
        max(r[2] for r in res.table.rows), abs=1e-15
    )


def test_run_oracle_check_small():
    req = OracleCheckRequest(graphs=["star"], n_values=[2, 3], max_nc=2, tolerance=1e-9)
    res = run_oracle_check(req)
    assert res.passed is True
    assert res.max_abs_diff <= 1e-9
    assert res.max_excess <= 1e-9
    # (star, 2, nc=1), (star, 3, nc=1), (star, 3, nc=2)
    assert len(res.summary.rows) == 3
    assert all(row[-1] is True for row in res.summary.rows)
    subset_counts = {(r[0], r[1], r[2]) for r in res.subsets.rows}
    assert ("star", 3, 2) in subset_counts


# -- serialization -------------------------------------------------------------------


def test_format_cell_conventions():
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(False) == "false"
    assert format_cell(3) == "3"
    assert format_cell(0.1) == repr(0.1)
    assert format_cell(0.68301270189221932) == repr(0.68301270189221932)
    assert format_cell("word") == "word"


def test_table_to_csv_newline_discipline():
    table = TableResult(["a", "b"], [[1, None], [True, 0.5]])
    text = table_to_csv(table)
    assert text == "a,b\n1,\ntrue,0.5\n"
    assert "\r" not in text


def test_report_json_stable_and_excludes_wall_clock():
    sm = scenario(shots=100, seed=1)
    report_a, _ = run_scenario(sm)
    report_b, _ = run_scenario(sm)
    text_a = report_to_json(report_a)
    text_b = report_to_json(report_b)
    assert text_a == text_b
    assert "elapsed_seconds" not in text_a
    assert text_a.endswith("\n")
    import json

    doc = json.loads(text_a)
    assert doc["fidelity"] == report_a.fidelity
    assert doc["scenario"]["seed"] == 1


def test_settings_and_shot_tables():
    sm = scenario(shots=50, seed=2, save_shots=True)
    report, records = run_scenario(sm)
    st = settings_table(report)
    assert st.header == ["setting", "n_strings", "estimate", "std_error"]
    assert len(st.rows) == report.n_settings
    shots = shot_records_table(records)
    assert shots.header == ["setting", "shot", "node_0", "node_1", "node_2"]
    assert len(shots.rows) == report.n_settings * 50
    assert all(v in (-1, 1) for v in shots.rows[0][2:])
    assert shot_records_table([]).rows == []
