"""Configuration-driven experiments: scenarios, grids, landscapes, oracle checks.

A scenario is a declarative document (YAML/JSON, schema = :class:`ScenarioModel`)
describing one network: the target, which nodes are classical and how (fixed
outcome triple, outcome distribution, or a decoherence channel applied to the
ideal state), an optional adversary strategy, optional preparation noise, and
the measurement budget.  ``run_scenario`` turns it into a report with the
fidelity, the inferred classical-node count, and significance levels.

All table outputs are deterministic: fixed column order, floats via ``repr``,
``\\n`` newlines — identical config and seed give identical bytes.  The
report JSON omits the wall-clock field for the same reason (it is returned
in-process and printed by the CLI instead).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .cheating import (
    OcsParams,
    hadamard_conjugate_assignment,
    ocs_hybrid,
    ocs_landscape,
    ocs_state,
    star_center,
)
from .errors import ConfigError
from .fidelity import FidelityEstimate, fidelity_exact
from .graphs import NAMED_TYPES, Graph, graph_from_spec
from .hybrid import (
    DECOHERENCE_CHANNELS,
    ClassicalNodeState,
    HybridNetwork,
    decohere_node,
)
from .paulis import (
    ENUMERATION_QUBITS,
    ghz_stabilizer_generators,
    restrict_masks,
    stabilizer_coefficient_arrays,
)
from .sampling import (
    NOISE_KINDS,
    NoiseSpec,
    ShotRecord,
    estimate_fidelity_sampled,
    noise_exact_ensemble,
    split_seed,
)
from .states import (
    StateEnsemble,
    Target,
    build_graph_state,
    ghz_state,
    ghz_target,
    target_state,
)
from .thresholds import (
    build_threshold_table,
    count_classical_nodes,
    significance,
    threshold_bruteforce,
    threshold_bruteforce_over_subsets,
    threshold_closed_form,
)

ShotsField = Union[int, Literal["exact"]]


# -- configuration models ------------------------------------------------------


class GraphModel(BaseModel):
    """Target description: a named family, explicit edges, or a GHZ state."""

    model_config = ConfigDict(extra="forbid")

    type: str
    n: Optional[int] = None
    edges: Optional[list[tuple[int, int]]] = None

    @model_validator(mode="after")
    def _check(self) -> "GraphModel":
        known = NAMED_TYPES + ("custom", "ghz")
        if self.type not in known:
            raise ValueError(f"graph type must be one of {known}, got {self.type!r}")
        if self.type == "ghz":
            if self.n is None or self.n < 2:
                raise ValueError("ghz target needs n >= 2")
            if self.edges is not None:
                raise ValueError("ghz target takes no explicit edges")
        return self

    def to_target(self) -> Target:
        if self.type == "ghz":
            return ghz_target(int(self.n))
        spec: dict = {"type": self.type}
        if self.n is not None:
            spec["n"] = self.n
        if self.edges is not None:
            spec["edges"] = [list(e) for e in self.edges]
        return Target(graph_from_spec(spec))


class ClassicalNodeModel(BaseModel):
    """One classical node: a fixed triple, a distribution, or a channel."""

    model_config = ConfigDict(extra="forbid")

    node: int
    eta: Optional[int] = None
    distribution: Optional[list[float]] = None
    channel: Optional[str] = None
    gamma: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "ClassicalNodeModel":
        given = [x is not None for x in (self.eta, self.distribution, self.channel)]
        if sum(given) != 1:
            raise ValueError(
                "give exactly one of eta / distribution / channel per classical node"
            )
        if self.eta is not None and not 1 <= self.eta <= 8:
            raise ValueError(f"eta must be in 1..8, got {self.eta}")
        if self.distribution is not None and len(self.distribution) != 8:
            raise ValueError("distribution needs 8 probabilities")
        if self.channel is not None and self.channel not in DECOHERENCE_CHANNELS:
            raise ValueError(
                f"channel must be one of {DECOHERENCE_CHANNELS}, got {self.channel!r}"
            )
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.gamma > 0.0 and self.channel != "amplitude_damping":
            raise ValueError("gamma only applies to the amplitude_damping channel")
        return self


class AdversaryModel(BaseModel):
    """Strategy of the classical coalition (if any)."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["none", "ocs_optimal", "ocs_custom"] = "none"
    n_c: Optional[int] = None
    v_c: Optional[list[int]] = None
    theta: Optional[float] = None
    phi: Optional[float] = None
    assignment: Optional[list[int]] = None

    @model_validator(mode="after")
    def _check(self) -> "AdversaryModel":
        if self.kind == "none":
            for name in ("n_c", "v_c", "theta", "phi", "assignment"):
                if getattr(self, name) is not None:
                    raise ValueError(f"adversary 'none' takes no {name}")
            return self
        if self.n_c is None and self.v_c is None:
            raise ValueError(f"adversary {self.kind!r} needs n_c or v_c")
        if self.n_c is not None and self.v_c is not None and len(self.v_c) != self.n_c:
            raise ValueError("n_c disagrees with len(v_c)")
        if self.kind == "ocs_optimal":
            for name in ("theta", "phi", "assignment"):
                if getattr(self, name) is not None:
                    raise ValueError(f"ocs_optimal computes {name} itself")
        else:
            if self.theta is None or self.phi is None:
                raise ValueError("ocs_custom needs explicit theta and phi")
        if self.assignment is not None and any(
            not 1 <= a <= 8 for a in self.assignment
        ):
            raise ValueError("assignment entries must be in 1..8")
        return self


class NoiseModel(BaseModel):
    """Preparation noise on the shared quantum state."""

    model_config = ConfigDict(extra="forbid")

    kind: str
    p: float

    @model_validator(mode="after")
    def _check(self) -> "NoiseModel":
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise parameter must be in [0, 1], got {self.p}")
        return self

    def to_spec(self) -> NoiseSpec:
        return NoiseSpec(self.kind, self.p)


class ScenarioModel(BaseModel):
    """One reproducible experiment over one network."""

    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    graph: GraphModel
    adversary: AdversaryModel = AdversaryModel()
    classical_nodes: list[ClassicalNodeModel] = []
    noise: Optional[NoiseModel] = None
    shots: ShotsField = "exact"
    seed: int = 0
    n_max: int = 8
    declared_n_c: Optional[int] = None
    save_shots: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ScenarioModel":
        if isinstance(self.shots, int) and self.shots < 1:
            raise ValueError(f"shots must be >= 1 or 'exact', got {self.shots}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        nodes = [c.node for c in self.classical_nodes]
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"duplicate classical node ids in {nodes}")
        if self.adversary.kind == "ocs_custom" and any(
            c.channel is not None for c in self.classical_nodes
        ):
            raise ValueError("channel nodes cannot be combined with an adversary")
        has_channel = any(c.channel is not None for c in self.classical_nodes)
        has_static = any(c.channel is None for c in self.classical_nodes)
        if has_channel and has_static:
            raise ValueError(
                "mixing channel nodes with eta/distribution nodes is not supported"
            )
        return self


def scenario_from_dict(data: dict) -> ScenarioModel:
    try:
        return ScenarioModel.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioModel:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario file {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"scenario file {path} must hold a mapping")
    return scenario_from_dict(data)


def graph_model_from_file(path: str | Path) -> GraphModel:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read graph file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"graph file {path} is not valid YAML: {exc}") from exc
    try:
        return GraphModel.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid graph file {path}: {exc}") from exc


# -- report models --------------------------------------------------------------


class SettingRowModel(BaseModel):
    setting: str
    n_strings: int
    estimate: float
    std_error: float


class VerdictModel(BaseModel):
    n_c_inferred: Union[int, str]
    ew_violated: bool
    steering_confirmed: bool
    margin_sigma: Optional[float]


class ExperimentReportModel(BaseModel):
    """Machine-readable outcome of one scenario run."""

    name: str
    scenario: ScenarioModel
    n: int
    frame: str
    v_q: list[int]
    v_c: list[int]
    exact: bool
    fidelity: float
    std_error: float
    n_settings: int
    shots_per_setting: int
    thresholds: list[float]
    verdict: VerdictModel
    s_ew: Optional[float]
    s_count: Optional[float]
    declared_n_c: Optional[int]
    settings: list[SettingRowModel]
    elapsed_seconds: float


# -- network construction --------------------------------------------------------


def _node_state(spec: ClassicalNodeModel) -> ClassicalNodeState:
    if spec.eta is not None:
        return ClassicalNodeState.point(spec.eta)
    return ClassicalNodeState(np.asarray(spec.distribution, dtype=float))


def _conjugate_node_state(st: ClassicalNodeState) -> ClassicalNodeState:
    probs = np.zeros(8)
    for eta in range(1, 9):
        probs[hadamard_conjugate_assignment(eta) - 1] = st.probs[eta - 1]
    return ClassicalNodeState(probs)


def _induced_subgraph(g: Graph, keep: Sequence[int]) -> Graph:
    index = {v: i for i, v in enumerate(keep)}
    edges = [
        (index[a], index[b]) for a, b in g.edges if a in index and b in index
    ]
    return Graph(len(keep), edges)


def _resolve_v_c(adv: AdversaryModel, n: int) -> tuple[int, ...]:
    if adv.v_c is not None:
        v_c = tuple(sorted(set(adv.v_c)))
        if len(v_c) != len(adv.v_c):
            raise ConfigError(f"duplicate nodes in v_c={adv.v_c}")
    else:
        if not 1 <= adv.n_c < n:
            raise ConfigError(f"n_c={adv.n_c} must satisfy 1 <= n_c < {n}")
        v_c = tuple(range(n - adv.n_c, n))
    if any(k < 0 or k >= n for k in v_c) or not 1 <= len(v_c) < n:
        raise ConfigError(f"v_c={v_c} is not a proper nonempty subset of 0..{n - 1}")
    return v_c


def _custom_ocs_network(
    target: Target, v_c: tuple[int, ...], adv: AdversaryModel,
    specs: dict[int, ClassicalNodeModel],
) -> HybridNetwork:
    """Two-parameter strategy state with per-node classical specs."""
    n = target.n
    n_c = len(v_c)
    v_q = tuple(k for k in range(n) if k not in v_c)
    if any(node not in v_c for node in specs):
        extra = sorted(set(specs) - set(v_c))
        raise ConfigError(f"classical node specs {extra} outside v_c={list(v_c)}")
    etas = list(adv.assignment) if adv.assignment is not None else [1] * n_c
    if len(etas) != n_c:
        raise ConfigError(f"assignment length {len(etas)} != n_c={n_c}")
    states: dict[int, ClassicalNodeState] = {}
    for i, node in enumerate(v_c):
        if node in specs:
            if adv.assignment is not None and specs[node].eta is not None:
                raise ConfigError(
                    f"node {node} has both an adversary assignment and its own eta"
                )
            states[node] = _node_state(specs[node])
        else:
            states[node] = ClassicalNodeState.point(etas[i])
    params = OcsParams(len(v_q), n_c, adv.theta, adv.phi, tuple(etas))
    state = ocs_state(params)
    if target.frame == "graph":
        center = star_center(target.graph)
        from .states import apply_hadamards

        positions = [pos for pos, node in enumerate(v_q) if node != center]
        state = apply_hadamards(state, positions)
        states = {
            node: (st if node == center else _conjugate_node_state(st))
            for node, st in states.items()
        }
    return HybridNetwork(
        n, v_q, v_c, StateEnsemble.pure(state), states, graph=target.graph
    )


def _static_local_network(
    target: Target, specs: list[ClassicalNodeModel]
) -> HybridNetwork:
    """Classical nodes with fixed specs; the rest share their own reduced target."""
    n = target.n
    v_c = tuple(sorted(c.node for c in specs))
    if any(k < 0 or k >= n for k in v_c):
        raise ConfigError(f"classical nodes {v_c} out of range 0..{n - 1}")
    if len(v_c) >= n:
        raise ConfigError("at least one node must stay quantum")
    v_q = tuple(k for k in range(n) if k not in v_c)
    if target.frame == "ghz":
        q_state = ghz_state(len(v_q))
    else:
        q_state = build_graph_state(_induced_subgraph(target.graph, v_q))
    states = {c.node: _node_state(c) for c in specs}
    return HybridNetwork(
        n, v_q, v_c, StateEnsemble.pure(q_state), states, graph=target.graph
    )


def build_network(sm: ScenarioModel) -> tuple[HybridNetwork, Target]:
    """Materialize the scenario's network and its verification target."""
    target = sm.graph.to_target()
    n = target.n
    if n > ENUMERATION_QUBITS:
        from .errors import ResourceCapExceeded

        raise ResourceCapExceeded(
            f"target has {n} nodes; stabilizer enumeration capped at {ENUMERATION_QUBITS}"
        )
    noise = sm.noise.to_spec() if sm.noise is not None else None
    adv = sm.adversary
    noise_done = False
    if adv.kind == "ocs_optimal":
        # optimal play fixes theta, phi and all-(+,+,+) triples itself
        net = ocs_hybrid(target, v_c=_resolve_v_c(adv, n))
    elif adv.kind == "ocs_custom":
        v_c = _resolve_v_c(adv, n)
        specs = {c.node: c for c in sm.classical_nodes}
        net = _custom_ocs_network(target, v_c, adv, specs)
    else:
        channel_specs = [c for c in sm.classical_nodes if c.channel is not None]
        static_specs = [c for c in sm.classical_nodes if c.channel is None]
        if channel_specs:
            ideal = target_state(target)
            ens = noise_exact_ensemble(ideal, noise)
            noise_done = True
            net = HybridNetwork(n, tuple(range(n)), (), ens, {}, target.graph)
            for spec in sorted(channel_specs, key=lambda c: c.node):
                net = decohere_node(net, spec.node, spec.channel, spec.gamma)
        elif static_specs:
            net = _static_local_network(target, static_specs)
        else:
            net = HybridNetwork(
                n, tuple(range(n)), (), StateEnsemble.pure(target_state(target)),
                {}, target.graph,
            )
    if noise is not None and not noise_done:
        net = replace(net, quantum_state=noise_exact_ensemble(net.quantum_state, noise))
    return net, target


# -- scenario runner -------------------------------------------------------------


def run_scenario(sm: ScenarioModel) -> tuple[ExperimentReportModel, list[ShotRecord]]:
    """Run one scenario; returns the report and any kept shot records."""
    t0 = time.perf_counter()
    net, target = build_network(sm)
    table = build_threshold_table(sm.n_max)
    records: list[ShotRecord] = []
    setting_rows: list[SettingRowModel] = []
    if sm.shots == "exact":
        estimate = fidelity_exact(net, target)
    else:
        sampled = estimate_fidelity_sampled(
            net, target, sm.shots, seed=sm.seed, keep_records=sm.save_shots
        )
        estimate = sampled.estimate
        records = sampled.records
        setting_rows = [
            SettingRowModel(setting=s, n_strings=k, estimate=m, std_error=e)
            for s, k, m, e in sampled.setting_terms
        ]
    verdict = count_classical_nodes(estimate, table)
    declared = sm.declared_n_c if sm.declared_n_c is not None else (
        len(net.v_c) if net.v_c else None
    )
    s_ew = s_count = None
    if estimate.std_error > 0.0:
        s_ew = significance(estimate, "ew")
        if declared is not None and declared >= 1:
            s_count = significance(estimate, "count", declared)
    report = ExperimentReportModel(
        name=sm.name,
        scenario=sm,
        n=net.n,
        frame=target.frame,
        v_q=list(net.v_q),
        v_c=list(net.v_c),
        exact=sm.shots == "exact",
        fidelity=estimate.value,
        std_error=estimate.std_error,
        n_settings=estimate.n_settings,
        shots_per_setting=estimate.shots_per_setting,
        thresholds=list(table.values),
        verdict=VerdictModel(
            n_c_inferred=verdict.n_c_inferred,
            ew_violated=verdict.ew_violated,
            steering_confirmed=verdict.steering_confirmed,
            margin_sigma=verdict.margin_sigma,
        ),
        s_ew=s_ew,
        s_count=s_count,
        declared_n_c=declared,
        settings=setting_rows,
        elapsed_seconds=time.perf_counter() - t0,
    )
    return report, records


# -- table runners ----------------------------------------------------------------


@dataclass
class TableResult:
    """A deterministic CSV-able table."""

    header: list[str]
    rows: list[list]


class ThresholdsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_max: int = 18
    bruteforce_max: int = 0

    @model_validator(mode="after")
    def _check(self) -> "ThresholdsRequest":
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not 0 <= self.bruteforce_max <= 6:
            raise ValueError("bruteforce_max must be in 0..6")
        return self


def run_thresholds(req: ThresholdsRequest) -> TableResult:
    """Threshold table, optionally cross-checked by the assignment search."""
    header = ["n_c", "F_closed_form", "F_bruteforce", "abs_diff"]
    rows: list[list] = []
    for n_c in range(1, req.n_max + 1):
        closed = threshold_closed_form(n_c)
        if n_c <= req.bruteforce_max:
            res = threshold_bruteforce(ghz_target(n_c + 1), tuple(range(1, n_c + 1)))
            rows.append([n_c, closed, res.value, abs(res.value - closed)])
        else:
            rows.append([n_c, closed, None, None])
    return TableResult(header, rows)


class GridRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_q_values: list[int]
    n_c_values: list[int]
    shots: ShotsField = "exact"
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "GridRequest":
        if any(v < 1 for v in self.n_q_values + self.n_c_values):
            raise ValueError("grid ranges must be >= 1")
        if isinstance(self.shots, int) and self.shots < 1:
            raise ValueError("shots must be >= 1 or 'exact'")
        return self


def _ghz_arrays(n: int, cache: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if n not in cache:
        cache[n] = stabilizer_coefficient_arrays(ghz_stabilizer_generators(n))
    return cache[n]


def _ocs_exact_fidelity(n_q: int, n_c: int, cache: dict) -> float:
    """Exact fidelity of the optimal strategy against GHZ, vectorized.

    The strategy state has only two nonzero amplitudes, so each stabilizer
    term's quantum factor reduces to a constant-time expression; the optimal
    (+,+,+) triples broadcast +1 for every observable, so the classical
    factor is identically one.
    """
    from .cheating import ocs_optimal_params

    n = n_q + n_c
    params = ocs_optimal_params(n_c, n_q)
    x, z, signs = _ghz_arrays(n, cache)
    coeff = signs.astype(float) * 2.0 ** (-n)
    v_q = tuple(range(n_q))
    xq = restrict_masks(x, n, v_q)
    zq = restrict_masks(z, n, v_q)
    c0 = math.cos(params.theta)
    c1 = complex(math.cos(params.phi), math.sin(params.phi)) * math.sin(params.theta)
    all_ones = (1 << n_q) - 1
    zpar = 1.0 - 2.0 * (np.bitwise_count(zq) & 1)
    quantum = np.zeros(x.shape[0])
    diag = xq == 0
    quantum[diag] = abs(c0) ** 2 + abs(c1) ** 2 * zpar[diag]
    anti = xq == all_ones
    yphase = (1j) ** (np.bitwise_count(xq[anti] & zq[anti]) % 4)
    cross = np.conj(c1) * c0 + np.conj(c0) * c1 * zpar[anti]
    quantum[anti] = (yphase * cross).real
    return float(np.sum(coeff * quantum))


def run_grid(req: GridRequest) -> TableResult:
    """Sweep the optimal strategy over (n_q, n_c) and classify each row."""
    header = ["n_q", "n_c", "F", "F_threshold", "verdict", "S(EW)", "S(n_c)"]
    rows: list[list] = []
    if not req.n_q_values or not req.n_c_values:
        return TableResult(header, rows)
    table = build_threshold_table(max(req.n_c_values) + 1)
    cache: dict = {}
    for row_index, (n_q, n_c) in enumerate(
        itertools.product(req.n_q_values, req.n_c_values)
    ):
        n = n_q + n_c
        if n > ENUMERATION_QUBITS:
            from .errors import ResourceCapExceeded

            raise ResourceCapExceeded(
                f"grid row ({n_q}, {n_c}) needs {n} nodes; cap {ENUMERATION_QUBITS}"
            )
        if req.shots == "exact":
            estimate = FidelityEstimate(_ocs_exact_fidelity(n_q, n_c, cache), 0.0)
        else:
            target = ghz_target(n)
            net = ocs_hybrid(target, n_c=n_c)
            estimate = estimate_fidelity_sampled(
                net, target, req.shots, seed=split_seed(req.seed, row_index)
            ).estimate
        verdict = count_classical_nodes(estimate, table)
        s_ew = s_nc = None
        if estimate.std_error > 0.0:
            s_ew = significance(estimate, "ew")
            s_nc = significance(estimate, "count", n_c)
        rows.append(
            [
                n_q,
                n_c,
                estimate.value,
                table.threshold(n_c),
                str(verdict.n_c_inferred),
                s_ew,
                s_nc,
            ]
        )
    return TableResult(header, rows)


class LandscapeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_q: int = 1
    n_c: int = 1
    n_theta: int = 101
    n_phi: int = 101
    theta_min: float = 0.0
    theta_max: float = math.pi / 2.0
    phi_min: float = -math.pi
    phi_max: float = math.pi
    assignment: Optional[list[int]] = None

    @model_validator(mode="after")
    def _check(self) -> "LandscapeRequest":
        if self.n_q < 1 or self.n_c < 1:
            raise ValueError("n_q and n_c must be >= 1")
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("grids need at least 2 points per axis")
        return self


@dataclass
class LandscapeResult:
    table: TableResult
    max_fidelity: float
    threshold: float


def run_landscape(req: LandscapeRequest) -> LandscapeResult:
    """Fidelity surface of the two-parameter strategy over (theta, phi)."""
    thetas = np.linspace(req.theta_min, req.theta_max, req.n_theta)
    phis = np.linspace(req.phi_min, req.phi_max, req.n_phi)
    values = ocs_landscape(req.n_q, req.n_c, thetas, phis, req.assignment)
    rows: list[list] = []
    for i, th in enumerate(thetas):
        for j, ph in enumerate(phis):
            rows.append([float(th), float(ph), float(values[i, j])])
    return LandscapeResult(
        TableResult(["theta", "phi", "fidelity"], rows),
        float(values.max()),
        threshold_closed_form(req.n_c),
    )


class OracleCheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graphs: list[str] = ["star", "chain", "ring"]
    n_values: list[int] = [2, 3, 4, 5, 6]
    max_nc: int = 3
    tolerance: float = 1e-9

    @model_validator(mode="after")
    def _check(self) -> "OracleCheckRequest":
        for g in self.graphs:
            if g not in NAMED_TYPES:
                raise ValueError(f"graph family must be one of {NAMED_TYPES}")
        if any(n < 2 for n in self.n_values):
            raise ValueError("n values must be >= 2")
        if not 1 <= self.max_nc <= 6:
            raise ValueError("max_nc must be in 1..6")
        return self


@dataclass
class OracleCheckResult:
    summary: TableResult
    subsets: TableResult
    max_abs_diff: float
    #: largest signed (bruteforce - closed form); > 0 would break the counting rule
    max_excess: float
    passed: bool


def run_oracle_check(req: OracleCheckRequest) -> OracleCheckResult:
    """Exhaustive agreement check: assignment search vs. the closed form.

    For every (family, size, n_c) the maximum over all size-``n_c`` subsets
    and all ``8^n_c`` assignments is compared against the closed-form
    threshold; per-subset maxima are reported for inspection.  ``passed``
    demands equality in every case.  The two disagreement directions mean
    different things: an excess (``max_excess > tolerance``) would invalidate
    the counting rule itself, while a shortfall only means that graph cannot
    saturate the threshold (every ring of five or more nodes with two or more
    classical nodes falls short, because no such subset admits the rank-2
    splitting the optimum requires).
    """
    from .graphs import chain, complete, ring, star

    builders = {"star": star, "chain": chain, "ring": ring, "complete": complete}
    sub_header = ["graph", "n", "n_c", "subset", "F_bruteforce", "F_closed_form", "abs_diff"]
    sum_header = ["graph", "n", "n_c", "F_max", "F_closed_form", "abs_diff", "ok"]
    sub_rows: list[list] = []
    sum_rows: list[list] = []
    worst = 0.0
    excess = -math.inf
    passed = True
    for family in req.graphs:
        for n in req.n_values:
            if family == "ring" and n < 3:
                continue
            graph = builders[family](n)
            for n_c in range(1, min(req.max_nc, n - 1) + 1):
                closed = threshold_closed_form(n_c)
                best, _, per_subset = threshold_bruteforce_over_subsets(
                    Target(graph), n_c
                )
                for subset, value in per_subset:
                    sub_rows.append(
                        [
                            family,
                            n,
                            n_c,
                            ";".join(str(k) for k in subset),
                            value,
                            closed,
                            abs(value - closed),
                        ]
                    )
                diff = abs(best.value - closed)
                ok = diff <= req.tolerance
                worst = max(worst, diff)
                excess = max(excess, best.value - closed)
                passed = passed and ok
                sum_rows.append([family, n, n_c, best.value, closed, diff, ok])
    return OracleCheckResult(
        TableResult(sum_header, sum_rows),
        TableResult(sub_header, sub_rows),
        worst,
        excess if sum_rows else 0.0,
        passed,
    )


# -- deterministic serialization ---------------------------------------------------


def format_cell(value) -> str:
    """Stable CSV cell: floats via repr, booleans lowercase, None empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def table_to_csv(table: TableResult) -> str:
    lines = [",".join(table.header)]
    for row in table.rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_table(path: str | Path, table: TableResult) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(table_to_csv(table))


def report_to_json(report: ExperimentReportModel) -> str:
    """Byte-stable report document (wall-clock field excluded)."""
    return report.model_dump_json(indent=2, exclude={"elapsed_seconds"}) + "\n"


def write_report(path: str | Path, report: ExperimentReportModel) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(report_to_json(report))


def settings_table(report: ExperimentReportModel) -> TableResult:
    header = ["setting", "n_strings", "estimate", "std_error"]
    rows = [[s.setting, s.n_strings, s.estimate, s.std_error] for s in report.settings]
    return TableResult(header, rows)


def shot_records_table(records: Iterable[ShotRecord]) -> TableResult:
    """One row per shot: setting word, shot index, every node's outcome."""
    records = list(records)
    if not records:
        return TableResult(["setting", "shot"], [])
    n = records[0].outcomes.shape[1]
    header = ["setting", "shot"] + [f"node_{k}" for k in range(n)]
    rows: list[list] = []
    for rec in records:
        for t in range(rec.shots):
            rows.append([rec.letters, t] + [int(v) for v in rec.outcomes[t]])
    return TableResult(header, rows)
