"""Hybrid networks: quantum nodes plus classical nodes with preexisting outcomes.

A classical node does not hold a qubit; it holds a triple
``(v1, v2, v3) in {+-1}^3`` of predetermined answers to the three local
measurements (X, Y, Z respectively).  The eight possible triples are indexed
``eta = 1..8``:

====  ====  ====  ====
eta    v1    v2    v3
====  ====  ====  ====
 1     +1    +1    +1
 2     +1    +1    -1
 3     +1    -1    +1
 4     +1    -1    -1
 5     -1    +1    +1
 6     -1    +1    -1
 7     -1    -1    +1
 8     -1    -1    -1
====  ====  ====  ====

A node may also carry a probability distribution over the eight triples.
The network model is a product: the quantum nodes share a state (or ensemble),
each classical node answers independently from its own triple/distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, InvalidPartition, InvalidState
from .graphs import Graph
from .paulis import PauliString, pauli_expectation
from .states import PureState, StateEnsemble

#: row eta-1 -> (v1, v2, v3)
OUTCOME_TRIPLES = np.array(
    [
        [+1, +1, +1],
        [+1, +1, -1],
        [+1, -1, +1],
        [+1, -1, -1],
        [-1, +1, +1],
        [-1, +1, -1],
        [-1, -1, +1],
        [-1, -1, -1],
    ],
    dtype=np.int8,
)

#: letter code (0=I, 1=X, 2=Z, 3=Y) -> column in OUTCOME_TRIPLES (-1 = identity)
_CODE_TO_COLUMN = (-1, 0, 2, 1)

#: outcome lookup: [eta-1, letter code] -> predetermined outcome (+-1; I -> +1)
OUTCOME_TABLE = np.concatenate(
    [
        np.ones((8, 1), dtype=np.int8),
        OUTCOME_TRIPLES[:, [0]],  # X -> v1
        OUTCOME_TRIPLES[:, [2]],  # Z -> v3
        OUTCOME_TRIPLES[:, [1]],  # Y -> v2
    ],
    axis=1,
)


@dataclass(frozen=True)
class ClassicalAssignment:
    """One of the eight outcome triples, by index ``eta``."""

    eta: int

    def __post_init__(self) -> None:
        if not 1 <= self.eta <= 8:
            raise ConfigError(f"eta must be in 1..8, got {self.eta}")

    @property
    def triple(self) -> tuple[int, int, int]:
        v = OUTCOME_TRIPLES[self.eta - 1]
        return int(v[0]), int(v[1]), int(v[2])

    @classmethod
    def from_triple(cls, triple: Sequence[int]) -> "ClassicalAssignment":
        t = tuple(int(v) for v in triple)
        if len(t) != 3 or any(v not in (-1, 1) for v in t):
            raise ConfigError(f"triple must be three values of +-1, got {triple!r}")
        for eta in range(1, 9):
            if tuple(int(v) for v in OUTCOME_TRIPLES[eta - 1]) == t:
                return cls(eta)
        raise ConfigError("unreachable")  # pragma: no cover

    def outcome(self, letter_code: int) -> int:
        """Predetermined outcome for letter code 0..3 (identity gives +1)."""
        return int(OUTCOME_TABLE[self.eta - 1, letter_code])


@dataclass(frozen=True)
class ClassicalNodeState:
    """Distribution over the eight outcome triples."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.shape[0] != 8:
            raise ConfigError("classical node distribution needs 8 probabilities")
        if np.min(p) < -1e-12 or abs(float(np.sum(p)) - 1.0) > 1e-9:
            raise ConfigError("classical node distribution is not normalized")
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    @classmethod
    def point(cls, assignment: ClassicalAssignment | int) -> "ClassicalNodeState":
        eta = assignment.eta if isinstance(assignment, ClassicalAssignment) else int(assignment)
        p = np.zeros(8)
        p[eta - 1] = 1.0
        return cls(p)

    @property
    def is_point(self) -> bool:
        return bool(np.max(self.probs) > 1.0 - 1e-12)

    @property
    def point_assignment(self) -> ClassicalAssignment:
        if not self.is_point:
            raise ConfigError("distribution is not a point mass")
        return ClassicalAssignment(int(np.argmax(self.probs)) + 1)

    def expectation(self, letter_code: int) -> float:
        """Mean predetermined outcome for a letter code (0=I gives 1)."""
        if letter_code == 0:
            return 1.0
        col = _CODE_TO_COLUMN[letter_code]
        return float(np.dot(self.probs, OUTCOME_TRIPLES[:, col]))


def classical_expectation(node: ClassicalNodeState, letter: str | int) -> float:
    """Expectation of a single-node measurement under the realism model."""
    if isinstance(letter, str):
        try:
            code = {"I": 0, "X": 1, "Z": 2, "Y": 3}[letter.upper()]
        except KeyError:
            raise ConfigError(f"unknown measurement letter {letter!r}") from None
    else:
        code = int(letter)
        if code not in (0, 1, 2, 3):
            raise ConfigError(f"letter code must be 0..3, got {code}")
    return node.expectation(code)


@dataclass(frozen=True)
class HybridNetwork:
    """Network of quantum nodes (shared state) and classical nodes.

    ``v_q``/``v_c`` are ordered node tuples partitioning ``0..n-1``; the
    quantum state's qubit ``i`` lives at node ``v_q[i]``.  ``graph`` records
    the intended target topology when there is one.
    """

    n: int
    v_q: tuple[int, ...]
    v_c: tuple[int, ...]
    quantum_state: PureState | StateEnsemble
    classical_states: Mapping[int, ClassicalNodeState] = field(default_factory=dict)
    graph: Graph | None = None

    def __post_init__(self) -> None:
        nodes = sorted(self.v_q) + sorted(self.v_c)
        if sorted(nodes) != list(range(self.n)):
            raise InvalidPartition(
                f"v_q={self.v_q} and v_c={self.v_c} do not partition 0..{self.n - 1}"
            )
        nq = self._state_qubits()
        if nq != len(self.v_q):
            raise InvalidPartition(
                f"quantum state has {nq} qubits but v_q lists {len(self.v_q)} nodes"
            )
        missing = [k for k in self.v_c if k not in self.classical_states]
        if missing:
            raise InvalidPartition(f"classical nodes without state: {missing}")
        if self.graph is not None and self.graph.n != self.n:
            raise InvalidPartition("graph size does not match node count")

    def _state_qubits(self) -> int:
        if isinstance(self.quantum_state, PureState):
            return self.quantum_state.n
        return self.quantum_state.n if self.quantum_state.branches else len(self.v_q)

    @classmethod
    def fully_quantum(cls, state: PureState, graph: Graph | None = None) -> "HybridNetwork":
        return cls(state.n, tuple(range(state.n)), (), state, {}, graph)


def _quantum_factor(state: PureState | StateEnsemble, sub: PauliString) -> float:
    if isinstance(state, PureState):
        return pauli_expectation(sub, state.amps).real
    total = 0.0
    for w, branch in state.branches:
        if w > 0.0:
            total += w * pauli_expectation(sub, branch.amps).real
    if state.mixed_weight > 0.0 and sub.weight == 0:
        total += state.mixed_weight
    return total


def hybrid_string_expectation(net: HybridNetwork, p: PauliString) -> float:
    """``<P>`` under the hybrid model.

    The quantum letters act on the shared state; each classical letter is
    replaced by that node's predetermined (mean) outcome.  Requires a
    Hermitian string so the value is real.
    """
    if p.n != net.n:
        raise ConfigError(f"string on {p.n} qubits, network has {net.n} nodes")
    if not p.is_hermitian:
        raise ConfigError("hybrid expectation needs a Hermitian string")
    value = float(p.sign)
    for k in net.v_c:
        code = p.letter_code(k)
        if code != 0:
            value *= net.classical_states[k].expectation(code)
            if value == 0.0:
                return 0.0
    sub = p.restrict(net.v_q)
    return value * _quantum_factor(net.quantum_state, sub)


# -- decoherence channels ----------------------------------------------------

DECOHERENCE_CHANNELS = ("measure_z", "full_dephasing", "amplitude_damping")


def _eta_distribution_from_z(p_plus: float) -> ClassicalNodeState:
    """Spread each v3 outcome uniformly over its four compatible triples.

    This pins the Z marginal to the Born probabilities and symmetrizes the
    X and Y marginals to zero, the behaviour of a fully decohered qubit.
    """
    p = np.empty(8)
    plus_rows = OUTCOME_TRIPLES[:, 2] == 1
    p[plus_rows] = p_plus / 4.0
    p[~plus_rows] = (1.0 - p_plus) / 4.0
    return ClassicalNodeState(p)


def _z_split(amps: np.ndarray, n: int, pos: int) -> list[tuple[float, np.ndarray]]:
    """Project qubit ``pos`` onto Z eigenstates; return (prob, reduced amps)."""
    t = amps.reshape([2] * n)
    t = np.moveaxis(t, pos, 0)
    out = []
    for b in range(2):
        branch = t[b].reshape(-1)
        prob = float(np.linalg.norm(branch) ** 2)
        if prob > 1e-14:
            out.append((prob, branch / math.sqrt(prob)))
        else:
            out.append((0.0, None))
    return out


def decohere_node(
    net: HybridNetwork,
    node: int,
    channel: str = "measure_z",
    gamma: float | None = None,
) -> HybridNetwork:
    """Convert a quantum node into a classical node via a decoherence channel.

    ``measure_z`` and ``full_dephasing`` coincide in this model (an unread
    measurement and complete dephasing produce the same marginals): the node's
    v3 distribution follows the Born probabilities, X/Y marginals vanish, and
    the remaining quantum nodes keep the ensemble of Z-conditional branches.
    ``amplitude_damping`` first passes the node through the damping channel
    with strength ``gamma`` (1.0 = full relaxation towards the Z=+1 state).
    """
    if channel not in DECOHERENCE_CHANNELS:
        raise ConfigError(f"unknown decoherence channel {channel!r}")
    if node not in net.v_q:
        raise InvalidPartition(f"node {node} is not a quantum node")
    if channel == "amplitude_damping":
        if gamma is None or not 0.0 <= gamma <= 1.0:
            raise ConfigError("amplitude_damping needs gamma in [0, 1]")
    pos = net.v_q.index(node)
    nq = len(net.v_q)

    if isinstance(net.quantum_state, PureState):
        ens = StateEnsemble.pure(net.quantum_state)
    else:
        ens = net.quantum_state
    work: list[tuple[float, np.ndarray]] = [
        (w, s.amps) for w, s in ens.branches if w > 0.0
    ]
    if ens.mixed_weight > 0.0:
        # expand the maximally mixed part over the computational basis
        share = ens.mixed_weight / (1 << nq)
        eye = np.eye(1 << nq, dtype=complex)
        work.extend((share, eye[b]) for b in range(1 << nq))

    if channel == "amplitude_damping" and gamma > 0.0:
        damped: list[tuple[float, np.ndarray]] = []
        k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
        k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
        from .states import apply_one_qubit

        for w, amps in work:
            for kraus in (k0, k1):
                out = apply_one_qubit(amps, nq, pos, kraus)
                prob = float(np.linalg.norm(out) ** 2)
                if prob > 1e-14:
                    damped.append((w * prob, out / math.sqrt(prob)))
        work = damped

    p_plus = 0.0
    branches: list[tuple[float, PureState]] = []
    remaining = tuple(k for k in net.v_q if k != node)
    for w, amps in work:
        for b, (prob, reduced) in enumerate(_z_split(amps, nq, pos)):
            if prob <= 0.0:
                continue
            if b == 0:
                p_plus += w * prob
            branches.append((w * prob, PureState(nq - 1, reduced)))
    if not branches:
        raise InvalidState("decoherence produced an empty ensemble")
    total = sum(w for w, _ in branches)
    branches = [(w / total, s) for w, s in branches]

    classical = dict(net.classical_states)
    classical[node] = _eta_distribution_from_z(min(max(p_plus, 0.0), 1.0))
    return HybridNetwork(
        net.n,
        remaining,
        tuple(sorted(net.v_c + (node,))),
        StateEnsemble(tuple(branches)),
        classical,
        net.graph,
    )
