"""Shared dense (kron-built) oracles, independent of the bit-mask algebra."""

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
LETTER_MATS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

#: outcome triples (v1, v2, v3) indexed by assignment 1..8
TRIPLES = {
    1: (1, 1, 1),
    2: (1, 1, -1),
    3: (1, -1, 1),
    4: (1, -1, -1),
    5: (-1, 1, 1),
    6: (-1, 1, -1),
    7: (-1, -1, 1),
    8: (-1, -1, -1),
}


def triple_outcome(eta: int, letter: str) -> int:
    v1, v2, v3 = TRIPLES[eta]
    return {"I": 1, "X": v1, "Y": v2, "Z": v3}[letter]


def dense_word(letters: str) -> np.ndarray:
    """Kron product of single-qubit Paulis, vertex 0 leftmost."""
    out = np.array([[1.0 + 0j]])
    for ch in letters:
        out = np.kron(out, LETTER_MATS[ch])
    return out


def dense_graph_state(graph) -> np.ndarray:
    """|+>^n with a controlled-Z sign flip applied along every edge."""
    n = graph.n
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
    for a, b in graph.edges:
        for idx in range(1 << n):
            if (idx >> (n - 1 - a)) & 1 and (idx >> (n - 1 - b)) & 1:
                amps[idx] = -amps[idx]
    return amps


def dense_ghz(n: int) -> np.ndarray:
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return amps


def dense_subset_products(gen_mats) -> list[np.ndarray]:
    """All 2^m ordered subset products of the given dense matrices."""
    out = [np.eye(gen_mats[0].shape[0], dtype=complex)]
    for g in gen_mats:
        out = out + [p @ g for p in out]
    return out


def network_density_matrix(ensemble) -> np.ndarray:
    """Dense density matrix of a StateEnsemble (including the mixed part)."""
    branches = ensemble.branches
    dim = 1 << branches[0][1].n
    rho = np.zeros((dim, dim), dtype=complex)
    for w, st in branches:
        rho += w * np.outer(st.amps, st.amps.conj())
    rho += ensemble.mixed_weight * np.eye(dim) / dim
    return rho


def hybrid_fidelity_oracle(net, target) -> float:
    """Fidelity by definition: stabilizer sum with dense quantum factors
    and table-lookup classical factors (quantum factor via dense sub-word
    expectation on the network density matrix)."""
    from netcensus.paulis import enumerate_stabilizer
    from netcensus.states import StateEnsemble, target_generators

    state = net.quantum_state
    if not isinstance(state, StateEnsemble):
        state = StateEnsemble.pure(state)
    rho = network_density_matrix(state)
    pos_q = {node: i for i, node in enumerate(net.v_q)}
    total = 0.0
    for coeff, s in enumerate_stabilizer(target_generators(target)):
        letters = s.letters
        q_word = "".join(letters[node] for node in net.v_q)
        quantum = np.trace(rho @ dense_word(q_word)).real if net.v_q else 1.0
        classical = 1.0
        for node in net.v_c:
            st = net.classical_states[node]
            classical *= sum(
                st.probs[eta - 1] * triple_outcome(eta, letters[node])
                for eta in range(1, 9)
            )
        total += coeff * quantum * classical
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
