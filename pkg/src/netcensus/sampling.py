"""Finite-shot simulation of the fidelity-estimation measurement protocol.

Each measurement setting is a local product basis.  Quantum nodes are rotated
into the computational basis (X -> H, Y -> H S^dag, Z -> identity) and the
joint outcome is drawn from the Born distribution by cumulative-probability
inversion; classical nodes broadcast their predetermined outcome for the
requested basis (or a per-shot draw, for nodes holding outcome
distributions).  A setting's stabilizer terms are aggregated per shot
*before* averaging, so the reported standard error reflects the true spread
of the per-setting estimate rather than treating correlated strings as
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ResourceCapExceeded
from .fidelity import (
    FidelityEstimate,
    MeasurementSetting,
    SettingGroup,
    assemble_fidelity,
    setting_cover,
)
from .hybrid import OUTCOME_TRIPLES, HybridNetwork
from .states import PureState, StateEnsemble, Target, apply_one_qubit

NOISE_KINDS = (
    "white",
    "depolarizing_per_qubit",
    "dephasing_per_qubit",
    "amplitude_damping_per_qubit",
)

#: exact channel expansion refuses to build more branches than this
EXACT_BRANCH_CAP = 4096
#: outcome matrices refuse to allocate more than this many entries
SHOT_MATRIX_CAP = 200_000_000

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_SDG = np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=complex)
_ROTATIONS = {"X": _H, "Y": _H @ _SDG, "Z": None}
_LETTER_COLUMN = {"X": 0, "Y": 1, "Z": 2}
_PAULI_OPS = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class NoiseSpec:
    """A noise channel applied to the shared quantum state.

    ``p`` is the channel parameter in [0, 1]; its meaning per kind:

    - ``white``: weight kept on the clean state (``1 - p`` goes to I/2^n),
    - ``depolarizing_per_qubit``: per-qubit probability of applying a
      uniformly random Pauli from {I, X, Y, Z},
    - ``dephasing_per_qubit``: per-qubit probability of complete dephasing
      (Z is applied with probability ``p / 2``),
    - ``amplitude_damping_per_qubit``: per-qubit damping rate gamma.
    """

    kind: str
    p: float

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r}; know {NOISE_KINDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"noise parameter must be in [0, 1], got {self.p}")


def split_seed(seed: int, index: int) -> int:
    """Sub-seed for stream ``index`` of master ``seed`` (documented splitting).

    Streams are derived through ``numpy.random.SeedSequence([seed, index])``,
    so they are independent, reproducible, and safe to consume in parallel.
    """
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def _as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


# -- noise channels ------------------------------------------------------------


def _as_ensemble(state: PureState | StateEnsemble) -> StateEnsemble:
    return state if isinstance(state, StateEnsemble) else StateEnsemble.pure(state)


def _damping_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return k0, k1


def _expand_branch(
    amps: np.ndarray, n: int, ops: Sequence[tuple[float | None, np.ndarray]]
) -> list[tuple[float, np.ndarray]]:
    """All per-qubit operator patterns with their probabilities.

    ``ops`` lists (probability, operator) choices per qubit; a probability of
    None marks a Kraus branch whose weight is the squared norm it leaves.
    """
    work: list[tuple[float, np.ndarray]] = [(1.0, amps)]
    for k in range(n):
        nxt: list[tuple[float, np.ndarray]] = []
        for w, a in work:
            for p, op in ops:
                b = a if op is None else apply_one_qubit(a, n, k, op)
                if p is None:
                    nb = float(np.vdot(b, b).real)
                    if w * nb > 1e-15:
                        nxt.append((w * nb, b / math.sqrt(nb)))
                elif w * p > 1e-15:
                    nxt.append((w * p, b))
        work = nxt
    return work


def _channel_ops(noise: NoiseSpec) -> list[tuple[float | None, np.ndarray | None]]:
    if noise.kind == "dephasing_per_qubit":
        return [(1.0 - noise.p / 2.0, None), (noise.p / 2.0, _PAULI_OPS["Z"])]
    if noise.kind == "depolarizing_per_qubit":
        return [
            (1.0 - 3.0 * noise.p / 4.0, None),
            (noise.p / 4.0, _PAULI_OPS["X"]),
            (noise.p / 4.0, _PAULI_OPS["Y"]),
            (noise.p / 4.0, _PAULI_OPS["Z"]),
        ]
    k0, k1 = _damping_kraus(noise.p)
    return [(None, k0), (None, k1)]


def noise_exact_ensemble(
    state: PureState | StateEnsemble, noise: NoiseSpec | None
) -> StateEnsemble:
    """Exact branch expansion of the channel (errors out past the branch cap).

    White noise stays exact at any size (its maximally mixed part is carried
    symbolically); the per-qubit channels expand every operator pattern.
    """
    ens = _as_ensemble(state)
    if noise is None:
        return ens
    n = ens.n
    if noise.kind == "white":
        return StateEnsemble(
            [(noise.p * w, s) for w, s in ens.branches],
            mixed_weight=1.0 - noise.p + noise.p * ens.mixed_weight,
        )
    if noise.p == 0.0:
        return ens
    per_qubit = 2 if noise.kind != "depolarizing_per_qubit" else 4
    total = len(ens.branches) * per_qubit**n
    if total > EXACT_BRANCH_CAP:
        raise ResourceCapExceeded(
            f"exact {noise.kind} expansion needs up to {total} branches "
            f"(cap {EXACT_BRANCH_CAP}); use apply_noise trajectories"
        )
    if noise.kind == "amplitude_damping_per_qubit" and ens.mixed_weight > 0.0:
        raise ConfigError(
            "amplitude damping is not unital; cannot act on a symbolic mixed part"
        )
    ops = _channel_ops(noise)
    out: list[tuple[float, PureState]] = []
    for w, branch in ens.branches:
        if w <= 0.0:
            continue
        for bw, amps in _expand_branch(branch.amps, n, ops):
            out.append((w * bw, PureState(n, amps)))
    scale = sum(w for w, _ in out) + ens.mixed_weight
    return StateEnsemble(
        [(w / scale, s) for w, s in out], mixed_weight=ens.mixed_weight / scale
    )


def apply_noise(
    state: PureState | StateEnsemble,
    noise: NoiseSpec | None,
    seed: int | np.random.Generator = 0,
    branches: int = 256,
) -> StateEnsemble:
    """Stochastic-trajectory approximation with ``branches`` runs per branch.

    Trajectories pick one per-qubit operator at a time (Pauli insertions for
    the unital channels, Born-weighted Kraus picks for damping), so the
    ensemble average is unbiased and converges to the exact channel as the
    trajectory count grows.  White noise is returned exactly.
    """
    ens = _as_ensemble(state)
    if noise is None or noise.kind == "white" or noise.p == 0.0:
        return noise_exact_ensemble(ens, noise)
    if branches < 1:
        raise ConfigError(f"need at least one trajectory, got {branches}")
    rng = _as_rng(seed)
    n = ens.n
    out: list[tuple[float, PureState]] = []
    for w, branch in ens.branches:
        if w <= 0.0:
            continue
        bw = w / branches
        for _ in range(branches):
            amps = branch.amps
            if noise.kind == "dephasing_per_qubit":
                for k in range(n):
                    if rng.random() < noise.p / 2.0:
                        amps = apply_one_qubit(amps, n, k, _PAULI_OPS["Z"])
            elif noise.kind == "depolarizing_per_qubit":
                for k in range(n):
                    if rng.random() < noise.p:
                        letter = "IXYZ"[rng.integers(4)]
                        if letter != "I":
                            amps = apply_one_qubit(amps, n, k, _PAULI_OPS[letter])
            else:  # amplitude damping: pick Kraus branch by Born probability
                k0, k1 = _damping_kraus(noise.p)
                for k in range(n):
                    b0 = apply_one_qubit(amps, n, k, k0)
                    p0 = float(np.vdot(b0, b0).real)
                    if rng.random() < p0:
                        amps = b0 / math.sqrt(p0)
                    else:
                        b1 = apply_one_qubit(amps, n, k, k1)
                        amps = b1 / math.sqrt(max(1.0 - p0, 1e-300))
            norm = np.linalg.norm(amps)
            out.append((bw, PureState(n, amps / norm)))
    return StateEnsemble(out, mixed_weight=ens.mixed_weight)


# -- shot sampling -------------------------------------------------------------


@dataclass(frozen=True)
class ShotRecord:
    """Raw outcomes of one sampled setting: a (shots, n) matrix of +-1.

    Column ``k`` holds node ``k``'s broadcast outcome in that shot (quantum
    nodes: measured in the setting's basis; classical nodes: predetermined).
    ``seed`` is the exact sub-seed the draw used, so any record can be
    reproduced standalone.
    """

    letters: str
    seed: int
    outcomes: np.ndarray

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    def correlator(self, nodes: Sequence[int]) -> float:
        """Empirical mean of the outcome product over ``nodes``."""
        if len(nodes) == 0:
            return 1.0
        prod = np.prod(self.outcomes[:, list(nodes)], axis=1)
        return float(prod.mean())


def _cell_probabilities(
    state: PureState | StateEnsemble, nq: int, quantum_letters: str
) -> np.ndarray:
    rotations = [_ROTATIONS[c] for c in quantum_letters]
    ens = _as_ensemble(state)
    dim = 1 << nq
    probs = np.zeros(dim)
    for w, branch in ens.branches:
        if w <= 0.0:
            continue
        amps = branch.amps
        for k, u in enumerate(rotations):
            if u is not None:
                amps = apply_one_qubit(amps, nq, k, u)
        probs += w * np.abs(amps) ** 2
    if ens.mixed_weight > 0.0:
        probs += ens.mixed_weight / dim
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_setting(
    net: HybridNetwork,
    setting: MeasurementSetting | str,
    shots: int,
    seed: int | np.random.Generator = 0,
) -> ShotRecord:
    """Sample one setting ``shots`` times; bit-identical given the same seed.

    The quantum side is drawn first (one joint Born draw per shot), then the
    distribution-holding classical nodes in ``v_c`` order; point-assignment
    nodes broadcast deterministically.
    """
    if isinstance(setting, str):
        setting = MeasurementSetting(setting)
    if setting.n != net.n:
        raise ConfigError(f"setting has {setting.n} letters, network {net.n} nodes")
    if shots < 1:
        raise ConfigError(f"shots must be >= 1, got {shots}")
    if shots * net.n > SHOT_MATRIX_CAP:
        raise ResourceCapExceeded(
            f"outcome matrix {shots} x {net.n} exceeds cap {SHOT_MATRIX_CAP}"
        )
    seed_int = seed if isinstance(seed, (int, np.integer)) else -1
    rng = _as_rng(seed)
    nq = len(net.v_q)
    quantum_letters = "".join(setting.letters[k] for k in net.v_q)
    out = np.empty((shots, net.n), dtype=np.int8)
    if nq:
        probs = _cell_probabilities(net.quantum_state, nq, quantum_letters)
        cells = rng.choice(probs.size, size=shots, p=probs)
        for pos, node in enumerate(net.v_q):
            bits = (cells >> (nq - 1 - pos)) & 1
            out[:, node] = 1 - 2 * bits.astype(np.int8)
    for node in net.v_c:
        st = net.classical_states[node]
        col = _LETTER_COLUMN[setting.letters[node]]
        if st.is_point:
            out[:, node] = OUTCOME_TRIPLES[st.point_assignment.eta - 1][col]
        else:
            etas = rng.choice(8, size=shots, p=np.asarray(st.probs))
            out[:, node] = OUTCOME_TRIPLES[etas, col]
    return ShotRecord(setting.letters, int(seed_int), out)


def setting_estimate(group: SettingGroup, record: ShotRecord) -> tuple[float, float]:
    """Aggregate ``sum_s coeff_s * <outcome product>`` with its empirical sem.

    Every stabilizer term in the group is evaluated on the same shots, so the
    per-shot aggregate keeps the within-setting correlations; the sem is the
    sample standard deviation of that aggregate divided by sqrt(shots).
    """
    shots = record.shots
    values = np.zeros(shots)
    for coeff, s in zip(group.coeffs, group.strings):
        word = s.letters
        prod = np.ones(shots)
        for k, w in enumerate(word):
            if w != "I":
                prod *= record.outcomes[:, k]
        values += coeff * prod
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if shots > 1 else 0.0
    return mean, math.sqrt(var / shots)


@dataclass
class SampledFidelity:
    """Assembled estimate plus the per-setting evidence behind it."""

    estimate: FidelityEstimate
    setting_terms: list[tuple[str, int, float, float]]
    records: list[ShotRecord]


def estimate_fidelity_sampled(
    net: HybridNetwork,
    target: Target,
    shots_per_setting: int,
    seed: int = 0,
    keep_records: bool = False,
) -> SampledFidelity:
    """Simulate the full protocol: every cover setting sampled independently.

    Setting ``i`` consumes the sub-seed ``split_seed(seed, i)``, so runs are
    reproducible and settings are independent (and could be sampled in
    parallel).  The identity stabilizer term enters exactly as ``2^-n``.
    ``setting_terms`` rows are (setting word, number of strings, aggregate
    estimate, standard error).
    """
    groups = setting_cover(target)
    coeffs = [2.0 ** (-net.n)]
    means = [1.0]
    sems = [0.0]
    setting_terms: list[tuple[str, int, float, float]] = []
    records: list[ShotRecord] = []
    for i, group in enumerate(groups):
        record = sample_setting(net, group.setting, shots_per_setting, split_seed(seed, i))
        mean, sem = setting_estimate(group, record)
        coeffs.append(1.0)
        means.append(mean)
        sems.append(sem)
        setting_terms.append((group.setting.letters, len(group.strings), mean, sem))
        if keep_records:
            records.append(record)
    estimate = assemble_fidelity(
        coeffs, means, sems, n_settings=len(groups), shots_per_setting=shots_per_setting
    )
    return SampledFidelity(estimate, setting_terms, records)
