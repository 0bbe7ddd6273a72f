"""Network fidelity: exact stabilizer sums, measurement settings, assembly.

The fidelity of a hybrid network against a stabilizer target is
``F = 2^-n * sum_S sign(S) * <S>`` over all ``2^n`` stabilizer elements,
where ``<S>`` is the hybrid expectation (quantum letters on the shared
state, classical letters replaced by predetermined outcomes).  The exact
path below vectorizes the whole sum with mask arrays; the sampled path
lives in :mod:`netcensus.sampling` and feeds per-setting aggregates into
:func:`assemble_fidelity`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .hybrid import OUTCOME_TABLE, HybridNetwork
from .paulis import PauliString, restrict_masks, stabilizer_coefficient_arrays
from .states import PureState, StateEnsemble, Target, target_generators

_PHASE_POWERS = np.array([1 + 0j, 1j, -1 + 0j, -1j])


@dataclass(frozen=True)
class FidelityEstimate:
    """A fidelity value with its standard error and sampling bookkeeping.

    Exact computations carry ``std_error = 0`` and zero settings/shots.
    """

    value: float
    std_error: float
    n_settings: int = 0
    shots_per_setting: int = 0


@dataclass(frozen=True)
class MeasurementSetting:
    """One local product measurement: a letter word over {X, Y, Z}."""

    letters: str

    def __post_init__(self) -> None:
        if not self.letters or any(c not in "XYZ" for c in self.letters):
            raise ConfigError(f"setting must be a word over X/Y/Z, got {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    def covers(self, p: PauliString) -> bool:
        """A setting covers a string iff it matches every non-identity letter."""
        if p.n != self.n:
            return False
        word = p.letters
        return all(w == "I" or w == s for w, s in zip(word, self.letters))


@dataclass
class SettingGroup:
    """A setting together with the stabilizer terms it estimates."""

    setting: MeasurementSetting
    coeffs: list[float]
    strings: list[PauliString]


def _letter_codes_at(x: np.ndarray, z: np.ndarray, n: int, k: int) -> np.ndarray:
    xb = (x >> (n - 1 - k)) & 1
    zb = (z >> (n - 1 - k)) & 1
    return (xb + 2 * zb).astype(np.int64)


def _pure_letter_expectations(
    amps: np.ndarray, nq: int, xq: np.ndarray, zq: np.ndarray
) -> np.ndarray:
    """``<psi| S_Q |psi>`` for many phase-free letter strings at once."""
    dim = 1 << nq
    idx = np.arange(dim)
    conj = np.conj(amps)
    out = np.empty(xq.shape[0])
    chunk = max(1, (1 << 22) // dim)
    ycount = np.bitwise_count(xq & zq) % 4
    for lo in range(0, xq.shape[0], chunk):
        hi = min(lo + chunk, xq.shape[0])
        rows = idx[None, :] ^ xq[lo:hi, None]
        parity = np.bitwise_count(idx[None, :] & zq[lo:hi, None]) & 1
        f = _PHASE_POWERS[ycount[lo:hi]][:, None] * (1.0 - 2.0 * parity)
        out[lo:hi] = ((conj[rows] * f) @ amps).real
    return out


def _quantum_letter_expectations(
    state: PureState | StateEnsemble, nq: int, xq: np.ndarray, zq: np.ndarray
) -> np.ndarray:
    if isinstance(state, PureState):
        return _pure_letter_expectations(state.amps, nq, xq, zq)
    total = np.zeros(xq.shape[0])
    for w, branch in state.branches:
        if w > 0.0:
            total += w * _pure_letter_expectations(branch.amps, nq, xq, zq)
    if state.mixed_weight > 0.0:
        total[(xq | zq) == 0] += state.mixed_weight
    return total


def _classical_products(
    net: HybridNetwork, x: np.ndarray, z: np.ndarray
) -> np.ndarray:
    prod = np.ones(x.shape[0])
    for k in net.v_c:
        codes = _letter_codes_at(x, z, net.n, k)
        node = net.classical_states[k]
        per_code = np.array([node.expectation(c) for c in range(4)])
        prod *= per_code[codes]
    return prod


def _check_compatible(net: HybridNetwork, target: Target) -> None:
    if net.n != target.n:
        raise ConfigError(f"network has {net.n} nodes, target has {target.n}")
    if net.graph is not None and net.graph != target.graph:
        raise ConfigError("network graph differs from target graph")


def fidelity_exact(net: HybridNetwork, target: Target) -> FidelityEstimate:
    """Exact hybrid fidelity against the target's full stabilizer sum.

    The value is ``sum_S coeff(S) * <S>_hybrid`` over all ``2^n`` stabilizer
    elements; the estimate carries ``std_error = 0``.
    """
    _check_compatible(net, target)
    x, z, signs = stabilizer_coefficient_arrays(target_generators(target))
    coeff = signs.astype(float) * 2.0 ** (-net.n)
    cls = _classical_products(net, x, z)
    xq = restrict_masks(x, net.n, net.v_q)
    zq = restrict_masks(z, net.n, net.v_q)
    quantum = _quantum_letter_expectations(net.quantum_state, len(net.v_q), xq, zq)
    return FidelityEstimate(float(np.sum(coeff * cls * quantum)), 0.0)


def setting_cover(target: Target) -> list[SettingGroup]:
    """Partition the non-identity stabilizer terms into measurement settings.

    Greedy largest-first: strings are processed by descending support size
    and merged first-fit into the earliest compatible partial setting (a
    string fits iff its non-identity letters do not conflict with letters
    already pinned).  Leftover positions default to Z.  Every string lands
    in exactly one setting.
    """
    from .paulis import enumerate_stabilizer

    gens = target_generators(target)
    terms = [(c, s) for c, s in enumerate_stabilizer(gens) if s.weight > 0]
    order = sorted(range(len(terms)), key=lambda i: (-terms[i][1].weight, i))
    partial: list[list[str | None]] = []
    members: list[list[int]] = []
    n = target.n
    for i in order:
        word = terms[i][1].letters
        placed = False
        for g, pins in enumerate(partial):
            ok = all(
                w == "I" or pins[k] is None or pins[k] == w
                for k, w in enumerate(word)
            )
            if ok:
                for k, w in enumerate(word):
                    if w != "I":
                        pins[k] = w
                members[g].append(i)
                placed = True
                break
        if not placed:
            partial.append([w if w != "I" else None for w in word])
            members.append([i])
    groups = []
    for pins, idxs in zip(partial, members):
        setting = MeasurementSetting("".join(p if p is not None else "Z" for p in pins))
        idxs = sorted(idxs)
        group = SettingGroup(
            setting,
            [terms[i][0] for i in idxs],
            [terms[i][1] for i in idxs],
        )
        for s in group.strings:
            assert setting.covers(s)
        groups.append(group)
    return groups


def assemble_fidelity(
    coefficients: Sequence[float],
    expectations: Sequence[float],
    errors: Sequence[float],
    n_settings: int = 0,
    shots_per_setting: int = 0,
) -> FidelityEstimate:
    """Combine independently estimated terms linearly.

    ``value = sum c_i e_i`` and ``std_error = sqrt(sum c_i^2 err_i^2)`` —
    quadrature is valid across terms estimated from independent data
    (per-setting aggregates already account for within-setting correlation).
    """
    if not len(coefficients) == len(expectations) == len(errors):
        raise ConfigError(
            f"length mismatch: {len(coefficients)} coefficients, "
            f"{len(expectations)} expectations, {len(errors)} errors"
        )
    value = 0.0
    var = 0.0
    for c, e, s in zip(coefficients, expectations, errors):
        value += c * e
        var += (c * s) ** 2
    return FidelityEstimate(value, float(np.sqrt(var)), n_settings, shots_per_setting)
