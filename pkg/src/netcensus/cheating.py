"""Optimal classical strategy: saturate the threshold without entanglement.

A coalition of ``n_c`` nodes holding only predetermined outcome triples, with
the remaining ``n_q`` nodes sharing the two-parameter state

    |xi(theta, phi)> = cos(theta)|0...0> + e^(i phi) sin(theta)|1...1>,

reaches network fidelity exactly ``threshold_closed_form(n_c)`` against a GHZ
target at the parameter optimum.  The same strategy transports to star-graph
targets by Hadamard conjugation on the leaves (outcome triples conjugate as
``(v1, v2, v3) -> (v3, -v2, v1)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, UnsupportedBipartition
from .graphs import Graph
from .hybrid import OUTCOME_TRIPLES, ClassicalNodeState, HybridNetwork
from .states import (
    PureState,
    StateEnsemble,
    Target,
    apply_one_qubit,
    ghz_target,
)

_H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)

_TRIPLE_TO_ETA = {
    tuple(int(v) for v in OUTCOME_TRIPLES[i]): i + 1 for i in range(8)
}


def hadamard_conjugate_assignment(eta: int) -> int:
    """Outcome-triple index after H conjugation: (v1, v2, v3) -> (v3, -v2, v1)."""
    v1, v2, v3 = (int(v) for v in OUTCOME_TRIPLES[int(eta) - 1])
    return _TRIPLE_TO_ETA[(v3, -v2, v1)]


@dataclass(frozen=True)
class OcsParams:
    """Parameters of the classical-coalition strategy (GHZ frame).

    ``assignment`` lists the outcome-triple index (1..8) per classical node;
    the optimum uses the all-(+1, +1, +1) triple on every node.
    """

    n_q: int
    n_c: int
    theta: float
    phi: float
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_q < 1:
            raise ConfigError(f"n_q must be >= 1, got {self.n_q}")
        if self.n_c < 1:
            raise ConfigError(f"n_c must be >= 1, got {self.n_c}")
        if len(self.assignment) != self.n_c:
            raise ConfigError(
                f"assignment length {len(self.assignment)} != n_c={self.n_c}"
            )
        for eta in self.assignment:
            if not 1 <= eta <= 8:
                raise ConfigError(f"assignment entries must be 1..8, got {eta}")

    @property
    def n(self) -> int:
        return self.n_q + self.n_c


def _wrap_angle(phi: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    phi = math.remainder(phi, 2.0 * math.pi)
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


def ocs_optimal_params(n_c: int, n_q: int = 1) -> OcsParams:
    """Threshold-saturating parameters.

    ``sin^2(theta) = 1 / (2^(n_c - 1) + 2 + 2^(n_c/2 - 1) sqrt(4 + 2^n_c))``
    and ``phi = -n_c pi / 4`` (wrapped); theta and phi do not depend on n_q.
    """
    if n_c < 1:
        raise ConfigError(f"n_c must be >= 1, got {n_c}")
    if n_q < 1:
        raise ConfigError(f"n_q must be >= 1, got {n_q}")
    sin_sq = 1.0 / (
        2.0 ** (n_c - 1) + 2.0 + 2.0 ** (n_c / 2.0 - 1.0) * math.sqrt(4.0 + 2.0**n_c)
    )
    theta = math.asin(math.sqrt(sin_sq))
    phi = _wrap_angle(-n_c * math.pi / 4.0)
    return OcsParams(n_q, n_c, theta, phi, (1,) * n_c)


def ocs_state(params: OcsParams) -> PureState:
    """``cos(theta)|0..0> + e^(i phi) sin(theta)|1..1>`` on the n_q quantum nodes."""
    amps = np.zeros(1 << params.n_q, dtype=complex)
    amps[0] = math.cos(params.theta)
    amps[-1] = complex(math.cos(params.phi), math.sin(params.phi)) * math.sin(
        params.theta
    )
    return PureState(params.n_q, amps)


def star_center(g: Graph) -> int:
    """The hub vertex of a star graph (errors for non-star topologies)."""
    if g.n == 2 and len(g.edges) == 1:
        return 0
    degrees = [g.degree(k) for k in range(g.n)]
    center = int(np.argmax(degrees))
    leaves_ok = all(d == 1 for k, d in enumerate(degrees) if k != center)
    if degrees[center] != g.n - 1 or not leaves_ok:
        raise UnsupportedBipartition(
            "the classical-coalition strategy in the graph frame needs a star graph"
        )
    return center


def ocs_hybrid(
    target: Target | Graph,
    v_c: Sequence[int] | None = None,
    n_c: int | None = None,
    params: OcsParams | None = None,
) -> HybridNetwork:
    """Hybrid network realizing the strategy against ``target``.

    The classical subset is ``v_c`` or, by default, the last ``n_c`` nodes.
    GHZ-frame targets get the strategy directly; star-graph targets get the
    Hadamard-conjugated version (state rotated on quantum leaves, outcome
    triples conjugated on classical leaves) so the fidelity is unchanged.
    """
    target = target if isinstance(target, Target) else Target(target)
    n = target.n
    if v_c is None:
        if n_c is None:
            raise ConfigError("give either v_c or n_c")
        if not 1 <= n_c < n:
            raise ConfigError(f"n_c={n_c} must satisfy 1 <= n_c < {n}")
        v_c = tuple(range(n - n_c, n))
    else:
        v_c = tuple(sorted(set(int(k) for k in v_c)))
        if not v_c or len(v_c) >= n or any(k < 0 or k >= n for k in v_c):
            raise ConfigError(f"v_c={v_c} is not a proper nonempty subset of 0..{n - 1}")
        if n_c is not None and n_c != len(v_c):
            raise ConfigError("n_c disagrees with len(v_c)")
    n_c = len(v_c)
    v_q = tuple(k for k in range(n) if k not in v_c)
    if params is None:
        params = ocs_optimal_params(n_c, n_q=len(v_q))
    if params.n_c != n_c or params.n_q != len(v_q):
        raise ConfigError(
            f"params are for ({params.n_q}, {params.n_c}) nodes, target needs "
            f"({len(v_q)}, {n_c})"
        )

    state = ocs_state(params)
    etas = list(params.assignment)
    if target.frame == "graph":
        center = star_center(target.graph)
        amps = state.amps
        for pos, node in enumerate(v_q):
            if node != center:
                amps = apply_one_qubit(amps, state.n, pos, _H2)
        state = PureState(state.n, amps)
        etas = [
            eta if node == center else hadamard_conjugate_assignment(eta)
            for node, eta in zip(v_c, etas)
        ]
    classical = {
        node: ClassicalNodeState.point(eta) for node, eta in zip(v_c, etas)
    }
    return HybridNetwork(
        n, v_q, v_c, StateEnsemble.pure(state), classical, graph=target.graph
    )


def _w_matrix(eta: int) -> np.ndarray:
    v1, v2, v3 = (int(v) for v in OUTCOME_TRIPLES[eta - 1])
    return np.array(
        [[1.0 + v3, v1 - 1j * v2], [v1 + 1j * v2, 1.0 - v3]], dtype=complex
    )


def ocs_effective_matrix(n_c: int, assignment: Sequence[int] | None = None) -> np.ndarray:
    """2x2 coefficient matrix of the GHZ-frame fidelity on span{|0..0>, |1..1>}.

    ``F(xi) = xi^dag f xi`` for any strategy state in the span, with
    ``f_vv' = prod_k W_k[v', v] / 2^(n_c + 1)``.
    """
    if n_c < 1:
        raise ConfigError(f"n_c must be >= 1, got {n_c}")
    etas = tuple(assignment) if assignment is not None else (1,) * n_c
    if len(etas) != n_c:
        raise ConfigError(f"assignment length {len(etas)} != n_c={n_c}")
    f = np.ones((2, 2), dtype=complex)
    for eta in etas:
        w = _w_matrix(int(eta))
        f *= w.T  # f_vv' picks up W[v', v]
    return f / 2.0 ** (n_c + 1)


def ocs_landscape(
    n_q: int,
    n_c: int,
    thetas: Sequence[float],
    phis: Sequence[float],
    assignment: Sequence[int] | None = None,
) -> np.ndarray:
    """Fidelity surface ``F[i, j] = F(thetas[i], phis[j])`` for the GHZ target.

    Uses the effective 2x2 form, so the cost is independent of n_q; values
    equal the exact hybrid fidelity of the corresponding network.
    """
    if n_q < 1:
        raise ConfigError(f"n_q must be >= 1, got {n_q}")
    f = ocs_effective_matrix(n_c, assignment)
    th = np.asarray(thetas, dtype=float)
    ph = np.asarray(phis, dtype=float)
    if th.ndim != 1 or ph.ndim != 1 or th.size == 0 or ph.size == 0:
        raise ConfigError("thetas and phis must be nonempty 1-d sequences")
    c2 = np.cos(th) ** 2
    s2 = np.sin(th) ** 2
    cross = np.cos(th) * np.sin(th)
    osc = np.real(f[0, 1] * np.exp(1j * ph))
    return (
        f[0, 0].real * c2[:, None]
        + f[1, 1].real * s2[:, None]
        + 2.0 * cross[:, None] * osc[None, :]
    )


def ocs_broadcast_outcomes(params: OcsParams, setting) -> tuple[int, ...]:
    """Outcomes the classical nodes broadcast for the requested bases.

    ``setting`` is a measurement setting (or plain letter word) giving one of
    ``X``, ``Y``, ``Z`` (or ``I`` for "not asked", reported as +1) per
    classical node in ``v_c`` order — either ``n_c`` letters, or a full
    ``n_q + n_c`` word whose last ``n_c`` positions are the classical nodes.
    """
    letters = getattr(setting, "letters", setting)
    if isinstance(letters, str):
        letters = list(letters)
    if len(letters) == params.n_q + params.n_c:
        letters = letters[params.n_q :]
    if len(letters) != params.n_c:
        raise ConfigError(f"need {params.n_c} letters, got {len(letters)}")
    column = {"X": 0, "Y": 1, "Z": 2}
    out = []
    for eta, letter in zip(params.assignment, letters):
        u = letter.upper()
        if u == "I":
            out.append(1)
            continue
        if u not in column:
            raise ConfigError(f"letters must be I, X, Y or Z, got {letter!r}")
        out.append(int(OUTCOME_TRIPLES[eta - 1][column[u]]))
    return tuple(out)


def ocs_check_matches_threshold(n_c: int, n_q: int = 1) -> tuple[float, float]:
    """(exact hybrid fidelity of the optimal strategy, closed-form threshold)."""
    from .fidelity import fidelity_exact
    from .thresholds import threshold_closed_form

    params = ocs_optimal_params(n_c, n_q)
    net = ocs_hybrid(ghz_target(n_q + n_c), n_c=n_c, params=params)
    value = fidelity_exact(net, ghz_target(n_q + n_c)).value
    return value, threshold_closed_form(n_c)
