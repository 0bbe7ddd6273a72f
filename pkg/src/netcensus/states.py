"""Pure states, graph/GHZ state construction, Schmidt splits, and a
dependency-free Hermitian eigensolver.

Amplitude indexing follows the package convention: vertex 0 is the most
significant bit of the basis index, so ``amps.reshape([2] * n)`` exposes
vertex ``k`` as axis ``k``.

The eigensolver is a cyclic Jacobi iteration run on the 2d real embedding
``[[A, -B], [B, A]]`` of a complex Hermitian matrix ``A + iB``.  It supports
a batch axis so callers can diagonalize many small matrices in vectorized
sweeps (the brute-force threshold search leans on this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidMatrix,
    InvalidPartition,
    InvalidState,
    ResourceCapExceeded,
)
from .graphs import Graph, star
from .paulis import DENSE_STATE_QUBITS, PauliString, ghz_stabilizer_generators, graph_stabilizer_generators

_H2 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)

#: largest Gram-matrix side handled by schmidt_decompose (Jacobi cost is cubic)
SCHMIDT_MIN_SIDE_QUBITS = 6


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on ``n`` qubits (``n = 0`` is the scalar 1)."""

    n: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.n < 0:
            raise InvalidState(f"negative qubit count {self.n}")
        if amps.shape[0] != (1 << self.n):
            raise InvalidState(
                f"amplitude length {amps.shape[0]} does not match n={self.n}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-10:
            raise InvalidState(f"state norm {norm!r} deviates from 1")
        object.__setattr__(self, "amps", amps)

    def overlap(self, other: "PureState") -> complex:
        if self.n != other.n:
            raise InvalidState("overlap between states of different size")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class StateEnsemble:
    """Convex mixture of pure states plus an optional maximally mixed part.

    ``mixed_weight`` is the weight on ``I / 2^n``; keeping it symbolic lets
    white noise stay exact (the mixed part contributes 0 to every non-identity
    Pauli expectation and a uniform term to every sampling distribution).
    """

    branches: tuple[tuple[float, PureState], ...]
    mixed_weight: float = 0.0

    def __post_init__(self) -> None:
        if not self.branches and self.mixed_weight <= 0.0:
            raise InvalidState("empty ensemble")
        ns = {s.n for _, s in self.branches}
        if len(ns) > 1:
            raise InvalidState("ensemble mixes different qubit counts")
        total = self.mixed_weight + sum(w for w, _ in self.branches)
        if min((w for w, _ in self.branches), default=0.0) < -1e-12 or self.mixed_weight < -1e-12:
            raise InvalidState("negative ensemble weight")
        if abs(total - 1.0) > 1e-9:
            raise InvalidState(f"ensemble weights sum to {total!r}")

    @classmethod
    def pure(cls, state: PureState) -> "StateEnsemble":
        return cls(((1.0, state),))

    @property
    def n(self) -> int:
        if self.branches:
            return self.branches[0][1].n
        raise InvalidState("ensemble with only a mixed part has no stored size")


@dataclass(frozen=True)
class Target:
    """A network target: a graph state, or the GHZ state over the same nodes.

    ``frame == "ghz"`` means the target is the GHZ state (stabilizer
    ``X^n, Z_i Z_{i+1}``); the carried graph records the topology (a star),
    and the two frames are related by Hadamards on the star's leaves.
    """

    graph: Graph
    frame: str = "graph"

    def __post_init__(self) -> None:
        if self.frame not in ("graph", "ghz"):
            raise InvalidState(f"unknown target frame {self.frame!r}")

    @property
    def n(self) -> int:
        return self.graph.n


def ghz_target(n: int) -> Target:
    return Target(star(n), "ghz")


def target_state(t: Target) -> PureState:
    if t.frame == "ghz":
        return ghz_state(t.n)
    return build_graph_state(t.graph)


def target_generators(t: Target) -> list[PauliString]:
    if t.frame == "ghz":
        return ghz_stabilizer_generators(t.n)
    return graph_stabilizer_generators(t.graph)


# -- state builders ----------------------------------------------------------


def _check_state_cap(n: int) -> None:
    if n > DENSE_STATE_QUBITS:
        raise ResourceCapExceeded(
            f"state on {n} qubits exceeds cap {DENSE_STATE_QUBITS}"
        )


def build_graph_state(g: Graph) -> PureState:
    """``prod_edges CZ |+>^n``: uniform amplitudes with CZ sign flips."""
    _check_state_cap(g.n)
    amps = np.full(1 << g.n, 2.0 ** (-g.n / 2.0), dtype=complex)
    idx = np.arange(1 << g.n)
    for i, j in g.edges:
        both = ((idx >> (g.n - 1 - i)) & (idx >> (g.n - 1 - j))) & 1
        amps[both == 1] *= -1.0
    return PureState(g.n, amps)


def ghz_state(n: int) -> PureState:
    _check_state_cap(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return PureState(n, amps)


def apply_one_qubit(amps: np.ndarray, n: int, k: int, u: np.ndarray) -> np.ndarray:
    """Apply a single-qubit operator at vertex ``k`` to raw amplitudes."""
    t = np.asarray(amps, dtype=complex).reshape([2] * n)
    t = np.tensordot(u, t, axes=([1], [k]))
    t = np.moveaxis(t, 0, k)
    return t.reshape(-1)


def apply_hadamards(s: PureState, positions: Iterable[int]) -> PureState:
    amps = s.amps
    for k in positions:
        amps = apply_one_qubit(amps, s.n, k, _H2)
    return PureState(s.n, amps)


def star_to_ghz(s: PureState, center: int) -> PureState:
    """Hadamard every vertex except ``center`` (self-inverse map star <-> GHZ)."""
    return apply_hadamards(s, [k for k in range(s.n) if k != center])


def partial_trace(s: PureState, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (ascending order)."""
    keep = list(keep)
    rest = [k for k in range(s.n) if k not in keep]
    if len(keep) > 10:
        raise ResourceCapExceeded("dense reduced density capped at 10 qubits")
    t = s.amps.reshape([2] * s.n).transpose(keep + rest)
    m = t.reshape(1 << len(keep), 1 << len(rest))
    return m @ m.conj().T


# -- Hermitian eigensolver ---------------------------------------------------


@dataclass(frozen=True)
class HermitianMatrix:
    """Validated complex Hermitian matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
        _check_hermitian(m)
        object.__setattr__(self, "entries", (m + m.conj().T) / 2.0)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _check_hermitian(m: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > 1e-10 * scale:
        raise InvalidMatrix(f"matrix deviates from Hermitian by {dev:.3e}")


def _jacobi_eigh_real(
    mats: np.ndarray,
    accumulate_vectors: bool = True,
    max_sweeps: int = 60,
    tol: float = 1e-14,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Cyclic Jacobi on batched real symmetric matrices ``(B, d, d)``.

    The whole batch shares the pivot schedule; each matrix gets its own
    rotation angle (inactive pivots rotate by zero).  Returns unsorted
    eigenvalues ``(B, d)`` and, optionally, orthogonal eigenvector columns.
    """
    a = np.array(mats, dtype=float)
    if a.ndim == 2:
        a = a[None]
    nbatch, d = a.shape[0], a.shape[-1]
    v = None
    if accumulate_vectors:
        v = np.broadcast_to(np.eye(d), (nbatch, d, d)).copy()
    scale = np.max(np.abs(a), axis=(1, 2))
    scale = np.maximum(scale, 1e-300)
    thresh = tol * scale
    converged = False
    for _ in range(max_sweeps):
        off = np.abs(a - a * np.eye(d)[None]).max(axis=(1, 2))
        if np.all(off <= thresh):
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                active = np.abs(apq) > 1e-2 * thresh
                if not active.any():
                    continue
                app = a[:, p, p]
                aqq = a[:, q, q]
                with np.errstate(divide="ignore", invalid="ignore"):
                    tau = (aqq - app) / (2.0 * apq)
                    t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(tau == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cc, ss = c[:, None], s[:, None]
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = cc * rp - ss * rq
                a[:, q, :] = ss * rp + cc * rq
                cp = a[:, :, p].copy()
                cq = a[:, :, q].copy()
                a[:, :, p] = cc * cp - ss * cq
                a[:, :, q] = ss * cp + cc * cq
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = a[:, p, q]
                if accumulate_vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q].copy()
                    v[:, :, p] = cc * vp - ss * vq
                    v[:, :, q] = ss * vp + cc * vq
    if not converged:
        off = np.abs(a - a * np.eye(d)[None]).max(axis=(1, 2))
        if np.any(off > 1e6 * thresh):
            raise InvalidMatrix("Jacobi iteration failed to converge")
    w = np.einsum("bii->bi", a).copy()
    return w, v


def _embed(h: np.ndarray) -> np.ndarray:
    """Real symmetric ``[[A, -B], [B, A]]`` embedding of Hermitian ``A + iB``."""
    a, b = h.real, h.imag
    top = np.concatenate([a, -b], axis=-1)
    bot = np.concatenate([b, a], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def hermitian_eigvals_batch(mats: np.ndarray) -> np.ndarray:
    """Descending eigenvalues for a batch ``(B, d, d)`` of Hermitian matrices.

    Each eigenvalue of the complex matrix appears twice in the embedding;
    duplicates are kept (harmless for max/ordering queries), so the result
    has ``2 d`` columns sorted descending.
    """
    mats = np.asarray(mats, dtype=complex)
    w, _ = _jacobi_eigh_real(_embed(mats), accumulate_vectors=False)
    w.sort(axis=-1)
    return w[:, ::-1]


def hermitian_eigs(m: HermitianMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full eigensystem of a complex Hermitian matrix.

    Returns ``(values, vectors)`` with values real and descending and
    ``vectors[:, i]`` the orthonormal eigenvector for ``values[i]``.
    Implemented as cyclic Jacobi on the 2d real embedding; the doubled
    spectrum is collapsed back by a complex Gram-Schmidt walk.
    """
    h = m.entries if isinstance(m, HermitianMatrix) else np.asarray(m, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {h.shape}")
    _check_hermitian(h)
    h = (h + h.conj().T) / 2.0
    d = h.shape[0]
    if d > (1 << 10):
        raise ResourceCapExceeded(f"eigensolver capped at dimension {1 << 10}")
    if d == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w2, v2 = _jacobi_eigh_real(_embed(h)[None])
    w2, v2 = w2[0], v2[0]
    order = np.argsort(-w2, kind="stable")
    vals: list[float] = []
    vecs: list[np.ndarray] = []
    for j in order:
        if len(vals) == d:
            break
        cand = v2[:d, j] + 1j * v2[d:, j]
        for u in vecs:
            cand = cand - u * np.vdot(u, cand)
        norm = float(np.linalg.norm(cand))
        if norm > 1e-6:
            vals.append(float(w2[j]))
            vecs.append(cand / norm)
    if len(vals) != d:
        raise InvalidMatrix("eigenvector recovery from the real embedding failed")
    return np.array(vals), np.column_stack(vecs)


# -- Schmidt decomposition ---------------------------------------------------


@dataclass(frozen=True)
class SchmidtDecomposition:
    """``state = sum_i values[i] * left[i] (x) right[i]`` (subset order kept)."""

    part: tuple[int, ...]
    complement: tuple[int, ...]
    values: np.ndarray
    left: tuple[PureState, ...]
    right: tuple[PureState, ...]

    @property
    def rank(self) -> int:
        return int(np.sum(self.values > 1e-10))


def _split_matrix(s: PureState, part: Sequence[int]) -> tuple[np.ndarray, list[int], list[int]]:
    part = sorted(set(int(k) for k in part))
    if any(k < 0 or k >= s.n for k in part):
        raise InvalidPartition(f"subset {part} out of range for n={s.n}")
    if not part or len(part) == s.n:
        raise InvalidPartition("bipartition needs a proper nonempty subset")
    comp = [k for k in range(s.n) if k not in part]
    t = s.amps.reshape([2] * s.n).transpose(part + comp)
    return t.reshape(1 << len(part), 1 << len(comp)), part, comp


def _fix_phase(vec: np.ndarray) -> tuple[np.ndarray, complex]:
    """Rotate so the largest-magnitude entry is real positive; return the factor."""
    k = int(np.argmax(np.abs(vec)))
    a = vec[k]
    if abs(a) < 1e-300:
        return vec, 1.0 + 0j
    factor = abs(a) / a
    return vec * factor, factor


def schmidt_decompose(s: PureState, part: Sequence[int]) -> SchmidtDecomposition:
    """Schmidt decomposition across ``part`` vs the rest.

    Computed from the Gram matrix on the smaller side (via the package
    eigensolver), so the cost is set by ``min(|part|, |complement|)``.
    Values below 1e-12 are dropped along with their vectors.
    """
    m, part, comp = _split_matrix(s, part)
    if min(len(part), len(comp)) > SCHMIDT_MIN_SIDE_QUBITS:
        raise ResourceCapExceeded(
            f"schmidt_decompose caps the smaller side at {SCHMIDT_MIN_SIDE_QUBITS} qubits"
        )
    swap = m.shape[0] > m.shape[1]
    work = m.conj().T.copy() if swap else m
    gram = work @ work.conj().T
    w, u = hermitian_eigs(gram)
    sigma = np.sqrt(np.clip(w, 0.0, None))
    keep = sigma > 1e-12
    sigma = sigma[keep]
    u = u[:, keep]
    left_vecs: list[np.ndarray] = []
    right_vecs: list[np.ndarray] = []
    for i in range(sigma.shape[0]):
        ui = u[:, i]
        # work = sum_i sigma_i u_i (x) w_i  with  w_i = (conj(u_i) @ work) / sigma_i
        wi = (np.conj(ui) @ work) / sigma[i]
        li, ri = (np.conj(wi), np.conj(ui)) if swap else (ui, wi)
        li, factor = _fix_phase(li)
        right_vecs.append(ri * np.conj(factor))
        left_vecs.append(li)
    left = tuple(PureState(len(part), v) for v in left_vecs)
    right = tuple(PureState(len(comp), v) for v in right_vecs)
    return SchmidtDecomposition(tuple(part), tuple(comp), sigma, left, right)


def schmidt_reconstruct(d: SchmidtDecomposition) -> PureState:
    """Reassemble the full state from a decomposition (test/oracle helper)."""
    n = len(d.part) + len(d.complement)
    t = np.zeros([2] * n, dtype=complex)
    axes = list(d.part) + list(d.complement)
    inv = np.argsort(axes)
    for s, l, r in zip(d.values, d.left, d.right):
        block = s * np.outer(l.amps, r.amps)
        t += block.reshape([2] * n).transpose(inv)
    return PureState(n, t.reshape(-1))
