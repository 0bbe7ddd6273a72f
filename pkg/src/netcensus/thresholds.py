"""Threshold fidelities separating n and n+1 classical nodes, and counting.

``threshold_closed_form(n_c)`` is the maximum network fidelity reachable when
``n_c`` nodes hold predetermined outcomes instead of qubits; a measured
fidelity strictly above it certifies fewer than ``n_c`` classical nodes.
``threshold_bruteforce`` recomputes the same quantity from first principles
for a concrete target and classical subset: it builds the contracted operator

    A(v) = sum_S coeff(S) * (prod_k v-outcomes) * dense(S restricted to V_Q)

over the full stabilizer sum, maximizes its top eigenvalue over all ``8^n_c``
assignments, and never assumes the rank-2 Schmidt structure the closed form
rests on.  The two routes agreeing is the package's core self-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    InvalidPartition,
    ResourceCapExceeded,
    UndefinedSignificance,
    UnsupportedBipartition,
)
from .fidelity import FidelityEstimate
from .graphs import Graph
from .hybrid import OUTCOME_TABLE, ClassicalAssignment
from .paulis import restrict_masks, stabilizer_coefficient_arrays
from .states import (
    HermitianMatrix,
    PureState,
    Target,
    hermitian_eigs,
    hermitian_eigvals_batch,
    schmidt_decompose,
    target_generators,
    target_state,
)

#: caps for the brute-force search
BRUTEFORCE_MAX_CLASSICAL = 6
BRUTEFORCE_MAX_QUANTUM = 10
BRUTEFORCE_SUBSET_MAX_N = 8

_PHASE_POWERS = np.array([1 + 0j, 1j, -1 + 0j, -1j])


def threshold_closed_form(n_c: int) -> float:
    """``F(n_c) = (1 + 2^(-n_c/2) sqrt(4 + 2^n_c)) / 4`` for integer n_c >= 1.

    Evaluated in the overflow-safe equivalent form
    ``(1 + sqrt(1 + 2^(2 - n_c))) / 4``; decreases monotonically to 1/2.
    """
    if not isinstance(n_c, (int, np.integer)) or isinstance(n_c, bool) or n_c < 1:
        raise ConfigError(f"n_c must be an integer >= 1, got {n_c!r}")
    return (1.0 + math.sqrt(1.0 + 2.0 ** (2.0 - n_c))) / 4.0


@dataclass(frozen=True)
class ThresholdTable:
    """Thresholds for ``n_c = 1 .. n_max`` (strictly decreasing)."""

    n_max: int
    values: tuple[float, ...]

    def threshold(self, n_c: int) -> float:
        if not 1 <= n_c <= self.n_max:
            raise ConfigError(f"n_c={n_c} outside table range 1..{self.n_max}")
        return self.values[n_c - 1]


def build_threshold_table(n_max: int) -> ThresholdTable:
    if n_max < 1:
        raise ConfigError(f"table needs n_max >= 1, got {n_max}")
    return ThresholdTable(n_max, tuple(threshold_closed_form(n) for n in range(1, n_max + 1)))


# -- brute force over assignments ---------------------------------------------


@dataclass(frozen=True)
class BruteforceResult:
    """Outcome of the assignment search for one (target, classical subset)."""

    value: float
    assignment: tuple[int, ...]
    state: PureState
    n_assignments: int

    @property
    def assignments(self) -> tuple[ClassicalAssignment, ...]:
        """The winning outcome triples as objects, in ``v_c`` order."""
        return tuple(ClassicalAssignment(eta) for eta in self.assignment)


def _normalize_target(target: Target | Graph) -> Target:
    return target if isinstance(target, Target) else Target(target)


def _restricted_dense_stack(
    xq: np.ndarray, zq: np.ndarray, nq: int
) -> np.ndarray:
    """Dense matrices of phase-free letter strings on the quantum side."""
    dim = 1 << nq
    ns = xq.shape[0]
    idx = np.arange(dim)
    ycount = np.bitwise_count(xq & zq) % 4
    d = np.zeros((ns, dim, dim), dtype=complex)
    rows = idx[None, :] ^ xq[:, None]
    parity = np.bitwise_count(idx[None, :] & zq[:, None]) & 1
    f = _PHASE_POWERS[ycount][:, None] * (1.0 - 2.0 * parity)
    d[np.arange(ns)[:, None], rows, idx[None, :]] = f
    return d


def _assignment_weights(
    etas: np.ndarray, codes: list[np.ndarray], n_c: int
) -> np.ndarray:
    """Per-assignment, per-string products of predetermined outcomes."""
    w = np.ones((etas.shape[0], codes[0].shape[0]))
    for t in range(n_c):
        digit = (etas // 8 ** (n_c - 1 - t)) % 8
        w *= OUTCOME_TABLE[digit[:, None], codes[t][None, :]]
    return w


def threshold_bruteforce(
    target: Target | Graph, v_c: Sequence[int]
) -> BruteforceResult:
    """Maximum hybrid fidelity over every assignment of the classical subset.

    Returns the top eigenvalue of the contracted operator maximized over all
    ``8^n_c`` assignments, the lexicographically-first assignment achieving it
    (within 1e-12), and the optimal quantum-side state.
    """
    target = _normalize_target(target)
    n = target.n
    v_c = tuple(sorted(set(int(k) for k in v_c)))
    if not v_c or len(v_c) >= n:
        raise InvalidPartition("classical subset must be nonempty and proper")
    if any(k < 0 or k >= n for k in v_c):
        raise InvalidPartition(f"classical subset {v_c} out of range")
    n_c = len(v_c)
    v_q = tuple(k for k in range(n) if k not in v_c)
    n_q = len(v_q)
    if n_c > BRUTEFORCE_MAX_CLASSICAL:
        raise ResourceCapExceeded(f"brute force capped at n_c <= {BRUTEFORCE_MAX_CLASSICAL}")
    if n_q > BRUTEFORCE_MAX_QUANTUM:
        raise ResourceCapExceeded(f"brute force capped at n_q <= {BRUTEFORCE_MAX_QUANTUM}")

    x, z, signs = stabilizer_coefficient_arrays(target_generators(target))
    coeff = signs.astype(float) * 2.0 ** (-n)
    xq = restrict_masks(x, n, v_q)
    zq = restrict_masks(z, n, v_q)
    codes = []
    for k in v_c:
        xb = (x >> (n - 1 - k)) & 1
        zb = (z >> (n - 1 - k)) & 1
        codes.append((xb + 2 * zb).astype(np.int64))

    dim = 1 << n_q
    ns = x.shape[0]
    dense = _restricted_dense_stack(xq, zq, n_q)
    flat = (dense * coeff[:, None, None]).reshape(ns, dim * dim)

    total = 8**n_c
    lam = np.empty(total)
    chunk = max(1, min(8192, (1 << 24) // (dim * dim)))
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        w = _assignment_weights(np.arange(lo, hi), codes, n_c)
        ops = (w @ flat).reshape(hi - lo, dim, dim)
        lam[lo:hi] = hermitian_eigvals_batch(ops)[:, 0]
    best = float(np.max(lam))
    winner = int(np.argmax(lam >= best - 1e-12))
    w = _assignment_weights(np.array([winner]), codes, n_c)
    op = (w @ flat).reshape(dim, dim)
    _, vecs = hermitian_eigs((op + op.conj().T) / 2.0)
    assignment = tuple(
        int((winner // 8 ** (n_c - 1 - t)) % 8) + 1 for t in range(n_c)
    )
    return BruteforceResult(best, assignment, PureState(n_q, _unit(vecs[:, 0])), total)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def threshold_bruteforce_over_subsets(
    target: Target | Graph, n_c: int
) -> tuple[BruteforceResult, tuple[int, ...], list[tuple[tuple[int, ...], float]]]:
    """Maximize the brute-force fidelity over every size-``n_c`` subset.

    Returns the best result, the subset achieving it (lexicographically
    first on ties within 1e-12), and all per-subset maxima.
    """
    target = _normalize_target(target)
    n = target.n
    if n > BRUTEFORCE_SUBSET_MAX_N:
        raise ResourceCapExceeded(
            f"subset enumeration capped at {BRUTEFORCE_SUBSET_MAX_N} nodes, got {n}"
        )
    if not 1 <= n_c < n:
        raise InvalidPartition(f"n_c={n_c} must satisfy 1 <= n_c < {n}")
    per_subset: list[tuple[tuple[int, ...], float]] = []
    best: BruteforceResult | None = None
    best_subset: tuple[int, ...] = ()
    for subset in itertools.combinations(range(n), n_c):
        res = threshold_bruteforce(target, subset)
        per_subset.append((subset, res.value))
        if best is None or res.value > best.value + 1e-12:
            best, best_subset = res, subset
    assert best is not None
    return best, best_subset, per_subset


def assignment_value(
    target: Target | Graph, v_c: Sequence[int], etas: Sequence[int]
) -> float:
    """Top eigenvalue of the contracted operator for one fixed assignment."""
    target = _normalize_target(target)
    n = target.n
    v_c = tuple(int(k) for k in v_c)
    v_q = tuple(k for k in range(n) if k not in v_c)
    x, z, signs = stabilizer_coefficient_arrays(target_generators(target))
    coeff = signs.astype(float) * 2.0 ** (-n)
    xq = restrict_masks(x, n, v_q)
    zq = restrict_masks(z, n, v_q)
    weights = np.ones(x.shape[0])
    for k, eta in zip(v_c, etas):
        xb = (x >> (n - 1 - k)) & 1
        zb = (z >> (n - 1 - k)) & 1
        weights *= OUTCOME_TABLE[int(eta) - 1, (xb + 2 * zb).astype(np.int64)]
    dense = _restricted_dense_stack(xq, zq, len(v_q))
    op = np.tensordot(coeff * weights, dense, axes=([0], [0]))
    vals, _ = hermitian_eigs((op + op.conj().T) / 2.0)
    return float(vals[0])


# -- Schmidt-form coefficient matrix ------------------------------------------


def _w_operator(assignments: Sequence[ClassicalAssignment]) -> np.ndarray:
    """``(x)_k (I + v1 X + v2 Y + v3 Z)`` over the classical nodes."""
    op = np.array([[1.0]], dtype=complex)
    for a in assignments:
        v1, v2, v3 = a.triple
        w = np.array(
            [[1.0 + v3, v1 - 1j * v2], [v1 + 1j * v2, 1.0 - v3]], dtype=complex
        )
        op = np.kron(op, w)
    return op


def _lex_key(vec: np.ndarray) -> tuple:
    out = []
    for a in vec:
        re = 0.0 if abs(a.real) < 1e-9 else round(float(a.real), 9)
        im = 0.0 if abs(a.imag) < 1e-9 else round(float(a.imag), 9)
        out.append((re, im))
    return tuple(out)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > np.max(np.abs(vec)) - 1e-12))
    a = vec[k]
    return vec * (abs(a) / a)


def _product_states_in_span(u: np.ndarray, w: np.ndarray, n_c: int) -> list[np.ndarray] | None:
    """The (generically two) product states in ``span{u, w}``.

    Solves the rank-1 condition on the first-qubit unfolding — every 2x2
    minor of ``alpha*U + beta*W`` is a quadratic form in (alpha, beta) —
    then verifies candidates against all unfoldings.
    """
    cols = 1 << (n_c - 1)
    u2 = u.reshape(2, cols)
    w2 = w.reshape(2, cols)
    quads = []
    for j in range(cols):
        for jp in range(j + 1, cols):
            a = u2[0, j] * u2[1, jp] - u2[0, jp] * u2[1, j]
            c = w2[0, j] * w2[1, jp] - w2[0, jp] * w2[1, j]
            b = (
                u2[0, j] * w2[1, jp]
                + w2[0, j] * u2[1, jp]
                - u2[0, jp] * w2[1, j]
                - w2[0, jp] * u2[1, j]
            )
            quads.append((a, b, c))
    quads = np.array(quads)
    norms = np.abs(quads).sum(axis=1)
    if float(norms.max()) < 1e-12:
        return None  # every combination is qubit-0 rank-1; degenerate span
    a, b, c = quads[int(np.argmax(norms))]
    roots: list[tuple[complex, complex]] = []
    if abs(c) > 1e-12:
        disc = np.sqrt(complex(b * b - 4.0 * a * c))
        roots = [(1.0, (-b + disc) / (2.0 * c)), (1.0, (-b - disc) / (2.0 * c))]
    else:
        roots.append((0.0, 1.0))
        if abs(b) > 1e-12:
            roots.append((1.0, -a / b))
    found: list[np.ndarray] = []
    for alpha, beta in roots:
        cand = alpha * u + beta * w
        norm = np.linalg.norm(cand)
        if norm < 1e-9:
            continue
        cand = cand / norm
        if not _is_product(cand, n_c):
            continue
        if any(abs(abs(np.vdot(f, cand)) - 1.0) < 1e-8 for f in found):
            continue
        found.append(cand)
    if len(found) != 2:
        return None
    if abs(np.vdot(found[0], found[1])) > 1e-8:
        return None  # product pair exists but is not an orthonormal basis
    return found


def _is_product(vec: np.ndarray, n_c: int) -> bool:
    t = vec.reshape([2] * n_c)
    for k in range(n_c):
        m = np.moveaxis(t, k, 0).reshape(2, -1)
        gram = m @ m.conj().T
        det = gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0]
        if abs(det) > 1e-16:
            return False
    return True


def f_matrix(
    target: Target | Graph,
    v_c: Sequence[int],
    assignments: Sequence[ClassicalAssignment | int],
) -> HermitianMatrix:
    """Coefficient matrix ``[[f00, f01], [f10, f11]]`` of the rank-2 split.

    Requires the classical-side bipartition to have Schmidt rank exactly 2
    with a flat spectrum.  Basis canonicalization (so entries are comparable
    across runs): a single classical node uses the computational basis; for
    several nodes the two product states inside the classical-side Schmidt
    span are used, ordered lexicographically by (real, imag) amplitude
    tuples (largest first), each phased so its largest-magnitude amplitude
    is real positive.  ``f_vv' = <v'_sc| (x)_k W_k |v_sc> / 2^(n_c + 1)``
    with ``W_k = I + v1 X + v2 Y + v3 Z``.
    """
    target = _normalize_target(target)
    n = target.n
    v_c = tuple(sorted(set(int(k) for k in v_c)))
    if not v_c or len(v_c) >= n:
        raise InvalidPartition("classical subset must be nonempty and proper")
    n_c = len(v_c)
    assigns = [
        a if isinstance(a, ClassicalAssignment) else ClassicalAssignment(int(a))
        for a in assignments
    ]
    if len(assigns) != n_c:
        raise ConfigError(f"need {n_c} assignments, got {len(assigns)}")

    state = target_state(target)
    sd = schmidt_decompose(state, v_c)
    if sd.rank != 2:
        raise UnsupportedBipartition(
            f"classical-side Schmidt rank is {sd.rank}, the coefficient matrix needs 2"
        )
    if np.max(np.abs(sd.values - 1.0 / math.sqrt(2.0))) > 1e-9:
        raise UnsupportedBipartition("Schmidt spectrum is not flat (1/sqrt2, 1/sqrt2)")

    if n_c == 1:
        basis = [np.array([1.0, 0.0], complex), np.array([0.0, 1.0], complex)]
    else:
        span = _product_states_in_span(sd.left[0].amps, sd.left[1].amps, n_c)
        if span is None:
            # no canonical product pair; fall back to the eigenbasis as-is
            span = [_fix_phase(sd.left[0].amps), _fix_phase(sd.left[1].amps)]
        span = [_fix_phase(v) for v in span]
        span.sort(key=_lex_key, reverse=True)
        basis = span

    # quantum-side partners |v_sQ> = sqrt(2) <v_sc | state>
    mat = _split_for(state, v_c)
    partners = []
    for b in basis:
        vec = math.sqrt(2.0) * (np.conj(b) @ mat)
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-8:
            raise UnsupportedBipartition("canonical basis does not span the Schmidt space")
        partners.append(vec / norm)
    if abs(np.vdot(partners[0], partners[1])) > 1e-8:
        raise UnsupportedBipartition("quantum-side partners are not orthogonal")

    w_op = _w_operator(assigns)
    scale = 2.0 ** (-(n_c + 1))
    f = np.empty((2, 2), dtype=complex)
    for v in range(2):
        for vp in range(2):
            f[v, vp] = scale * np.vdot(basis[vp], w_op @ basis[v])
    return HermitianMatrix(f)


def _split_for(state: PureState, part: Sequence[int]) -> np.ndarray:
    part = sorted(part)
    comp = [k for k in range(state.n) if k not in part]
    t = state.amps.reshape([2] * state.n).transpose(part + comp)
    return t.reshape(1 << len(part), 1 << len(comp))


def f_matrix_lambda_max(f: HermitianMatrix | np.ndarray) -> float:
    """Top eigenvalue of a 2x2 Hermitian matrix, in closed form."""
    m = f.entries if isinstance(f, HermitianMatrix) else np.asarray(f)
    a = float(m[0, 0].real)
    b = float(m[1, 1].real)
    c = complex(m[0, 1])
    return (a + b) / 2.0 + math.sqrt(((a - b) / 2.0) ** 2 + abs(c) ** 2)


# -- counting and significance -------------------------------------------------


@dataclass(frozen=True)
class CountVerdict:
    """Classical-node count inferred from a fidelity estimate.

    ``n_c_inferred`` is 0 when the fidelity clears the first threshold,
    ``k`` when it falls in ``(F_{k+1}, F_k]`` (upper boundary inclusive),
    or the string ``"indeterminate(>=K)"`` below the table floor.
    ``margin_sigma`` is the distance to the nearest lower threshold in
    standard errors (None for exact estimates or below the floor).
    """

    n_c_inferred: int | str
    ew_violated: bool
    steering_confirmed: bool
    margin_sigma: float | None


BOUNDARY_TOL = 1e-12
"""Slack for threshold comparisons: the optimal strategy saturates each
threshold exactly, so a fidelity within rounding error of F(n) must classify
as *on* the boundary (count n), not above it.  Threshold spacing stays far
above this for every table size of practical interest."""


def count_classical_nodes(
    estimate: FidelityEstimate | float, table: ThresholdTable
) -> CountVerdict:
    """Classify a fidelity against the table: F(n+1) < F <= F(n) counts n.

    The upper boundary is inclusive (a value equal to F(n) is achievable by
    n classical nodes); values above F(1) confirm steering of every node
    (count 0); values below the smallest tabulated threshold cannot be
    resolved and report ``indeterminate``.
    """
    if isinstance(estimate, FidelityEstimate):
        value, std = estimate.value, estimate.std_error
    else:
        value, std = float(estimate), 0.0
    v = table.values
    ew = value > 0.5 + BOUNDARY_TOL
    steering = value > v[0] + BOUNDARY_TOL
    lower: float | None
    if steering:
        inferred: int | str = 0
        lower = v[0]
    else:
        n = 1
        while n < table.n_max and value <= v[n] + BOUNDARY_TOL:
            n += 1
        if n == table.n_max and value < v[n - 1] - BOUNDARY_TOL:
            inferred = f"indeterminate(>={table.n_max})"
            lower = None
        else:
            inferred = n
            lower = v[n] if n < table.n_max else None
    margin = None
    if std > 0.0 and lower is not None:
        margin = (value - lower) / std
    return CountVerdict(inferred, ew, steering, margin)


def significance(
    estimate: FidelityEstimate, kind: str = "ew", n_c: int | None = None
) -> float:
    """Deviation in standard errors: from 1/2 ("ew") or from F_{n_c - 1} ("count").

    The count reference for ``n_c = 1`` is 1.0 (an all-quantum ideal network).
    """
    if estimate.std_error <= 0.0:
        raise UndefinedSignificance("significance undefined for zero standard error")
    kind_l = kind.lower()
    if kind_l == "ew":
        return (estimate.value - 0.5) / estimate.std_error
    if kind_l == "count":
        if n_c is None or n_c < 1:
            raise ConfigError("count significance needs n_c >= 1")
        ref = 1.0 if n_c == 1 else threshold_closed_form(n_c - 1)
        return (estimate.value - ref) / estimate.std_error
    raise ConfigError(f"unknown significance kind {kind!r}")
