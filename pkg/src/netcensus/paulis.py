"""Signed Pauli strings, their products, and stabilizer-group enumeration.

Conventions
-----------
A Pauli string on ``n`` qubits is ``phase * (sigma_0 (x) sigma_1 (x) ... )``
with per-qubit letters ``sigma_k`` in ``{I, X, Y, Z}`` and a global
``phase`` in ``{1, i, -1, -i}``.  Qubit 0 is the *most significant* bit:
qubit ``k`` owns bit ``n - 1 - k`` of ``x_mask``/``z_mask``, so mask bits
line up with basis-state index bits throughout the package.

Products are computed exactly via the canonical form ``i^f * X^x Z^z``
(qubit-wise X-part left of Z-part, ``Y = i * X Z``), which turns phase
tracking into integer arithmetic mod 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, InvalidGraph, ResourceCapExceeded
from .graphs import Graph

#: dense-operator construction cap (matrices scale as 4^n)
DENSE_MATRIX_QUBITS = 10
#: state-vector operation cap
DENSE_STATE_QUBITS = 20
#: stabilizer-group enumeration cap (2^n elements)
ENUMERATION_QUBITS = 24

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)
# letter code = x_bit + 2 * z_bit
_CODE_CHARS = "IXZY"
_CODE_BY_CHAR = {c: i for i, c in enumerate(_CODE_CHARS)}
_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliString:
    """Bit-mask encoded signed Pauli string.

    Parameters
    ----------
    n : int
        Number of qubits.
    x_mask, z_mask : int
        X- and Z-part masks; qubit ``k`` is bit ``n - 1 - k``.  A qubit with
        both bits set carries the letter Y.
    phase_exp : int
        Exponent ``g`` of the global phase ``i^g`` multiplying the letter
        tensor, reduced mod 4.  Hermitian strings have even ``g``.
    """

    n: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ConfigError(f"qubit count must be nonnegative, got {self.n}")
        top = 1 << self.n
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ConfigError("mask out of range for qubit count")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_letters(cls, letters: str, phase: complex = 1) -> "PauliString":
        """Build from a letter word like ``"XIZ"`` (qubit 0 first)."""
        n = len(letters)
        x = z = 0
        for k, ch in enumerate(letters.upper()):
            try:
                code = _CODE_BY_CHAR[ch]
            except KeyError:
                raise ConfigError(f"unknown Pauli letter {ch!r}") from None
            bit = 1 << (n - 1 - k)
            if code & 1:
                x |= bit
            if code & 2:
                z |= bit
        try:
            g = _PHASES.index(complex(phase))
        except ValueError:
            raise ConfigError(f"phase must be a power of i, got {phase!r}") from None
        return cls(n, x, z, g)

    @classmethod
    def single(cls, n: int, k: int, letter: str) -> "PauliString":
        word = ["I"] * n
        word[k] = letter
        return cls.from_letters("".join(word))

    # -- views -------------------------------------------------------------

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def letters(self) -> str:
        return "".join(_CODE_CHARS[self.letter_code(k)] for k in range(self.n))

    def letter_code(self, k: int) -> int:
        """Letter code (0=I, 1=X, 2=Z, 3=Y) at qubit ``k``."""
        bit = self.n - 1 - k
        return ((self.x_mask >> bit) & 1) | (((self.z_mask >> bit) & 1) << 1)

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian:
            raise ConfigError("sign undefined for non-Hermitian phase")
        return 1 if self.phase_exp == 0 else -1

    def restrict(self, subset: Sequence[int]) -> "PauliString":
        """Letter substring on ``subset`` (given order), with phase +1.

        The global phase stays with the full string; callers combining a
        restriction with the complement's letters must carry it themselves.
        """
        m = len(subset)
        x = z = 0
        for i, k in enumerate(subset):
            code = self.letter_code(k)
            bit = 1 << (m - 1 - i)
            if code & 1:
                x |= bit
            if code & 2:
                z |= bit
        return PauliString(m, x, z, 0)

    def commutes(self, other: "PauliString") -> bool:
        """Symplectic criterion: commute iff the crossed overlaps have even parity."""
        _check_same_n(self, other)
        overlap = (self.x_mask & other.z_mask).bit_count()
        overlap += (self.z_mask & other.x_mask).bit_count()
        return overlap % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def __str__(self) -> str:
        pre = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase_exp]
        return f"{pre}{self.letters}"


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ConfigError(f"qubit-count mismatch: {a.n} vs {b.n}")


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a * b`` with phase tracking mod 4.

    Examples
    --------
    >>> X = PauliString.from_letters("X")
    >>> Z = PauliString.from_letters("Z")
    >>> str(pauli_multiply(X, Z))
    '-iY'
    """
    _check_same_n(a, b)
    # canonical exponents: P = i^f X^x Z^z with f = g + |x & z|
    fa = a.phase_exp + (a.x_mask & a.z_mask).bit_count()
    fb = b.phase_exp + (b.x_mask & b.z_mask).bit_count()
    f = fa + fb + 2 * (a.z_mask & b.x_mask).bit_count()
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    g = (f - (x & z).bit_count()) % 4
    return PauliString(a.n, x, z, g)


# -- dense forms -----------------------------------------------------------


def _phase_factors(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Index permutation and per-column factors of the dense action.

    ``P |x> = f(x) |x ^ x_mask>`` with
    ``f(x) = i^(g + #Y) * (-1)^popcount(x & z_mask)``.
    """
    idx = np.arange(1 << p.n)
    y_count = (p.x_mask & p.z_mask).bit_count()
    parity = np.bitwise_count(idx & p.z_mask) & 1
    f = _PHASES[(p.phase_exp + y_count) % 4] * (1.0 - 2.0 * parity)
    return idx ^ p.x_mask, f.astype(complex)


def pauli_dense(p: PauliString) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix. Capped at ``DENSE_MATRIX_QUBITS``."""
    if p.n > DENSE_MATRIX_QUBITS:
        raise ResourceCapExceeded(
            f"dense operator on {p.n} qubits exceeds cap {DENSE_MATRIX_QUBITS}"
        )
    rows, f = _phase_factors(p)
    m = np.zeros((1 << p.n, 1 << p.n), dtype=complex)
    m[rows, np.arange(1 << p.n)] = f
    return m


def pauli_apply(p: PauliString, amps: np.ndarray) -> np.ndarray:
    """Apply the string to a state vector (length ``2^n``)."""
    if p.n > DENSE_STATE_QUBITS:
        raise ResourceCapExceeded(
            f"state-vector op on {p.n} qubits exceeds cap {DENSE_STATE_QUBITS}"
        )
    rows, f = _phase_factors(p)
    out = np.empty_like(amps, dtype=complex)
    out[rows] = f * amps
    return out


def pauli_expectation(p: PauliString, amps: np.ndarray) -> complex:
    """``<psi|P|psi>`` for a (normalized) state vector."""
    rows, f = _phase_factors(p)
    return complex(np.sum(np.conj(amps[rows]) * f * amps))


# -- stabilizer generators ---------------------------------------------------


def graph_stabilizer_generators(g: Graph) -> list[PauliString]:
    """Generators ``K_a = X_a * prod_{b ~ a} Z_b`` of a graph state's stabilizer."""
    gens = []
    for a in range(g.n):
        x = 1 << (g.n - 1 - a)
        z = 0
        for b in g.neighbors(a):
            z |= 1 << (g.n - 1 - b)
        gens.append(PauliString(g.n, x, z, 0))
    return gens


def ghz_stabilizer_generators(n: int) -> list[PauliString]:
    """Generators ``X^(x)n`` and ``Z_{i-1} Z_i`` of the GHZ stabilizer."""
    if n < 1:
        raise InvalidGraph(f"GHZ needs n >= 1, got {n}")
    gens = [PauliString(n, (1 << n) - 1, 0, 0)]
    for i in range(1, n):
        z = (1 << (n - 1 - (i - 1))) | (1 << (n - 1 - i))
        gens.append(PauliString(n, 0, z, 0))
    return gens


def _validate_generators(gens: Sequence[PauliString]) -> int:
    if not gens:
        raise ConfigError("empty generator list")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ConfigError("generators act on differing qubit counts")
    if len(gens) > ENUMERATION_QUBITS:
        raise ResourceCapExceeded(
            f"{len(gens)} generators exceed enumeration cap {ENUMERATION_QUBITS}"
        )
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not gens[i].commutes(gens[j]):
                raise ConfigError(f"generators {i} and {j} anticommute")
    # GF(2) independence on (x | z) rows
    rows = [(g.x_mask << n) | g.z_mask for g in gens]
    pivots: list[int] = []
    for r in rows:
        for p in pivots:
            r = min(r, r ^ p)
        if r == 0:
            raise ConfigError("generators are not independent")
        pivots.append(r)
    return n


def enumerate_stabilizer(
    gens: Sequence[PauliString],
) -> Iterator[tuple[float, PauliString]]:
    """Yield all ``2^m`` group elements as ``(coefficient, string)`` pairs.

    Coefficients are ``sign(S) * 2^-m`` (m = number of generators) and the
    yielded strings carry phase +1: the sign of each element is folded into
    the real coefficient, so ``sum coeff * S`` reproduces the projector for
    a full-rank group.  Enumeration walks a Gray code, one multiply per step.
    """
    _validate_generators(gens)
    m = len(gens)
    scale = 2.0 ** (-m)
    cur = PauliString.identity(gens[0].n)
    yield scale, cur
    for i in range(1, 1 << m):
        flip = (i & -i).bit_length() - 1  # trailing-zero count
        cur = pauli_multiply(cur, gens[flip])
        if cur.phase_exp % 2:
            raise ConfigError("stabilizer element with non-Hermitian phase")
        yield cur.sign * scale, PauliString(cur.n, cur.x_mask, cur.z_mask, 0)


def stabilizer_coefficient_arrays(
    gens: Sequence[PauliString],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized stabilizer enumeration: ``(x_masks, z_masks, signs)``.

    Element ``c`` is the ordered product of generators whose bit is set in
    ``c`` (bit ``j`` = generator ``j``).  Same algebra as
    :func:`enumerate_stabilizer`, built by iterative doubling; signs are
    +-1 int8 and masks int64 (valid for the 24-qubit enumeration cap).
    """
    _validate_generators(gens)
    x = np.zeros(1, dtype=np.int64)
    z = np.zeros(1, dtype=np.int64)
    g = np.zeros(1, dtype=np.int64)
    for gen in gens:
        fb = gen.phase_exp + (gen.x_mask & gen.z_mask).bit_count()
        fa = g + np.bitwise_count(x & z)
        f = fa + fb + 2 * np.bitwise_count(z & gen.x_mask)
        xn = x ^ gen.x_mask
        zn = z ^ gen.z_mask
        gn = (f - np.bitwise_count(xn & zn)) % 4
        x = np.concatenate([x, xn])
        z = np.concatenate([z, zn])
        g = np.concatenate([g, gn])
    if np.any(g % 2):
        raise ConfigError("stabilizer element with non-Hermitian phase")
    signs = np.where(g == 0, 1, -1).astype(np.int8)
    return x, z, signs


def restrict_masks(
    masks: np.ndarray, n: int, subset: Sequence[int]
) -> np.ndarray:
    """Vectorized mask restriction onto an ordered subset of qubits."""
    m = len(subset)
    out = np.zeros_like(masks)
    for i, k in enumerate(subset):
        bit = (masks >> (n - 1 - k)) & 1
        out |= bit << (m - 1 - i)
    return out
