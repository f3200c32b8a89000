"""Exact n-qubit Pauli algebra in the binary symplectic representation.

An operator is stored as a pair of bitmasks (x, z) plus a phase exponent:
bit i of ``x`` set means an X on qubit i, bit i of ``z`` a Z, both set a Y.
The full operator is i**phase times the tensor product of those letters,
so products, commutators and group closures are computed with integer
arithmetic only and are exact for any qubit count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_AXIS_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_AXIS = {v: k for k, v in _AXIS_BITS.items()}

# Dense 2x2 letters for the symbolic -> matrix bridge.
_LETTER_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_VALUES = (1, 1j, -1, -1j)
_PHASE_PREFIX = {0: "", 1: "i*", 2: "-", 3: "-i*"}

MAX_DENSE_QUBITS = 6


@dataclass(frozen=True)
class PauliOp:
    """A Pauli operator i**phase * (letter on each qubit).

    Attributes:
        n: number of qubits the operator acts on.
        x: bitmask of X components (bit i -> qubit i).
        z: bitmask of Z components.
        phase: exponent of the global i**phase prefactor, mod 4.
    """

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bitmask has support outside the qubit register")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def support(self) -> int:
        """Bitmask of qubits acted on non-trivially."""
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase == 0

    @property
    def is_identity_up_to_phase(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        # The letter tensor is Hermitian, so only the prefactor matters.
        return self.phase in (0, 2)

    def letter(self, qubit: int) -> str:
        if not 0 <= qubit < self.n:
            raise ValueError(f"qubit {qubit} out of range for n={self.n}")
        return _BITS_AXIS[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def key(self) -> tuple[int, int]:
        """Phase-insensitive identity, used for group membership."""
        return (self.x, self.z)

    def __str__(self) -> str:
        return format_pauli(self)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)


def identity(n: int) -> PauliOp:
    return PauliOp(n, 0, 0, 0)


def single(axis: str, qubit: int, n: int) -> PauliOp:
    """The one-local operator ``axis`` acting on ``qubit`` (0-based)."""
    try:
        xb, zb = _AXIS_BITS[axis]
    except KeyError:
        raise ValueError(f"axis must be one of I, X, Y, Z, got {axis!r}") from None
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for n={n}")
    return PauliOp(n, xb << qubit, zb << qubit, 0)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _n_y(x: int, z: int) -> int:
    # Number of Y letters; each Y contributes a factor i relative to XZ order.
    return _popcount(x & z)


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    """Exact product a*b, phase included.

    Tracked by converting each factor to X^x Z^z order (each Y letter costs
    a factor of i), commuting the inner Z^z_a past X^x_b (a sign per
    overlapping bit), then converting back.
    """
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    x = a.x ^ b.x
    z = a.z ^ b.z
    phase = (
        a.phase
        + _n_y(a.x, a.z)
        + b.phase
        + _n_y(b.x, b.z)
        + 2 * _popcount(a.z & b.x)
        - _n_y(x, z)
    ) % 4
    return PauliOp(a.n, x, z, phase)


def commutes(a: PauliOp, b: PauliOp) -> bool:
    """True iff [a, b] = 0; Paulis either commute or anticommute."""
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def locality(p: PauliOp) -> int:
    """Number of qubits acted on non-trivially."""
    return _popcount(p.support)


def inverse(p: PauliOp) -> PauliOp:
    # The letter tensor squares to I, so only the prefactor inverts.
    return PauliOp(p.n, p.x, p.z, (-p.phase) % 4)


def to_dense(p: PauliOp, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
    """Dense 2^n x 2^n matrix of ``p``, qubit 0 as the leftmost factor."""
    if p.n > max_qubits:
        raise ValueError(
            f"refusing dense conversion for n={p.n} > max_qubits={max_qubits}"
        )
    out = np.array([[_PHASE_VALUES[p.phase]]], dtype=complex)
    for q in range(p.n):
        out = np.kron(out, _LETTER_MATS[p.letter(q)])
    return out


def format_pauli(p: PauliOp) -> str:
    """Render as e.g. ``Z1*Z2``, ``-i*Y2``, ``I`` (qubit indices 1-based)."""
    factors = [
        f"{p.letter(q)}{q + 1}" for q in range(p.n) if (p.support >> q) & 1
    ]
    body = "*".join(factors) if factors else "I"
    return _PHASE_PREFIX[p.phase] + body


def parse_pauli(text: str, n: int) -> PauliOp:
    """Inverse of :func:`format_pauli`; repeated factors multiply out exactly."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty Pauli string")
    phase = 0
    if s[0] in "+-":
        if s[0] == "-":
            phase += 2
        s = s[1:]
    if s.startswith("i*") or s == "i":
        phase += 1
        s = s[2:] if s.startswith("i*") else ""
    result = PauliOp(n, 0, 0, phase % 4)
    if s in ("", "I"):
        return result
    for token in s.split("*"):
        if token == "I":
            continue
        axis, idx = token[:1], token[1:]
        if axis not in "IXYZ" or not idx.isdigit():
            raise ValueError(f"bad Pauli factor {token!r} in {text!r}")
        qubit = int(idx) - 1
        if not 0 <= qubit < n:
            raise ValueError(f"qubit index {idx} out of range for n={n}")
        result = multiply(result, single(axis, qubit, n))
    return result


class PauliGroup:
    """The group generated by a set of Paulis, ignoring phases.

    Membership is tracked on (x, z) keys: multiplication mod phase is XOR,
    so the closure is the GF(2) span of the generators and its size is a
    power of two.
    """

    def __init__(self, generators: Iterable[PauliOp], max_elements: int = 1 << 16):
        gens = tuple(generators)
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].n
        for g in gens:
            if g.n != n:
                raise ValueError("generators act on different qubit counts")
        self.n = n
        self.generators = gens
        keys = {(0, 0)}
        for g in gens:
            if (g.x, g.z) in keys:
                continue
            keys |= {(kx ^ g.x, kz ^ g.z) for kx, kz in keys}
            if len(keys) > max_elements:
                raise ValueError(
                    f"closure exceeded max_elements={max_elements}"
                )
        self._keys = frozenset(keys)

    def __len__(self) -> int:
        return len(self._keys)

    def contains(self, p: PauliOp) -> bool:
        """Phase-insensitive membership of ``p`` in the closure."""
        if p.n != self.n:
            raise ValueError(f"qubit count mismatch: {p.n} vs {self.n}")
        return p.key() in self._keys

    def __contains__(self, p: PauliOp) -> bool:
        return self.contains(p)

    def elements(self) -> list[PauliOp]:
        """All closure elements with phase 0, in a canonical order."""
        return [
            PauliOp(self.n, kx, kz, 0) for kx, kz in sorted(self._keys)
        ]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(
            commutes(gens[i], gens[j])
            for i in range(len(gens))
            for j in range(i + 1, len(gens))
        )

    def intersection_keys(self, other: "PauliGroup") -> frozenset[tuple[int, int]]:
        if other.n != self.n:
            raise ValueError(f"qubit count mismatch: {other.n} vs {self.n}")
        return self._keys & other._keys

    def intersection_trivial(self, other: "PauliGroup") -> bool:
        """True iff the two closures share only the identity."""
        return self.intersection_keys(other) == frozenset({(0, 0)})


def group_closure(generators: Sequence[PauliOp], max_elements: int = 1 << 16) -> PauliGroup:
    """Close ``generators`` under multiplication (phases ignored)."""
    return PauliGroup(generators, max_elements=max_elements)
