"""Dense density-matrix engine for measurement-interleaved dynamics.

Implements the repeated pattern (measure all rounds, then evolve for tau/N)
applied N times, with unread measurements as CPTP channels, plus the
Heisenberg-picture dual used as a consistency oracle. Exponentials are exact
via eigendecomposition; no Trotter error enters anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .pauli import PauliOp, commutes, format_pauli, single, to_dense

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
EIG_TOL = 1e-9

# Re-Hermitize evolving states at this cadence to bound floating-point drift.
_REHERMITIZE_EVERY = 1000

_SEED_MASK = (1 << 64) - 1


def _dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def validate_density_matrix(rho: np.ndarray, name: str = "rho") -> None:
    """Check trace, Hermiticity and positivity, batched over leading axes."""
    rho = np.asarray(rho)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise ValueError(f"{name} must be a square matrix, got shape {rho.shape}")
    traces = np.einsum("...ii->...", rho)
    if np.max(np.abs(traces - 1.0)) > TRACE_TOL:
        raise ValueError(f"{name} trace deviates from 1 by more than {TRACE_TOL}")
    if np.max(np.abs(rho - _dagger(rho))) > HERM_TOL:
        raise ValueError(f"{name} is not Hermitian within {HERM_TOL}")
    eigs = np.linalg.eigvalsh(0.5 * (rho + _dagger(rho)))
    if np.min(eigs) < -EIG_TOL:
        raise ValueError(f"{name} has eigenvalue below -{EIG_TOL}")


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization; vec(A rho B) = (B^T kron A) vec(rho)."""
    return np.asarray(rho).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(d, d, order="F")


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    w, V = np.linalg.eigh(np.asarray(rho, dtype=complex))
    sqrt_rho = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    inner = sqrt_rho @ np.asarray(sigma, dtype=complex) @ sqrt_rho
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(vals)) ** 2)


class Channel:
    """A CPTP map in Kraus form: rho -> sum_q M_q rho M_q^dagger."""

    def __init__(self, kraus: Iterable[np.ndarray], atol: float = 1e-10):
        ops = tuple(np.asarray(m, dtype=complex) for m in kraus)
        if not ops:
            raise ValueError("need at least one Kraus operator")
        d = ops[0].shape
        if any(m.shape != d for m in ops):
            raise ValueError("Kraus operators must share a common shape")
        total = sum(m.conj().T @ m for m in ops)
        if np.max(np.abs(total - np.eye(d[1]))) > atol:
            raise ValueError("Kraus operators do not sum to a trace-preserving map")
        self.kraus = ops
        self.dim_in = d[1]
        self.dim_out = d[0]

    @classmethod
    def identity(cls, dim: int) -> "Channel":
        return cls([np.eye(dim, dtype=complex)])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Schroedinger action; broadcasts over leading batch axes of rho."""
        rho = np.asarray(rho, dtype=complex)
        out = self.kraus[0] @ rho @ self.kraus[0].conj().T
        for m in self.kraus[1:]:
            out = out + m @ rho @ m.conj().T
        return out

    def adjoint_apply(self, a: np.ndarray) -> np.ndarray:
        """Heisenberg action A -> sum_q M_q^dagger A M_q (unital dual)."""
        a = np.asarray(a, dtype=complex)
        out = self.kraus[0].conj().T @ a @ self.kraus[0]
        for m in self.kraus[1:]:
            out = out + m.conj().T @ a @ m
        return out

    def liouville(self) -> np.ndarray:
        """Superoperator matrix in the column-stacking convention."""
        return sum(np.kron(m.conj(), m) for m in self.kraus)


def pauli_projectors(p: PauliOp) -> tuple[np.ndarray, np.ndarray]:
    """Eigenprojectors (I+P)/2, (I-P)/2 of a Hermitian Pauli operator."""
    if not p.is_hermitian:
        raise ValueError(f"{format_pauli(p)} is not Hermitian")
    dense = to_dense(p)
    eye = np.eye(dense.shape[0], dtype=complex)
    return 0.5 * (eye + dense), 0.5 * (eye - dense)


def measurement_channel(p: PauliOp, zeta: float) -> Channel:
    """Unread measurement of Pauli p with weakness zeta.

    rho -> (1+zeta)/2 rho + (1-zeta)/2 P rho P. zeta=0 is the projective
    channel (identical to projector form P+ rho P+ + P- rho P-), zeta=1 the
    identity map, both exactly.
    """
    if not p.is_hermitian:
        raise ValueError(f"cannot measure non-Hermitian {format_pauli(p)}")
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(f"zeta must lie in [0, 1], got {zeta}")
    dense = to_dense(p)
    eye = np.eye(dense.shape[0], dtype=complex)
    return Channel(
        [np.sqrt((1.0 + zeta) / 2.0) * eye, np.sqrt((1.0 - zeta) / 2.0) * dense]
    )


@dataclass
class NoiseModel:
    """Pauli noise Hamiltonian H = sum_l a_l e_l.

    kind "explicit_terms": fixed real coefficients in ``terms``.
    kind "one_local_random": each qubit gets a random coefficient vector
    (a_X, a_Y, a_Z) with Euclidean norm at most ``a``; ``sampling`` "ball"
    draws uniformly from the ball (default), "radial" draws the direction
    uniformly and the magnitude uniformly in [0, a].
    """

    kind: str = "one_local_random"
    terms: tuple = ()
    a: float = 1.0
    seed: int = 0
    sampling: str = "ball"
    _rng: Optional[np.random.Generator] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.kind not in ("explicit_terms", "one_local_random"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sampling not in ("ball", "radial"):
            raise ValueError(f"unknown sampling {self.sampling!r}")
        if self.a < 0 or not np.isfinite(self.a):
            raise ValueError(f"noise bound must be finite and nonnegative, got {self.a}")
        self.terms = tuple(self.terms)
        for p, coeff in self.terms:
            if not isinstance(p, PauliOp):
                raise ValueError("explicit terms must be (PauliOp, float) pairs")
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {format_pauli(p)}")

    @classmethod
    def explicit(cls, terms: Iterable[tuple[PauliOp, float]]) -> "NoiseModel":
        return cls(kind="explicit_terms", terms=tuple(terms))

    @classmethod
    def one_local(cls, a: float = 1.0, seed: int = 0, sampling: str = "ball") -> "NoiseModel":
        return cls(kind="one_local_random", a=a, seed=seed, sampling=sampling)

    def rng_for_sample(self, index: int) -> np.random.Generator:
        """Worker-independent per-sample stream: seed XOR sample index."""
        return np.random.default_rng((self.seed ^ index) & _SEED_MASK)

    def default_rng(self) -> np.random.Generator:
        if self._rng is None:
            self._rng = np.random.default_rng(self.seed & _SEED_MASK)
        return self._rng


def sample_one_local_coefficients(
    rng: np.random.Generator, n: int, bound: float, sampling: str = "ball"
) -> np.ndarray:
    """Per-qubit (a_X, a_Y, a_Z) vectors with norm at most ``bound``."""
    gauss = rng.normal(size=(n, 3))
    norms = np.linalg.norm(gauss, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    directions = gauss / norms
    u = rng.random(size=(n, 1))
    if sampling == "ball":
        radii = bound * np.cbrt(u)
    elif sampling == "radial":
        radii = bound * u
    else:
        raise ValueError(f"unknown sampling {sampling!r}")
    return directions * radii


def build_hamiltonian(
    model: NoiseModel,
    n: int,
    rng: Union[np.random.Generator, int, None] = None,
) -> np.ndarray:
    """Dense Hermitian Hamiltonian for the noise model on n qubits.

    For one_local_random a fresh coefficient sample is drawn: from ``rng``
    when given (pass model.rng_for_sample(k) in ensembles so results do not
    depend on worker scheduling), else from the model's own seeded stream.
    """
    dim = 1 << n
    if model.kind == "explicit_terms":
        h = np.zeros((dim, dim), dtype=complex)
        for p, coeff in model.terms:
            if p.n != n:
                raise ValueError(f"term {format_pauli(p)} acts on {p.n} qubits, not {n}")
            h = h + coeff * to_dense(p)
    else:
        if rng is None:
            rng = model.default_rng()
        elif isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(int(rng) & _SEED_MASK)
        coeffs = sample_one_local_coefficients(rng, n, model.a, model.sampling)
        h = np.zeros((dim, dim), dtype=complex)
        for q in range(n):
            for k, axis in enumerate("XYZ"):
                if coeffs[q, k] != 0.0:
                    h = h + coeffs[q, k] * to_dense(single(axis, q, n))
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise AssertionError("constructed Hamiltonian is not Hermitian")
    return h


def unitary_step(H: np.ndarray, dt: float) -> np.ndarray:
    """Exact U = exp(-i H dt) via eigendecomposition of Hermitian H."""
    H = np.asarray(H, dtype=complex)
    if np.max(np.abs(H - H.conj().T)) > 1e-12:
        raise ValueError("Hamiltonian must be Hermitian")
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(-1j * w * dt)) @ V.conj().T
    if np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))) > 1e-10:
        raise AssertionError("unitary check failed after eigendecomposition")
    return U


@dataclass(frozen=True)
class MeasurementSchedule:
    """Ordered measurement rounds sharing one weakness parameter.

    Each round lists Pauli operators measured simultaneously, so they must
    pairwise commute; rounds are applied in order within every time step.
    """

    rounds: tuple[tuple[PauliOp, ...], ...] = ()
    zeta: float = 0.0

    def __post_init__(self):
        rounds = tuple(tuple(r) for r in self.rounds)
        object.__setattr__(self, "rounds", rounds)
        if not 0.0 <= self.zeta <= 1.0:
            raise ValueError(f"zeta must lie in [0, 1], got {self.zeta}")
        ops = [p for r in rounds for p in r]
        if ops:
            n = ops[0].n
            for p in ops:
                if p.n != n:
                    raise ValueError("schedule mixes qubit counts")
                if not p.is_hermitian:
                    raise ValueError(f"cannot measure non-Hermitian {format_pauli(p)}")
        for r in rounds:
            for i in range(len(r)):
                for j in range(i + 1, len(r)):
                    if not commutes(r[i], r[j]):
                        raise ValueError(
                            f"simultaneous measurements {format_pauli(r[i])} and "
                            f"{format_pauli(r[j])} do not commute"
                        )

    @property
    def n(self) -> Optional[int]:
        for r in self.rounds:
            for p in r:
                return p.n
        return None

    @property
    def operators(self) -> tuple[PauliOp, ...]:
        return tuple(p for r in self.rounds for p in r)

    def with_zeta(self, zeta: float) -> "MeasurementSchedule":
        return MeasurementSchedule(self.rounds, zeta)

    def channels(self) -> list[Channel]:
        """One channel per measured operator, in application order."""
        return [measurement_channel(p, self.zeta) for p in self.operators]


def _resolve_channels(
    sched: Union[MeasurementSchedule, Sequence[Channel], None],
    dim: int,
) -> list[Channel]:
    if sched is None:
        return []
    if isinstance(sched, MeasurementSchedule):
        chans = sched.channels()
    else:
        chans = list(sched)
    for ch in chans:
        if ch.dim_in != dim or ch.dim_out != dim:
            raise ValueError(f"channel dimension {ch.dim_in} does not match state {dim}")
    return chans


def run_protocol(
    rho0: np.ndarray,
    H: np.ndarray,
    sched: Union[MeasurementSchedule, Sequence[Channel], None],
    tau: float,
    N: int,
) -> np.ndarray:
    """Evolve rho0 by N repetitions of (all measurement rounds, then U(tau/N)).

    Measurements come first in each repetition, so the initial state is
    measured once before any Hamiltonian evolution acts. Outcomes are
    unread: the full CPTP map is applied and the result is deterministic.
    ``sched`` may also be an explicit channel list (one entry per measured
    operator) to substitute realized measurement channels. Supports batched
    rho0 with leading axes.
    """
    rho = np.asarray(rho0, dtype=complex)
    d = rho.shape[-1]
    validate_density_matrix(rho, name="rho0")
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    H = np.asarray(H, dtype=complex)
    if H.shape != (d, d):
        raise ValueError(f"H shape {H.shape} does not match state dimension {d}")
    channels = _resolve_channels(sched, d)
    U = unitary_step(H, tau / N)
    Ud = U.conj().T
    for step in range(N):
        for ch in channels:
            rho = ch.apply(rho)
        rho = U @ rho @ Ud
        if (step + 1) % _REHERMITIZE_EVERY == 0:
            rho = 0.5 * (rho + _dagger(rho))
    rho = 0.5 * (rho + _dagger(rho))
    validate_density_matrix(rho, name="evolved state")
    return rho


def heisenberg_propagate(
    A: np.ndarray,
    H: np.ndarray,
    sched: Union[MeasurementSchedule, Sequence[Channel], None],
    tau: float,
    N: int,
) -> np.ndarray:
    """Dual of run_protocol: N repetitions of (U(-tau/N) conjugation, then
    the measurement adjoints in reversed round order).

    Satisfies Tr[A(tau) rho0] = Tr[A rho(tau)] exactly in exact arithmetic.
    """
    A = np.asarray(A, dtype=complex)
    d = A.shape[-1]
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    H = np.asarray(H, dtype=complex)
    if H.shape != (d, d):
        raise ValueError(f"H shape {H.shape} does not match operator dimension {d}")
    channels = _resolve_channels(sched, d)
    Um = unitary_step(H, -(tau / N))
    Umd = Um.conj().T
    for _ in range(N):
        A = Um @ A @ Umd
        for ch in reversed(channels):
            A = ch.adjoint_apply(A)
    return A
