"""Parity projection from a noisy Ising interaction.

The coupling J is random with density p(J). Pulsing for a time t where
integral p(J) sin(Jt) cos(Jt) dJ = 0 and p_ss = integral p(J) sin^2(Jt) dJ
exceeds 1/2, and then applying the pulse only with probability 1/(2 p_ss),
reproduces the unread parity measurement (rho + SS rho SS)/2 exactly.

One fixed Gaussian quadrature rule per distribution defines both the
integrals and the Kraus mixture of the realized channel, so the channel
identity holds to the accuracy of the root itself, not of a separate
discretization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .pauli import PauliOp, format_pauli, locality, to_dense
from .simulator import Channel


@dataclass(frozen=True)
class CouplingDistribution:
    """Distribution of the Ising coupling constant J.

    kinds: "delta" (J = j0), "gaussian" (mean j0, std width), "uniform"
    (center j0, full width), "tabulated" (explicit (J, weight) nodes).
    ``nodes()`` returns quadrature nodes and weights normalized to 1;
    delta and tabulated sums are exact, gaussian uses Gauss-Hermite and
    uniform Gauss-Legendre of fixed order ``quad_points``.
    """

    kind: str
    j0: float = 0.0
    width: float = 0.0
    table: tuple[tuple[float, float], ...] = ()
    quad_points: int = 96

    def __post_init__(self):
        if self.kind not in ("delta", "gaussian", "uniform", "tabulated"):
            raise ValueError(f"unknown coupling distribution kind {self.kind!r}")
        if self.kind in ("gaussian", "uniform") and self.width <= 0:
            raise ValueError(f"{self.kind} distribution needs positive width")
        if self.kind == "tabulated":
            if not self.table:
                raise ValueError("tabulated distribution needs at least one node")
            if any(w < 0 for _, w in self.table):
                raise ValueError("tabulated weights must be nonnegative")
            if sum(w for _, w in self.table) <= 0:
                raise ValueError("tabulated weights must not all vanish")
        if self.quad_points < 1:
            raise ValueError("quad_points must be positive")

    @classmethod
    def delta(cls, j0: float) -> "CouplingDistribution":
        return cls("delta", j0=j0)

    @classmethod
    def gaussian(cls, j0: float, s: float, quad_points: int = 96) -> "CouplingDistribution":
        return cls("gaussian", j0=j0, width=s, quad_points=quad_points)

    @classmethod
    def uniform(cls, lo: float, hi: float, quad_points: int = 200) -> "CouplingDistribution":
        if hi <= lo:
            raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
        return cls("uniform", j0=0.5 * (lo + hi), width=hi - lo, quad_points=quad_points)

    @classmethod
    def tabulated(cls, pairs: Sequence[tuple[float, float]]) -> "CouplingDistribution":
        return cls("tabulated", table=tuple((float(j), float(w)) for j, w in pairs))

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "delta":
            j, w = np.array([self.j0]), np.array([1.0])
        elif self.kind == "tabulated":
            j = np.array([p[0] for p in self.table])
            w = np.array([p[1] for p in self.table])
        elif self.kind == "gaussian":
            x, w = np.polynomial.hermite.hermgauss(self.quad_points)
            j = self.j0 + np.sqrt(2.0) * self.width * x
        else:
            x, w = np.polynomial.legendre.leggauss(self.quad_points)
            j = self.j0 + 0.5 * self.width * x
        return j, w / np.sum(w)

    def rms_coupling(self) -> float:
        j, w = self.nodes()
        return float(np.sqrt(np.sum(w * j * j)))

    def sample(self, rng: np.random.Generator) -> float:
        """Draw one J; used only by the sampled trajectory mode."""
        if self.kind == "delta":
            return self.j0
        if self.kind == "gaussian":
            return float(rng.normal(self.j0, self.width))
        if self.kind == "uniform":
            return float(rng.uniform(self.j0 - 0.5 * self.width, self.j0 + 0.5 * self.width))
        j, w = self.nodes()
        return float(rng.choice(j, p=w))


def cross_term(dist: CouplingDistribution, t: float) -> float:
    """integral p(J) sin(Jt) cos(Jt) dJ, the term that must vanish."""
    j, w = dist.nodes()
    return float(np.sum(w * np.sin(j * t) * np.cos(j * t)))


def parity_weight(dist: CouplingDistribution, t: float) -> float:
    """p_ss = integral p(J) sin^2(Jt) dJ."""
    j, w = dist.nodes()
    return float(np.sum(w * np.sin(j * t) ** 2))


@dataclass(frozen=True)
class IsingRealization:
    """A pulse time realizing the parity projection.

    apply_probability is q = 1/(2 p_sigma_sigma); p_sigma_sigma must exceed
    1/2 (q then lies in [1/2, 1)) and the residual cross term must be below
    1e-9 for the realized channel to match the projection.
    """

    t: float
    p_sigma_sigma: float
    residual_cross_term: float
    apply_probability: float = 0.0

    def __post_init__(self):
        if not self.p_sigma_sigma > 0.5:
            raise ValueError(
                f"p_sigma_sigma must exceed 1/2, got {self.p_sigma_sigma}"
            )
        if abs(self.residual_cross_term) >= 1e-9:
            raise ValueError(
                f"residual cross term {self.residual_cross_term} too large"
            )
        object.__setattr__(
            self, "apply_probability", 1.0 / (2.0 * self.p_sigma_sigma)
        )


class PulseTimeError(ValueError):
    """No pulse time with vanishing cross term and p_sigma_sigma > 1/2.

    Carries the best candidate root found, if any.
    """

    def __init__(self, message: str, best_t: Optional[float] = None,
                 best_p: Optional[float] = None):
        if best_t is not None:
            message += f" (best candidate: t={best_t:.6g}, p_sigma_sigma={best_p:.6g})"
        super().__init__(message)
        self.best_t = best_t
        self.best_p = best_p


def find_pulse_time(
    dist: CouplingDistribution,
    search_window: Optional[tuple[float, float]] = None,
    scan_points: int = 4096,
) -> IsingRealization:
    """Locate the pulse time: scan the window for sign changes of the cross
    term, refine each root by bracketed root finding, and keep the root with
    the largest p_sigma_sigma (ties broken toward smaller t).

    The default window is (0, 2 pi / J_rms].
    """
    if search_window is None:
        scale = dist.rms_coupling()
        if scale <= 0:
            raise PulseTimeError("distribution has no coupling scale to set a window")
        search_window = (0.0, 2.0 * np.pi / scale)
    lo, hi = search_window
    if not (hi > lo >= 0.0):
        raise ValueError(f"invalid search window {search_window}")

    grid = np.linspace(lo, hi, scan_points + 1)
    if grid[0] == 0.0:
        grid = grid[1:]  # t = 0 is a trivial root with p_sigma_sigma = 0
    j, w = dist.nodes()
    jt = np.outer(grid, j)
    sin_jt, cos_jt = np.sin(jt), np.cos(jt)
    values = (sin_jt * cos_jt) @ w
    parities = (sin_jt * sin_jt) @ w

    # Values at quadrature-noise level cannot be told from an exact zero;
    # count those grid points as roots directly instead of handing noise
    # sign flips to the root finder.
    floor = 1e-13 * max(1.0, float(np.max(np.abs(values))))
    tiny = np.abs(values) <= floor

    candidates = [(float(grid[i]), float(parities[i])) for i in np.nonzero(tiny)[0]]
    for i in range(len(grid) - 1):
        if tiny[i] or tiny[i + 1] or values[i] * values[i + 1] >= 0.0:
            continue
        root = brentq(lambda t: cross_term(dist, t), grid[i], grid[i + 1], xtol=1e-14)
        candidates.append((float(root), parity_weight(dist, root)))

    if not candidates:
        raise PulseTimeError("cross term has no root in the search window")
    t, p = max(candidates, key=lambda c: (c[1], -c[0]))
    # Demand a margin over 1/2 at the same scale as the residual tolerance:
    # the quadrature cannot certify a smaller excess.
    if p <= 0.5 + 1e-9:
        raise PulseTimeError(
            "no root gives p_sigma_sigma > 1/2 in the search window",
            best_t=t, best_p=p,
        )
    return IsingRealization(
        t=t, p_sigma_sigma=p, residual_cross_term=abs(cross_term(dist, t))
    )


def _check_sigma_pair(sigma_pair: PauliOp):
    if sigma_pair.phase != 0 or locality(sigma_pair) != 2:
        raise ValueError(
            f"{format_pauli(sigma_pair)} is not a plain two-local Pauli product"
        )
    letters = [
        sigma_pair.letter(q)
        for q in range(sigma_pair.n)
        if (sigma_pair.support >> q) & 1
    ]
    if letters[0] != letters[1]:
        raise ValueError(
            f"{format_pauli(sigma_pair)} must repeat one letter (XX, YY or ZZ)"
        )


def noisy_ising_channel(
    dist: CouplingDistribution, t: float, sigma_pair: PauliOp
) -> Channel:
    """Coupling-averaged pulse: rho -> integral p(J) U_J rho U_J^dagger dJ
    with U_J = exp(-i J t sigma_pair), as a Kraus mixture over the
    distribution's quadrature nodes.
    """
    _check_sigma_pair(sigma_pair)
    dense = to_dense(sigma_pair)
    eye = np.eye(dense.shape[0], dtype=complex)
    j, w = dist.nodes()
    kraus = [
        np.sqrt(wi) * (np.cos(ji * t) * eye - 1j * np.sin(ji * t) * dense)
        for ji, wi in zip(j, w)
    ]
    return Channel(kraus)


def realize_parity_projection(
    dist: CouplingDistribution,
    sigma_pair: PauliOp,
    realization: Optional[IsingRealization] = None,
    search_window: Optional[tuple[float, float]] = None,
) -> Channel:
    """The unread parity measurement of sigma_pair built from noisy pulses.

    Skips the pulse with probability 1 - q and applies the noisy Ising
    evolution otherwise; outcomes are unread so this is the deterministic
    convex mixture (1 - q) id + q U_ss. Equals the parity projection
    (rho + SS rho SS)/2 up to the residual cross term of the realization.
    """
    _check_sigma_pair(sigma_pair)
    if realization is None:
        realization = find_pulse_time(dist, search_window)
    q = realization.apply_probability
    dense = to_dense(sigma_pair)
    eye = np.eye(dense.shape[0], dtype=complex)
    j, w = dist.nodes()
    kraus = [np.sqrt(1.0 - q) * eye] if q < 1.0 else []
    kraus += [
        np.sqrt(q * wi)
        * (np.cos(ji * realization.t) * eye - 1j * np.sin(ji * realization.t) * dense)
        for ji, wi in zip(j, w)
    ]
    return Channel(kraus)


def sample_trajectory_step(
    dist: CouplingDistribution,
    realization: IsingRealization,
    sigma_pair: PauliOp,
    rng: np.random.Generator,
) -> np.ndarray:
    """One sampled trajectory step: the unitary actually applied this round
    (the identity when the pulse is skipped). Averaging conjugations by many
    such draws converges to the realized channel; illustration only.
    """
    _check_sigma_pair(sigma_pair)
    dense = to_dense(sigma_pair)
    eye = np.eye(dense.shape[0], dtype=complex)
    if rng.random() >= realization.apply_probability:
        return eye
    jval = dist.sample(rng)
    angle = jval * realization.t
    return np.cos(angle) * eye - 1j * np.sin(angle) * dense
