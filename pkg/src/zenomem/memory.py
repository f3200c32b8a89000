"""Three-qubit measurement-protected quantum memory.

One logical qubit lives in Zbar = Z1*Z2, Xbar = X2*X3; the protecting
measurements are rounds (Z1, Z2*Z3) then (X3, X1*X2), repeated f times per
unit of storage time. Provides encode/decode with Pauli-frame correction,
logical-channel extraction by process tomography, the error-probability
sweep, and the lifetime against the surface-code threshold.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .conditions import EncodingSpec, check_conditions
from .pauli import parse_pauli, single, to_dense
from .simulator import (
    Channel,
    MeasurementSchedule,
    NoiseModel,
    build_hamiltonian,
    run_protocol,
    validate_density_matrix,
    vec,
)

SURFACE_CODE_THRESHOLD = 0.104

_PAULI2 = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# Columns vec(sigma_j), column-stacking; turns a logical superoperator
# matrix into a Pauli transfer matrix.
_T_VEC = np.stack([vec(s) for s in _PAULI2], axis=1)

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)
_PLUS = (_KET0 + _KET1) / np.sqrt(2.0)

# Process-tomography inputs |0>, |1>, |+>, |+i>: informationally complete.
_TOMO_KETS = (
    _KET0,
    _KET1,
    _PLUS,
    (_KET0 + 1j * _KET1) / np.sqrt(2.0),
)
TOMO_STATES = np.stack([np.outer(k, k.conj()) for k in _TOMO_KETS])


def default_encoding() -> EncodingSpec:
    return EncodingSpec(3, (parse_pauli("Z1*Z2", 3), parse_pauli("X2*X3", 3)))


def default_schedule(zeta: float = 0.0) -> MeasurementSchedule:
    return MeasurementSchedule(
        rounds=(
            (parse_pauli("Z1", 3), parse_pauli("Z2*Z3", 3)),
            (parse_pauli("X3", 3), parse_pauli("X1*X2", 3)),
        ),
        zeta=zeta,
    )


def _encode_isometry() -> np.ndarray:
    # |0>_1 (x) id_2 (x) |+>_3, an 8x2 isometry.
    return np.kron(np.kron(_KET0.reshape(2, 1), np.eye(2)), _PLUS.reshape(2, 1))


_ENCODE = _encode_isometry()


def _decode_channel() -> Channel:
    """Readout of Z1 and X3 with frame correction, as one 8-dim -> 2-dim channel.

    Branch (nu_z, nu_x): project onto the (-1)^nu eigenspaces, apply X2 when
    nu_z = 1 and Z2 when nu_x = 1, trace out qubits 1 and 3. Summing the
    unnormalized branches weights them by their Born probabilities.
    """
    eye8 = np.eye(8, dtype=complex)
    z1 = to_dense(single("Z", 0, 3))
    x3 = to_dense(single("X", 2, 3))
    x2 = to_dense(single("X", 1, 3))
    z2 = to_dense(single("Z", 1, 3))
    kraus = []
    for nu_z in (0, 1):
        for nu_x in (0, 1):
            proj = 0.5 * (eye8 + (-1) ** nu_z * z1) @ (0.5 * (eye8 + (-1) ** nu_x * x3))
            corr = eye8
            if nu_z:
                corr = x2 @ corr
            if nu_x:
                corr = z2 @ corr
            a = (corr @ proj).reshape(2, 2, 2, 8)
            for i1 in (0, 1):
                for i3 in (0, 1):
                    kraus.append(a[i1, :, i3, :])
    return Channel(kraus)


_DECODE = _decode_channel()
_ENCODED_TOMO = np.einsum("ij,sjk,lk->sil", _ENCODE, TOMO_STATES, _ENCODE.conj())

# Superoperator forms of encode/decode for the powering fast path.
_ENCODE_LIOUVILLE = np.kron(_ENCODE.conj(), _ENCODE)
_DECODE_LIOUVILLE = _DECODE.liouville()


@dataclass(frozen=True)
class FrameOutcome:
    """Final readout pair: nu_z from Z1, nu_x from X3."""

    nu_z: int
    nu_x: int

    def __post_init__(self):
        if self.nu_z not in (0, 1) or self.nu_x not in (0, 1):
            raise ValueError(f"outcomes must be bits, got ({self.nu_z}, {self.nu_x})")


def encode(logical: np.ndarray) -> np.ndarray:
    """Embed a 1-qubit state: qubit 1 in |0>, qubit 3 in |+>, payload on 2."""
    rho = np.asarray(logical, dtype=complex)
    if rho.shape[-2:] != (2, 2):
        raise ValueError(f"logical state must be 2x2, got {rho.shape}")
    validate_density_matrix(rho, name="logical state")
    return _ENCODE @ rho @ _ENCODE.conj().T


def decode(rho: np.ndarray) -> np.ndarray:
    """Read out Z1, X3, correct the Pauli frame on qubit 2, trace out 1 and 3.

    Outcome branches are combined with their probabilities, so this is a
    deterministic channel from 3-qubit to 1-qubit states.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (8, 8):
        raise ValueError(f"expected a 3-qubit (8x8) state, got {rho.shape}")
    validate_density_matrix(rho, name="pre-decode state")
    return _DECODE.apply(rho)


def decode_branches(
    rho: np.ndarray,
) -> list[tuple[FrameOutcome, float, Optional[np.ndarray]]]:
    """Per-outcome view of decode: (frame, probability, state or None)."""
    rho = np.asarray(rho, dtype=complex)
    validate_density_matrix(rho, name="pre-decode state")
    eye8 = np.eye(8, dtype=complex)
    z1 = to_dense(single("Z", 0, 3))
    x3 = to_dense(single("X", 2, 3))
    x2 = to_dense(single("X", 1, 3))
    z2 = to_dense(single("Z", 1, 3))
    out = []
    for nu_z in (0, 1):
        for nu_x in (0, 1):
            proj = 0.5 * (eye8 + (-1) ** nu_z * z1) @ (0.5 * (eye8 + (-1) ** nu_x * x3))
            corr = eye8
            if nu_z:
                corr = x2 @ corr
            if nu_x:
                corr = z2 @ corr
            branch = corr @ proj @ rho @ proj.conj().T @ corr.conj().T
            t = branch.reshape(2, 2, 2, 2, 2, 2)
            reduced = np.einsum("aibajb->ij", t)
            prob = float(np.trace(reduced).real)
            frame = FrameOutcome(nu_z, nu_x)
            if prob < 1e-14:
                out.append((frame, prob, None))
            else:
                out.append((frame, prob, reduced / prob))
    return out


def _bit_ket(b: int) -> np.ndarray:
    return _KET1 if b else _KET0


def track_basis_states(
    history: Sequence[tuple[str, int, int]],
) -> tuple[np.ndarray, np.ndarray]:
    """Logical basis pair (|0bar>, |1bar>) after a projective outcome history.

    ``history`` alternates rounds ("z", nu_z, nu_zz) and ("x", nu_x, nu_xx).
    After a Z-round the basis is |nu_z> |mu + nu_z> |mu + nu_z + nu_zz>
    (sums mod 2); after an X-round it is the Bell-state form
    (-1)^(mu (nu_x + nu_xx)) |phi_(mu, nu_xx)> |x, nu_x> with
    |phi_(mu, nu_xx)> = (|mu>|0> + (-1)^nu_xx |1+mu>|1>)/sqrt(2). Both
    depend only on the most recent round, up to a branch-global phase.
    """
    entries = list(history)
    if not entries:
        raise ValueError("history must contain at least one round")
    prev = None
    for entry in entries:
        if len(entry) != 3:
            raise ValueError(f"malformed round outcome {entry!r}")
        kind, v1, v2 = entry
        kind = str(kind).lower()
        if kind not in ("z", "x"):
            raise ValueError(f"round kind must be 'z' or 'x', got {entry[0]!r}")
        if v1 not in (0, 1) or v2 not in (0, 1):
            raise ValueError(f"outcomes must be bits, got {entry!r}")
        if prev == kind:
            raise ValueError("history must alternate Z-rounds and X-rounds")
        prev = kind

    kind, v1, v2 = entries[-1]
    kind = str(kind).lower()
    basis = []
    for mu in (0, 1):
        if kind == "z":
            nu_z, nu_zz = v1, v2
            vecmu = np.kron(
                np.kron(_bit_ket(nu_z), _bit_ket(mu ^ nu_z)),
                _bit_ket(mu ^ nu_z ^ nu_zz),
            )
        else:
            nu_x, nu_xx = v1, v2
            phi = (
                np.kron(_bit_ket(mu), _KET0)
                + (-1) ** nu_xx * np.kron(_bit_ket(1 ^ mu), _KET1)
            ) / np.sqrt(2.0)
            x3 = (_KET0 + (-1) ** nu_x * _KET1) / np.sqrt(2.0)
            vecmu = (-1) ** (mu * (nu_x + nu_xx)) * np.kron(phi, x3)
        basis.append(vecmu.astype(complex))
    return basis[0], basis[1]


@dataclass(frozen=True)
class MemoryProtocol:
    """Encoding plus measurement schedule plus timing.

    frequency is measurements-of-all-rounds per unit time; storage_time is
    tau. Both may be left None in a template and supplied per sweep point.
    frequency = 0 means no protection at all (plain Hamiltonian evolution).
    Construction verifies the protection conditions against one-local noise
    whenever the schedule has rounds.
    """

    encoding: EncodingSpec
    schedule: MeasurementSchedule
    frequency: Optional[float] = None
    storage_time: Optional[float] = None

    def __post_init__(self):
        if self.schedule.rounds:
            if self.schedule.n != self.encoding.n:
                raise ValueError("schedule and encoding qubit counts differ")
            report = check_conditions(self.encoding, list(self.schedule.operators))
            if not report.all_ok:
                raise ValueError(
                    "schedule fails the protection conditions:\n" + report.to_text()
                )
        if self.frequency is not None and self.frequency < 0:
            raise ValueError(f"frequency must be nonnegative, got {self.frequency}")
        if self.storage_time is not None and self.storage_time < 0:
            raise ValueError(f"storage_time must be nonnegative, got {self.storage_time}")

    @property
    def n(self) -> int:
        return self.encoding.n

    def with_timing(self, frequency: float, storage_time: float) -> "MemoryProtocol":
        return dataclasses.replace(
            self, frequency=frequency, storage_time=storage_time
        )

    def with_zeta(self, zeta: float) -> "MemoryProtocol":
        return dataclasses.replace(self, schedule=self.schedule.with_zeta(zeta))

    @staticmethod
    def steps_for(frequency: float, storage_time: float) -> tuple[int, bool]:
        """(N, measurements active). N = round(f tau), clamped up to 1."""
        if frequency and frequency > 0:
            return max(1, int(round(frequency * storage_time))), True
        return 1, False

    def n_steps(self) -> int:
        if self.frequency is None or self.storage_time is None:
            raise ValueError("protocol template has no timing set")
        return self.steps_for(self.frequency, self.storage_time)[0]


def three_qubit_protocol(
    zeta: float = 0.0,
    frequency: Optional[float] = None,
    storage_time: Optional[float] = None,
) -> MemoryProtocol:
    return MemoryProtocol(
        default_encoding(), default_schedule(zeta), frequency, storage_time
    )


@dataclass(frozen=True, eq=False)
class LogicalChannel:
    """Extracted single-logical-qubit error channel.

    ``ptm`` is the 4x4 Pauli transfer matrix; (F, p_X, p_Y, p_Z) come from
    its diagonal and always sum to 1; pauli_diagonal records whether the
    off-diagonal mass is below tolerance so those numbers are the whole
    story.
    """

    ptm: np.ndarray
    F: float
    p_X: float
    p_Y: float
    p_Z: float
    pauli_diagonal: bool

    @classmethod
    def from_ptm(cls, ptm: np.ndarray, offdiag_tol: float = 1e-6) -> "LogicalChannel":
        r = np.asarray(ptm, dtype=float)
        if r.shape != (4, 4):
            raise ValueError(f"PTM must be 4x4, got {r.shape}")
        if np.max(np.abs(r[0] - np.array([1.0, 0.0, 0.0, 0.0]))) > 1e-9:
            raise ValueError("PTM top row must be (1,0,0,0): map is not trace preserving")
        choi = sum(
            0.25 * r[i, j] * np.kron(_PAULI2[i], _PAULI2[j].T)
            for i in range(4)
            for j in range(4)
        )
        if np.min(np.linalg.eigvalsh(choi)) < -1e-9:
            raise ValueError("PTM is not completely positive: simulation bug upstream")
        rxx, ryy, rzz = r[1, 1], r[2, 2], r[3, 3]
        f = (1.0 + rxx + ryy + rzz) / 4.0
        p_x = (1.0 + rxx - ryy - rzz) / 4.0
        p_y = (1.0 - rxx + ryy - rzz) / 4.0
        p_z = (1.0 - rxx - ryy + rzz) / 4.0
        off = r - np.diag(np.diag(r))
        diag = bool(np.max(np.abs(off)) < offdiag_tol)
        if diag:
            for val in (f, p_x, p_y, p_z):
                if not -1e-6 <= val <= 1.0 + 1e-6:
                    raise ValueError(f"Pauli probability {val} outside [0,1]")
            if abs(f + p_x + p_y + p_z - 1.0) > 1e-6:
                raise ValueError("Pauli probabilities do not sum to 1")
        return cls(ptm=r, F=f, p_X=p_x, p_Y=p_y, p_Z=p_z, pauli_diagonal=diag)


def error_metric(channel: LogicalChannel) -> float:
    """The quantity compared against the surface-code threshold."""
    return max(channel.p_X + channel.p_Y, channel.p_Z + channel.p_Y)


def ptm_from_state_images(images: np.ndarray) -> np.ndarray:
    """PTM from the channel images of |0>, |1>, |+>, |+i> (in that order)."""
    images = np.asarray(images, dtype=complex)
    if images.shape != (4, 2, 2):
        raise ValueError(f"need four 2x2 output states, got {images.shape}")
    lam_i = images[0] + images[1]
    lam_z = images[0] - images[1]
    lam_x = 2.0 * images[2] - lam_i
    lam_y = 2.0 * images[3] - lam_i
    cols = (lam_i, lam_x, lam_y, lam_z)
    r = np.empty((4, 4), dtype=float)
    for i in range(4):
        for j in range(4):
            r[i, j] = 0.5 * np.trace(_PAULI2[i] @ cols[j]).real
    return r


def _probs_from_ptm_diag(ptm: np.ndarray) -> np.ndarray:
    rxx, ryy, rzz = ptm[1, 1], ptm[2, 2], ptm[3, 3]
    return np.array(
        [
            (1.0 + rxx - ryy - rzz) / 4.0,
            (1.0 - rxx + ryy - rzz) / 4.0,
            (1.0 - rxx - ryy + rzz) / 4.0,
            (1.0 + rxx + ryy + rzz) / 4.0,
        ]
    )


def _require_three_qubit(protocol: MemoryProtocol):
    if protocol.encoding.n != 3 or protocol.encoding != default_encoding():
        raise ValueError(
            "encode/decode are defined for the three-qubit encoding Z1*Z2, X2*X3"
        )


def _protocol_channels(
    protocol: MemoryProtocol, active: bool, channels: Optional[Sequence[Channel]]
) -> list[Channel]:
    if channels is not None:
        return list(channels)
    if not active:
        return []
    return protocol.schedule.channels()


def extract_channel(
    protocol: MemoryProtocol,
    noise: NoiseModel,
    samples: int = 1,
    channels: Optional[Sequence[Channel]] = None,
) -> LogicalChannel:
    """Process tomography of encode -> protected evolution -> decode.

    Runs the four tomography inputs through the full protocol for each noise
    sample (sample k draws its Hamiltonian from the stream seed XOR k),
    averages the per-sample PTMs, and packages the result. ``channels``
    substitutes an explicit per-step channel list for the schedule, e.g.
    measurement channels realized by noisy Ising pulses.
    """
    _require_three_qubit(protocol)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if protocol.frequency is None or protocol.storage_time is None:
        raise ValueError("protocol needs frequency and storage_time set")
    tau = protocol.storage_time
    n_steps, active = protocol.steps_for(protocol.frequency, tau)
    step_channels = _protocol_channels(protocol, active, channels)
    ptms = np.empty((samples, 4, 4))
    for k in range(samples):
        h = build_hamiltonian(noise, protocol.n, rng=noise.rng_for_sample(k))
        evolved = run_protocol(_ENCODED_TOMO, h, step_channels, tau, n_steps)
        ptms[k] = ptm_from_state_images(_DECODE.apply(evolved))
    return LogicalChannel.from_ptm(np.mean(ptms, axis=0))


def logical_ptm(
    protocol: MemoryProtocol,
    H: np.ndarray,
    channels: Optional[Sequence[Channel]] = None,
) -> np.ndarray:
    """Exact PTM for one fixed Hamiltonian via the superoperator fast path.

    Builds the one-step superoperator (measurements then unitary), raises it
    to the N-th power by binary powering, and sandwiches it between the
    encode and decode superoperators. Agrees with the Kraus-form evolution
    to float precision while costing log N matrix products.
    """
    _require_three_qubit(protocol)
    if protocol.frequency is None or protocol.storage_time is None:
        raise ValueError("protocol needs frequency and storage_time set")
    tau = protocol.storage_time
    n_steps, active = protocol.steps_for(protocol.frequency, tau)
    step_channels = _protocol_channels(protocol, active, channels)
    w, v = np.linalg.eigh(np.asarray(H, dtype=complex))
    return _fast_ptm(w, v, _channels_liouville(step_channels), tau / n_steps, n_steps)


def _channels_liouville(channels: Sequence[Channel]) -> np.ndarray:
    lp = np.eye(64, dtype=complex)
    for ch in channels:
        lp = ch.liouville() @ lp
    return lp


def _fast_ptm(
    w: np.ndarray, v: np.ndarray, lp: np.ndarray, dt: float, n_steps: int
) -> np.ndarray:
    u = (v * np.exp(-1j * w * dt)) @ v.conj().T
    step = np.kron(u.conj(), u) @ lp
    total = _DECODE_LIOUVILLE @ np.linalg.matrix_power(step, n_steps) @ _ENCODE_LIOUVILLE
    r = 0.5 * (_T_VEC.conj().T @ total @ _T_VEC)
    return r.real


def _grid_probs_for_sample(args) -> np.ndarray:
    """(p_X, p_Y, p_Z, F) over a (frequency, time) grid for one noise draw."""
    protocol, noise, zeta, freqs, times, k = args
    sched = protocol.schedule if zeta is None else protocol.schedule.with_zeta(zeta)
    h = build_hamiltonian(noise, protocol.n, rng=noise.rng_for_sample(k))
    w, v = np.linalg.eigh(h)
    lp = _channels_liouville(sched.channels())
    eye = np.eye(64, dtype=complex)
    out = np.empty((len(freqs), len(times), 4))
    for i, f in enumerate(freqs):
        for j, tau in enumerate(times):
            n_steps, active = MemoryProtocol.steps_for(f, tau)
            ptm = _fast_ptm(w, v, lp if active else eye, tau / n_steps, n_steps)
            out[i, j] = _probs_from_ptm_diag(ptm)
    return out


def _ensemble_probs(
    protocol: MemoryProtocol,
    noise: NoiseModel,
    zeta: Optional[float],
    freqs: Sequence[float],
    times: Sequence[float],
    samples: int,
    workers: int = 1,
) -> np.ndarray:
    """Stack of per-sample grids, in sample order regardless of workers."""
    _require_three_qubit(protocol)
    payloads = [
        (protocol, noise, zeta, tuple(freqs), tuple(times), k)
        for k in range(samples)
    ]
    if workers <= 1:
        results = [_grid_probs_for_sample(p) for p in payloads]
    else:
        chunk = max(1, samples // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grid_probs_for_sample, payloads, chunksize=chunk))
    return np.stack(results)


def sweep_error_probabilities(
    protocol: MemoryProtocol,
    noise: NoiseModel,
    frequencies: Sequence[float],
    times: Sequence[float],
    samples: int = 200,
    workers: int = 1,
) -> list[dict]:
    """Ensemble-averaged logical error probabilities over an (f, tau) grid.

    Returns one row dict per grid point with keys matching the CSV columns:
    f, tau, p_X, p_X_stderr, p_Y, p_Y_stderr, p_Z, p_Z_stderr, F. Sample
    means use pairwise summation in sample order, so results do not depend
    on the worker count.
    """
    frequencies = list(frequencies)
    times = list(times)
    if not frequencies or not times:
        raise ValueError("frequency and time grids must be nonempty")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if any(f < 0 for f in frequencies) or any(t < 0 for t in times):
        raise ValueError("grid values must be nonnegative")
    probs = _ensemble_probs(protocol, noise, None, frequencies, times, samples, workers)
    mean = probs.mean(axis=0)
    if samples > 1:
        stderr = probs.std(axis=0, ddof=1) / np.sqrt(samples)
    else:
        stderr = np.zeros_like(mean)
    rows = []
    for i, f in enumerate(frequencies):
        for j, tau in enumerate(times):
            px, py, pz, fid = mean[i, j]
            ex, ey, ez, _ = stderr[i, j]
            rows.append(
                {
                    "f": float(f),
                    "tau": float(tau),
                    "p_X": float(px),
                    "p_X_stderr": float(ex),
                    "p_Y": float(py),
                    "p_Y_stderr": float(ey),
                    "p_Z": float(pz),
                    "p_Z_stderr": float(ez),
                    "F": float(fid),
                }
            )
    return rows


@dataclass(frozen=True)
class LifetimeResult:
    """Largest storage time below the surface-code threshold.

    When the threshold is never crossed up to the search cap, ``lifetime``
    is the cap and ``crossed`` is False.
    """

    lifetime: float
    crossed: bool
    frequency: float
    zeta: float
    threshold: float = SURFACE_CODE_THRESHOLD


def compute_lifetime(
    protocol: MemoryProtocol,
    noise: NoiseModel,
    zeta: float,
    f: float,
    samples: int = 200,
    tau_cap: float = 500.0,
    rel_tol: float = 1e-3,
    workers: int = 1,
) -> LifetimeResult:
    """Bisect for the storage time where the sample-averaged error metric
    max(p_X + p_Y, p_Z + p_Y) crosses the threshold 0.104.

    A geometric forward scan brackets the crossing, then bisection refines
    tau to the relative tolerance. The metric is evaluated on the ensemble
    average, which smooths per-sample wiggles.
    """
    _require_three_qubit(protocol)
    if f < 0:
        raise ValueError(f"frequency must be nonnegative, got {f}")
    if not 0.0 <= zeta < 1.0:
        raise ValueError(f"protection needs zeta in [0, 1), got {zeta}")
    if samples < 1 or tau_cap <= 0 or rel_tol <= 0:
        raise ValueError("samples, tau_cap and rel_tol must be positive")

    if workers > 1:

        def metric(tau: float) -> float:
            probs = _ensemble_probs(protocol, noise, zeta, [f], [tau], samples, workers)
            px, py, pz, _ = probs.mean(axis=0)[0, 0]
            return max(px + py, pz + py)

    else:
        # Precompute per-sample eigendecompositions once; every bisection
        # step reuses them and costs only the matrix powering. Same bytes
        # as the worker path: identical per-sample inputs and reduction.
        sched = protocol.schedule.with_zeta(zeta)
        lp = _channels_liouville(sched.channels())
        eye = np.eye(64, dtype=complex)
        decomps = []
        for k in range(samples):
            h = build_hamiltonian(noise, protocol.n, rng=noise.rng_for_sample(k))
            decomps.append(np.linalg.eigh(h))

        def metric(tau: float) -> float:
            n_steps, active = MemoryProtocol.steps_for(f, tau)
            probs = np.stack(
                [
                    _probs_from_ptm_diag(
                        _fast_ptm(w, v, lp if active else eye, tau / n_steps, n_steps)
                    )
                    for w, v in decomps
                ]
            )
            px, py, pz, _ = probs.mean(axis=0)
            return max(px + py, pz + py)

    lo = 0.0
    hi = None
    t = min(0.05, tau_cap)
    while True:
        if metric(t) > SURFACE_CODE_THRESHOLD:
            hi = t
            break
        lo = t
        if t >= tau_cap:
            return LifetimeResult(tau_cap, False, f, zeta)
        t = min(2.0 * t, tau_cap)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if metric(mid) > SURFACE_CODE_THRESHOLD:
            hi = mid
        else:
            lo = mid
    return LifetimeResult(lo, True, f, zeta)
