"""Symbolic protection-condition checks for measurement-frozen logical operators.

Decides, by commutation structure alone, whether repeatedly measuring a set C
of Pauli operators freezes a set L of logical Pauli operators against a noise
Hamiltonian H = sum_l a_l e_l. The coefficients a_l stay symbolic labels: the
adjoint of the unread measurement channel annihilates exactly those terms e_l
that anticommute with some element of C, so the verdict never depends on
numeric cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .pauli import (
    PauliOp,
    PauliGroup,
    commutes,
    format_pauli,
    group_closure,
    identity,
    locality,
    single,
)


@dataclass(frozen=True)
class EncodingSpec:
    """Logical operators (Z-type first, then X-type) of an m-qubit encoding.

    ``logical_ops`` holds (Zbar_1..Zbar_m, Xbar_1..Xbar_m). Construction
    checks the defining algebra: all Z-types commute, all X-types commute,
    Zbar_i commutes with Xbar_j for i != j, and {Zbar_i, Xbar_i} = 0.
    """

    n: int
    logical_ops: tuple[PauliOp, ...]

    def __post_init__(self):
        ops = tuple(self.logical_ops)
        object.__setattr__(self, "logical_ops", ops)
        if not ops or len(ops) % 2 != 0:
            raise ValueError("logical_ops must be (Zbar_1..m, Xbar_1..m)")
        for p in ops:
            if p.n != self.n:
                raise ValueError(f"{p} acts on {p.n} qubits, encoding has {self.n}")
            if not p.is_hermitian:
                raise ValueError(f"logical operator {p} is not Hermitian")
            if p.is_identity_up_to_phase:
                raise ValueError("identity is not a valid logical operator")
        m = len(ops) // 2
        for i in range(m):
            for j in range(m):
                zi, xj = ops[i], ops[m + j]
                if i != j and not commutes(zi, xj):
                    raise ValueError(f"[{zi}, {xj}] != 0 for distinct logical qubits")
                if i == j and commutes(zi, xj):
                    raise ValueError(f"{zi} and {xj} must anticommute")
                if not commutes(ops[i], ops[j]) or not commutes(ops[m + i], ops[m + j]):
                    raise ValueError("same-type logical operators must commute")

    @property
    def m(self) -> int:
        """Number of logical qubits."""
        return len(self.logical_ops) // 2

    def logical_group(self) -> PauliGroup:
        return group_closure(self.logical_ops)


@dataclass(frozen=True)
class ErrorSet:
    """The Pauli terms of a noise Hamiltonian H = sum_l a_l e_l.

    Coefficients are carried as opaque labels. The identity term (label
    ``a0``) is appended automatically when absent; terms must be distinct
    modulo phase.
    """

    n: int
    terms: tuple[tuple[PauliOp, str], ...]

    def __post_init__(self):
        terms = list(self.terms)
        if not any(p.is_identity_up_to_phase for p, _ in terms):
            terms.insert(0, (identity(self.n), "a0"))
        seen = set()
        for p, _ in terms:
            if p.n != self.n:
                raise ValueError(f"{p} acts on {p.n} qubits, error set has {self.n}")
            if p.key() in seen:
                raise ValueError(f"duplicate error term {p} (modulo phase)")
            seen.add(p.key())
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def one_local(cls, n: int) -> "ErrorSet":
        """Identity plus every single-qubit X, Y, Z: general one-local noise."""
        terms = [
            (single(axis, q, n), f"a{q + 1}{axis}")
            for q in range(n)
            for axis in "XYZ"
        ]
        return cls(n, tuple(terms))

    @classmethod
    def from_ops(cls, ops: Iterable[PauliOp], n: int) -> "ErrorSet":
        return cls(n, tuple((p, f"a{k + 1}") for k, p in enumerate(ops)))

    def operators(self) -> list[PauliOp]:
        return [p for p, _ in self.terms]

    def non_identity(self) -> list[tuple[PauliOp, str]]:
        return [(p, lab) for p, lab in self.terms if not p.is_identity_up_to_phase]

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the protection-condition check, with explicit witnesses.

    cond_i: every measured operator commutes with every logical operator.
    cond_ii: the measured and logical groups intersect only in the identity.
    cond_iii: every non-identity error term anticommutes with some measured
        operator, so the reduced Hamiltonian is proportional to identity.
    errors_outside_logicals: no non-identity error term lies in the logical
        group (standing assumption, reported separately from cond_ii).
    oqze_ok: the freezing condition holds for every element of the logical
        group: all surviving error terms commute with it.
    """

    cond_i: bool
    violations_i: tuple[tuple[PauliOp, PauliOp], ...]
    cond_ii: bool
    witness_ii: Optional[PauliOp]
    cond_iii: bool
    unsuppressed: tuple[PauliOp, ...]
    errors_outside_logicals: bool
    witness_overlap: Optional[PauliOp]
    oqze_ok: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.cond_i
            and self.cond_ii
            and self.cond_iii
            and self.errors_outside_logicals
        )

    def to_text(self) -> str:
        lines = []

        def flag(ok):
            return "PASS" if ok else "FAIL"

        lines.append(f"(i)   measurements commute with logicals: {flag(self.cond_i)}")
        for c, L in self.violations_i:
            lines.append(f"      violation: [{format_pauli(c)}, {format_pauli(L)}] != 0")
        lines.append(
            f"(ii)  measured group meets logical group only in identity: {flag(self.cond_ii)}"
        )
        if self.witness_ii is not None:
            lines.append(f"      witness: {format_pauli(self.witness_ii)} in both groups")
        lines.append(f"(iii) every error term anticommutes with a measurement: {flag(self.cond_iii)}")
        for e in self.unsuppressed:
            lines.append(f"      unsuppressed error term: {format_pauli(e)}")
        lines.append(
            f"(iv)  error terms outside logical group: {flag(self.errors_outside_logicals)}"
        )
        if self.witness_overlap is not None:
            lines.append(f"      witness: {format_pauli(self.witness_overlap)}")
        lines.append(f"freezing condition for all logical operators: {flag(self.oqze_ok)}")
        return "\n".join(lines)

    def to_record(self) -> dict:
        """Flat key/value form for machine-readable output."""
        return {
            "cond_i": self.cond_i,
            "cond_i_violations": ";".join(
                f"{format_pauli(c)},{format_pauli(L)}" for c, L in self.violations_i
            ),
            "cond_ii": self.cond_ii,
            "cond_ii_witness": (
                format_pauli(self.witness_ii) if self.witness_ii is not None else ""
            ),
            "cond_iii": self.cond_iii,
            "cond_iii_unsuppressed": ";".join(
                format_pauli(e) for e in self.unsuppressed
            ),
            "errors_outside_logicals": self.errors_outside_logicals,
            "errors_overlap_witness": (
                format_pauli(self.witness_overlap)
                if self.witness_overlap is not None
                else ""
            ),
            "oqze_ok": self.oqze_ok,
            "all_ok": self.all_ok,
        }


def _check_dims(n: int, ops: Iterable[PauliOp], what: str):
    for p in ops:
        if p.n != n:
            raise ValueError(f"{what} operator {p} acts on {p.n} qubits, expected {n}")


def reduce_hamiltonian(C: Sequence[PauliOp], E: ErrorSet) -> ErrorSet:
    """Surviving error terms after the adjoint of all unread measurements.

    A term e_l passes through the adjoint channel unchanged when it commutes
    with every element of C and is annihilated when it anticommutes with any
    one of them, so the reduced set is a plain filter. Idempotent.
    """
    _check_dims(E.n, C, "measured")
    kept = tuple(
        (p, lab)
        for p, lab in E.terms
        if all(commutes(p, c) for c in C)
    )
    return ErrorSet(E.n, kept)


def check_oqze_condition(A: PauliOp, C: Sequence[PauliOp], E: ErrorSet) -> bool:
    """Does the observable A freeze under measurements of C with noise E?

    Requires [A, c] = 0 for every c in C (otherwise the measurements disturb
    A directly and the question is ill-posed: raises ValueError). Returns
    True iff every surviving term of :func:`reduce_hamiltonian` commutes
    with A, which makes the commutator vanish for any coefficients.
    """
    _check_dims(A.n, C, "measured")
    for c in C:
        if not commutes(A, c):
            raise ValueError(
                f"precondition violated: [{format_pauli(A)}, {format_pauli(c)}] != 0"
            )
    survivors = reduce_hamiltonian(C, E)
    return all(commutes(p, A) for p in survivors.operators())


def check_conditions(
    enc: EncodingSpec,
    C: Sequence[PauliOp],
    E: Optional[ErrorSet] = None,
) -> ConditionReport:
    """Evaluate the protection conditions for encoding ``enc`` under C and E.

    E defaults to general one-local noise. Violations carry witnesses; the
    report also records the standing assumption that no error term lies in
    the logical group.
    """
    if E is None:
        E = ErrorSet.one_local(enc.n)
    _check_dims(enc.n, C, "measured")
    if E.n != enc.n:
        raise ValueError(f"error set on {E.n} qubits, encoding on {enc.n}")

    violations_i = tuple(
        (c, L)
        for c in C
        for L in enc.logical_ops
        if not commutes(c, L)
    )
    cond_i = not violations_i

    g_logical = enc.logical_group()
    witness_ii = None
    if C:
        g_measured = group_closure(C)
        overlap = sorted(g_measured.intersection_keys(g_logical) - {(0, 0)})
        if overlap:
            kx, kz = overlap[0]
            witness_ii = PauliOp(enc.n, kx, kz, 0)
    cond_ii = witness_ii is None

    unsuppressed = tuple(
        p
        for p, _ in E.non_identity()
        if all(commutes(p, c) for c in C)
    )
    cond_iii = not unsuppressed

    witness_overlap = None
    for p, _ in E.non_identity():
        if g_logical.contains(p):
            witness_overlap = p
            break
    errors_outside = witness_overlap is None

    survivors = reduce_hamiltonian(C, E).operators()
    logical_elements = g_logical.elements()
    oqze_ok = cond_i and all(
        commutes(e, A) for e in survivors for A in logical_elements
    )
    # (i) and (iii) leave only the identity term, which commutes with
    # everything; anything else is a logic error, not a physics verdict.
    if cond_i and cond_iii:
        assert oqze_ok, "conditions (i)+(iii) must imply the freezing condition"

    return ConditionReport(
        cond_i=cond_i,
        violations_i=violations_i,
        cond_ii=cond_ii,
        witness_ii=witness_ii,
        cond_iii=cond_iii,
        unsuppressed=unsuppressed,
        errors_outside_logicals=errors_outside,
        witness_overlap=witness_overlap,
        oqze_ok=oqze_ok,
    )


@dataclass(frozen=True)
class ObstructionReport:
    """Verdict of the Abelian two-local obstruction analysis for one qubit.

    When a commuting measurement set covers two distinct Pauli axes on a
    qubit, the pair of covering operators is forced to share a partner qubit
    with anticommuting letters there, so the two qubits are projected onto a
    maximally entangled pair and cannot store a logical qubit.
    """

    qubit: int
    applicable: bool
    covered_axes: tuple[str, ...]
    fully_suppressed: bool
    pair: Optional[tuple[PauliOp, PauliOp]]
    partner_qubit: Optional[int]
    message: str


def detect_abelian_obstruction(qubit: int, C: Sequence[PauliOp]) -> ObstructionReport:
    """Analyze why an Abelian set of <=2-local measurements cannot protect.

    Raises ValueError when some element of C has locality above 2 or the
    qubit index is out of range. If the generated group is non-Abelian the
    analysis does not apply and the report says so.
    """
    C = list(C)
    if not C:
        return ObstructionReport(
            qubit, True, (), False, None, None,
            f"no measurements act on qubit {qubit + 1}; one-local noise not suppressed",
        )
    n = C[0].n
    _check_dims(n, C, "measured")
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for n={n}")
    for c in C:
        if locality(c) > 2:
            raise ValueError(
                f"obstruction analysis needs <=2-local measurements, got {format_pauli(c)}"
            )

    if not group_closure(C).is_abelian():
        return ObstructionReport(
            qubit, False, (), False, None, None,
            "measured group is non-Abelian; the two-local obstruction does not apply",
        )

    covering = [(c.letter(qubit), c) for c in C if (c.support >> qubit) & 1]
    axes = tuple(sorted({axis for axis, _ in covering}))
    if len(axes) < 2:
        return ObstructionReport(
            qubit, True, axes, False, None, None,
            f"only axes {axes or ('none',)} covered on qubit {qubit + 1}; "
            "general one-local noise there is not fully suppressed",
        )

    by_axis = {}
    for axis, c in covering:
        by_axis.setdefault(axis, c)
    first, second = axes[0], axes[1]
    c1, c2 = by_axis[first], by_axis[second]
    # Commuting elements with anticommuting letters on this qubit must share
    # a second qubit where the letters anticommute too.
    partner = None
    for q in range(n):
        if q != qubit and (c1.support >> q) & 1 and (c2.support >> q) & 1:
            partner = q
            break
    assert partner is not None, "Abelian premise forces a shared partner qubit"
    return ObstructionReport(
        qubit, True, axes, True, (c1, c2), partner,
        f"measuring {format_pauli(c1)} and {format_pauli(c2)} projects qubits "
        f"{qubit + 1} and {partner + 1} onto a maximally entangled pair",
    )
