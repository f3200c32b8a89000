"""Symplectic Pauli algebra checked against dense 2^n x 2^n matrices."""

import numpy as np
import pytest

from zenomem.pauli import (
    MAX_DENSE_QUBITS,
    PauliGroup,
    PauliOp,
    commutes,
    format_pauli,
    group_closure,
    identity,
    inverse,
    locality,
    multiply,
    parse_pauli,
    single,
    to_dense,
)

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
LETTERS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def dense(p):
    """Independent dense reconstruction: i**phase times a Kronecker product."""
    out = np.eye(1, dtype=complex)
    for q in range(p.n):
        out = np.kron(out, LETTERS[p.letter(q)])
    return (1j ** p.phase) * out


def random_op(rng, n):
    return PauliOp(
        n,
        int(rng.integers(1 << n)),
        int(rng.integers(1 << n)),
        int(rng.integers(4)),
    )


class TestMultiply:
    def test_single_qubit_table(self):
        x = single("X", 0, 1)
        y = single("Y", 0, 1)
        z = single("Z", 0, 1)
        # X*Z = -iY, Z*X = iY, X*Y = iZ, Y*Z = iX
        assert np.allclose(dense(x * z), -1j * Y2)
        assert np.allclose(dense(z * x), 1j * Y2)
        assert np.allclose(dense(x * y), 1j * Z2)
        assert np.allclose(dense(y * z), 1j * X2)
        for p in (x, y, z):
            assert (p * p).is_identity

    def test_matches_dense_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a = random_op(rng, 3)
            b = random_op(rng, 3)
            assert np.allclose(dense(multiply(a, b)), dense(a) @ dense(b))

    def test_associative(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            a, b, c = (random_op(rng, 2) for _ in range(3))
            assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))

    def test_identity_neutral(self):
        rng = np.random.default_rng(13)
        e = identity(3)
        for _ in range(10):
            p = random_op(rng, 3)
            assert multiply(e, p) == p
            assert multiply(p, e) == p

    def test_inverse(self):
        rng = np.random.default_rng(14)
        for _ in range(25):
            p = random_op(rng, 3)
            assert multiply(p, inverse(p)).is_identity
            assert np.allclose(dense(inverse(p)), np.linalg.inv(dense(p)))

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ValueError):
            multiply(identity(2), identity(3))


class TestHermiticity:
    def test_phase_determines_hermiticity(self):
        rng = np.random.default_rng(15)
        for _ in range(40):
            p = random_op(rng, 2)
            m = dense(p)
            assert p.is_hermitian == np.allclose(m, m.conj().T)
            assert p.is_hermitian == (p.phase in (0, 2))


class TestCommutes:
    @pytest.mark.parametrize(
        "a,b,expect",
        [
            ("X1", "Z1", False),
            ("X1", "X1", True),
            ("X1*Z2", "Z1*X2", True),  # two anticommuting sites, even count
            ("Z1", "X2*X3", True),
            ("X2*X3", "Z2", False),
        ],
    )
    def test_known_pairs(self, a, b, expect):
        assert commutes(parse_pauli(a, 3), parse_pauli(b, 3)) is expect

    def test_matches_dense_commutator(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            a = random_op(rng, 3)
            b = random_op(rng, 3)
            comm = dense(a) @ dense(b) - dense(b) @ dense(a)
            assert commutes(a, b) == np.allclose(comm, 0.0)


class TestDense:
    def test_qubit_one_is_leftmost_factor(self):
        # Z on qubit 1 of two: Z (x) I = diag(1, 1, -1, -1)
        m = to_dense(single("Z", 0, 2))
        assert np.allclose(np.diag(m), [1, 1, -1, -1])

    def test_matches_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            p = random_op(rng, 3)
            assert np.allclose(to_dense(p), dense(p))

    def test_size_guard(self):
        with pytest.raises(ValueError):
            to_dense(identity(MAX_DENSE_QUBITS + 1))
        # Guard is overridable for callers that accept the cost.
        m = to_dense(identity(MAX_DENSE_QUBITS + 1), max_qubits=8)
        assert m.shape == (128, 128)


class TestParseFormat:
    @pytest.mark.parametrize(
        "text", ["I", "Z1", "Z1*Z2", "X2*X3", "-Y2", "i*X1", "-i*X1*Y3"]
    )
    def test_round_trip(self, text):
        assert format_pauli(parse_pauli(text, 3)) == text

    def test_parse_normalizes(self):
        assert parse_pauli(" Z1 * Z2 ", 3) == parse_pauli("Z1*Z2", 3)
        assert parse_pauli("+Z1", 3) == parse_pauli("Z1", 3)
        # Repeated factors multiply out: X1*X1 = I.
        assert parse_pauli("X1*X1", 3).is_identity

    def test_format_examples(self):
        assert format_pauli(identity(3)) == "I"
        assert format_pauli(single("Y", 1, 3)) == "Y2"
        assert str(single("X", 0, 2) * single("Z", 0, 2)) == "-i*Y1"

    @pytest.mark.parametrize("bad", ["", "Q1", "X0", "X4", "X", "Z1**Z2"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse_pauli(bad, 3)

    def test_locality(self):
        assert locality(identity(3)) == 0
        assert locality(parse_pauli("Z1", 3)) == 1
        assert locality(parse_pauli("X1*Y2*Z3", 3)) == 3


class TestGroup:
    def test_closure_sizes_are_powers_of_two(self):
        ops = [parse_pauli(s, 3) for s in ("Z1", "Z2*Z3", "X3", "X1*X2")]
        assert len(group_closure(ops)) == 16
        logical = [parse_pauli(s, 3) for s in ("Z1*Z2", "X2*X3")]
        assert len(group_closure(logical)) == 4
        xz = [single("X", 0, 1), single("Z", 0, 1)]
        assert len(group_closure(xz)) == 4

    def test_membership_ignores_phase(self):
        g = group_closure([parse_pauli("Z1", 3), parse_pauli("Z2", 3)])
        assert parse_pauli("Z1*Z2", 3) in g
        assert parse_pauli("-Z1*Z2", 3) in g
        assert parse_pauli("X1", 3) not in g

    def test_abelian_detection(self):
        assert group_closure([parse_pauli("Z1", 2), parse_pauli("Z2", 2)]).is_abelian()
        assert not group_closure(
            [parse_pauli("Z1*Z2", 3), parse_pauli("X2*X3", 3)]
        ).is_abelian()

    def test_intersection(self):
        measured = group_closure(
            [parse_pauli(s, 3) for s in ("Z1", "Z2*Z3", "X3", "X1*X2")]
        )
        logical = group_closure([parse_pauli("Z1*Z2", 3), parse_pauli("X2*X3", 3)])
        assert measured.intersection_trivial(logical)
        tainted = group_closure([parse_pauli("Z1*Z2", 3), parse_pauli("X3", 3)])
        assert not tainted.intersection_trivial(logical)
        assert (1 | 2, 0) not in measured.intersection_keys(logical)

    def test_elements_enumeration(self):
        g = group_closure([single("X", 0, 1), single("Z", 0, 1)])
        keys = {p.key() for p in g.elements()}
        assert keys == {(0, 0), (1, 0), (0, 1), (1, 1)}
        assert all(p.phase == 0 for p in g.elements())

    def test_max_elements_cap(self):
        gens = [single("X", q, 6) for q in range(6)] + [
            single("Z", q, 6) for q in range(6)
        ]
        with pytest.raises(ValueError):
            group_closure(gens, max_elements=100)

    def test_generator_dimension_mismatch(self):
        with pytest.raises(ValueError):
            PauliGroup([identity(2), identity(3)])
