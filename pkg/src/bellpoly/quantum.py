"""Quantum-side evaluation: Bell operators, GHZ states, spectra, see-saw ascent.

Measurements are spin observables v . sigma along unit Bloch vectors, so every
party's two settings are a pair of unit vectors.  Substituting observables for
the outcome symbols of a correlation polynomial yields a Hermitian Bell
operator on n qubits; its expectation values and top eigenvalue give the
quantum side of every bound in this package.

The expectation is linear in each setting's Bloch vector, which makes
coordinate ascent exact: replacing a vector by its normalized effective field
is the optimal update for that coordinate.  See-saw runs below exploit this,
optionally alternating with eigenvector steps for the state.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .errors import (
    DataFormatError,
    InvalidArgumentError,
    NumericalIntegrityError,
    ResourceLimitError,
)
from . import polynomial
from .polynomial import Polynomial

__all__ = [
    "UnitVector",
    "MeasurementFrame",
    "PureState",
    "DensityMatrix",
    "BellOperator",
    "SeesawResult",
    "QuantumMaxResult",
    "BlockProductResult",
    "observable",
    "bell_operator",
    "ghz",
    "basis_state",
    "expectation",
    "max_eigenvalue",
    "effective_bloch",
    "seesaw",
    "quantum_max",
    "block_product_max",
    "random_frame",
    "random_state",
    "frame_to_text",
    "frame_from_text",
    "parse_state",
    "DEFAULT_SPECTRAL_CAP",
]

DEFAULT_SPECTRAL_CAP = 10
DEFAULT_RESTARTS = 16
DEFAULT_SEESAW_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 1000

_UNIT_TOL = 1e-12
_HERMITIAN_TOL = 1e-10
_IMAG_DISCARD = 1e-10
_IMAG_ERROR = 1e-8

_SIGMA = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class UnitVector:
    """A Bloch direction; must be normalized to within 1e-12."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > _UNIT_TOL:
            raise InvalidArgumentError(
                f"({self.x}, {self.y}, {self.z}) has norm {norm!r}, not a unit vector"
            )

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector":
        norm = math.sqrt(x * x + y * y + z * z)
        if norm < 1e-14:
            raise InvalidArgumentError("cannot normalize a (near-)zero vector")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_array(cls, v: np.ndarray) -> "UnitVector":
        return cls.normalized(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class MeasurementFrame:
    """Per party, the pair (plain, primed) of measurement directions."""

    pairs: tuple[tuple[UnitVector, UnitVector], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise InvalidArgumentError("a frame needs at least one party")
        for pair in self.pairs:
            if len(pair) != 2 or not all(isinstance(v, UnitVector) for v in pair):
                raise InvalidArgumentError("each party needs a (plain, primed) vector pair")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def setting(self, party: int, primed: bool) -> UnitVector:
        return self.pairs[party][1 if primed else 0]

    def replace(self, party: int, primed: bool, v: UnitVector) -> "MeasurementFrame":
        pairs = list(self.pairs)
        pair = list(pairs[party])
        pair[1 if primed else 0] = v
        pairs[party] = tuple(pair)
        return MeasurementFrame(tuple(pairs))

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "settings": [
                [[v.x, v.y, v.z], [w.x, w.y, w.z]] for v, w in self.pairs
            ],
        }


@dataclass(frozen=True)
class PureState:
    """An n-qubit state vector, unit norm to within 1e-12."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidArgumentError(f"qubit count must be a positive integer, got {self.n!r}")
        if amps.shape != (1 << self.n,):
            raise InvalidArgumentError(
                f"state for n={self.n} needs {1 << self.n} amplitudes, got {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _UNIT_TOL:
            raise InvalidArgumentError(f"state norm is {norm!r}, not 1 within {_UNIT_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class DensityMatrix:
    """An n-qubit density matrix: Hermitian, unit trace, positive semidefinite."""

    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = np.array(self.entries, dtype=complex)
        dim = 1 << self.n
        if rho.shape != (dim, dim):
            raise InvalidArgumentError(
                f"density matrix for n={self.n} must be {dim}x{dim}, got {rho.shape}"
            )
        if np.max(np.abs(rho - rho.conj().T)) > _HERMITIAN_TOL:
            raise InvalidArgumentError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(rho) - 1.0) > _HERMITIAN_TOL:
            raise InvalidArgumentError("density matrix trace is not 1 within 1e-10")
        if float(np.linalg.eigvalsh(rho)[0]) < -_HERMITIAN_TOL:
            raise InvalidArgumentError("density matrix has an eigenvalue below -1e-10")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)


State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class BellOperator:
    """The Hermitian matrix of a polynomial under a measurement frame."""

    n: int
    entries: np.ndarray
    source: tuple[Polynomial, MeasurementFrame]

    def __post_init__(self) -> None:
        mat = np.array(self.entries, dtype=complex)
        dim = 1 << self.n
        if mat.shape != (dim, dim):
            raise InvalidArgumentError(f"operator must be {dim}x{dim}, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > _HERMITIAN_TOL:
            raise NumericalIntegrityError("Bell operator is not Hermitian within 1e-10")
        limit = float(polynomial.algebraic_limit(self.source[0]))
        eigs = np.linalg.eigvalsh(mat)
        norm = float(max(abs(eigs[0]), abs(eigs[-1]))) if eigs.size else 0.0
        if norm > limit + 1e-9:
            raise NumericalIntegrityError(
                f"operator norm {norm} exceeds the algebraic limit {limit}"
            )
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)


# ---------------------------------------------------------------------------
# Elementary constructions
# ---------------------------------------------------------------------------


def observable(v: UnitVector) -> np.ndarray:
    """The 2x2 spin observable along v; traceless with eigenvalues +/-1."""
    return v.x * _SIGMA[0] + v.y * _SIGMA[1] + v.z * _SIGMA[2]


def _pair_ops(f: MeasurementFrame) -> list[list[np.ndarray]]:
    return [[observable(v), observable(w)] for v, w in f.pairs]


def _bell_matrix(p: Polynomial, ops: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    n = p.n
    total = np.zeros((1 << n, 1 << n), dtype=complex)
    for term, coef in p.terms.items():
        factors = [ops[j][1 if term.primed(j) else 0] for j in range(n)]
        total += float(coef) * reduce(np.kron, factors)
    return total


def bell_operator(p: Polynomial, f: MeasurementFrame) -> BellOperator:
    """Substitute each setting symbol with its observable and sum the products."""
    if p.n != f.n:
        raise InvalidArgumentError(f"polynomial has {p.n} parties, frame has {f.n}")
    return BellOperator(n=p.n, entries=_bell_matrix(p, _pair_ops(f)), source=(p, f))


def ghz(n: int) -> PureState:
    """(|0...0> + |1...1>) / sqrt(2) on n qubits."""
    if not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"ghz requires a qubit count >= 1, got {n!r}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return PureState(n, amps)


def basis_state(n: int, index: int) -> PureState:
    if not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"basis_state requires a qubit count >= 1, got {n!r}")
    if not 0 <= index < (1 << n):
        raise InvalidArgumentError(f"basis index {index} out of range for n={n}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return PureState(n, amps)


def _real_part(value: complex, what: str) -> float:
    if abs(value.imag) > _IMAG_ERROR:
        raise NumericalIntegrityError(
            f"{what} has imaginary residue {value.imag}, above {_IMAG_ERROR}"
        )
    return float(value.real)


def expectation(op: BellOperator, state: State) -> float:
    """<psi|O|psi> for pure states, Tr(rho O) for density matrices."""
    if op.n != state.n:
        raise InvalidArgumentError(f"operator has {op.n} qubits, state has {state.n}")
    if isinstance(state, PureState):
        value = complex(np.vdot(state.amplitudes, op.entries @ state.amplitudes))
    else:
        value = complex(np.trace(state.entries @ op.entries))
    return _real_part(value, "expectation value")


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    return vec * phase.conjugate()


def max_eigenvalue(op: BellOperator) -> tuple[float, PureState]:
    """Largest eigenvalue and a normalized eigenvector (phase-canonicalized)."""
    try:
        eigenvalues, vectors = np.linalg.eigh(op.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalIntegrityError(f"eigensolver failed: {exc}") from exc
    value = float(eigenvalues[-1])
    vec = _canonical_phase(vectors[:, -1])
    residual = float(np.linalg.norm(op.entries @ vec - value * vec))
    if residual > 1e-9:
        raise NumericalIntegrityError(
            f"eigenpair residual {residual} exceeds 1e-9 (dim {vec.size})"
        )
    return value, PureState(op.n, vec)


# ---------------------------------------------------------------------------
# Fast expectation machinery (shared by the public API and the see-saw)
# ---------------------------------------------------------------------------


def _apply_single(op: np.ndarray, psi_t: np.ndarray, party: int) -> np.ndarray:
    out = np.tensordot(op, psi_t, axes=([1], [party]))
    return np.moveaxis(out, 0, party)


def _state_tensors(state: State) -> tuple[np.ndarray, np.ndarray | None]:
    """Return (tensor, flat) for pure states, (tensor, None) for density matrices."""
    if isinstance(state, PureState):
        return state.amplitudes.reshape((2,) * state.n), state.amplitudes
    return state.entries.reshape((2,) * (2 * state.n)), None


def _term_value_pure(
    mask: int, ops: Sequence[Sequence[np.ndarray]], psi_t: np.ndarray, psi: np.ndarray, n: int
) -> complex:
    phi = psi_t
    for j in range(n):
        phi = _apply_single(ops[j][(mask >> j) & 1], phi, j)
    return complex(np.vdot(psi, phi.reshape(-1)))


def _term_value_rho(
    mask: int,
    ops: Sequence[Sequence[np.ndarray]],
    rho_t: np.ndarray,
    n: int,
    override: tuple[int, np.ndarray] | None = None,
) -> complex:
    letters = string.ascii_letters
    rows, cols = letters[:n], letters[n : 2 * n]
    subs = [rows + cols]
    operands: list[np.ndarray] = [rho_t]
    for j in range(n):
        op = ops[j][(mask >> j) & 1]
        if override is not None and override[0] == j:
            op = override[1]
        subs.append(cols[j] + rows[j])
        operands.append(op)
    return complex(np.einsum(",".join(subs) + "->", *operands, optimize=True))


def _frame_expectation(
    p: Polynomial, ops: Sequence[Sequence[np.ndarray]], state: State
) -> float:
    tensor, flat = _state_tensors(state)
    total = 0.0 + 0.0j
    for term, coef in p.terms.items():
        if flat is not None:
            val = _term_value_pure(term.prime_mask, ops, tensor, flat, p.n)
        else:
            val = _term_value_rho(term.prime_mask, ops, tensor, p.n)
        total += float(coef) * val
    return _real_part(total, "expectation value")


def _effective_field(
    p: Polynomial,
    ops: Sequence[Sequence[np.ndarray]],
    state: State,
    party: int,
    primed: bool,
) -> np.ndarray:
    """The 3-vector g with expectation = g . v + (terms not using this setting)."""
    n = p.n
    want = 1 if primed else 0
    tensor, flat = _state_tensors(state)
    g = np.zeros(3)
    if flat is not None:
        acc = np.zeros_like(tensor)
        for term, coef in p.terms.items():
            if ((term.prime_mask >> party) & 1) != want:
                continue
            phi = tensor
            for j in range(n):
                if j == party:
                    continue
                phi = _apply_single(ops[j][(term.prime_mask >> j) & 1], phi, j)
            acc = acc + float(coef) * phi
        for w in range(3):
            val = complex(np.vdot(flat, _apply_single(_SIGMA[w], acc, party).reshape(-1)))
            g[w] = _real_part(val, "effective Bloch component")
    else:
        for w in range(3):
            total = 0.0 + 0.0j
            for term, coef in p.terms.items():
                if ((term.prime_mask >> party) & 1) != want:
                    continue
                total += float(coef) * _term_value_rho(
                    term.prime_mask, ops, tensor, n, override=(party, _SIGMA[w])
                )
            g[w] = _real_part(total, "effective Bloch component")
    return g


def effective_bloch(
    p: Polynomial, f: MeasurementFrame, state: State, party: int, primed: bool
) -> np.ndarray:
    """Gradient of the expectation with respect to one setting's Bloch vector."""
    if p.n != f.n:
        raise InvalidArgumentError(f"polynomial has {p.n} parties, frame has {f.n}")
    if p.n != state.n:
        raise InvalidArgumentError(f"polynomial has {p.n} parties, state has {state.n}")
    if not 0 <= party < p.n:
        raise InvalidArgumentError(f"party index {party} out of range for n={p.n}")
    return _effective_field(p, _pair_ops(f), state, party, bool(primed))


# ---------------------------------------------------------------------------
# Randomized starting points
# ---------------------------------------------------------------------------


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def random_frame(n: int, rng: np.random.Generator) -> MeasurementFrame:
    """A frame of independent uniformly random directions."""
    return MeasurementFrame(
        tuple(
            (UnitVector.from_array(_random_unit(rng)), UnitVector.from_array(_random_unit(rng)))
            for _ in range(n)
        )
    )


def random_state(n: int, rng: np.random.Generator) -> PureState:
    """A Haar-random pure state on n qubits."""
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return PureState(n, amps / np.linalg.norm(amps))


def _raw_random_vectors(n: int, rng: np.random.Generator) -> list[list[np.ndarray]]:
    return [[_random_unit(rng), _random_unit(rng)] for _ in range(n)]


def _vectors_to_frame(vectors: Sequence[Sequence[np.ndarray]]) -> MeasurementFrame:
    return MeasurementFrame(
        tuple(
            (UnitVector.from_array(pair[0]), UnitVector.from_array(pair[1]))
            for pair in vectors
        )
    )


def _ops_from_vectors(vectors: Sequence[Sequence[np.ndarray]]) -> list[list[np.ndarray]]:
    return [
        [np.tensordot(pair[0], _SIGMA, axes=(0, 0)), np.tensordot(pair[1], _SIGMA, axes=(0, 0))]
        for pair in vectors
    ]


# ---------------------------------------------------------------------------
# See-saw ascent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeesawResult:
    frame: MeasurementFrame
    value: float
    history: tuple[float, ...]


@dataclass(frozen=True)
class QuantumMaxResult:
    value: float
    frame: MeasurementFrame
    state: PureState


@dataclass(frozen=True)
class BlockProductResult:
    value: float
    frame: MeasurementFrame
    block_states: tuple[PureState, PureState]


def _settings_sweep(
    p: Polynomial,
    vectors: list[list[np.ndarray]],
    ops: list[list[np.ndarray]],
    state: State,
    history: list[float] | None,
) -> float:
    value = math.nan
    for j in range(p.n):
        for s in (0, 1):
            g = _effective_field(p, ops, state, j, bool(s))
            norm = float(np.linalg.norm(g))
            if norm > 1e-14:
                vectors[j][s] = g / norm
                ops[j][s] = np.tensordot(vectors[j][s], _SIGMA, axes=(0, 0))
            # degenerate coordinate: keep the previous setting
            value = _frame_expectation(p, ops, state)
            if history is not None:
                history.append(value)
    return value


def seesaw(
    p: Polynomial,
    state: State,
    restarts: int = DEFAULT_RESTARTS,
    *,
    seed: int,
    tol: float = DEFAULT_SEESAW_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SeesawResult:
    """Coordinate ascent over measurement directions for a fixed state.

    Each update replaces one setting's vector by its normalized effective
    field, the exact optimum for that coordinate, so the objective never
    decreases within a restart.  The best frame over `restarts` seeded random
    starting frames is returned, together with the per-update value history of
    the winning restart.
    """
    if p.n != state.n:
        raise InvalidArgumentError(f"polynomial has {p.n} parties, state has {state.n}")
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    best: SeesawResult | None = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        vectors = _raw_random_vectors(p.n, rng)
        ops = _ops_from_vectors(vectors)
        history: list[float] = [_frame_expectation(p, ops, state)]
        value = history[0]
        for _ in range(max_sweeps):
            before = value
            value = _settings_sweep(p, vectors, ops, state, history)
            if value - before < tol:
                break
        if best is None or value > best.value:
            best = SeesawResult(
                frame=_vectors_to_frame(vectors), value=value, history=tuple(history)
            )
    assert best is not None
    return best


def quantum_max(
    p: Polynomial,
    restarts: int = DEFAULT_RESTARTS,
    *,
    seed: int,
    cap: int = DEFAULT_SPECTRAL_CAP,
    tol: float = DEFAULT_SEESAW_TOL,
    max_rounds: int = DEFAULT_MAX_SWEEPS,
) -> QuantumMaxResult:
    """Joint maximum over states and settings.

    Alternates a state step (top eigenvector of the current Bell operator)
    with one see-saw sweep of the settings, until the joint improvement drops
    below `tol`.  A final state step makes the returned state an exact top
    eigenvector of the returned frame's operator.
    """
    if p.n > cap:
        raise ResourceLimitError(
            f"spectral computation for n={p.n} exceeds the cap n <= {cap} "
            f"(--spectral-cap)"
        )
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    best: QuantumMaxResult | None = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        vectors = _raw_random_vectors(p.n, rng)
        ops = _ops_from_vectors(vectors)
        value = -math.inf
        state: PureState | None = None
        for _ in range(max_rounds):
            eigenvalues, eigvecs = np.linalg.eigh(_bell_matrix(p, ops))
            state = PureState(p.n, _canonical_phase(eigvecs[:, -1]))
            swept = _settings_sweep(p, vectors, ops, state, None)
            if swept - value < tol:
                value = swept
                break
            value = swept
        eigenvalues, eigvecs = np.linalg.eigh(_bell_matrix(p, ops))
        value = float(eigenvalues[-1])
        state = PureState(p.n, _canonical_phase(eigvecs[:, -1]))
        if best is None or value > best.value:
            best = QuantumMaxResult(value=value, frame=_vectors_to_frame(vectors), state=state)
    assert best is not None
    return best


def _partial_matrix(
    matrix: np.ndarray,
    n: int,
    keep: tuple[int, ...],
    other: tuple[int, ...],
    phi_other: np.ndarray,
) -> np.ndarray:
    """<phi_other| M |phi_other> taken over `other`, leaving an operator on `keep`."""
    letters = string.ascii_letters
    rows, cols = letters[:n], letters[n : 2 * n]
    tensor = matrix.reshape((2,) * (2 * n))
    phi_t = phi_other.reshape((2,) * len(other))
    sub = (
        rows + cols
        + ","
        + "".join(rows[j] for j in other)
        + ","
        + "".join(cols[j] for j in other)
        + "->"
        + "".join(rows[j] for j in keep)
        + "".join(cols[j] for j in keep)
    )
    out = np.einsum(sub, tensor, phi_t.conj(), phi_t, optimize=True)
    dim = 1 << len(keep)
    return out.reshape(dim, dim)


def _embed_product(
    phi_a: np.ndarray, a: tuple[int, ...], phi_b: np.ndarray, b: tuple[int, ...], n: int
) -> np.ndarray:
    letters = string.ascii_letters
    sub = (
        "".join(letters[j] for j in a)
        + ","
        + "".join(letters[j] for j in b)
        + "->"
        + letters[:n]
    )
    out = np.einsum(sub, phi_a.reshape((2,) * len(a)), phi_b.reshape((2,) * len(b)))
    return out.reshape(-1)


def block_product_max(
    p: Polynomial,
    block: Sequence[int],
    restarts: int = DEFAULT_RESTARTS,
    *,
    seed: int,
    cap: int = DEFAULT_SPECTRAL_CAP,
    tol: float = DEFAULT_SEESAW_TOL,
    max_rounds: int = DEFAULT_MAX_SWEEPS,
) -> BlockProductResult:
    """Maximum over states constrained to a product across one bipartition.

    `block` lists the 0-based parties of block A; block B is the complement.
    State steps diagonalize the effective operator of one block given the
    other block's state, so the ascent stays inside the product-state family.
    """
    if p.n > cap:
        raise ResourceLimitError(
            f"spectral computation for n={p.n} exceeds the cap n <= {cap} "
            f"(--spectral-cap)"
        )
    a = tuple(sorted(block))
    if not a or any(not 0 <= j < p.n for j in a) or len(set(a)) != len(a):
        raise InvalidArgumentError(f"invalid block parties {block!r} for n={p.n}")
    b = tuple(j for j in range(p.n) if j not in a)
    if not b:
        raise InvalidArgumentError("block must be a proper subset of the parties")
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    best: BlockProductResult | None = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        vectors = _raw_random_vectors(p.n, rng)
        ops = _ops_from_vectors(vectors)
        phi_a = random_state(len(a), rng).amplitudes
        phi_b = random_state(len(b), rng).amplitudes
        value = -math.inf
        for _ in range(max_rounds):
            matrix = _bell_matrix(p, ops)
            op_a = _partial_matrix(matrix, p.n, a, b, phi_b)
            _, vecs = np.linalg.eigh(op_a)
            phi_a = _canonical_phase(vecs[:, -1])
            op_b = _partial_matrix(matrix, p.n, b, a, phi_a)
            eigs_b, vecs = np.linalg.eigh(op_b)
            phi_b = _canonical_phase(vecs[:, -1])
            state = PureState(p.n, _embed_product(phi_a, a, phi_b, b, p.n))
            swept = _settings_sweep(p, vectors, ops, state, None)
            if swept - value < tol:
                value = swept
                break
            value = swept
        if best is None or value > best.value:
            best = BlockProductResult(
                value=value,
                frame=_vectors_to_frame(vectors),
                block_states=(PureState(len(a), phi_a), PureState(len(b), phi_b)),
            )
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Text interfaces
# ---------------------------------------------------------------------------


def frame_to_text(f: MeasurementFrame) -> str:
    """Header `n=<count>`, then per party two lines of three reals (plain, primed)."""
    lines = [f"n={f.n}"]
    for v, w in f.pairs:
        lines.append(f"{v.x!r} {v.y!r} {v.z!r}")
        lines.append(f"{w.x!r} {w.y!r} {w.z!r}")
    return "\n".join(lines)


def frame_from_text(text: str) -> MeasurementFrame:
    rows: list[tuple[np.ndarray, int]] = []
    n: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise DataFormatError("frame file must start with an n=<count> header", line=lineno)
            try:
                n = int(line[2:])
            except ValueError as exc:
                raise DataFormatError(f"bad frame header {line!r}", line=lineno) from exc
            if n < 1:
                raise DataFormatError("frame party count must be >= 1", line=lineno)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataFormatError(f"expected three reals, got {line!r}", line=lineno)
        try:
            vec = np.array([float(x) for x in parts])
        except ValueError as exc:
            raise DataFormatError(f"bad vector component in {line!r}", line=lineno) from exc
        rows.append((vec, lineno))
    if n is None:
        raise DataFormatError("empty frame file")
    if len(rows) != 2 * n:
        raise DataFormatError(f"frame for n={n} needs {2 * n} vector lines, got {len(rows)}")
    pairs = []
    for j in range(n):
        pair = []
        for s in (0, 1):
            vec, lineno = rows[2 * j + s]
            try:
                pair.append(UnitVector(float(vec[0]), float(vec[1]), float(vec[2])))
            except InvalidArgumentError as exc:
                raise DataFormatError(str(exc), line=lineno) from exc
        pairs.append(tuple(pair))
    return MeasurementFrame(tuple(pairs))


def parse_state(spec: str) -> PureState:
    """State specifications: `ghz:n`, `basis:n:index`, or `file:<path>`.

    A state file lists the 2**n amplitudes, one `re im` pair per line, in
    basis order.
    """
    parts = spec.split(":", 1)
    if parts[0] == "ghz":
        try:
            return ghz(int(parts[1]))
        except (IndexError, ValueError) as exc:
            raise DataFormatError(f"bad state spec {spec!r} (want ghz:n)") from exc
    if parts[0] == "basis":
        try:
            _, n_text, idx_text = spec.split(":")
            return basis_state(int(n_text), int(idx_text))
        except (ValueError, InvalidArgumentError) as exc:
            raise DataFormatError(f"bad state spec {spec!r} (want basis:n:index)") from exc
    if parts[0] == "file":
        if len(parts) != 2 or not parts[1]:
            raise DataFormatError(f"bad state spec {spec!r} (want file:<path>)")
        try:
            with open(parts[1], "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise DataFormatError(f"cannot read state file {parts[1]!r}: {exc}") from exc
        return _state_from_text(text)
    raise DataFormatError(f"unknown state spec {spec!r} (want ghz:, basis:, or file:)")


def _state_from_text(text: str) -> PureState:
    amps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataFormatError(f"expected `re im`, got {line!r}", line=lineno)
        try:
            amps.append(complex(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise DataFormatError(f"bad amplitude in {line!r}", line=lineno) from exc
    count = len(amps)
    if count < 2 or count & (count - 1):
        raise DataFormatError(f"state file must list a power-of-two amplitude count, got {count}")
    try:
        return PureState(count.bit_length() - 1, np.array(amps))
    except InvalidArgumentError as exc:
        raise DataFormatError(str(exc)) from exc
