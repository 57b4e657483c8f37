"""Canonical and random state constructors.

Canonical states reproduce the worked examples: the two-mode singlet and
Werner family, the Majorana-dimer mixed state, the fermionic W and GHZ states,
the three-Majorana mixed state, the GHZ/W interpolation family, and general
two- and three-mode pure states parametrized by their sector amplitudes.

Random constructors sample Haar pure states within a parity sector, full-rank
physical density matrices (optionally constrained to commute or visibly fail
to commute with a subsystem parity operator), and convex mixtures of graded
products of local parity-even density matrices.  All constructors are
deterministic given a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LayoutError, SamplingError, StateValidationError
from .fock import (
    FockOperator,
    ModeLayout,
    SubsystemSpec,
    _inverse_order,
    _permute_matrix,
    as_spec,
    basis_vector,
    creation_op,
    majorana_op,
    parity_op,
)

#: Commutator norm above which a sampled state counts as type II.
TYPE_II_THRESHOLD = 1e-6

_RESAMPLE_BUDGET = 1000

PARITY_SECTORS = ("even", "odd")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class PureCoeffs:
    """Sector amplitudes of a two- or three-mode pure state.

    ``lambdas`` has length 2 (two modes) or 4 (three modes) and must be
    normalized; ``parity_sector`` selects the even or odd branch of the
    parametrization.
    """

    lambdas: tuple[complex, ...]
    parity_sector: str

    def __post_init__(self):
        lams = tuple(complex(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if len(lams) not in (2, 4):
            raise StateValidationError("lambdas must have length 2 or 4")
        if self.parity_sector not in PARITY_SECTORS:
            raise StateValidationError(f"parity_sector must be one of {PARITY_SECTORS}")
        if abs(sum(abs(x) ** 2 for x in lams) - 1.0) > 1e-10:
            raise StateValidationError("lambdas are not normalized")

    @property
    def num_modes(self) -> int:
        return 2 if len(self.lambdas) == 2 else 3


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size:
        vec = vec * (np.abs(vec[nz[0]]) / vec[nz[0]])
    return vec


def _density(layout: ModeLayout, vec: np.ndarray) -> FockOperator:
    return FockOperator(layout, np.outer(vec, vec.conj()), copy=False)


def _two_mode_pure_vector(coeffs: PureCoeffs) -> np.ndarray:
    l0, l1 = coeffs.lambdas
    vec = np.zeros(4, dtype=complex)
    if coeffs.parity_sector == "even":
        vec[0b00] = l0  # |00>
        vec[0b11] = l1  # f1+ f2+ |0>
    else:
        vec[0b01] = l0  # f1+ |0>
        vec[0b10] = l1  # f2+ |0>
    return vec


def _three_mode_pure_vector(coeffs: PureCoeffs) -> np.ndarray:
    l0, l1, l2, l3 = coeffs.lambdas
    vec = np.zeros(8, dtype=complex)
    if coeffs.parity_sector == "even":
        vec[0b000] = l0
        vec[0b011] = l1  # f1+ f2+ |0>
        vec[0b110] = l2  # f2+ f3+ |0>
        vec[0b101] = l3  # f1+ f3+ |0>
    else:
        vec[0b100] = l0  # f3+ |0>
        vec[0b111] = l1  # f1+ f2+ f3+ |0>
        vec[0b010] = l2  # f2+ |0>
        vec[0b001] = l3  # f1+ |0>
    return vec


def pure_vector_from_coeffs(coeffs: PureCoeffs) -> tuple[np.ndarray, ModeLayout]:
    if coeffs.num_modes == 2:
        return _two_mode_pure_vector(coeffs), ModeLayout.bipartite(1, 1)
    return _three_mode_pure_vector(coeffs), ModeLayout.tripartite()


def _w_vector() -> np.ndarray:
    vec = np.zeros(8, dtype=complex)
    vec[0b001] = vec[0b010] = vec[0b100] = 1.0 / np.sqrt(3.0)
    return vec


def _ghz_vector() -> np.ndarray:
    vec = np.zeros(8, dtype=complex)
    vec[0b001] = vec[0b010] = vec[0b100] = vec[0b111] = 0.5
    return vec


def canonical_vector(name: str, **params) -> tuple[np.ndarray, ModeLayout]:
    """State vector and layout for the named pure canonical state.

    Supported names: ``singlet``, ``w``, ``ghz``, ``psi_p`` (``p``),
    ``two_mode_pure`` and ``three_mode_pure`` (``lambdas``, ``parity``).
    The global phase is fixed by making the first nonzero amplitude real
    and positive.
    """
    if name == "singlet":
        vec = np.zeros(4, dtype=complex)
        vec[0b01] = 1.0 / np.sqrt(2.0)
        vec[0b10] = -1.0 / np.sqrt(2.0)
        return _fix_phase(vec), ModeLayout.bipartite(1, 1)
    if name == "w":
        return _w_vector(), ModeLayout.tripartite()
    if name == "ghz":
        return _ghz_vector(), ModeLayout.tripartite()
    if name == "psi_p":
        p = float(params["p"])
        if not 0.0 <= p <= 1.0:
            raise StateValidationError(f"psi_p parameter must be in [0, 1], got {p}")
        vec = np.sqrt(p) * _ghz_vector() - np.sqrt(1.0 - p) * _w_vector()
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise StateValidationError("psi_p superposition collapsed to zero")
        return _fix_phase(vec / norm), ModeLayout.tripartite()
    if name in ("two_mode_pure", "three_mode_pure"):
        coeffs = PureCoeffs(tuple(params["lambdas"]), params["parity"])
        want = 2 if name == "two_mode_pure" else 3
        if coeffs.num_modes != want:
            raise StateValidationError(f"{name} expects {2 * want - 2} amplitudes")
        vec, layout = pure_vector_from_coeffs(coeffs)
        return _fix_phase(vec), layout
    raise ValueError(f"unknown pure canonical state {name!r}")


def majorana_dimer_state() -> FockOperator:
    """The rank-two mixed state of two tunnel-coupled Majorana modes.

    Equals ``(1 + i c_2 c_3)/4`` in this package's Majorana labelling; all
    eight nonzero matrix entries are 1/4.
    """
    mat = np.array(
        [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=complex
    ) / 4.0
    return FockOperator(ModeLayout.bipartite(1, 1), mat, copy=False)


def majorana_triple_state() -> FockOperator:
    """Uniform mixture over the ground space of three cyclically coupled Majoranas.

    One Majorana per party enters the coupling; the partner Majoranas are
    traced uniformly, leaving ``(1/8)[1 + (i/sqrt(3))(m1 m2 + m2 m3 + m3 m1)]``
    with ``m_j`` the first Majorana of mode ``j``.
    """
    layout = ModeLayout.tripartite()
    m1 = majorana_op(layout, 1).matrix
    m2 = majorana_op(layout, 3).matrix
    m3 = majorana_op(layout, 5).matrix
    mat = (np.eye(8) + 1j / np.sqrt(3.0) * (m1 @ m2 + m2 @ m3 + m3 @ m1)) / 8.0
    return FockOperator(layout, mat, copy=False)


def canonical_state(name: str, **params) -> FockOperator:
    """Density matrix of a named canonical state.

    Names: ``singlet``, ``werner`` (``p``), ``majorana_dimer``, ``w``, ``ghz``,
    ``majorana_triple``, ``psi_p`` (``p``), ``two_mode_pure`` and
    ``three_mode_pure`` (``lambdas``, ``parity``).
    """
    if name == "werner":
        p = float(params["p"])
        if not 0.0 <= p <= 1.0:
            raise StateValidationError(f"Werner parameter must be in [0, 1], got {p}")
        vec, layout = canonical_vector("singlet")
        mat = (1.0 - p) / 4.0 * np.eye(4) + p * np.outer(vec, vec.conj())
        return FockOperator(layout, mat, copy=False)
    if name == "majorana_dimer":
        return majorana_dimer_state()
    if name == "majorana_triple":
        return majorana_triple_state()
    vec, layout = canonical_vector(name, **params)
    return _density(layout, vec)


def biseparable_example(alpha: complex = 0.8) -> FockOperator:
    """Equal mixture of ``f_1^+ |Psi_+>`` and ``|Psi_->`` with
    ``|Psi_+-> = (1 +- alpha f_2^+ f_3^+)|0>`` (normalized).

    Biseparable across ``A`` vs ``BC`` for any ``alpha``, with entangled
    ``B(AC)`` and ``C(AB)`` cuts for ``alpha != 0``, yet the reduced BC state
    is separable.
    """
    layout = ModeLayout.tripartite()
    vac = basis_vector(layout, (0, 0, 0))
    f1 = creation_op(layout, 1).matrix
    f2 = creation_op(layout, 2).matrix
    f3 = creation_op(layout, 3).matrix
    norm = 1.0 / np.sqrt(1.0 + abs(alpha) ** 2)
    psi_plus = norm * (vac + alpha * f2 @ f3 @ vac)
    psi_minus = norm * (vac - alpha * f2 @ f3 @ vac)
    top = f1 @ psi_plus
    mat = 0.5 * (np.outer(top, top.conj()) + np.outer(psi_minus, psi_minus.conj()))
    return FockOperator(layout, mat, copy=False)


# -- random constructors ----------------------------------------------------------


def _global_parities(layout: ModeLayout) -> np.ndarray:
    return np.real(np.diag(parity_op(layout).matrix))


def random_pure_vector(layout: ModeLayout, parity_sector: str, seed) -> np.ndarray:
    """Haar-uniform unit vector supported on one global parity sector."""
    if parity_sector not in PARITY_SECTORS:
        raise StateValidationError(f"parity_sector must be one of {PARITY_SECTORS}")
    rng = _rng(seed)
    signs = _global_parities(layout)
    support = signs > 0 if parity_sector == "even" else signs < 0
    vec = np.zeros(layout.dim, dtype=complex)
    k = int(support.sum())
    vec[support] = rng.normal(size=k) + 1j * rng.normal(size=k)
    return _fix_phase(vec / np.linalg.norm(vec))


def random_pure(layout: ModeLayout, parity_sector: str, seed) -> FockOperator:
    """Density matrix of a Haar-random parity-sector pure state."""
    return _density(layout, random_pure_vector(layout, parity_sector, seed))


def _block_gaussian(rng: np.random.Generator, allowed: np.ndarray) -> np.ndarray:
    dim = allowed.shape[0]
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return np.where(allowed, g, 0.0)


def random_density(
    layout: ModeLayout,
    seed,
    constraint: str = "any_physical",
    spec: SubsystemSpec | None = None,
) -> FockOperator:
    """Full-rank random physical density matrix ``G G^+ / Tr``.

    ``constraint`` is ``any_physical`` (globally parity-even), ``type_I``
    (additionally commutes with the spec's subsystem parity, built block
    diagonal in that eigenbasis) or ``type_II`` (guaranteed commutator
    max-norm above :data:`TYPE_II_THRESHOLD`, resampled otherwise).
    """
    rng = _rng(seed)
    glob = _global_parities(layout)
    allowed = np.equal.outer(glob, glob)
    if constraint == "any_physical":
        g = _block_gaussian(rng, allowed)
        mat = g @ g.conj().T
        return FockOperator(layout, mat / np.trace(mat), copy=False)
    if spec is None:
        raise LayoutError(f"constraint {constraint!r} requires a subsystem spec")
    spec = as_spec(spec)
    spec.validate(layout)
    sub = np.real(np.diag(parity_op(layout, spec).matrix))
    if constraint == "type_I":
        g = _block_gaussian(rng, allowed & np.equal.outer(sub, sub))
        mat = g @ g.conj().T
        return FockOperator(layout, mat / np.trace(mat), copy=False)
    if constraint == "type_II":
        for _ in range(_RESAMPLE_BUDGET):
            g = _block_gaussian(rng, allowed)
            mat = g @ g.conj().T
            mat /= np.trace(mat)
            comm = sub[:, None] * mat - mat * sub[None, :]  # diag(sub) @ m - m @ diag(sub)
            if np.abs(comm).max() > TYPE_II_THRESHOLD:
                return FockOperator(layout, mat, copy=False)
        raise SamplingError("type_II resampling budget exhausted")
    raise ValueError(f"unknown constraint {constraint!r}")


def subsystem_parity_commutator_norm(rho: FockOperator, spec: SubsystemSpec) -> float:
    """Max-norm of ``[(-1)^{F_spec}, rho]``."""
    spec = as_spec(spec)
    spec.validate(rho.layout)
    sub = np.real(np.diag(parity_op(rho.layout, spec).matrix))
    comm = sub[:, None] * rho.matrix - rho.matrix * sub[None, :]
    return float(np.abs(comm).max())


def random_separable(
    layout: ModeLayout,
    spec,
    num_terms: int,
    seed,
) -> FockOperator:
    """Convex mixture of graded products of local parity-even density matrices.

    ``spec`` is either a single subsystem spec (the complement forms the second
    factor) or an iterable of specs partitioning all modes.  Mixture weights
    are drawn uniformly from the simplex.
    """
    if num_terms < 1:
        raise ValueError("num_terms must be at least 1")
    rng = _rng(seed)
    if isinstance(spec, SubsystemSpec) or (spec and isinstance(next(iter(spec)), int)):
        first = as_spec(spec)
        parts = [first, first.complement(layout)]
    else:
        parts = [as_spec(s) for s in spec]
    covered = sorted(m for part in parts for m in part.target_modes)
    if covered != list(range(1, layout.num_modes + 1)):
        raise LayoutError("partition must cover every mode exactly once")
    build_order = tuple(m for part in parts for m in part.sorted_modes())
    weights = rng.dirichlet(np.ones(num_terms))
    dim = layout.dim
    total = np.zeros((dim, dim), dtype=complex)
    sub_layouts = [ModeLayout(len(part), ("A",) * len(part)) for part in parts]
    for w in weights:
        term = np.ones((1, 1), dtype=complex)
        for sub in sub_layouts:
            factor = random_density(sub, rng).matrix
            term = np.kron(factor, term)  # later parts occupy higher bits
        total += w * term
    if build_order != tuple(range(1, layout.num_modes + 1)):
        total = _permute_matrix(total, layout.num_modes, _inverse_order(build_order))
    return FockOperator(layout, total, copy=False)


def random_biseparable(
    layout: ModeLayout,
    spec,
    num_terms: int,
    seed,
    min_witness: float = 1e-4,
) -> FockOperator:
    """Mixture ``sum_i w_i rho_spec,i (x) rho_rest,i`` with entangled remainder.

    The remainder factors are unconstrained physical density matrices, so the
    state is biseparable across ``spec`` vs the rest by construction; samples
    whose remaining one-vs-rest negativities fall below ``min_witness`` are
    rejected so the biseparable class witnesses are strictly positive.
    """
    from .measures import negativity  # deferred: measures sits above states

    if num_terms < 1:
        raise ValueError("num_terms must be at least 1")
    rng = _rng(seed)
    first = as_spec(spec)
    first.validate(layout)
    rest = first.complement(layout)
    build_order = first.sorted_modes() + rest.sorted_modes()
    sub_a = ModeLayout(len(first), ("A",) * len(first))
    sub_b = ModeLayout(len(rest), ("A",) * len(rest))
    other_labels = [lab for lab in layout.subsystems
                    if set(layout.modes_with_label(lab)) - set(first.target_modes)]
    for _ in range(_RESAMPLE_BUDGET):
        weights = rng.dirichlet(np.ones(num_terms))
        dim = layout.dim
        total = np.zeros((dim, dim), dtype=complex)
        for w in weights:
            fa = random_density(sub_a, rng).matrix
            fb = random_density(sub_b, rng).matrix
            total += w * np.kron(fb, fa)
        if build_order != tuple(range(1, layout.num_modes + 1)):
            total = _permute_matrix(total, layout.num_modes, _inverse_order(build_order))
        rho = FockOperator(layout, total, copy=False)
        witnesses = [
            negativity(rho, layout.spec(lab)) for lab in other_labels
        ]
        if all(w > min_witness for w in witnesses):
            return rho
    raise SamplingError("biseparable witness resampling budget exhausted")
