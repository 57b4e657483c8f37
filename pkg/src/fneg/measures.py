"""Entanglement measures: trace norm, negativities, moments, entropies,
mutual information, and the four tripartite quantities.

Bipartite measures take a density matrix together with the subsystem spec that
is transposed; ``flavor`` selects the fermionic or the bosonic partial
transpose.  Tripartite measures assume a layout with the three labels
``A``, ``B``, ``C`` and use the one-vs-rest and pairwise-reduced negativities.

Conventions: ``N = (|rho^{T_A}|_1 - 1)/2`` and ``E = log |rho^{T_A}|_1`` with the
natural logarithm, so ``E = log(2 N + 1)`` identically.  Renyi entropies use the
logarithmic form ``S_n = log(Tr rho^n)/(1 - n)``, which is the one consistent
with the half-Renyi identity ``E = S_{1/2}(rho_A)`` for pure states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import StateValidationError
from .fock import FLAG_TOL, FockOperator, SubsystemSpec, as_spec
from .ptranspose import parity_project, partial_trace, partial_transpose

#: Singular values below this are treated as exact zeros of rank-deficient states.
SINGULAR_FLOOR = 1e-13

FLAVORS = ("fermionic", "bosonic")


def _check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise ValueError(f"transpose flavor must be one of {FLAVORS}, got {flavor!r}")
    return flavor


@dataclass(frozen=True)
class MeasureReport:
    """Named scalar results with the tolerance and transpose flavor used."""

    entries: Mapping[str, float]
    tolerance: float
    transpose_flavor: str

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        ent = self.entries
        if "negativity" in ent and ent["negativity"] < -self.tolerance:
            raise StateValidationError("negativity below -tolerance")
        if "negativity" in ent and "log_negativity" in ent:
            expected = float(np.log(2.0 * max(ent["negativity"], 0.0) + 1.0))
            if abs(ent["log_negativity"] - expected) > 10 * self.tolerance + 1e-12:
                raise StateValidationError("log_negativity inconsistent with negativity")

    def __getitem__(self, key: str) -> float:
        return self.entries[key]


def singular_values(op: FockOperator | np.ndarray) -> np.ndarray:
    """Singular values ``sqrt(eig(A A^+))`` in descending order.

    Evaluated by direct SVD: squaring into ``A A^+`` before diagonalizing
    inflates the absolute error of vanishing singular values to sqrt(machine
    epsilon), which would swamp the 1e-10 zero tests on rank-deficient states.
    """
    mat = op.matrix if isinstance(op, FockOperator) else np.asarray(op)
    return np.linalg.svd(mat, compute_uv=False)


def trace_norm(op: FockOperator | np.ndarray) -> float:
    """Trace norm ``Tr sqrt(A A^+)`` (sum of singular values)."""
    return float(singular_values(op).sum())


def _validated_pt(rho: FockOperator, spec, flavor: str, tol: float) -> FockOperator:
    _check_flavor(flavor)
    rho.require_density_matrix(tol, require_parity=(flavor == "fermionic"))
    return partial_transpose(rho, as_spec(spec), flavor)


def negativity(
    rho: FockOperator, spec: SubsystemSpec, flavor: str = "fermionic", tol: float = FLAG_TOL
) -> float:
    """Entanglement negativity ``(|rho^{T_A}|_1 - 1)/2`` for the chosen flavor."""
    return (trace_norm(_validated_pt(rho, spec, flavor, tol)) - 1.0) / 2.0


def log_negativity(
    rho: FockOperator, spec: SubsystemSpec, flavor: str = "fermionic", tol: float = FLAG_TOL
) -> float:
    """Logarithmic negativity ``log |rho^{T_A}|_1``."""
    return float(np.log(trace_norm(_validated_pt(rho, spec, flavor, tol))))


def bipartite_report(
    rho: FockOperator, spec: SubsystemSpec, flavor: str = "fermionic", tol: float = FLAG_TOL
) -> MeasureReport:
    """Negativity and logarithmic negativity in one report."""
    norm = trace_norm(_validated_pt(rho, spec, flavor, tol))
    return MeasureReport(
        {"negativity": (norm - 1.0) / 2.0, "log_negativity": float(np.log(norm))},
        tolerance=tol,
        transpose_flavor=flavor,
    )


def pt_moment(
    rho: FockOperator, spec: SubsystemSpec, n: int, flavor: str = "fermionic",
    tol: float = FLAG_TOL,
) -> float:
    """Moment ``E_n = log Tr(rho^{T_A} rho^{T_A +} ...)`` with ``n`` alternating factors.

    Even ``n`` ends on the adjoint factor, odd ``n`` on the plain transpose.
    """
    if n < 1:
        raise ValueError("moment order n must be a positive integer")
    t = _validated_pt(rho, spec, flavor, tol).matrix
    tdag = t.conj().T
    prod = np.eye(t.shape[0], dtype=complex)
    for i in range(n):
        prod = prod @ (t if i % 2 == 0 else tdag)
    val = complex(np.trace(prod))
    if abs(val.imag) > 1e-9:
        raise StateValidationError(f"moment trace has non-real value {val}")
    return float(np.log(val.real))


def entropy(rho: FockOperator, order="vN", tol: float = FLAG_TOL) -> float:
    """Von Neumann (``order='vN'``) or Renyi entropy ``log(Tr rho^n)/(1-n)``."""
    rho.require_density_matrix(tol, require_parity=False)
    evals = np.clip(np.linalg.eigvalsh(rho.matrix), 0.0, None)
    if order == "vN":
        nz = evals[evals > SINGULAR_FLOOR]
        return float(-(nz * np.log(nz)).sum())
    n = float(order)
    if n <= 0:
        raise ValueError("Renyi order must be positive")
    if n == 1.0:
        raise ValueError("Renyi order 1 is the von Neumann limit; pass order='vN'")
    if n < 1.0:
        evals = evals[evals > SINGULAR_FLOOR]
    return float(np.log((evals**n).sum()) / (1.0 - n))


def mutual_information(
    rho: FockOperator, spec: SubsystemSpec, order="vN", tol: float = FLAG_TOL
) -> float:
    """Mutual information ``S(rho_A) + S(rho_B) - S(rho)`` across spec vs complement."""
    spec = as_spec(spec)
    spec.validate(rho.layout)
    rho_a = partial_trace(rho, spec)
    rho_b = partial_trace(rho, spec.complement(rho.layout))
    return entropy(rho_a, order, tol) + entropy(rho_b, order, tol) - entropy(rho, order, tol)


# -- tripartite machinery ---------------------------------------------------------


def _tri_specs(rho: FockOperator) -> dict[str, SubsystemSpec]:
    layout = rho.layout
    if set(layout.subsystems) != {"A", "B", "C"}:
        raise StateValidationError(
            f"tripartite measures need labels A, B, C; layout has {layout.subsystems}"
        )
    return {lab: layout.spec(lab) for lab in ("A", "B", "C")}


def one_vs_rest_negativities(
    rho: FockOperator, flavor: str = "fermionic", tol: float = FLAG_TOL
) -> dict[str, float]:
    """``{party: N_{party(rest)}}`` for the three one-vs-rest bipartitions."""
    specs = _tri_specs(rho)
    return {lab: negativity(rho, spec, flavor, tol) for lab, spec in specs.items()}


def pairwise_negativity(
    rho: FockOperator, first: str, second: str, flavor: str = "fermionic",
    tol: float = FLAG_TOL,
) -> float:
    """Negativity of the reduced two-party state, transposing the first party."""
    specs = _tri_specs(rho)
    keep = SubsystemSpec(specs[first].target_modes + specs[second].target_modes)
    reduced = partial_trace(rho, keep)
    return negativity(reduced, reduced.layout.spec(first), flavor, tol)


@dataclass(frozen=True)
class SectorNegativities:
    """Even/odd projected reduced negativities entering ``J_ABC``."""

    even: float
    odd: float
    even_weight: float
    odd_weight: float
    degenerate_sector: bool = field(default=False)

    @property
    def product(self) -> float:
        return self.even * self.odd


def j_abc_details(
    rho: FockOperator,
    pair: tuple[str, str] = ("A", "B"),
    third: str = "C",
    flavor: str = "fermionic",
    tol: float = FLAG_TOL,
) -> SectorNegativities:
    """Projected-sector negativity pair for ``J = N_{pair,e} N_{pair,o}``.

    The third party is projected onto its even/odd fermion-parity sector, the
    result is traced down to the pair, and the negativity is taken transposing
    the first member of the pair.  An empty sector contributes negativity zero
    and raises the ``degenerate_sector`` flag.
    """
    specs = _tri_specs(rho)
    keep = SubsystemSpec(specs[pair[0]].target_modes + specs[pair[1]].target_modes)
    values = {}
    weights = {}
    degenerate = False
    for sector in ("even", "odd"):
        proj = parity_project(rho, specs[third], sector, tol)
        weights[sector] = proj.weight
        if proj.state is None:
            values[sector] = 0.0
            degenerate = True
            continue
        reduced = partial_trace(proj.state, keep)
        values[sector] = negativity(reduced, reduced.layout.spec(pair[0]), flavor, tol)
    return SectorNegativities(
        even=values["even"],
        odd=values["odd"],
        even_weight=weights["even"],
        odd_weight=weights["odd"],
        degenerate_sector=degenerate,
    )


def j_abc(
    rho: FockOperator,
    pair: tuple[str, str] = ("A", "B"),
    third: str = "C",
    flavor: str = "fermionic",
    tol: float = FLAG_TOL,
) -> float:
    """Product of the even- and odd-sector projected reduced negativities."""
    return j_abc_details(rho, pair, third, flavor, tol).product


def cayley_hdet(a: np.ndarray) -> complex:
    """Cayley hyperdeterminant of a 2x2x2 coefficient tensor."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2, 2):
        raise ValueError(f"expected a 2x2x2 tensor, got shape {a.shape}")
    p1 = a[0, 0, 0] * a[1, 1, 1]
    p2 = a[0, 0, 1] * a[1, 1, 0]
    p3 = a[0, 1, 0] * a[1, 0, 1]
    p4 = a[0, 1, 1] * a[1, 0, 0]
    squares = p1 * p1 + p2 * p2 + p3 * p3 + p4 * p4
    cross = p1 * p2 + p1 * p3 + p1 * p4 + p2 * p3 + p2 * p4 + p3 * p4
    quartic = (
        a[0, 0, 0] * a[0, 1, 1] * a[1, 0, 1] * a[1, 1, 0]
        + a[1, 1, 1] * a[1, 0, 0] * a[0, 1, 0] * a[0, 0, 1]
    )
    return complex(squares - 2.0 * cross + 4.0 * quartic)


def amplitude_tensor(vec: np.ndarray) -> np.ndarray:
    """Occupation-basis amplitudes of a 3-mode pure state as ``a[n1, n2, n3]``."""
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (8,):
        raise ValueError("expected a state vector on three modes (length 8)")
    a = np.zeros((2, 2, 2), dtype=complex)
    for i in range(8):
        a[i & 1, (i >> 1) & 1, (i >> 2) & 1] = vec[i]
    return a


def pure_state_vector(rho: FockOperator, tol: float = 1e-8) -> np.ndarray:
    """Extract the state vector of a pure density matrix, phase-fixed."""
    evals, vecs = np.linalg.eigh(rho.matrix)
    if abs(evals[-1] - 1.0) > tol:
        raise StateValidationError("operator is not a pure-state density matrix")
    vec = vecs[:, -1]
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size:
        vec = vec * (np.abs(vec[nz[0]]) / vec[nz[0]])
    return vec


def three_tangle(state: FockOperator | np.ndarray, tol: float = 1e-8) -> float:
    """Three-tangle ``|HDet A|`` of a pure three-mode state.

    Accepts a pure density matrix or a state vector; for fermionic parity
    eigenstates the value equals ``4 |l0 l1 l2 l3|``.
    """
    if isinstance(state, FockOperator):
        vec = pure_state_vector(state, tol)
    else:
        vec = np.asarray(state, dtype=complex)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > tol:
            raise StateValidationError("state vector is not normalized")
    return float(abs(cayley_hdet(amplitude_tensor(vec))))


def n_abc(rho: FockOperator, flavor: str = "fermionic", tol: float = FLAG_TOL) -> float:
    """Geometric mean of the three one-vs-rest negativities."""
    negs = one_vs_rest_negativities(rho, flavor, tol)
    prod = max(negs["A"], 0.0) * max(negs["B"], 0.0) * max(negs["C"], 0.0)
    return float(prod ** (1.0 / 3.0))


def pi_abc(rho: FockOperator, flavor: str = "fermionic", tol: float = FLAG_TOL) -> float:
    """Mean residual entanglement ``(pi_A + pi_B + pi_C)/3``.

    Each residual subtracts the squared pairwise reduced negativities from the
    squared one-vs-rest negativity of that party; applies to mixed states.
    """
    negs = one_vs_rest_negativities(rho, flavor, tol)
    pair = {
        ("A", "B"): pairwise_negativity(rho, "A", "B", flavor, tol),
        ("A", "C"): pairwise_negativity(rho, "A", "C", flavor, tol),
        ("B", "C"): pairwise_negativity(rho, "B", "C", flavor, tol),
    }
    pi_a = negs["A"] ** 2 - pair[("A", "B")] ** 2 - pair[("A", "C")] ** 2
    pi_b = negs["B"] ** 2 - pair[("A", "B")] ** 2 - pair[("B", "C")] ** 2
    pi_c = negs["C"] ** 2 - pair[("A", "C")] ** 2 - pair[("B", "C")] ** 2
    return float((pi_a + pi_b + pi_c) / 3.0)


def tripartite_report(
    rho: FockOperator, flavor: str = "fermionic", tol: float = FLAG_TOL
) -> MeasureReport:
    """All four tripartite measures plus the one-vs-rest negativities."""
    negs = one_vs_rest_negativities(rho, flavor, tol)
    entries = {
        "negativity_A": negs["A"],
        "negativity_B": negs["B"],
        "negativity_C": negs["C"],
        "j_abc": j_abc(rho, flavor=flavor, tol=tol),
        "n_abc": n_abc(rho, flavor, tol),
        "pi_abc": pi_abc(rho, flavor, tol),
    }
    try:
        entries["three_tangle"] = three_tangle(rho)
    except StateValidationError:
        pass  # mixed states have no tangle entry
    return MeasureReport(entries, tolerance=tol, transpose_flavor=flavor)
