"""Dense Fock-space machinery for small systems of local fermionic modes.

The Hilbert space of ``N`` modes is spanned by occupation-number vectors
``|n_1 .. n_N>`` encoded as integers ``i = sum_j n_j 2**(j-1)``: mode 1 is the
least-significant bit.  Subsystem labels (``"A"``, ``"B"``, ...) are attached
per mode and must form contiguous blocks in ascending label order, which is the
normal-ordered convention used throughout: every operator matrix is expressed
in this single basis, and any reordering of modes is performed explicitly with
Jordan-Wigner sign bookkeeping (see :func:`permute_modes`).

Creation operators act as ``f_j^+ |..0_j..> = (-1)**(n_1+..+n_{j-1}) |..1_j..>``
and Majorana operators are ``c_{2j-1} = f_j^+ + f_j``, ``c_{2j} = -i (f_j^+ - f_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import LayoutError, ParityError, StateValidationError

#: Hard cap on the number of modes; matrices are dense 2**N x 2**N.
MAX_MODES = 12

#: Tolerance used for lazily cached operator flags (hermitian / parity / trace).
FLAG_TOL = 1e-10


def _popcount(x: int) -> int:
    return int(x).bit_count()


def _popcount_array(a: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a)
    return np.array([int(v).bit_count() for v in a.ravel()]).reshape(a.shape)


@dataclass(frozen=True)
class ModeLayout:
    """Number of modes plus a per-mode subsystem label.

    Parameters
    ----------
    num_modes:
        Number of fermionic modes ``N`` (``1 <= N <= MAX_MODES``).
    labels:
        One label per mode.  Modes carrying the same label must be contiguous
        and the label blocks must appear in ascending order, e.g.
        ``("A", "A", "B")``.
    """

    num_modes: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= self.num_modes <= MAX_MODES:
            raise LayoutError(f"num_modes must be in [1, {MAX_MODES}], got {self.num_modes}")
        if len(self.labels) != self.num_modes:
            raise LayoutError("labels must assign exactly one tag per mode")
        blocks = []
        for lab in self.labels:
            if not blocks or blocks[-1] != lab:
                blocks.append(lab)
        if len(set(blocks)) != len(blocks) or list(blocks) != sorted(blocks):
            raise LayoutError(
                f"labels must form contiguous blocks in ascending order, got {self.labels}"
            )

    @classmethod
    def bipartite(cls, m_a: int, m_b: int) -> "ModeLayout":
        return cls(m_a + m_b, ("A",) * m_a + ("B",) * m_b)

    @classmethod
    def tripartite(cls, m_a: int = 1, m_b: int = 1, m_c: int = 1) -> "ModeLayout":
        return cls(m_a + m_b + m_c, ("A",) * m_a + ("B",) * m_b + ("C",) * m_c)

    @property
    def dim(self) -> int:
        return 1 << self.num_modes

    @property
    def subsystems(self) -> tuple[str, ...]:
        seen: list[str] = []
        for lab in self.labels:
            if lab not in seen:
                seen.append(lab)
        return tuple(seen)

    def modes_with_label(self, label: str) -> tuple[int, ...]:
        modes = tuple(j + 1 for j, lab in enumerate(self.labels) if lab == label)
        if not modes:
            raise LayoutError(f"no mode carries label {label!r}")
        return modes

    def spec(self, label: str) -> "SubsystemSpec":
        """Subsystem spec covering all modes with the given label."""
        return SubsystemSpec(self.modes_with_label(label))


@dataclass(frozen=True)
class SubsystemSpec:
    """An ordered subset of 1-based mode indices designating a transpose/trace target."""

    target_modes: tuple[int, ...]

    def __post_init__(self):
        modes = tuple(int(m) for m in self.target_modes)
        object.__setattr__(self, "target_modes", modes)
        if not modes:
            raise LayoutError("subsystem spec must be non-empty")
        if len(set(modes)) != len(modes):
            raise LayoutError(f"duplicate modes in spec {modes}")

    def validate(self, layout: ModeLayout) -> None:
        bad = [m for m in self.target_modes if not 1 <= m <= layout.num_modes]
        if bad:
            raise LayoutError(f"modes {bad} outside layout with {layout.num_modes} modes")

    def sorted_modes(self) -> tuple[int, ...]:
        return tuple(sorted(self.target_modes))

    def complement(self, layout: ModeLayout) -> "SubsystemSpec":
        self.validate(layout)
        rest = tuple(m for m in range(1, layout.num_modes + 1) if m not in self.target_modes)
        if not rest:
            raise LayoutError("complement of the full mode set is empty")
        return SubsystemSpec(rest)

    def mask(self) -> int:
        """Bitmask with bit j-1 set for every target mode j."""
        m = 0
        for j in self.target_modes:
            m |= 1 << (j - 1)
        return m

    def __len__(self) -> int:
        return len(self.target_modes)


def as_spec(spec: "SubsystemSpec | Iterable[int] | int") -> SubsystemSpec:
    if isinstance(spec, SubsystemSpec):
        return spec
    if isinstance(spec, int):
        return SubsystemSpec((spec,))
    return SubsystemSpec(tuple(spec))


class FockOperator:
    """A dense complex operator on the Fock space of a :class:`ModeLayout`.

    Matrices are stored read-only; every operation in this package is a pure
    function returning fresh instances, so values can be shared freely between
    threads.  Flags (hermitian, parity-even, unit-trace) are computed lazily at
    tolerance :data:`FLAG_TOL` and cached.
    """

    __slots__ = ("layout", "matrix", "_flags")

    def __init__(self, layout: ModeLayout, matrix: np.ndarray, copy: bool = True):
        matrix = np.array(matrix, dtype=complex, copy=copy)
        if matrix.shape != (layout.dim, layout.dim):
            raise LayoutError(
                f"matrix shape {matrix.shape} does not match layout dimension {layout.dim}"
            )
        matrix.setflags(write=False)
        self.layout = layout
        self.matrix = matrix
        self._flags: dict[str, bool] = {}

    # -- flags ---------------------------------------------------------------

    def _cached(self, key: str, fn) -> bool:
        if key not in self._flags:
            self._flags[key] = bool(fn())
        return self._flags[key]

    def is_hermitian(self, tol: float = FLAG_TOL) -> bool:
        return self._cached(
            f"herm@{tol}", lambda: np.abs(self.matrix - self.matrix.conj().T).max() <= tol
        )

    def is_parity_even(self, tol: float = FLAG_TOL) -> bool:
        """Whether ``(-1)^F M (-1)^F == M`` elementwise at the given tolerance."""

        def check():
            signs = 1.0 - 2.0 * (_popcount_array(np.arange(self.layout.dim)) % 2)
            conj = signs[:, None] * self.matrix * signs[None, :]
            return np.abs(conj - self.matrix).max() <= tol

        return self._cached(f"even@{tol}", check)

    def is_unit_trace(self, tol: float = FLAG_TOL) -> bool:
        return self._cached(f"tr@{tol}", lambda: abs(np.trace(self.matrix) - 1.0) <= tol)

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part (meaningful for Hermitian input)."""
        return float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])

    def is_density_matrix(self, tol: float = FLAG_TOL, require_parity: bool = True) -> bool:
        if not (self.is_hermitian(tol) and self.is_unit_trace(tol)):
            return False
        if require_parity and not self.is_parity_even(tol):
            return False
        return self.min_eigenvalue() >= -tol

    def require_density_matrix(self, tol: float = FLAG_TOL, require_parity: bool = True) -> None:
        if not (self.is_hermitian(tol) and self.is_unit_trace(tol)):
            raise StateValidationError("operator is not a unit-trace Hermitian matrix")
        if self.min_eigenvalue() < -tol:
            raise StateValidationError("operator is not positive semi-definite")
        if require_parity and not self.is_parity_even(tol):
            raise ParityError("density matrix does not commute with the global parity operator")

    def require_parity_even(self, tol: float = FLAG_TOL) -> None:
        if not self.is_parity_even(tol):
            raise ParityError("operator is not fermion-number parity even")

    # -- light operator algebra ------------------------------------------------

    @property
    def dim(self) -> int:
        return self.layout.dim

    def dagger(self) -> "FockOperator":
        return FockOperator(self.layout, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if other.layout != self.layout:
            raise LayoutError("operator product requires identical layouts")
        return FockOperator(self.layout, self.matrix @ other.matrix, copy=False)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        if other.layout != self.layout:
            raise LayoutError("operator sum requires identical layouts")
        return FockOperator(self.layout, self.matrix + other.matrix, copy=False)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        if other.layout != self.layout:
            raise LayoutError("operator difference requires identical layouts")
        return FockOperator(self.layout, self.matrix - other.matrix, copy=False)

    def __mul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.layout, self.matrix * scalar, copy=False)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FockOperator(N={self.layout.num_modes}, labels={self.layout.labels})"


# -- elementary operators -------------------------------------------------------


def identity_op(layout: ModeLayout) -> FockOperator:
    return FockOperator(layout, np.eye(layout.dim, dtype=complex), copy=False)


def creation_op(layout: ModeLayout, j: int) -> FockOperator:
    """Matrix of ``f_j^+`` with the Jordan-Wigner sign ``(-1)**(n_1+..+n_{j-1})``."""
    if not 1 <= j <= layout.num_modes:
        raise LayoutError(f"mode index {j} out of range 1..{layout.num_modes}")
    dim = layout.dim
    bit = 1 << (j - 1)
    below = bit - 1
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if col & bit:
            continue
        sign = -1.0 if _popcount(col & below) % 2 else 1.0
        mat[col | bit, col] = sign
    return FockOperator(layout, mat, copy=False)


def annihilation_op(layout: ModeLayout, j: int) -> FockOperator:
    return creation_op(layout, j).dagger()


def majorana_op(layout: ModeLayout, k: int) -> FockOperator:
    """Majorana operator ``c_k``; ``c_{2j-1} = f_j^+ + f_j``, ``c_{2j} = -i(f_j^+ - f_j)``."""
    if not 1 <= k <= 2 * layout.num_modes:
        raise LayoutError(f"Majorana index {k} out of range 1..{2 * layout.num_modes}")
    j = (k + 1) // 2
    fdag = creation_op(layout, j).matrix
    f = fdag.conj().T
    mat = fdag + f if k % 2 else -1j * (fdag - f)
    return FockOperator(layout, mat, copy=False)


def number_op(layout: ModeLayout, j: int) -> FockOperator:
    fdag = creation_op(layout, j).matrix
    return FockOperator(layout, fdag @ fdag.conj().T, copy=False)


def parity_op(layout: ModeLayout, spec: SubsystemSpec | None = None) -> FockOperator:
    """Diagonal operator ``(-1)**F_S`` counting occupation over the spec's modes."""
    if spec is None:
        mask = layout.dim - 1
    else:
        spec = as_spec(spec)
        spec.validate(layout)
        mask = spec.mask()
    idx = np.arange(layout.dim)
    signs = 1.0 - 2.0 * (_popcount_array(idx & mask) % 2)
    return FockOperator(layout, np.diag(signs.astype(complex)), copy=False)


def basis_vector(layout: ModeLayout, occupations: Sequence[int]) -> np.ndarray:
    """Unit vector for the normal-ordered basis state with the given occupations."""
    if len(occupations) != layout.num_modes:
        raise LayoutError("need one occupation number per mode")
    index = sum((1 << j) for j, n in enumerate(occupations) if n)
    vec = np.zeros(layout.dim, dtype=complex)
    vec[index] = 1.0
    return vec


def occupations_of(index: int, num_modes: int) -> tuple[int, ...]:
    return tuple((index >> j) & 1 for j in range(num_modes))


# -- mode permutation with Jordan-Wigner signs -----------------------------------


@lru_cache(maxsize=256)
def _permutation_arrays(num_modes: int, new_order: tuple[int, ...]) -> tuple:
    """Index map and signs realizing a mode reordering on basis states.

    ``new_order[k]`` is the old (1-based) mode sitting at new position ``k+1``.
    Returns ``(new_index, sign)`` arrays over old basis indices: the old basis
    state ``i`` maps to ``sign[i] * |new_index[i]>``.  The sign is the parity of
    the permutation restricted to occupied modes (creation operators are written
    in increasing position order on both sides).
    """
    dim = 1 << num_modes
    new_index = np.zeros(dim, dtype=np.int64)
    sign = np.ones(dim)
    order0 = [m - 1 for m in new_order]
    for i in range(dim):
        occ_positions = [k for k, m in enumerate(order0) if (i >> m) & 1]
        inversions = 0
        occ_modes = [order0[k] for k in occ_positions]
        for a in range(len(occ_modes)):
            for b in range(a + 1, len(occ_modes)):
                if occ_modes[a] > occ_modes[b]:
                    inversions += 1
        j = 0
        for k in occ_positions:
            j |= 1 << k
        new_index[i] = j
        if inversions % 2:
            sign[i] = -1.0
    return new_index, sign


def permute_modes(
    op: FockOperator, new_order: Sequence[int], labels: Sequence[str] | None = None
) -> FockOperator:
    """Reorder modes so that new position ``k`` carries old mode ``new_order[k-1]``.

    The result is expressed in the normal-ordered basis of the new ordering,
    with anticommutation signs accounted for.  ``labels`` overrides the
    permuted labels (they must still satisfy the layout invariant).
    """
    n = op.layout.num_modes
    new_order = tuple(int(m) for m in new_order)
    if sorted(new_order) != list(range(1, n + 1)):
        raise LayoutError(f"{new_order} is not a permutation of modes 1..{n}")
    if labels is None:
        labels = tuple(op.layout.labels[m - 1] for m in new_order)
    new_layout = ModeLayout(n, tuple(labels))
    mat = _permute_matrix(op.matrix, n, new_order)
    return FockOperator(new_layout, mat, copy=False)


def _permute_matrix(matrix: np.ndarray, num_modes: int, new_order: tuple[int, ...]) -> np.ndarray:
    new_index, sign = _permutation_arrays(num_modes, tuple(new_order))
    out = np.empty_like(matrix)
    scaled = sign[:, None] * matrix * sign[None, :]
    out[np.ix_(new_index, new_index)] = scaled
    return out


def _inverse_order(new_order: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(new_order)
    for pos, mode in enumerate(new_order):
        inv[mode - 1] = pos + 1
    return tuple(inv)


def leading_order_for(spec: SubsystemSpec, num_modes: int) -> tuple[int, ...]:
    """Permutation placing the spec's modes (sorted) first, the rest after."""
    inside = spec.sorted_modes()
    outside = tuple(m for m in range(1, num_modes + 1) if m not in inside)
    return inside + outside


# -- graded tensor product and local embedding ------------------------------------


def graded_tensor(lhs: FockOperator, rhs: FockOperator) -> FockOperator:
    """Graded tensor product of two parity-even operators.

    Mode blocks of equal label from both operands are merged (left operand's
    modes first within each block) and the result is expressed in the canonical
    ordering of the combined layout, with Jordan-Wigner signs from the interleaving
    handled internally.  For parity-even operands the graded product in the
    concatenated ordering is the plain Kronecker product; only the reordering
    into label-contiguous form introduces signs.
    """
    lhs.require_parity_even()
    rhs.require_parity_even()
    n1, n2 = lhs.layout.num_modes, rhs.layout.num_modes
    if n1 + n2 > MAX_MODES:
        raise LayoutError(f"combined system exceeds {MAX_MODES} modes")
    # rhs modes occupy the high bits: index = i_lhs + 2**n1 * i_rhs.
    combined = np.kron(rhs.matrix, lhs.matrix)
    concat_labels = lhs.layout.labels + rhs.layout.labels
    all_labels = sorted(set(concat_labels))
    new_order = []
    for lab in all_labels:
        new_order.extend(m + 1 for m, l in enumerate(concat_labels) if l == lab)
    new_labels = tuple(concat_labels[m - 1] for m in new_order)
    mat = _permute_matrix(combined, n1 + n2, tuple(new_order))
    return FockOperator(ModeLayout(n1 + n2, new_labels), mat, copy=False)


def embed_local(local: FockOperator, layout: ModeLayout, modes: Sequence[int]) -> FockOperator:
    """Embed a parity-even operator on the given modes into the full space.

    ``local`` is defined on its own layout of ``len(modes)`` modes whose k-th
    mode is identified with ``modes[k]`` of the target layout.  Only physical
    (parity-even) operators embed without a Jordan-Wigner string, which is why
    the parity requirement is enforced.
    """
    local.require_parity_even()
    modes = tuple(int(m) for m in modes)
    if len(modes) != local.layout.num_modes:
        raise LayoutError("embedding requires one target mode per local mode")
    spec = SubsystemSpec(modes)
    spec.validate(layout)
    n = layout.num_modes
    rest = 1 << (n - len(modes))
    big = np.kron(np.eye(rest, dtype=complex), local.matrix)
    # big lives on the ordering [modes..., rest...]; undo it.
    order = modes + tuple(m for m in range(1, n + 1) if m not in modes)
    mat = _permute_matrix(big, n, _inverse_order(order))
    return FockOperator(layout, mat, copy=False)
