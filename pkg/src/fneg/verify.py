"""Randomized verification harness for the transpose identities, LOCC
monotonicity, the perturbative trace-norm expansion, and the type-II
negativity conjecture.

Each check runs a number of independent seeded trials and returns a
:class:`CheckReport` whose ``passed`` field is exactly
``max_violation <= tolerance``.  Equalities are scored by their largest
elementwise or scalar deviation; inequalities by the largest negative slack.
Per-trial diagnostics (seeds, state fingerprints, measured values) are kept on
the report so a failure can be reproduced.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import SamplingError
from .fock import (
    FockOperator,
    ModeLayout,
    SubsystemSpec,
    embed_local,
    graded_tensor,
    parity_op,
)
from .measures import log_negativity, negativity, one_vs_rest_negativities, \
    pairwise_negativity, trace_norm
from .ptranspose import fermionic_pt, full_transpose, partial_trace
from .states import _rng, random_density, random_pure

#: Probability weights below this are treated as empty measurement branches.
_WEIGHT_FLOOR = 1e-12

_GAP_GUARD = 5e-3
_RESAMPLE_BUDGET = 500


@dataclass
class CheckReport:
    """Outcome of one randomized check; ``passed == (max_violation <= tolerance)``."""

    check_name: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool
    diagnostics: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "trials": self.trials,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "diagnostics": self.diagnostics,
        }


def _report(name: str, trials: int, max_violation: float, tolerance: float,
            diagnostics: list[dict]) -> CheckReport:
    return CheckReport(
        check_name=name,
        trials=trials,
        max_violation=float(max_violation),
        tolerance=float(tolerance),
        passed=bool(max_violation <= tolerance),
        diagnostics=diagnostics,
    )


def _fingerprint(matrix: np.ndarray) -> str:
    return hashlib.sha1(np.round(matrix, 12).tobytes()).hexdigest()[:12]


# -- random physical operators -----------------------------------------------------


def _parity_signs(layout: ModeLayout) -> np.ndarray:
    return np.real(np.diag(parity_op(layout).matrix))


def random_even_operator(layout: ModeLayout, rng: np.random.Generator) -> FockOperator:
    """Generic (non-Hermitian) parity-even operator with Gaussian entries."""
    signs = _parity_signs(layout)
    g = rng.normal(size=(layout.dim, layout.dim)) + 1j * rng.normal(
        size=(layout.dim, layout.dim)
    )
    return FockOperator(layout, np.where(np.equal.outer(signs, signs), g, 0.0), copy=False)


def random_even_hermitian(layout: ModeLayout, rng: np.random.Generator) -> FockOperator:
    g = random_even_operator(layout, rng).matrix
    return FockOperator(layout, (g + g.conj().T) / 2.0, copy=False)


def random_even_unitary(layout: ModeLayout, rng: np.random.Generator) -> FockOperator:
    """``exp(i H)`` for a random parity-even Hermitian generator."""
    h = random_even_hermitian(layout, rng).matrix
    evals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(1j * evals)) @ vecs.conj().T
    return FockOperator(layout, u, copy=False)


def random_even_projector_set(
    layout: ModeLayout, rng: np.random.Generator, max_groups: int | None = None
) -> list[FockOperator]:
    """Complete orthogonal set of parity-even projectors.

    Built from the eigenbasis of a random parity-even Hermitian: eigenvectors
    (each of definite parity) are randomly grouped, so ranks vary while
    completeness, orthogonality, and physicality hold by construction.
    """
    h = random_even_hermitian(layout, rng).matrix
    _, vecs = np.linalg.eigh(h)
    dim = layout.dim
    n_groups = int(rng.integers(1, (max_groups or dim) + 1))
    assignment = rng.integers(0, n_groups, size=dim)
    projectors = []
    for g in range(n_groups):
        cols = vecs[:, assignment == g]
        if cols.shape[1] == 0:
            continue
        projectors.append(FockOperator(layout, cols @ cols.conj().T, copy=False))
    return projectors


def parity_projector_pair(layout: ModeLayout) -> list[FockOperator]:
    """The even/odd parity projectors ``(1 +- (-1)^F)/2`` of a local system."""
    signs = _parity_signs(layout)
    return [
        FockOperator(layout, np.diag(((1.0 + s * signs) / 2.0).astype(complex)), copy=False)
        for s in (1.0, -1.0)
    ]


# -- identity suite ---------------------------------------------------------------


def _identity_trial(rng: np.random.Generator, n: int) -> tuple[float, dict]:
    m_a = int(rng.integers(1, n))
    layout = ModeLayout.bipartite(m_a, n - m_a)
    spec_a = layout.spec("A")
    spec_b = layout.spec("B")
    modes_a = spec_a.target_modes
    modes_b = spec_b.target_modes
    sub_a = ModeLayout(m_a, ("A",) * m_a)
    sub_b = ModeLayout(n - m_a, ("A",) * (n - m_a))

    rho = random_density(layout, rng)
    x_a = random_even_operator(sub_a, rng)
    y_a = random_even_operator(sub_a, rng)
    x_b = random_even_operator(sub_b, rng)
    y_b = random_even_operator(sub_b, rng)

    ea = embed_local(x_a, layout, modes_a).matrix
    eya = embed_local(y_a, layout, modes_a).matrix
    eb = embed_local(x_b, layout, modes_b).matrix
    eyb = embed_local(y_b, layout, modes_b).matrix
    ea_t = embed_local(full_transpose(x_a), layout, modes_a).matrix
    eya_t = embed_local(full_transpose(y_a), layout, modes_a).matrix
    eb_t = embed_local(full_transpose(x_b), layout, modes_b).matrix
    eyb_t = embed_local(full_transpose(y_b), layout, modes_b).matrix

    def pt_a(mat: np.ndarray) -> np.ndarray:
        return fermionic_pt(FockOperator(layout, mat, copy=False), spec_a).matrix

    def pt_b(mat: np.ndarray) -> np.ndarray:
        return fermionic_pt(FockOperator(layout, mat, copy=False), spec_b).matrix

    def tr_full(mat: np.ndarray) -> np.ndarray:
        return full_transpose(FockOperator(layout, mat, copy=False)).matrix

    r = rho.matrix
    t_a = pt_a(r)
    t_b = pt_b(r)
    deviations = {
        "rho_xb_right": np.abs(pt_a(r @ eb) - t_a @ eb).max(),
        "rho_xb_left": np.abs(pt_a(eb @ r) - eb @ t_a).max(),
        "rho_xa_right": np.abs(pt_a(r @ ea) - ea_t @ t_a).max(),
        "rho_xa_left": np.abs(pt_a(ea @ r) - t_a @ ea_t).max(),
        "rho_xaxb_right": np.abs(pt_a(r @ ea @ eb) - ea_t @ t_a @ eb).max(),
        "rho_xaxb_left": np.abs(pt_a(ea @ eb @ r) - eb @ t_a @ ea_t).max(),
        "sandwich_ta": np.abs(
            pt_a(ea @ eb @ r @ eya @ eyb) - eya_t @ eb @ t_a @ ea_t @ eyb
        ).max(),
        "sandwich_tb": np.abs(
            pt_b(ea @ eb @ r @ eya @ eyb) - ea @ eyb_t @ t_b @ eya @ eb_t
        ).max(),
        "successive_plain": np.abs(pt_b(t_a) - tr_full(r)).max(),
        "successive_xb": np.abs(pt_b(pt_a(r @ eb)) - tr_full(r @ eb)).max(),
        "successive_xa": np.abs(pt_b(pt_a(r @ ea)) - tr_full(r @ ea)).max(),
        "successive_xaxb": np.abs(pt_b(pt_a(r @ ea @ eb)) - tr_full(r @ ea @ eb)).max(),
        "successive_sandwich": np.abs(
            pt_b(pt_a(ea @ eb @ r @ eya @ eyb)) - tr_full(ea @ eb @ r @ eya @ eyb)
        ).max(),
        "double_ta": np.abs(
            pt_a(t_a)
            - parity_op(layout, spec_a).matrix @ r @ parity_op(layout, spec_a).matrix
        ).max(),
        "identity_fixed": np.abs(pt_a(np.eye(layout.dim, dtype=complex))
                                 - np.eye(layout.dim)).max(),
    }
    worst_name = max(deviations, key=deviations.get)
    diag = {
        "n": n,
        "m_a": m_a,
        "state": _fingerprint(r),
        "max_violation": float(deviations[worst_name]),
        "worst_identity": worst_name,
    }
    return float(max(deviations.values())), diag


def check_identity_suite(
    seed=0, trials: int = 100, modes=(2, 3, 4), tolerance: float = 1e-11
) -> CheckReport:
    """Elementwise check of the local-operator transpose identities.

    Covers the one-sided and sandwich product rules for both subsystem
    transposes, consistency of successive partial transposes with the full
    transpose, the parity-conjugation involution, and invariance of the
    identity operator.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = _rng(seed)
    base_seed = seed if isinstance(seed, int) else None
    modes = (modes,) if isinstance(modes, int) else tuple(modes)
    worst = 0.0
    diagnostics = []
    for t in range(trials):
        n = modes[t % len(modes)]
        dev, diag = _identity_trial(rng, n)
        diag["trial"] = t
        diag["seed"] = base_seed
        diagnostics.append(diag)
        worst = max(worst, dev)
    return _report("identity_suite", trials, worst, tolerance, diagnostics)


# -- LOCC monotonicity -------------------------------------------------------------


def _measured_branches(sigma: FockOperator, r_mode: int, keep: SubsystemSpec):
    """Occupation-basis measurement of one ancilla mode: (weight, reduced state)."""
    layout = sigma.layout
    branches = []
    for occ in (0, 1):
        local = FockOperator(
            ModeLayout(1, ("A",)), np.diag([1.0 - occ, float(occ)]).astype(complex)
        )
        proj = embed_local(local, layout, (r_mode,)).matrix
        projected = proj @ sigma.matrix @ proj
        weight = float(np.real(np.trace(projected)))
        if weight < _WEIGHT_FLOOR:
            continue
        reduced = partial_trace(
            FockOperator(layout, projected / weight, copy=False), keep
        )
        branches.append((weight, reduced))
    return branches


def _locc_trial(rng: np.random.Generator) -> tuple[float, dict]:
    n = int(rng.integers(2, 5))
    m_a = int(rng.integers(1, n))
    layout = ModeLayout.bipartite(m_a, n - m_a)
    spec_a = layout.spec("A")
    sub_a = ModeLayout(m_a, ("A",) * m_a)
    sub_b = ModeLayout(n - m_a, ("A",) * (n - m_a))
    rho = random_density(layout, rng)
    base_neg = negativity(rho, spec_a)
    base_logneg = float(np.log(2.0 * base_neg + 1.0))
    viol = {}

    # (a) invariance under local parity-even unitaries
    u = embed_local(random_even_unitary(sub_a, rng), layout, spec_a.target_modes).matrix
    u = u @ embed_local(
        random_even_unitary(sub_b, rng), layout, layout.spec("B").target_modes
    ).matrix
    rotated = FockOperator(layout, u @ rho.matrix @ u.conj().T, copy=False)
    viol["local_unitary"] = abs(negativity(rotated, spec_a) - base_neg)

    # (b) appending an unentangled ancilla to A
    anc = random_density(ModeLayout(1, ("A",)), rng)
    appended = graded_tensor(rho, anc)
    viol["ancilla_append"] = abs(
        negativity(appended, appended.layout.spec("A")) - base_neg
    )

    # (c) complete local projective measurements
    if rng.integers(0, 2):
        proj_a = random_even_projector_set(sub_a, rng, max_groups=3)
        proj_b = random_even_projector_set(sub_b, rng, max_groups=3)
    else:
        proj_a = parity_projector_pair(sub_a)
        proj_b = parity_projector_pair(sub_b)
    avg = 0.0
    for pa in proj_a:
        ea = embed_local(pa, layout, spec_a.target_modes).matrix
        for pb in proj_b:
            eb = embed_local(pb, layout, layout.spec("B").target_modes).matrix
            op = ea @ eb
            projected = op @ rho.matrix @ op
            weight = float(np.real(np.trace(projected)))
            if weight < _WEIGHT_FLOOR:
                continue
            branch = FockOperator(layout, projected / weight, copy=False)
            avg += weight * negativity(branch, spec_a)
    viol["projective"] = max(0.0, avg - base_neg)

    # (d) entangling an ancilla into A, measuring it, with and without averaging
    sigma = graded_tensor(rho, random_density(ModeLayout(1, ("A",)), rng))
    big = sigma.layout
    tilde_spec = big.spec("A")
    r_mode = tilde_spec.target_modes[-1]
    u_ar = embed_local(
        random_even_unitary(ModeLayout(m_a + 1, ("A",) * (m_a + 1)), rng),
        big,
        tilde_spec.target_modes,
    ).matrix
    evolved = FockOperator(big, u_ar @ sigma.matrix @ u_ar.conj().T, copy=False)
    viol["unilocal_unitary"] = abs(negativity(evolved, tilde_spec) - base_neg)
    keep = SubsystemSpec(tuple(m for m in range(1, big.num_modes + 1) if m != r_mode))
    branches = _measured_branches(evolved, r_mode, keep)
    avg_neg = sum(w * negativity(red, spec_a) for w, red in branches)
    avg_logneg = sum(w * log_negativity(red, spec_a) for w, red in branches)
    mixed = sum(w * red.matrix for w, red in branches)
    mixed_neg = negativity(FockOperator(layout, mixed, copy=False), spec_a)
    viol["ancilla_trace_selective"] = max(0.0, avg_neg - base_neg)
    viol["ancilla_trace_averaged"] = max(0.0, mixed_neg - base_neg)
    viol["ancilla_trace_logneg"] = max(0.0, avg_logneg - base_logneg)

    # (e) additivity under stacking
    other = random_density(ModeLayout.bipartite(1, 1), rng)
    stacked = graded_tensor(rho, other)
    viol["additivity"] = abs(
        log_negativity(stacked, stacked.layout.spec("A"))
        - log_negativity(rho, spec_a)
        - log_negativity(other, other.layout.spec("A"))
    )

    worst_name = max(viol, key=viol.get)
    diag = {
        "n": n,
        "m_a": m_a,
        "state": _fingerprint(rho.matrix),
        "base_negativity": float(base_neg),
        "max_violation": float(viol[worst_name]),
        "worst_check": worst_name,
    }
    return float(max(viol.values())), diag


def check_locc_monotonicity(seed=0, trials: int = 200, tolerance: float = 1e-10) -> CheckReport:
    """Local-unitary invariance, ancilla append/trace, projective measurements,
    and additivity, scored by equality deviation or negative inequality slack."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = _rng(seed)
    base_seed = seed if isinstance(seed, int) else None
    worst = 0.0
    diagnostics = []
    for t in range(trials):
        dev, diag = _locc_trial(rng)
        diag["trial"] = t
        diag["seed"] = base_seed
        diagnostics.append(diag)
        worst = max(worst, dev)
    return _report("locc_monotonicity", trials, worst, tolerance, diagnostics)


# -- perturbative expansion --------------------------------------------------------


def _perturbation_instance(rng: np.random.Generator, m: int, eps_max: float):
    """Sample a separable base plus odd perturbation with spectral-gap guards.

    The local factors are mixed with the maximally mixed state to keep them
    well conditioned; near-degenerate or small scaled eigenvalues (which blow
    up the perturbative denominators or threaten positivity at finite epsilon)
    trigger resampling.
    """
    sub_layout = ModeLayout(m, ("A",) * m)
    sub = 1 << m
    eye = np.eye(sub) / sub
    for _ in range(_RESAMPLE_BUDGET):
        w = rng.dirichlet((1.0, 1.0))
        if w.min() < 0.2:
            continue
        rho0 = 0.5 * random_density(sub_layout, rng).matrix + 0.5 * eye
        rho1 = 0.5 * random_density(sub_layout, rng).matrix + 0.5 * eye
        mu = np.linalg.eigvalsh(rho0)
        nu = np.linalg.eigvalsh(rho1)
        scaled = np.concatenate([w[0] * mu, w[1] * nu])
        if scaled.min() < 1.5 * eps_max:
            continue
        gaps = np.abs(scaled[:, None] - scaled[None, :])[
            ~np.eye(scaled.size, dtype=bool)
        ]
        if gaps.min() < _GAP_GUARD:
            continue
        signs = _parity_signs(sub_layout)
        delta = rng.normal(size=(sub, sub)) + 1j * rng.normal(size=(sub, sub))
        delta = np.where(np.not_equal.outer(signs, signs), delta, 0.0)
        delta /= np.linalg.norm(delta)
        return w, rho0, rho1, delta
    raise SamplingError("perturbation instance resampling budget exhausted")


def perturbed_state(
    w: np.ndarray, rho0: np.ndarray, rho1: np.ndarray, delta: np.ndarray, eps: float
) -> FockOperator:
    """``rho_sep + eps * rho_off`` on one A mode plus the remainder modes."""
    sub = rho0.shape[0]
    m = sub.bit_length() - 1
    layout = ModeLayout(1 + m, ("A",) + ("B",) * m)
    dim = 2 * sub
    idx0 = 2 * np.arange(sub)  # mode-1 occupation 0
    idx1 = idx0 + 1
    mat = np.zeros((dim, dim), dtype=complex)
    mat[np.ix_(idx0, idx0)] = w[0] * rho0
    mat[np.ix_(idx1, idx1)] = w[1] * rho1
    mat[np.ix_(idx1, idx0)] = eps * delta
    mat[np.ix_(idx0, idx1)] = eps * delta.conj().T
    return FockOperator(layout, mat, copy=False)


def trace_norm_prediction(
    w: np.ndarray, rho0: np.ndarray, rho1: np.ndarray, delta: np.ndarray, eps: float
) -> float:
    """Second-order prediction ``1 + 2 eps^2 sum |<psi_j|d|phi_k>|^2/(w0 mu_j + w1 nu_k)``."""
    mu, psi = np.linalg.eigh(rho0)
    nu, phi = np.linalg.eigh(rho1)
    amp = psi.conj().T @ delta @ phi
    denom = w[0] * mu[:, None] + w[1] * nu[None, :]
    return 1.0 + 2.0 * eps**2 * float(np.sum(np.abs(amp) ** 2 / denom))


def check_perturbation_expansion(
    seed=0,
    trials: int = 50,
    epsilons=(1e-2, 5e-3, 2.5e-3),
    ratio_bounds: tuple[float, float] = (6.0, 10.0),
    min_pass_fraction: float = 0.9,
) -> CheckReport:
    """Residual scaling of the trace-norm expansion around separable states.

    For each instance the deviation between the exact trace norm and the
    second-order prediction is evaluated along the epsilon sequence and the
    consecutive halving ratios are required to sit inside ``ratio_bounds``.
    ``max_violation`` is the fraction of instances whose ratios escape the
    bounds; the check passes when at most ``1 - min_pass_fraction`` fail.

    Note: on clean instances the measured halving ratio concentrates near 16,
    i.e. the residual is quartic, not cubic.  The spectrum of
    ``rho^{T_A} (rho^{T_A})^+`` is an even function of the perturbation
    strength (conjugation by the subsystem parity operator flips its sign), so
    every odd-order correction vanishes identically and the stated cubic
    bracket cannot be met; the report carries the measured ratios.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    epsilons = tuple(float(e) for e in epsilons)
    if len(epsilons) < 2 or any(e <= 0 for e in epsilons) or any(
        nxt >= prev for prev, nxt in zip(epsilons, epsilons[1:])
    ):
        raise ValueError("epsilons must be a decreasing positive sequence")
    rng = _rng(seed)
    diagnostics = []
    failures = 0
    for t in range(trials):
        m = 1 + t % 2
        w, rho0, rho1, delta = _perturbation_instance(rng, m, max(epsilons))
        residuals = []
        for eps in epsilons:
            rho = perturbed_state(w, rho0, rho1, delta, eps)
            actual = trace_norm(fermionic_pt(rho, SubsystemSpec((1,))))
            residuals.append(abs(actual - trace_norm_prediction(w, rho0, rho1, delta, eps)))
        ratios = [residuals[i] / residuals[i + 1] for i in range(len(residuals) - 1)]
        ok = all(ratio_bounds[0] <= r <= ratio_bounds[1] for r in ratios)
        failures += 0 if ok else 1
        diagnostics.append(
            {
                "trial": t,
                "m_rest": m,
                "residuals": [float(x) for x in residuals],
                "ratios": [float(x) for x in ratios],
                "within_bounds": ok,
            }
        )
    fail_fraction = failures / trials
    return _report(
        "perturbation_expansion", trials, fail_fraction, 1.0 - min_pass_fraction, diagnostics
    )


# -- conjecture and inequality scans ------------------------------------------------


def conjecture_scan(
    seed=0,
    samples: int = 10000,
    num_modes=(2, 3),
    threshold: float = 1e-10,
) -> CheckReport:
    """Scan random type-II states for vanishing fermionic negativity.

    Samples states whose commutator with a subsystem parity operator is
    visibly nonzero and records the minimum negativity; any sample below
    ``threshold`` is dumped in full as a counterexample candidate.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = _rng(seed)
    num_modes = (num_modes,) if isinstance(num_modes, int) else tuple(num_modes)
    configs = []
    for n in num_modes:
        for m_a in range(1, n):
            configs.append((ModeLayout.bipartite(m_a, n - m_a), m_a))
    min_neg = np.inf
    min_info = None
    counterexamples = []
    for t in range(samples):
        layout, m_a = configs[t % len(configs)]
        spec = layout.spec("A")
        rho = random_density(layout, rng, constraint="type_II", spec=spec)
        neg = negativity(rho, spec)
        if neg < min_neg:
            min_neg = neg
            min_info = {"trial": t, "n": layout.num_modes, "m_a": m_a,
                        "state": _fingerprint(rho.matrix)}
        if neg < threshold:
            counterexamples.append(
                {
                    "trial": t,
                    "n": layout.num_modes,
                    "m_a": m_a,
                    "negativity": float(neg),
                    "matrix": [[z.real, z.imag] for z in rho.matrix.ravel()],
                }
            )
    violation = max(0.0, threshold - float(min_neg)) if counterexamples else 0.0
    diagnostics = [{"min_negativity": float(min_neg), "minimum_at": min_info,
                    "counterexamples": counterexamples}]
    return _report("conjecture_type_II", samples, violation, 0.0, diagnostics)


def pi_inequality_scan(seed=0, samples: int = 300, flavor: str = "fermionic") -> CheckReport:
    """Monitor ``N_AB^2 + N_AC^2 <= N_{A(BC)}^2`` on random three-mode states.

    Informational only: violation counts are reported but never gate a pass
    (the fermionic-flavor status of the inequality is an open question).
    """
    rng = _rng(seed)
    layout = ModeLayout.tripartite()
    violations = 0
    worst_slack = np.inf
    for t in range(samples):
        kind = t % 3
        if kind == 0:
            rho = random_pure(layout, "even", rng)
        elif kind == 1:
            rho = random_pure(layout, "odd", rng)
        else:
            rho = random_density(layout, rng)
        n_a = one_vs_rest_negativities(rho, flavor)["A"]
        n_ab = pairwise_negativity(rho, "A", "B", flavor)
        n_ac = pairwise_negativity(rho, "A", "C", flavor)
        slack = n_a**2 - n_ab**2 - n_ac**2
        worst_slack = min(worst_slack, slack)
        if slack < -1e-10:
            violations += 1
    diagnostics = [
        {"violations": violations, "worst_slack": float(worst_slack), "flavor": flavor}
    ]
    return _report("pi_inequality_monitor", samples, 0.0, float("inf"), diagnostics)
