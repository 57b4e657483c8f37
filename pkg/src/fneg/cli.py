"""Command-line frontend: reproduce the closed-form reference values, run
parameter sweeps, classify user-supplied states, and drive the verification
harness.

All commands are deterministic given ``--seed``; numeric CSV fields carry full
round-trip precision.  Exit codes: 0 ok, 1 value/verification mismatch,
2 internal error, 3 parse error, 4 validation error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import classify as classify_mod
from . import states, verify
from .errors import FnegError, LayoutError, ParityError, StateValidationError
from .fock import FockOperator, ModeLayout, SubsystemSpec
from .measures import (
    j_abc,
    log_negativity,
    n_abc,
    negativity,
    pi_abc,
    three_tangle,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INTERNAL = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4

_DEFAULT_SEED = 1234
_DEFAULT_TOLERANCE = 1e-9


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit_rows(rows: list[dict], columns: list[str], output: str) -> None:
    if output == "json":
        click.echo(json.dumps(rows, indent=2))
        return
    click.echo(",".join(columns))
    for row in rows:
        cells = [
            _fmt(row[c]) if isinstance(row[c], float) else str(row[c]) for c in columns
        ]
        click.echo(",".join(cells))


@click.group()
@click.option(
    "--tolerance",
    type=float,
    default=_DEFAULT_TOLERANCE,
    envvar="FNEG_TOLERANCE",
    show_default=True,
    help="Absolute tolerance for value checks and zero thresholds.",
)
@click.option(
    "--seed",
    type=int,
    default=_DEFAULT_SEED,
    envvar="FNEG_SEED",
    show_default=True,
    help="Base seed for all randomized commands.",
)
@click.option(
    "--output",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
    help="Serialization format for tabular results.",
)
@click.pass_context
def cli(ctx, tolerance, seed, output):
    """Fermionic entanglement negativity toolkit."""
    ctx.obj = {"tolerance": tolerance, "seed": seed, "output": output}


# -- reproduce ---------------------------------------------------------------------


def _paper_value_rows() -> list[tuple[str, float, float]]:
    """(name, computed, expected) for every closed-form regression value."""
    rows: list[tuple[str, float, float]] = []
    spec1 = SubsystemSpec((1,))

    grid = np.linspace(0.0, 1.0, 101)
    dev_f = max(
        abs(
            log_negativity(states.canonical_state("werner", p=p), spec1, "fermionic")
            - np.log((1 + p) / 2 + np.sqrt(5 * p**2 - 2 * p + 1) / 2)
        )
        for p in grid
    )
    dev_b = max(
        abs(
            log_negativity(states.canonical_state("werner", p=p), spec1, "bosonic")
            - np.log(3 * (1 + p) / 4 + abs(1 - 3 * p) / 4)
        )
        for p in grid
    )
    rows.append(("werner_fermionic_logneg_grid101_maxdev", float(dev_f), 0.0))
    rows.append(("werner_bosonic_logneg_grid101_maxdev", float(dev_b), 0.0))

    singlet = states.canonical_state("singlet")
    rows.append(("singlet_logneg_fermionic",
                 log_negativity(singlet, spec1, "fermionic"), float(np.log(2))))
    rows.append(("singlet_logneg_bosonic",
                 log_negativity(singlet, spec1, "bosonic"), float(np.log(2))))

    dimer = states.canonical_state("majorana_dimer")
    rows.append(("majorana_dimer_logneg_fermionic",
                 log_negativity(dimer, spec1, "fermionic"), float(np.log(np.sqrt(2)))))
    rows.append(("majorana_dimer_logneg_bosonic",
                 log_negativity(dimer, spec1, "bosonic"), 0.0))

    w = states.canonical_state("w")
    ghz = states.canonical_state("ghz")
    triple = states.canonical_state("majorana_triple")
    from .ptranspose import partial_trace

    w_ab = partial_trace(w, SubsystemSpec((1, 2)))
    ghz_ab = partial_trace(ghz, SubsystemSpec((1, 2)))
    triple_ab = partial_trace(triple, SubsystemSpec((1, 2)))
    rows += [
        ("w_logneg_one_vs_rest",
         log_negativity(w, spec1), float(np.log(1 + 2 * np.sqrt(2) / 3))),
        ("w_reduced_logneg_fermionic",
         log_negativity(w_ab, spec1), float(np.log((2 + np.sqrt(5)) / 3))),
        ("ghz_logneg_one_vs_rest", log_negativity(ghz, spec1), float(np.log(2))),
        ("ghz_reduced_logneg_fermionic",
         log_negativity(ghz_ab, spec1), float(np.log(np.sqrt(2)))),
        ("ghz_reduced_logneg_bosonic", log_negativity(ghz_ab, spec1, "bosonic"), 0.0),
        ("majorana_triple_logneg_one_vs_rest",
         log_negativity(triple, spec1), float(np.log(np.sqrt(5 / 3)))),
        ("majorana_triple_reduced_logneg",
         log_negativity(triple_ab, spec1), float(np.log(2 / np.sqrt(3)))),
        ("pi_abc_w_fermionic", pi_abc(w), float((np.sqrt(5) - 1) / 9)),
        ("pi_abc_ghz_fermionic", pi_abc(ghz), float((4 * np.sqrt(2) - 5) / 4)),
        ("pi_abc_ghz_bosonic", pi_abc(ghz, "bosonic"), 0.25),
        ("j_abc_ghz", j_abc(ghz), 0.25),
        ("j_abc_w", j_abc(w), 0.0),
        ("three_tangle_ghz", three_tangle(ghz), 0.25),
        ("three_tangle_w", three_tangle(w), 0.0),
        ("two_mode_pure_negativity_0.6_0.8",
         negativity(states.canonical_state(
             "two_mode_pure", lambdas=(0.6, 0.8), parity="even"), spec1),
         0.48),
    ]
    sep = states.canonical_state("psi_p", p=4 / 7)
    rows.append((
        "psi_p_separable_point_max_measure",
        max(j_abc(sep), three_tangle(sep), n_abc(sep), abs(pi_abc(sep))),
        0.0,
    ))
    return rows


_TABLE1_EXEMPLARS = [
    ("product_000", (1.0, 0.0, 0.0, 0.0), "A-B-C"),
    ("bc_pair", (1 / np.sqrt(2), 0.0, 1 / np.sqrt(2), 0.0), "A-BC"),
    ("ac_pair", (1 / np.sqrt(2), 0.0, 0.0, 1 / np.sqrt(2)), "B-AC"),
    ("ab_pair", (1 / np.sqrt(2), 1 / np.sqrt(2), 0.0, 0.0), "C-AB"),
    ("w_state", None, "W"),
    ("ghz_state", None, "GHZ"),
]


@cli.command()
@click.argument("target", type=click.Choice(["paper-values", "table1"]))
@click.pass_context
def reproduce(ctx, target):
    """Evaluate the closed-form regression values or the exemplar-class table."""
    tolerance = ctx.obj["tolerance"]
    output = ctx.obj["output"]
    if target == "paper-values":
        rows = [
            {
                "name": name,
                "computed": float(computed),
                "expected": float(expected),
                "abs_delta": float(abs(computed - expected)),
            }
            for name, computed, expected in _paper_value_rows()
        ]
        _emit_rows(rows, ["name", "computed", "expected", "abs_delta"], output)
        bad = [r for r in rows if r["abs_delta"] > tolerance]
        if bad:
            click.echo(f"{len(bad)} value(s) beyond tolerance {tolerance}", err=True)
            ctx.exit(EXIT_MISMATCH)
        ctx.exit(EXIT_OK)
    rows = []
    mismatch = False
    for name, lambdas, expected in _TABLE1_EXEMPLARS:
        if lambdas is None:
            state = states.canonical_state("w" if expected == "W" else "ghz")
            label = classify_mod.pure3_class(state, threshold=tolerance)
        else:
            coeffs = states.PureCoeffs(lambdas, "even")
            label = classify_mod.pure3_class(coeffs, threshold=tolerance)
        ok = label.label == expected
        mismatch |= not ok
        rows.append(
            {"state": name, "expected": expected, "computed": label.label,
             "match": str(ok).lower()}
        )
    _emit_rows(rows, ["state", "expected", "computed", "match"], output)
    ctx.exit(EXIT_MISMATCH if mismatch else EXIT_OK)


# -- sweep -------------------------------------------------------------------------

_WERNER_MEASURES = ("negativity", "log_negativity")
_PSI_P_MEASURES = ("j_abc", "three_tangle", "n_abc", "pi_abc")


@dataclass(frozen=True)
class SweepRecord:
    """One sweep row: parameter value, one entry per requested measure,
    flavor tag, and (for classified families) the class label."""

    parameter: float
    values: dict[str, float]
    flavor: str
    label: str | None = field(default=None)

    def as_row(self) -> dict:
        row = {"p": self.parameter, **self.values}
        if self.label is not None:
            row["label"] = self.label
        return row


@cli.command()
@click.argument("family", type=click.Choice(["werner", "psi_p"]))
@click.option("--min", "p_min", type=float, default=0.0, show_default=True)
@click.option("--max", "p_max", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=101, show_default=True)
@click.option("--measures", "measure_list", type=str, default=None,
              help="Comma-separated measure names (defaults per family).")
@click.option("--flavor", type=click.Choice(["fermionic", "bosonic"]),
              default="fermionic", show_default=True)
@click.option("--normalized", is_flag=True,
              help="Scale psi_p measures so a symmetric GHZ state gives 1.")
@click.pass_context
def sweep(ctx, family, p_min, p_max, steps, measure_list, flavor, normalized):
    """Sweep a one-parameter state family and tabulate requested measures."""
    output = ctx.obj["output"]
    if steps < 1 or p_max < p_min:
        raise click.UsageError("need steps >= 1 and max >= min")
    available = _WERNER_MEASURES if family == "werner" else _PSI_P_MEASURES
    chosen = (
        tuple(m.strip() for m in measure_list.split(",") if m.strip())
        if measure_list
        else available
    )
    unknown = [m for m in chosen if m not in available]
    if unknown:
        raise click.UsageError(f"unknown measures for {family}: {unknown}")
    if normalized and family != "psi_p":
        raise click.UsageError("--normalized applies to the psi_p family only")
    grid = np.linspace(p_min, p_max, steps)
    spec1 = SubsystemSpec((1,))
    records: list[SweepRecord] = []
    if family == "werner":
        for p in grid:
            rho = states.canonical_state("werner", p=float(p))
            values = {}
            for m in chosen:
                fn = negativity if m == "negativity" else log_negativity
                values[m] = float(fn(rho, spec1, flavor))
            records.append(SweepRecord(float(p), values, flavor))
        _emit_rows([r.as_row() for r in records], ["p"] + list(chosen), output)
        ctx.exit(EXIT_OK)

    ghz = states.canonical_state("ghz")
    normalizers = {
        "j_abc": j_abc(ghz, flavor=flavor),
        "three_tangle": three_tangle(ghz),
        "n_abc": n_abc(ghz, flavor),
        "pi_abc": pi_abc(ghz, flavor),
    }
    for p in grid:
        rho = states.canonical_state("psi_p", p=float(p))
        raw = {
            "j_abc": j_abc(rho, flavor=flavor),
            "three_tangle": three_tangle(rho),
            "n_abc": n_abc(rho, flavor),
            "pi_abc": pi_abc(rho, flavor),
        }
        values = {
            m: float(raw[m] / normalizers[m]) if normalized else float(raw[m])
            for m in chosen
        }
        records.append(
            SweepRecord(float(p), values, flavor, classify_mod.pure3_class(rho).label)
        )
    _emit_rows([r.as_row() for r in records], ["p"] + list(chosen) + ["label"], output)
    ctx.exit(EXIT_OK)


# -- classify ----------------------------------------------------------------------


def _complex_list(entries, what: str) -> np.ndarray:
    out = []
    for item in entries:
        if isinstance(item, (int, float)):
            out.append(complex(item))
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(complex(item[0], item[1]))
        else:
            raise StateValidationError(f"{what} entries must be numbers or [re, im] pairs")
    return np.array(out, dtype=complex)


def _state_from_payload(payload: dict) -> FockOperator:
    if not isinstance(payload, dict):
        raise StateValidationError("state file must contain a JSON object")
    if "matrix" in payload:
        n = int(payload.get("num_modes", 0))
        if n < 1:
            raise StateValidationError("matrix input requires num_modes")
        flat = _complex_list(payload["matrix"], "matrix")
        dim = 1 << n
        if flat.size != dim * dim:
            raise StateValidationError(
                f"matrix must have 4**num_modes = {dim * dim} entries, got {flat.size}"
            )
        mat = flat.reshape(dim, dim)
    elif "pure" in payload:
        amps = _complex_list(payload["pure"], "pure")
        n = int(payload.get("num_modes", max(amps.size.bit_length() - 1, 0)))
        if amps.size != 1 << n:
            raise StateValidationError(
                f"pure amplitude array must have 2**num_modes entries, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-8:
            raise StateValidationError(f"pure state norm {norm:.6f} is not 1")
        mat = np.outer(amps, amps.conj())
    else:
        raise StateValidationError("state file needs a 'matrix' or 'pure' field")
    labels = payload.get("labels")
    if labels is None:
        if n == 2:
            labels = ["A", "B"]
        elif n == 3:
            labels = ["A", "B", "C"]
        else:
            raise StateValidationError("labels are required for this mode count")
    layout = ModeLayout(n, tuple(labels))
    rho = FockOperator(layout, mat)
    rho.require_density_matrix()
    return rho


@cli.command("classify")
@click.argument("state_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def classify_cmd(ctx, state_file):
    """Classify a state file (JSON) and print the verdict as JSON."""
    threshold = ctx.obj["tolerance"]
    try:
        with open(state_file, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        click.echo(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                   err=True)
        ctx.exit(EXIT_PARSE)
    rho = _state_from_payload(payload)
    n = rho.layout.num_modes
    if n == 2:
        label = classify_mod.two_mode_separable(rho, threshold=threshold)
    elif n == 3:
        purity = float(np.real(np.trace(rho.matrix @ rho.matrix)))
        if abs(purity - 1.0) <= 1e-8:
            label = classify_mod.pure3_class(rho, threshold=threshold)
        else:
            label = classify_mod.mixed3_classify(rho, threshold=threshold)
    else:
        raise StateValidationError("classification supports two- or three-mode states")
    ptype = classify_mod.subsystem_parity_type(rho, rho.layout.spec("A"))
    result = label.to_dict()
    result["num_modes"] = n
    result["parity_type"] = {"kind": ptype.kind, "commutator_norm": ptype.commutator_norm}
    click.echo(json.dumps(result, indent=2))
    ctx.exit(EXIT_OK)


# -- verify ------------------------------------------------------------------------

_VERIFY_DEFAULT_TRIALS = {
    "identities": 100,
    "locc": 200,
    "perturbation": 50,
    "conjecture": 10000,
}


@cli.command("verify")
@click.argument(
    "subject", type=click.Choice(["identities", "locc", "perturbation", "conjecture"])
)
@click.option("--trials", type=int, default=None, help="Trial count (subject default).")
@click.option("--seed", type=int, default=None, help="Override the global seed.")
@click.option("--modes", type=str, default=None,
              help="Comma-separated mode counts (identities/conjecture).")
@click.pass_context
def verify_cmd(ctx, subject, trials, seed, modes):
    """Run one randomized verification suite and print its report as JSON."""
    seed = ctx.obj["seed"] if seed is None else seed
    trials = _VERIFY_DEFAULT_TRIALS[subject] if trials is None else trials
    mode_tuple = tuple(int(m) for m in modes.split(",")) if modes else None
    if subject == "identities":
        report = verify.check_identity_suite(
            seed=seed, trials=trials, modes=mode_tuple or (2, 3, 4)
        )
    elif subject == "locc":
        report = verify.check_locc_monotonicity(seed=seed, trials=trials)
    elif subject == "perturbation":
        report = verify.check_perturbation_expansion(seed=seed, trials=trials)
    else:
        report = verify.conjecture_scan(
            seed=seed, samples=trials, num_modes=mode_tuple or (2, 3)
        )
    click.echo(json.dumps(report.to_dict(), indent=2))
    ctx.exit(EXIT_OK if report.passed else EXIT_MISMATCH)


def main(argv=None) -> int:
    """Entry point mapping library errors onto the documented exit codes."""
    try:
        return cli.main(args=argv, standalone_mode=False) or EXIT_OK
    except SystemExit as exc:  # raised by ctx.exit
        return int(exc.code or 0)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_INTERNAL
    except click.ClickException as exc:
        exc.show()
        return EXIT_INTERNAL
    except (StateValidationError, ParityError, LayoutError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        return EXIT_VALIDATION
    except FnegError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc!r}", err=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
