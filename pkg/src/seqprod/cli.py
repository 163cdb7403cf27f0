"""Command-line surface.

Subcommands: ``product`` | ``axioms`` | ``nonuniqueness`` | ``channel``.
Matrices travel as JSON documents with explicit [re, im] entry pairs and
floats printed to 17 significant digits, so identical configuration yields
byte-identical reports.

Exit codes partition outcomes for CI pipelines:
    0  success
    1  internal numerical failure
    2  invalid input (message names the violated invariant)
    3  an axiom check reported failures
    4  no non-uniqueness witness found
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .axioms import (
    CheckReport,
    InsufficientSamples,
    ProductUnderTest,
    find_nonuniqueness_witness,
    luders_under_test,
    phased_under_test,
    run_axiom_suite,
)
from .channels import (
    DecompositionError,
    EffectDecomposition,
    apply_channel,
    choi_matrix,
    phased_channel,
)
from .effects import DensityOperator, DomainError, Effect, ValidationError
from .effects import luders_product, phased_product
from .linalg import NonConvergence
from .serialize import document_to_matrix, dumps, matrix_to_document

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INVALID_INPUT = 2
EXIT_AXIOM_FAILURE = 3
EXIT_NO_WITNESS = 4

SEED_ENV_VAR = "SEQPROD_SEED"

# Tolerances adjustable through repeated --tol name=value flags.
TOLERANCE_DEFAULTS = {
    "defect": 1e-9,        # axiom-check failure ceiling
    "separation": 1e-6,    # commutativity converse: minimum product gap
    "comm_floor": 0.01,    # commutativity converse: commutator floor
    "gap": 0.01,           # non-uniqueness witness threshold
    "hypothesis": 1e-10,   # S3 hypothesis tolerance
    "decomp": 1e-8,        # decomposition sum-to-identity tolerance
}


@dataclass
class RunConfig:
    dims: list[int]
    trials: int
    seed: int
    t_values: list[float]
    tolerance_overrides: dict[str, float] = field(default_factory=dict)

    def tol(self, name: str) -> float:
        return self.tolerance_overrides.get(name, TOLERANCE_DEFAULTS[name])

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "t_values": list(self.t_values),
            "tolerance_overrides": dict(self.tolerance_overrides),
        }


def _parse_csv_ints(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"--dims expects a csv of integers: {exc}") from exc
    if not values or any(v < 1 for v in values):
        raise ValidationError("--dims entries must be integers >= 1")
    return values


def _parse_csv_floats(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"--t expects a csv of reals: {exc}") from exc
    if not values or not all(math.isfinite(v) for v in values):
        raise ValidationError("--t entries must be finite reals")
    return values


def _parse_tolerances(pairs) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        if not sep:
            raise ValidationError(f"--tol expects name=value, got {pair!r}")
        if name not in TOLERANCE_DEFAULTS:
            raise ValidationError(
                f"unknown tolerance {name!r}; known: {', '.join(sorted(TOLERANCE_DEFAULTS))}"
            )
        try:
            overrides[name] = float(value)
        except ValueError as exc:
            raise ValidationError(f"--tol {name}: {exc}") from exc
    return overrides


def _resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"{SEED_ENV_VAR} must be an integer: {exc}") from exc
    return args.seed


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        dims=_parse_csv_ints(args.dims),
        trials=args.trials,
        seed=_resolve_seed(args),
        t_values=_parse_csv_floats(args.t),
        tolerance_overrides=_parse_tolerances(args.tol),
    )


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _load_effect(path: str) -> Effect:
    return Effect(document_to_matrix(_load_json(path)))


def _emit(args, payload) -> None:
    text = dumps(payload) + "\n"
    sys.stdout.write(text)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_dicts(reports: list[CheckReport]) -> list[dict]:
    return [r.to_dict() for r in reports]


def _raw_matrix_product(a: Effect, b: Effect) -> Effect:
    # Deliberately broken product for exercising the failure path: the bare
    # matrix product symmetrized, which is not closed on effects.
    return Effect(a.matrix @ b.matrix)


def _product_under_test(name: str, t: float) -> ProductUnderTest:
    if name == "luders":
        return luders_under_test()
    if name == "phased":
        return phased_under_test(t)
    return ProductUnderTest(_raw_matrix_product, "raw")


def cmd_product(args) -> int:
    a = _load_effect(args.a_file)
    b = _load_effect(args.b_file)
    t_values = _parse_csv_floats(args.t)
    if len(t_values) != 1:
        raise ValidationError("product expects exactly one value in --t")
    if args.form == "luders":
        result = luders_product(a, b)
    else:
        result = phased_product(a, b, t_values[0])
    _emit(args, matrix_to_document(result.matrix))
    return EXIT_OK


def cmd_axioms(args) -> int:
    config = _config_from_args(args)
    groups = []
    if args.product == "phased":
        variants = [(f"phased(t={t:g})", t) for t in config.t_values]
    else:
        variants = [(args.product, None)]
    all_passed = True
    for label, t in variants:
        put = _product_under_test(args.product, t if t is not None else 1.0)
        reports = run_axiom_suite(
            put,
            trials=config.trials,
            dims=tuple(config.dims),
            seed=config.seed,
            ceiling=config.tol("defect"),
            comm_floor=config.tol("comm_floor"),
            separation_floor=config.tol("separation"),
            hypothesis_tol=config.tol("hypothesis"),
        )
        failed = sum(r.failures for r in reports)
        all_passed = all_passed and failed == 0
        groups.append({
            "label": put.label if t is None else label,
            "t": t,
            "failures": failed,
            "reports": _report_dicts(reports),
        })
    _emit(args, {
        "command": "axioms",
        "product": args.product,
        "config": config.to_dict(),
        "groups": groups,
        "all_passed": all_passed,
    })
    return EXIT_OK if all_passed else EXIT_AXIOM_FAILURE


def cmd_nonuniqueness(args) -> int:
    config = _config_from_args(args)
    result = find_nonuniqueness_witness(
        trials=config.trials,
        dims=tuple(config.dims),
        t_values=tuple(config.t_values),
        seed=config.seed,
        gap_threshold=config.tol("gap"),
        commuting_only=(args.kind == "commuting"),
    )
    _emit(args, {
        "command": "nonuniqueness",
        "config": config.to_dict(),
        "kind": args.kind,
        **result,
    })
    return EXIT_OK if result["found"] else EXIT_NO_WITNESS


def cmd_channel(args) -> int:
    config = _config_from_args(args)
    t_values = config.t_values
    if len(t_values) != 1:
        raise ValidationError("channel expects exactly one value in --t")
    docs = _load_json(args.decomposition_file)
    if not isinstance(docs, list):
        raise ValidationError("decomposition file must be a JSON array of matrix documents")
    effects = [Effect(document_to_matrix(doc)) for doc in docs]
    decomposition = EffectDecomposition(effects, sum_tol=config.tol("decomp"))
    rho = DensityOperator(document_to_matrix(_load_json(args.rho_file)))
    channel = phased_channel(decomposition, t_values[0])
    out = apply_channel(channel, rho)
    choi = choi_matrix(channel)
    min_eig = float(np.linalg.eigvalsh(choi)[0])
    _emit(args, {
        "command": "channel",
        "t": t_values[0],
        "output": matrix_to_document(out.matrix),
        "trace": float(np.trace(out.matrix).real),
        "min_choi_eigenvalue": min_eig,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqprod",
        description="Sequential products on quantum effects: compute products, "
                    "verify the axioms, demonstrate non-uniqueness, build channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, trials: int, dims: str, t: str):
        p.add_argument("--seed", type=int, default=0,
                       help=f"RNG seed (overridden by ${SEED_ENV_VAR})")
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--dims", default=dims, help="csv of dimensions")
        p.add_argument("--t", default=t, help="csv of phase parameters")
        p.add_argument("--json-out", default=None, help="also write the JSON here")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                       help="override a tolerance (repeatable); names: "
                            + ", ".join(sorted(TOLERANCE_DEFAULTS)))

    p = sub.add_parser("product", help="product of two effects from files")
    p.add_argument("a_file")
    p.add_argument("b_file")
    p.add_argument("--form", choices=("luders", "phased"), default="phased")
    common(p, trials=1, dims="2", t="1")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("axioms", help="run the S1-S5 suite plus the commutativity check")
    p.add_argument("--product", choices=("luders", "phased", "raw"), default="phased",
                   help="'raw' is a deliberately broken product for failure-path tests")
    common(p, trials=1000, dims="2,3,4,6", t="1")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("nonuniqueness", help="search for a phased-vs-Lüders witness")
    p.add_argument("--kind", choices=("generic", "commuting"), default="generic")
    common(p, trials=100, dims="2", t="1")
    p.set_defaults(func=cmd_nonuniqueness)

    p = sub.add_parser("channel", help="apply a phased channel built from a decomposition")
    p.add_argument("decomposition_file")
    p.add_argument("rho_file")
    common(p, trials=1, dims="2", t="1")
    p.set_defaults(func=cmd_channel)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID_INPUT
    try:
        return args.func(args)
    except (ValidationError, DomainError, DecompositionError,
            InsufficientSamples) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (NonConvergence, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
