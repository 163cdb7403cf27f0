"""Randomized verification of the sequential-product axioms.

The checks accept *any* product implementation through
:class:`ProductUnderTest` and measure defects in Frobenius norm against a
failure ceiling (default 1e-9).  Hypotheses that are measure-zero under
generic sampling (disjoint supports, commuting operands) are produced by
dedicated structured generators instead of rejection sampling, which would
essentially never satisfy them in floating point.

Trials are independent given per-trial derived seeds, so identical
configuration yields identical reports, witnesses included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .effects import (
    DomainError,
    Effect,
    Projection,
    ValidationError,
    luders_product,
    phased_product,
)
from .linalg import hermitize, operator_norm
from .serialize import matrix_to_document

__all__ = [
    "InsufficientSamples",
    "ClusteredSpectrum",
    "EffectGenSpec",
    "GENERATOR_KINDS",
    "gen_effect",
    "haar_unitary",
    "ProductUnderTest",
    "luders_under_test",
    "phased_under_test",
    "CheckReport",
    "check_s1",
    "check_s2",
    "check_s3",
    "check_s4",
    "check_s5",
    "check_commutativity_theorem",
    "run_axiom_suite",
    "distinct_spectrum",
    "projector_interpolation",
    "find_nonuniqueness_witness",
]

DEFAULT_CEILING = 1e-9
DEFAULT_DIMS = (2, 3, 4, 6)

GENERATOR_KINDS = (
    "generic",
    "projection",
    "commuting_pair",
    "kernel_disjoint_pair",
    "near_boundary",
)


class InsufficientSamples(RuntimeError):
    """Too few trials satisfied the check's hypothesis."""


class ClusteredSpectrum(RuntimeError):
    """Interpolation nodes collide; the projector recovery is ill-posed."""


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r)
    phase = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phase


def _gen_generic(rng, dim) -> Effect:
    return Effect.from_eigensystem(rng.uniform(0.0, 1.0, dim), haar_unitary(dim, rng))


def _gen_projection(rng, dim) -> Projection:
    ones = int(rng.integers(1, dim)) if dim >= 2 else int(rng.integers(0, 2))
    lam = np.zeros(dim)
    lam[rng.permutation(dim)[:ones]] = 1.0
    mat = Effect.from_eigensystem(lam, haar_unitary(dim, rng)).matrix
    return Projection(mat)


def _gen_commuting_pair(rng, dim) -> tuple[Effect, Effect]:
    v = haar_unitary(dim, rng)
    return (
        Effect.from_eigensystem(rng.uniform(0.0, 1.0, dim), v),
        Effect.from_eigensystem(rng.uniform(0.0, 1.0, dim), v),
    )


def _gen_kernel_disjoint_pair(rng, dim) -> tuple[Effect, Effect]:
    v = haar_unitary(dim, rng)
    k = int(rng.integers(1, dim)) if dim >= 2 else 1
    lam_a = np.zeros(dim)
    lam_a[:k] = rng.uniform(0.0, 1.0, k)
    lam_b = np.zeros(dim)
    lam_b[k:] = rng.uniform(0.0, 1.0, dim - k)
    return Effect.from_eigensystem(lam_a, v), Effect.from_eigensystem(lam_b, v)


def _gen_near_boundary(rng, dim) -> Effect:
    lam = rng.choice(np.array([0.0, 1e-12, 1.0 - 1e-12, 1.0]), size=dim)
    lam[int(rng.integers(dim))] = 0.0
    return Effect.from_eigensystem(lam, haar_unitary(dim, rng))


@dataclass(frozen=True)
class EffectGenSpec:
    """Recipe for one structured random draw."""

    dim: int
    kind: str
    seed: int


def gen_effect(spec: EffectGenSpec):
    """Draw per the recipe; pair kinds return a 2-tuple of effects."""
    if spec.dim < 1:
        raise ValidationError(f"dim must be >= 1, got {spec.dim}")
    if spec.kind not in GENERATOR_KINDS:
        raise ValidationError(f"unknown generator kind {spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "generic":
        return _gen_generic(rng, spec.dim)
    if spec.kind == "projection":
        return _gen_projection(rng, spec.dim)
    if spec.kind == "commuting_pair":
        return _gen_commuting_pair(rng, spec.dim)
    if spec.kind == "kernel_disjoint_pair":
        return _gen_kernel_disjoint_pair(rng, spec.dim)
    return _gen_near_boundary(rng, spec.dim)


# ---------------------------------------------------------------------------
# Products under test and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductUnderTest:
    """A candidate sequential product, total on equal-dimension effect pairs."""

    product: Callable[[Effect, Effect], Effect]
    label: str

    def __call__(self, a: Effect, b: Effect) -> Effect:
        return self.product(a, b)


def luders_under_test() -> ProductUnderTest:
    return ProductUnderTest(luders_product, "luders")


def phased_under_test(t: float) -> ProductUnderTest:
    return ProductUnderTest(
        lambda a, b: phased_product(a, b, t), f"phased(t={t:g})"
    )


@dataclass
class CheckReport:
    """Outcome of one randomized check.

    ``trials`` counts hypothesis-satisfying executions only; ``witness``
    serializes the inputs of the first exception, else of the worst defect.
    ``worst_violation`` is the largest measured (finite) defect.
    """

    axiom: str
    trials: int
    failures: int
    worst_violation: float
    witness: Optional[dict]
    seed: int
    breakdown: Optional[dict] = field(default=None)

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "trials": self.trials,
            "failures": self.failures,
            "worst_violation": self.worst_violation,
            "seed": self.seed,
            "witness": self.witness,
            "breakdown": self.breakdown,
        }


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng((seed, index))


def _doc(effect_or_matrix) -> dict:
    m = getattr(effect_or_matrix, "matrix", effect_or_matrix)
    return matrix_to_document(m)


def _fro(m) -> float:
    return float(np.linalg.norm(m))


def _run_check(axiom, put, trials, dims, seed, ceiling, trial_fn,
               max_attempt_factor=10) -> CheckReport:
    """Drive trials until `trials` samples executed or attempts are exhausted.

    ``trial_fn(rng, dim) -> (defect, witness) | None`` where None means the
    trial's hypothesis was not met (not a sample).  Exceptions raised by the
    product under test count as failures.
    """
    dims = tuple(dims)
    executed = failures = attempts = 0
    worst = 0.0
    worst_witness: Optional[dict] = None
    exc_witness: Optional[dict] = None
    while executed < trials and attempts < trials * max_attempt_factor:
        i = attempts
        attempts += 1
        dim = dims[(i // 2) % len(dims)]
        rng = _trial_rng(seed, i)
        try:
            res = trial_fn(rng, dim, i)
        except (ValidationError, DomainError) as exc:
            executed += 1
            failures += 1
            if exc_witness is None:
                exc_witness = {"trial": i, "dim": dim, "error": str(exc)}
            continue
        if res is None:
            continue
        defect, witness = res
        executed += 1
        if defect > worst:
            worst = defect
            worst_witness = {"trial": i, "dim": dim, **witness}
        if defect > ceiling:
            failures += 1
    return CheckReport(
        axiom=axiom,
        trials=executed,
        failures=failures,
        worst_violation=worst,
        witness=exc_witness if exc_witness is not None else worst_witness,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------

def check_s1(put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
             seed: int = 0, ceiling: float = DEFAULT_CEILING) -> CheckReport:
    """S1: B ↦ A∘B is additive, and A∘B + A∘C stays below the identity.

    C is drawn as a random mixture of I − B so that B + C <= I holds by
    construction.
    """
    def trial(rng, dim, _i):
        a = _gen_generic(rng, dim)
        b = _gen_generic(rng, dim)
        u = float(rng.uniform())
        c = Effect(u * (np.eye(dim) - b.matrix))
        ab, ac = put(a, b), put(a, c)
        bc = Effect(b.matrix + c.matrix)
        defect = _fro(ab.matrix + ac.matrix - put(a, bc).matrix)
        top = float(np.linalg.eigvalsh(ab.matrix + ac.matrix)[-1])
        defect = max(defect, top - 1.0)
        return defect, {"a": _doc(a), "b": _doc(b), "c": _doc(c)}

    return _run_check("S1", put, trials, dims, seed, ceiling, trial)


def check_s2(put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
             seed: int = 0, ceiling: float = DEFAULT_CEILING) -> CheckReport:
    """S2: I∘A = A."""
    def trial(rng, dim, _i):
        a = _gen_generic(rng, dim)
        ident = Effect(np.eye(dim))
        defect = _fro(put(ident, a).matrix - a.matrix)
        return defect, {"a": _doc(a)}

    return _run_check("S2", put, trials, dims, seed, ceiling, trial)


def check_s3(put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
             seed: int = 0, ceiling: float = DEFAULT_CEILING,
             hypothesis_tol: float = 1e-10,
             generators=("kernel_disjoint", "generic")) -> CheckReport:
    """S3: A∘B = 0 implies B∘A = 0.

    Disjoint-support pairs satisfy the hypothesis by construction; generic
    pairs are rejection-sampled on ‖A∘B‖ <= hypothesis_tol and almost always
    skipped.  Raises InsufficientSamples if fewer than 10% of the requested
    trials produced a hypothesis-satisfying pair.
    """
    for g in generators:
        if g not in ("kernel_disjoint", "generic"):
            raise ValidationError(f"unknown S3 generator {g!r}")
    if not generators:
        raise ValidationError("check_s3 needs at least one generator")

    def trial(rng, dim, i):
        kind = generators[i % len(generators)]
        if kind == "kernel_disjoint":
            a, b = _gen_kernel_disjoint_pair(rng, dim)
            forward = _fro(put(a, b).matrix)
            if forward > hypothesis_tol:
                # the structured pair must satisfy A∘B = 0; not doing so is
                # itself a violation of the product's kernel behaviour
                return forward, {"a": _doc(a), "b": _doc(b)}
        else:
            a, b = _gen_generic(rng, dim), _gen_generic(rng, dim)
            if _fro(put(a, b).matrix) > hypothesis_tol:
                return None
        defect = _fro(put(b, a).matrix)
        return defect, {"a": _doc(a), "b": _doc(b)}

    report = _run_check("S3", put, trials, dims, seed, ceiling, trial)
    if report.trials < max(1, trials // 10):
        raise InsufficientSamples(
            f"only {report.trials} of {trials} requested trials met the "
            "S3 hypothesis; use the kernel_disjoint generator directly"
        )
    return report


def check_s4(put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
             seed: int = 0, ceiling: float = DEFAULT_CEILING) -> CheckReport:
    """S4: if A∘B = B∘A then A∘(I−B) = (I−B)∘A and A∘(B∘C) = (A∘B)∘C.

    The hypothesis is produced by drawing A, B with a shared eigenbasis;
    C is generic.
    """
    def trial(rng, dim, _i):
        a, b = _gen_commuting_pair(rng, dim)
        c = _gen_generic(rng, dim)
        comp = Effect(np.eye(dim) - b.matrix)
        d1 = _fro(put(a, comp).matrix - put(comp, a).matrix)
        d2 = _fro(put(a, put(b, c)).matrix - put(put(a, b), c).matrix)
        return max(d1, d2), {"a": _doc(a), "b": _doc(b), "c": _doc(c)}

    return _run_check("S4", put, trials, dims, seed, ceiling, trial)


def check_s5(put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
             seed: int = 0, ceiling: float = DEFAULT_CEILING) -> CheckReport:
    """S5: C commuting with A and B commutes with A∘B and with A + B.

    All three effects share one eigenbasis, with the spectra of A and B
    drawn so that A + B <= I always holds.
    """
    def trial(rng, dim, _i):
        v = haar_unitary(dim, rng)
        lam_a = rng.uniform(0.0, 1.0, dim)
        lam_b = rng.uniform(0.0, 1.0, dim) * (1.0 - lam_a)
        a = Effect.from_eigensystem(lam_a, v)
        b = Effect.from_eigensystem(lam_b, v)
        c = Effect.from_eigensystem(rng.uniform(0.0, 1.0, dim), v)
        ab = put(a, b)
        d1 = _fro(put(c, ab).matrix - put(ab, c).matrix)
        s = Effect(a.matrix + b.matrix)
        d2 = _fro(put(c, s).matrix - put(s, c).matrix)
        return max(d1, d2), {"a": _doc(a), "b": _doc(b), "c": _doc(c)}

    return _run_check("S5", put, trials, dims, seed, ceiling, trial)


def check_commutativity_theorem(
    put: ProductUnderTest, *, trials: int = 1000, dims=DEFAULT_DIMS,
    seed: int = 0, comm_floor: float = 0.01,
    ceiling: float = DEFAULT_CEILING, separation_floor: float = 1e-6,
) -> CheckReport:
    """Both directions of the commutativity criterion A∘B = B∘A ⇔ AB = BA.

    Forward (even trials): commuting operands must give a symmetric product
    equal to the plain matrix product AB.  Converse, contrapositive form
    (odd trials): operands with ‖AB − BA‖_F >= comm_floor must give products
    differing by more than separation_floor.  Failures are counted per
    direction in ``breakdown``.
    """
    dims = tuple(dims)
    fwd_trials = fwd_fail = con_trials = con_fail = 0
    worst_fwd = 0.0
    min_gap = float("inf")
    fwd_witness = con_witness = exc_witness = None
    attempts = 0
    while (fwd_trials + con_trials) < trials and attempts < trials * 10:
        i = attempts
        attempts += 1
        dim = dims[(i // 2) % len(dims)]
        rng = _trial_rng(seed, i)
        if i % 2 == 0:
            a, b = _gen_commuting_pair(rng, dim)
            try:
                pab, pba = put(a, b), put(b, a)
            except (ValidationError, DomainError) as exc:
                fwd_trials += 1
                fwd_fail += 1
                if exc_witness is None:
                    exc_witness = {"trial": i, "dim": dim, "error": str(exc)}
                continue
            defect = max(
                _fro(pab.matrix - pba.matrix),
                _fro(pab.matrix - a.matrix @ b.matrix),
            )
            fwd_trials += 1
            if defect > worst_fwd:
                worst_fwd = defect
                fwd_witness = {"trial": i, "dim": dim, "direction": "forward",
                               "a": _doc(a), "b": _doc(b)}
            if defect > ceiling:
                fwd_fail += 1
        else:
            if dim < 2:
                continue  # every pair commutes; the commutator floor is unreachable
            pair = None
            for _ in range(200):
                a, b = _gen_generic(rng, dim), _gen_generic(rng, dim)
                if _fro(a.matrix @ b.matrix - b.matrix @ a.matrix) >= comm_floor:
                    pair = (a, b)
                    break
            if pair is None:
                continue
            a, b = pair
            try:
                gap = _fro(put(a, b).matrix - put(b, a).matrix)
            except (ValidationError, DomainError) as exc:
                con_trials += 1
                con_fail += 1
                if exc_witness is None:
                    exc_witness = {"trial": i, "dim": dim, "error": str(exc)}
                continue
            con_trials += 1
            if gap < min_gap:
                min_gap = gap
            if gap <= separation_floor:
                con_fail += 1
                if con_witness is None:
                    con_witness = {"trial": i, "dim": dim, "direction": "converse",
                                   "gap": gap, "a": _doc(a), "b": _doc(b)}
    witness = exc_witness or con_witness or fwd_witness
    return CheckReport(
        axiom="commutativity",
        trials=fwd_trials + con_trials,
        failures=fwd_fail + con_fail,
        worst_violation=worst_fwd,
        witness=witness,
        seed=seed,
        breakdown={
            "forward_trials": fwd_trials,
            "forward_failures": fwd_fail,
            "converse_trials": con_trials,
            "converse_failures": con_fail,
            "min_converse_gap": (min_gap if con_trials else None),
        },
    )


def run_axiom_suite(put: ProductUnderTest, *, trials: int = 1000,
                    dims=DEFAULT_DIMS, seed: int = 0,
                    ceiling: float = DEFAULT_CEILING,
                    comm_floor: float = 0.01,
                    separation_floor: float = 1e-6,
                    hypothesis_tol: float = 1e-10) -> list[CheckReport]:
    """All five axiom checks plus the commutativity criterion."""
    return [
        check_s1(put, trials=trials, dims=dims, seed=seed, ceiling=ceiling),
        check_s2(put, trials=trials, dims=dims, seed=seed + 1, ceiling=ceiling),
        check_s3(put, trials=trials, dims=dims, seed=seed + 2, ceiling=ceiling,
                 hypothesis_tol=hypothesis_tol),
        check_s4(put, trials=trials, dims=dims, seed=seed + 3, ceiling=ceiling),
        check_s5(put, trials=trials, dims=dims, seed=seed + 4, ceiling=ceiling),
        check_commutativity_theorem(
            put, trials=trials, dims=dims, seed=seed + 5,
            comm_floor=comm_floor, ceiling=ceiling,
            separation_floor=separation_floor),
    ]


# ---------------------------------------------------------------------------
# Projector recovery by interpolation
# ---------------------------------------------------------------------------

def distinct_spectrum(b: Effect, cluster_tol: float = 1e-8) -> np.ndarray:
    """Distinct eigenvalues of the effect, clustered within cluster_tol.

    Eigenvalues at or below the support cutoff are treated as exactly zero
    before clustering, matching the product's kernel convention.
    """
    lam = np.where(
        b.decomposition.eigenvalues > b.support_cutoff,
        b.decomposition.eigenvalues, 0.0,
    )
    reps = []
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or lam[i] - lam[i - 1] > cluster_tol:
            reps.append(float(np.mean(lam[start:i])))
            start = i
    return np.array(reps)


def projector_interpolation(b: Effect, k: int, *, cluster_tol: float = 1e-8,
                            node_tol: float = 1e-10) -> np.ndarray:
    """Recover the k-th spectral projector of B from the matrix B^{1/2}B^{-i}.

    Lagrange interpolation through the nodes w_j = b_j^{1/2} e^{-i ln b_j}
    (w = 0 for the kernel cluster) evaluated at the matrix; the empty
    product for a single cluster yields the identity.  k indexes the
    ascending distinct eigenvalues, 0-based.
    """
    reps = distinct_spectrum(b, cluster_tol)
    m = len(reps)
    if not 0 <= k < m:
        raise IndexError(f"cluster index {k} out of range for {m} clusters")
    nodes = np.array([
        np.sqrt(r) * np.exp(-1j * np.log(r)) if r > 0.0 else 0j for r in reps
    ])
    for p in range(m):
        for q in range(p + 1, m):
            if abs(nodes[p] - nodes[q]) < node_tol:
                raise ClusteredSpectrum(
                    f"interpolation nodes {p} and {q} are closer than {node_tol:g}"
                )
    dec = b.decomposition
    u = np.zeros(dec.dim, dtype=np.complex128)
    mask = dec.eigenvalues > b.support_cutoff
    lam = dec.eigenvalues[mask]
    u[mask] = np.sqrt(lam) * np.exp(-1j * np.log(lam))
    matrix = dec.apply(u)
    result = np.eye(dec.dim, dtype=np.complex128)
    denom = 1.0 + 0j
    for j in range(m):
        if j == k:
            continue
        result = result @ (matrix - nodes[j] * np.eye(dec.dim))
        denom *= nodes[k] - nodes[j]
    return hermitize(result / denom)


# ---------------------------------------------------------------------------
# Non-uniqueness search
# ---------------------------------------------------------------------------

def find_nonuniqueness_witness(*, trials: int = 100, dims=(2,),
                               t_values=(1.0,), seed: int = 0,
                               gap_threshold: float = 0.01,
                               commuting_only: bool = False) -> dict:
    """Search for (A, B, t) separating the phased product from Lüders.

    Maximizes ‖A ∘_t B − A ∘ B‖_op over random draws.  For a 2x2 witness
    the reported ``theta`` is t·(ln a² − ln b²) with a² the larger
    eigenvalue of A, the phase that twists the off-diagonal entry.
    """
    dims = tuple(dims)
    t_values = tuple(float(t) for t in t_values)
    best = None
    first_hit = None
    for i in range(trials):
        dim = dims[i % len(dims)]
        t = t_values[i % len(t_values)]
        rng = _trial_rng(seed, i)
        if commuting_only:
            a, b = _gen_commuting_pair(rng, dim)
        else:
            a, b = _gen_generic(rng, dim), _gen_generic(rng, dim)
        ph = phased_product(a, b, t)
        lu = luders_product(a, b)
        gap = operator_norm(ph.matrix - lu.matrix)
        if gap > gap_threshold and first_hit is None:
            first_hit = i
        if best is None or gap > best[0]:
            best = (gap, i, dim, t, a, b, ph, lu)
    gap, trial, dim, t, a, b, ph, lu = best
    theta = None
    if dim == 2:
        lam = a.decomposition.eigenvalues
        if lam[0] > a.support_cutoff:
            theta = t * (np.log(lam[1]) - np.log(lam[0]))
    return {
        "found": bool(gap > gap_threshold),
        "gap": float(gap),
        "threshold": float(gap_threshold),
        "trial": int(trial),
        "first_hit_trial": first_hit,
        "dim": int(dim),
        "t": float(t),
        "theta": (float(theta) if theta is not None else None),
        "a_eigenvalues": [float(x) for x in a.decomposition.eigenvalues],
        "witness": {
            "a": _doc(a),
            "b": _doc(b),
            "phased": _doc(ph),
            "luders": _doc(lu),
        },
    }
