"""Full pipeline: validate, solve, test parallelizability, classify, bound, profile."""
from __future__ import annotations

from dataclasses import dataclass, field

from .classify import (
    BoundReport,
    ClassificationError,
    FactorDecomposition,
    block_route,
    check_theorem_bound,
    decompose_factors,
    factor_action_profile,
    structure_constants,
)
from .linefields import BlockDecomposition
from .normalform import NormalFormError, NormalFormResult, compute_normal_form
from .symmetry import ParallelizabilityVerdict, SymmetrySolution, WebSpec, parallelizability_test, require_valid, solve_symmetries

__all__ = ["Analysis", "analyze"]


@dataclass
class Analysis:
    web: WebSpec
    solution: SymmetrySolution
    verdict: ParallelizabilityVerdict
    decomposition: FactorDecomposition | None = None
    block: BlockDecomposition | None = None
    bound: BoundReport | None = None
    normal_form: NormalFormResult | None = None
    alarms: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def parallelizable(self) -> bool:
        return self.verdict.verdict == "parallelizable"

    @property
    def counts(self):
        return None if self.decomposition is None else self.decomposition.counts

    def to_json(self):
        out = {
            "web": self.web.to_json(),
            "symmetries": self.solution.to_json(),
            "parallelizability": self.verdict.to_json(),
        }
        if self.solution.structure is not None:
            out["structure_constants"] = self.solution.structure.to_json()
        if self.parallelizable:
            out["classification"] = "not applicable (parallelizable web)"
        elif self.decomposition is not None:
            cl = self.decomposition.to_json()
            cl["bound_checks"] = self.bound.to_json() if self.bound is not None else None
            cl["block_route"] = self.block.to_json() if self.block is not None else None
            out["classification"] = cl
        else:
            out["classification"] = None
        if self.normal_form is not None:
            out["normal_form"] = self.normal_form.to_json()
        out["alarms"] = list(self.alarms)
        out["warnings"] = list(self.warnings)
        return out


def analyze(w: WebSpec, degree_cap: int | None = None, normal_form: bool = True) -> Analysis:
    """Run every stage; disagreements are collected in ``alarms`` instead of raised.

    An invalid web raises :class:`webiso.symmetry.WebError`.
    """
    require_valid(w)
    sol = solve_symmetries(w, degree_cap)
    nf, nf_error = None, None
    if normal_form:
        try:
            nf = compute_normal_form(w)
        except NormalFormError as exc:
            nf_error = f"normal form: {exc}"
    verdict = parallelizability_test(w, sol, normal_form=nf)
    a = Analysis(w, sol, verdict, normal_form=nf)
    if nf_error:
        a.alarms.append(nf_error)
    if not sol.stabilized:
        a.warnings.append(f"dimension not stabilized over orders {list(sol.orders)}: {list(sol.dims_by_order)}")
    if verdict.verdict == "inconsistent":
        a.alarms.append(
            f"parallelizability branches disagree: symmetry branch {verdict.branch_symmetry}, normal form branch {verdict.branch_normal_form}"
        )
    if verdict.verdict != "not parallelizable":
        return a
    if sol.dim > w.n:
        a.alarms.append(f"non-parallelizable web with {sol.dim} > n = {w.n} symmetries")
    try:
        sc = structure_constants(sol)
        d = decompose_factors(sc, sol.value_matrix())
        a.decomposition = factor_action_profile(d, sol, w)
    except ClassificationError as exc:
        a.alarms.append(f"invariant route: {exc}")
        return a
    try:
        a.block = block_route(sol, sc)
    except ClassificationError as exc:
        a.alarms.append(f"block route: {exc}")
    if a.block is not None and a.block.counts != a.decomposition.counts:
        a.alarms.append(f"classifier routes disagree: invariants give {a.decomposition.counts}, block reduction gives {a.block.counts}")
    a.bound = check_theorem_bound(a.decomposition, w.n, False)
    if not a.bound.passed:
        failed = [c[1] for c in a.bound.checks if c[2] and not c[3]]
        a.alarms.append(f"dimension bound violated: {', '.join(failed)}")
    return a
