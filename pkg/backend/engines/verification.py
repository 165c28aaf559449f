"""
Verification Suites Module.

This module provides the consistency sweeps run by `eo verify`: frame checks
over GF(p^2), exhaustive zip-datum checks, Clifford slope agreement and the
unitary three-way agreement. Every suite returns a SuiteResult of named
checks; nothing is raised for a failing check so that a run reports every
failure at once.
"""

import logging
from typing import Callable, List, Optional, Sequence

from backend.engines import (
    clifford_newton,
    sogroup,
    strata_orth,
    unitary_dd,
    weyl,
    zipcox,
)
from backend.engines.errors import InternalConsistencyError
from backend.models.models import (
    CheckResult,
    Parity,
    PrimeBehavior,
    PsiKind,
    Suite,
    SuiteResult,
)


# Configure logger
logger = logging.getLogger(__name__)

FRAME_PRIMES = (3, 5, 7)
FRAME_N_MAX = 6
ZIP_N_MAX = 6
SWEEP_N_MAX = 8
CLIFFORD_N_MAX = 6
UNITARY_N_MAX = 10


def _run(name: str, check: Callable[[], Optional[str]]) -> CheckResult:
    """A check returns None on success or a failure description."""
    try:
        problem = check()
    except (InternalConsistencyError, ValueError) as e:
        problem = f"{type(e).__name__}: {e}"
    if problem:
        logger.warning(f"Check {name} failed: {problem}")
    return CheckResult(name=name, passed=not problem, detail=problem or "")


def frame_configs(n_values: Sequence[int], primes: Sequence[int]):
    """(gram, twisted) pairs: odd untwisted and twisted, even split untwisted, even nonsplit twisted."""
    configs = []
    for n in n_values:
        for p in primes:
            u = strata_orth.least_nonsquare(p)
            if n % 2:
                gram = sogroup.gram_spec(n, p)
                configs.extend([(gram, False), (gram, True)])
            else:
                configs.append((sogroup.gram_spec(n, p), False))
                configs.append((sogroup.gram_spec(n, p, c=u, nonsplit=True), True))
    return configs


def frames_suite(
    seed: int,
    samples: int,
    n_values: Optional[Sequence[int]] = None,
    primes: Optional[Sequence[int]] = None,
) -> SuiteResult:
    result = SuiteResult(suite=Suite.FRAMES)
    configs = frame_configs(n_values or range(1, FRAME_N_MAX + 1), primes or FRAME_PRIMES)
    for index, (gram, twisted) in enumerate(configs):
        case_seed = seed + index
        name = f"frame n={gram.n} p={gram.p} {gram.parity.value} twisted={twisted} seed={case_seed}"

        def check(gram=gram, twisted=twisted, case_seed=case_seed):
            frame = sogroup.standard_frame(gram, twisted)
            report = sogroup.frame_verify(gram, frame, twisted, samples, case_seed)
            if report.passed:
                return None
            first = report.violations[0]
            return f"{len(report.violations)} violations, first ({first.condition}) {first.direction}"

        result.checks.append(_run(name, check))
    return result


def _check_labels(n: int) -> Optional[str]:
    group = weyl.group_for_n(n)
    reps = {w.perm for w in weyl.min_coset_reps(group, weyl.levi_generators(group))}
    closed = {weyl.evaluate_word(group, word).perm for _, word in weyl.closed_form_muW(n)}
    expected = n + 1 if n % 2 else n + 2
    if reps != closed or len(reps) != expected:
        return f"{len(reps)} coset representatives, {len(closed)} closed-form labels"
    return None


def _check_orbits(D) -> Optional[str]:
    classes = zipcox.orbit_classes(D)
    label_perms = {label.rep.perm for label in zipcox.labels(D)}
    if len(classes) != len(label_perms):
        return f"{len(classes)} orbits for {len(label_perms)} labels"
    for orbit in classes:
        if len(orbit & label_perms) != 1:
            return f"An orbit meets {len(orbit & label_perms)} labels"
    return None


def _check_Ew(D) -> Optional[str]:
    for w in weyl.elements(D.group):
        formula = zipcox.compute_Ew_perms(D, w.perm)
        if formula != zipcox.fixed_point_Ew(D, w):
            return f"E_w differs from the fixed-point iteration at {w}"
        for i in zipcox.commuting_fixed_reflections(D, w):
            if weyl.simple_reflection_perm(D.group, i) not in formula:
                return f"s_{i} commutes with {w} but is missing from E_w"
    return None


def _check_order(D, n: int) -> Optional[str]:
    """Antisymmetry for every psi; the chain/diamond shape for psi = id."""
    covers = zipcox.hasse_diagram(D)
    if D.psi.kind != PsiKind.IDENTITY:
        return None
    m = weyl.rank_for_n(n)
    expected_count = n if n % 2 else n + 2
    if len(covers) != expected_count:
        return f"{len(covers)} covers, expected {expected_count}"
    if n % 2 == 0:
        pair = (f"w_{m - 1}", weyl.dagger_name(n))
        graph = zipcox.order_graph(D)
        if graph.has_edge(*pair) or graph.has_edge(pair[1], pair[0]):
            return f"{pair[0]} and {pair[1]} are comparable"
    return None


def _check_psi_swap(n: int) -> Optional[str]:
    D = zipcox.orthogonal_datum(n, PsiKind.DIAGRAM_SWAP)
    mapping = zipcox.psi_permutes_labels(D)
    m = weyl.rank_for_n(n)
    swapped = {f"w_{m - 1}": weyl.dagger_name(n), weyl.dagger_name(n): f"w_{m - 1}"}
    for name, image in mapping.items():
        if image != swapped.get(name, name):
            return f"psi sends {name} to {image}"
    return None


def zip_suite(n_max: int = ZIP_N_MAX, sweep_max: int = SWEEP_N_MAX, p: int = 5) -> SuiteResult:
    result = SuiteResult(suite=Suite.ZIP)
    for n in range(1, sweep_max + 1):
        result.checks.append(_run(f"labels n={n}", lambda n=n: _check_labels(n)))
    for n in range(1, n_max + 1):
        kinds = [PsiKind.IDENTITY]
        if n % 2 == 0:
            kinds.append(PsiKind.DIAGRAM_SWAP)
            result.checks.append(_run(f"psi swap n={n}", lambda n=n: _check_psi_swap(n)))
        else:
            kinds.append(PsiKind.INNER_SM)
        for kind in kinds:
            D = zipcox.orthogonal_datum(n, kind)
            tag = f"n={n} psi={kind.value}"
            result.checks.append(_run(f"orbits {tag}", lambda D=D: _check_orbits(D)))
            result.checks.append(_run(f"E_w {tag}", lambda D=D: _check_Ew(D)))
            result.checks.append(_run(f"order {tag}", lambda D=D, n=n: _check_order(D, n)))

    def sweep():
        results = strata_orth.consistency_sweep(sweep_max, p)
        bad = [f"{case}: {row.source}" for case, rows in results.items() for row in rows if not row.agree]
        return "; ".join(bad) or None

    result.checks.append(_run(f"embedding sweep n<={sweep_max} p={p}", sweep))
    return result


def _parities(n: int) -> List[Parity]:
    if n % 2:
        return [Parity.ODD]
    return [Parity.EVEN_SPLIT, Parity.EVEN_NONSPLIT]


def _check_slopes(n: int, parity: Parity) -> Optional[str]:
    top = clifford_newton.hyperbolic_pairs(n, parity)
    for j in range(1, top + 1):
        derived = clifford_newton.slopes_of_nu(n, j, parity=parity)
        if derived != clifford_newton.closed_form_slopes(n, j):
            return f"j={j}: {derived}"
        if any(derived.as_dict().get(1 - s) != k for s, k in derived.entries):
            return f"j={j}: slopes are not symmetric"
    if parity == Parity.EVEN_SPLIT:
        m = weyl.rank_for_n(n)
        primed = clifford_newton.slopes_of_nu(n, m, primed=True, parity=parity)
        if primed != clifford_newton.slopes_of_nu(n, m, parity=parity):
            return "b_m and b'_m have different slopes"
    return None


def _check_newton_count(n: int, parity: Parity) -> Optional[str]:
    newton = [b for b in clifford_newton.newton_set(n, parity) if b.dim is not None]
    cutoff = strata_orth.d_min(n, parity)
    group = weyl.group_for_n(n)
    strata = [
        w for w in weyl.min_coset_reps(group, weyl.levi_generators(group)) if weyl.length(w) >= cutoff
    ]
    if len(strata) != len(newton):
        return f"{len(strata)} strata of dim >= {cutoff}, {len(newton)} nonbasic Newton strata"
    return None


def clifford_suite(n_max: int = CLIFFORD_N_MAX, newton_max: int = SWEEP_N_MAX) -> SuiteResult:
    result = SuiteResult(suite=Suite.CLIFFORD)
    for n in range(1, n_max + 1):
        for parity in _parities(n):
            result.checks.append(
                _run(f"slopes n={n} {parity.value}", lambda n=n, parity=parity: _check_slopes(n, parity))
            )
    for n in range(1, newton_max + 1):
        for parity in _parities(n):
            result.checks.append(
                _run(f"newton count n={n} {parity.value}", lambda n=n, parity=parity: _check_newton_count(n, parity))
            )

    def zero_dim():
        computed, expected = clifford_newton.zero_dim_clifford_check()
        return None if computed == expected else f"left multiplication {computed}"

    result.checks.append(_run("zero-dimensional C+", zero_dim))
    return result


def _check_unitary(n: int, behavior: PrimeBehavior) -> Optional[str]:
    k = unitary_dd.kappa(behavior)
    for a in range(n + 1):
        if unitary_dd.eo_invariant(unitary_dd.standard_module(n, a, k)) != a:
            return f"eo_invariant(standard({n},{a})) != {a}"
        unitary_dd.embed_image_unitary(n, a, behavior)
    if behavior == PrimeBehavior.INERT:
        bad = [row["a"] for row in unitary_dd.codim_consistency(n) if not row["ok"]]
        if bad:
            return f"codimension route fails at a={bad}"
        ranks = [info.p_rank for info in unitary_dd.unitary_catalog(n, behavior)]
        if ranks != [0] * n + [2]:
            return f"p-ranks {ranks}"
    return None


def unitary_suite(n_max: int = UNITARY_N_MAX) -> SuiteResult:
    result = SuiteResult(suite=Suite.UNITARY)
    for n in range(1, n_max + 1):
        for behavior in (PrimeBehavior.SPLIT, PrimeBehavior.INERT):
            result.checks.append(
                _run(f"unitary n={n} {behavior.value}", lambda n=n, b=behavior: _check_unitary(n, b))
            )
    return result


def run_suites(
    suite: Suite,
    seed: int,
    samples: int,
    n_values: Optional[Sequence[int]] = None,
    primes: Optional[Sequence[int]] = None,
) -> List[SuiteResult]:
    """Run one suite or all of them, in a fixed order."""
    suite = Suite(suite)
    results = []
    if suite in (Suite.FRAMES, Suite.ALL):
        results.append(frames_suite(seed, samples, n_values, primes))
    if suite in (Suite.ZIP, Suite.ALL):
        results.append(zip_suite())
    if suite in (Suite.CLIFFORD, Suite.ALL):
        results.append(clifford_suite())
    if suite in (Suite.UNITARY, Suite.ALL):
        results.append(unitary_suite())
    for item in results:
        failed = sum(1 for check in item.checks if not check.passed)
        logger.info(f"Suite {item.suite.value}: {len(item.checks) - failed} passed, {failed} failed")
    return results
