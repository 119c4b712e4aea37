"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.  Running this file
directly prints the ten lines and exits nonzero if any fails.
"""

import sys
import time

import pytest

from bergman_offdiag.corpus import jet_corpus
from bergman_offdiag.errors import CrossValidationMismatch
from bergman_offdiag.expansion import beta_coefficient, compute_expansion, homogeneity_check, pn_expansion
from bergman_offdiag.normal_form import normalize_to_K
from bergman_offdiag.oracles import (
    ModelKernel,
    convergence_fit,
    cpm_symbolic_coefficients,
    default_sample_points,
    derivative_growth_demo,
    doubling_grid,
    flat_jet,
    fubini_study_jet,
    mixed_tail_jet,
    pn_fit,
)
from bergman_offdiag.polynomials import U, UBAR
from bergman_offdiag.tensors import curvature_data_at_point
from bergman_offdiag.verify import derivative_identities, expansion_properties

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from helpers import cpm_b2, var  # noqa: E402

RESULTS: dict = {}

CORPUS_SEED = 1
CORPUS = jet_corpus(CORPUS_SEED, 20, dims=(1, 2, 3), order=7)
GENERAL = jet_corpus(CORPUS_SEED + 100, 10, dims=(1, 2, 3), order=7, k_form=False)
FS1 = ModelKernel("fubini_study", 1)
FIT_TOL = 0.1


def report(n: int, ok: bool, detail: str) -> bool:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def criterion_1():
    start = time.perf_counter()
    mismatches = []
    for jet in CORPUS:
        try:
            compute_expansion(jet, 4, "both")
        except CrossValidationMismatch as exc:
            mismatches.append(str(exc))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 120
    return report(1, ok, f"closed == generic for b1..b4 on {len(CORPUS)} jets; "
                         f"{len(mismatches)} mismatches; {elapsed:.1f}s (target < 120s)")


def criterion_2():
    bad = []
    counts = 0
    for jet in CORPUS + [normalize_to_K(j, 7)[0] for j in GENERAL]:
        checked, failures = derivative_identities(jet)
        counts += len(checked)
        if len(checked) < 6 or failures:
            bad.append((jet.m, checked, failures[:1]))
    return report(2, not bad, f"identities (i)-(vi) exact on {len(CORPUS) + len(GENERAL)} jets "
                              f"({counts} identity checks, {len(bad)} failing jets)")


def criterion_3():
    issues = []
    for m in (1, 2):
        res = compute_expansion(fubini_study_jet(m, 6), 4, "both")
        if not res.b(1).is_zero():
            issues.append(f"b1 m={m}")
        if res.b(2) != cpm_b2(m):
            issues.append(f"b2 m={m}")
        if m == 1 and not res.b(3).is_zero():
            issues.append("b3 m=1")
    d = curvature_data_at_point(fubini_study_jet(2, 6))
    if (d.R[0, 0, 1, 1], d.R[0, 1, 1, 0], d.R[0, 0, 0, 1]) != (1, 1, 0):
        issues.append("CP^2 curvature table")
    d1 = curvature_data_at_point(fubini_study_jet(1, 6))
    if d1.R[0, 0, 0, 0] != 2:
        issues.append("CP^1 curvature")
    return report(3, not issues, "CP^m b1, b2 (m=1,2), b3 (m=1), curvature point values"
                  + (f"; wrong: {issues}" if issues else " exact"))


def criterion_4():
    lib = compute_expansion(fubini_study_jet(1, 6), 4, "both").b(4)
    oracle = cpm_symbolic_coefficients(1, 4)[3]
    return report(4, lib == oracle, f"CP^1 b4 from the symbolic kernel expansion "
                                    f"{'equals' if lib == oracle else 'differs from'} the library value")


def criterion_5():
    start = time.perf_counter()
    bs = compute_expansion(FS1.jet(6), 4, "generic").bs
    fit = convergence_fit(FS1, bs, 2, doubling_grid(64, 4096), default_sample_points(1), 256)
    elapsed = time.perf_counter() - start
    ok = fit.within(-2.0, FIT_TOL) and elapsed < 60
    return report(5, ok, f"CP^1 remainder after b2: exponent {fit.fitted_exponent:.4f} "
                         f"(target -2.0 +/- {FIT_TOL}), 8 points, 256 bits, N 64..4096, {elapsed:.1f}s")


def criterion_6():
    failures = []
    checks = 0
    for jet in CORPUS:
        base = compute_expansion(jet, 5, "generic")
        for t in (2, 3):
            rep = homogeneity_check(jet, t, 5, "generic", base=base)
            checks += len(rep.rows)
            failures += [(jet.m, t, row["r"]) for row in rep.failures()]
    return report(6, not failures, f"scaling b_r[t^-2 phi(t.)] = t^r b_r, parity and degree bounds, "
                                   f"r <= 5, t in (2, 3): {checks} checks, {len(failures)} failures")


def criterion_7():
    res = compute_expansion(flat_jet(3, 7), 5, "generic")
    ok = all(b.is_zero() for b in res.bs)
    return report(7, ok, "flat jet |z|^2: b1..b5 " + ("all zero" if ok else "NOT all zero"))


def criterion_8():
    jet = mixed_tail_jet(7)
    u, ub = var(1, U), var(1, UBAR)
    bad = []
    for k in (3, 4, 5):
        beta = beta_coefficient(normalize_to_K(jet, k + 2)[0], k)
        lead = beta.at_v_zero().homogeneous_part(k + 2)
        if lead != (u ** 2 * ub ** k + u ** k * ub ** 2) * -1 / 2:
            bad.append(k)
    return report(8, not bad, "beta_k(u, 0) leading term -(u^2 ubar^k + u^k ubar^2)/2 for k = 3, 4, 5"
                  + (f"; wrong for k in {bad}" if bad else " exact"))


def criterion_9():
    failed = []
    for jet in CORPUS:
        res = compute_expansion(jet, 5, "generic")
        failed += expansion_properties(res.bs, curvature_data_at_point(res.normalized_jet))
    corr = pn_expansion(curvature_data_at_point(FS1.jet(5)))
    fit, bound_ok = pn_fit(FS1, corr, doubling_grid(64, 4096), default_sample_points(1), 256)
    ok = not failed and bound_ok and fit.within(-2.0, FIT_TOL)
    return report(9, ok, f"Hermitian/diagonal properties ({len(failed)} failures); 0 < P_N <= 1: {bound_ok}; "
                         f"P_N remainder exponent {fit.fitted_exponent:.4f} (target -2.0 +/- {FIT_TOL})")


def criterion_10():
    rows = derivative_growth_demo((1, 2, 3, 4, 5, 6), doubling_grid(64, 4096))
    ok = all(abs(r["exponent"] - r["expected"]) <= FIT_TOL for r in rows)
    text = ", ".join(f"k={r['k']}: {r['exponent']:.3f}" for r in rows)
    return report(10, ok, f"growth exponents of sup |D^k log Pi_N| ({text}); "
                          f"expected 0.5 for odd k, 1.0 for even k, +/- {FIT_TOL}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(criterion):
    assert criterion(), RESULTS.get(CRITERIA.index(criterion) + 1)


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
