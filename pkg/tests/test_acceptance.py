"""End-to-end acceptance checks; each prints one PASS/FAIL line in the summary."""
import itertools
import subprocess
import sys
import time

import numpy as np

import bruteforce as bf
from entgeom.entropy import SubsystemEntropyCache, conditional_mutual_information
from entgeom.experiment import INJECTED_SEED, ExperimentConfig, run_fig2
from entgeom.geometry import (
    convoluted_area,
    convoluted_metric,
    convoluted_volume,
    entanglement_content_E,
)
from entgeom.oracles import concurrence, negativity
from entgeom.roof import Functional, roof_minimize
from entgeom.states import bell, ghz, random_mixed, random_unitary, rng_for, w_state
from entgeom.tensor import apply_local_unitaries, compose, kron_all, projector, validate_density

TRIPLES = list(itertools.permutations(range(3)))


def qubit_states(count, n, offset=0):
    return [random_mixed((2,) * n, offset + s) for s in range(count)]


def test_ssa_and_triangle(acceptance_log):
    t0 = time.perf_counter()
    worst_m, worst_tri = np.inf, np.inf
    for rho in qubit_states(1000, 3):
        c = SubsystemEntropyCache(rho)
        m = {(i, j): convoluted_metric(c, i, j) for i, j in itertools.permutations(range(3), 2)}
        worst_m = min(worst_m, min(m.values()))
        for a, b, cc in TRIPLES:
            worst_tri = min(worst_tri, m[a, b] + m[b, cc] - m[a, cc])
    elapsed = time.perf_counter() - t0
    ok = worst_m >= -1e-9 and worst_tri >= -1e-9 and elapsed < 30
    acceptance_log("1 SSA/triangle", ok, f"min M={worst_m:.3e}, min slack={worst_tri:.3e}, {elapsed:.1f}s")
    assert ok


def test_cmi_equivalence(acceptance_log):
    worst = 0.0
    for rho in qubit_states(1000, 3):
        c = SubsystemEntropyCache(rho)
        for i, j in itertools.combinations(range(3), 2):
            (k,) = {0, 1, 2} - {i, j}
            cmi = conditional_mutual_information(c, [j], [k], [i]) + conditional_mutual_information(c, [i], [k], [j])
            worst = max(worst, abs(convoluted_metric(c, i, j) - cmi))
    ok = worst <= 1e-9
    acceptance_log("2 CMI equivalence", ok, f"max deviation {worst:.3e}")
    assert ok


def test_separability_vanishing(acceptance_log):
    pair = max(
        abs(convoluted_metric(compose(random_mixed((2, 2), 2 * s), random_mixed((2,), 2 * s + 1)), 0, 1))
        for s in range(200)
    )
    triple = max(
        abs(convoluted_area(SubsystemEntropyCache(compose(random_mixed((2, 2, 2), 2 * s), random_mixed((2,), 2 * s + 1))), 0, 1, 2))
        for s in range(200)
    )
    ok = pair <= 1e-8 and triple <= 1e-8
    acceptance_log("3 separability vanishing", ok, f"max |M|={pair:.3e}, max |area|={triple:.3e}")
    assert ok


def test_closed_values(acceptance_log):
    got = {
        "M GHZ3": convoluted_metric(ghz(3), 0, 1),
        "M W3": convoluted_metric(w_state(3), 0, 1),
        "area GHZ4": convoluted_area(SubsystemEntropyCache(ghz(4)), 0, 1, 2),
        "volume GHZ5": convoluted_volume(SubsystemEntropyCache(ghz(5)), [0, 1, 2, 3]),
    }
    want = {"M GHZ3": (2, 1e-9), "M W3": (1.836592, 1e-5), "area GHZ4": (3, 1e-9), "volume GHZ5": (12, 1e-9)}
    # the same quantities from the explicit-index oracle
    oracle = {
        "M GHZ3": bf.metric(bf.entropy_table(bf.ghz_matrix(3), (2,) * 3), 3, 0, 1),
        "M W3": bf.metric(bf.entropy_table(bf.w_matrix(3), (2,) * 3), 3, 0, 1),
        "area GHZ4": bf.volume(bf.entropy_table(bf.ghz_matrix(4), (2,) * 4), 4, (0, 1, 2)),
        "volume GHZ5": bf.volume(bf.entropy_table(bf.ghz_matrix(5), (2,) * 5), 5, (0, 1, 2, 3)),
    }
    ok = all(abs(got[k] - v) <= tol and abs(oracle[k] - v) <= tol for k, (v, tol) in want.items())
    acceptance_log("4 closed values", ok, ", ".join(f"{k}={v:.9f}" for k, v in got.items()))
    assert ok


def test_volume_formula_equivalence(acceptance_log):
    worst = 0.0
    for m in (3, 4, 5):
        for rho in qubit_states(100, m + 1, offset=1000 * m):
            c = SubsystemEntropyCache(rho)
            sub = list(range(m))
            closed = convoluted_volume(c, sub, method="closed")
            worst = max(worst, abs(closed - convoluted_volume(c, sub, method="permutations")))
            if m == 3:
                worst = max(worst, abs(closed - convoluted_area(c, 0, 1, 2)))
    ok = worst <= 1e-9
    acceptance_log("5 volume formula", ok, f"max deviation {worst:.3e}")
    assert ok


def _monotones(state):
    c = SubsystemEntropyCache(state)
    pairs = [convoluted_metric(c, i, j) for i, j in itertools.combinations(range(4), 2)]
    triples = [convoluted_area(c, *t) for t in itertools.combinations(range(4), 3)]
    return np.array(pairs + triples + [entanglement_content_E(c)])


def test_local_unitary_invariance(acceptance_log):
    worst = 0.0
    for s in range(100):
        rho = random_mixed((2,) * 4, 5000 + s)
        rng = rng_for(9000 + s)
        moved = apply_local_unitaries(rho, [random_unitary(2, rng) for _ in range(4)])
        worst = max(worst, float(np.max(np.abs(_monotones(rho) - _monotones(moved)))))
    ok = worst <= 1e-8
    acceptance_log("6 local-unitary invariance", ok, f"max change {worst:.3e}")
    assert ok


def test_fig2_reproduction(acceptance_log):
    t0 = time.perf_counter()
    rows, summary = run_fig2(ExperimentConfig(samples=1000, seed=0, inject_bell=True))
    elapsed = time.perf_counter() - t0
    (injected,) = [r for r in rows if r.seed == INJECTED_SEED]
    ok = injected.e_normalized == 2.0 and summary["spearman"] >= 0.5 and elapsed < 300 and len(rows) == 1001
    acceptance_log(
        "7 concurrence vs E",
        ok,
        f"injected E_normalized={injected.e_normalized!r}, spearman={summary['spearman']:.4f}, {elapsed:.1f}s",
    )
    assert ok


def test_oracle_cross_checks(acceptance_log):
    errs = [abs(concurrence(bell()) - 1), abs(negativity(bell(), [1]) - 0.5)]
    werner = []
    for p in np.linspace(0, 1, 6):
        rho = validate_density(p * bell().matrix + (1 - p) * np.eye(4) / 4, (2, 2))
        werner.append(abs(concurrence(rho) - max(0.0, (3 * p - 1) / 2)))
    ok = errs[0] <= 1e-10 and errs[1] <= 1e-10 and max(werner) <= 1e-9
    acceptance_log("8 oracle cross-checks", ok, f"bell errs {errs[0]:.1e}/{errs[1]:.1e}, werner max err {max(werner):.1e}")
    assert ok


def separable_mixture(seed):
    """Two-term mixture of random 3-qubit pure product states."""
    rng = rng_for(seed)
    p = rng.dirichlet(np.ones(2))
    m = sum(
        p[t] * kron_all([projector(rng.standard_normal(2) + 1j * rng.standard_normal(2)) for _ in range(3)])
        for t in range(2)
    )
    return validate_density(m, (2, 2, 2))


def test_roof_search_contract(acceptance_log):
    f = Functional("M", (0, 1))
    worst, monotone = 0.0, True
    for s in range(50):
        rho = separable_mixture(s)
        values = [roof_minimize(rho, f, budget=b, seed=s).value for b in (1, 10, 50, 200)]
        monotone &= all(a >= b for a, b in zip(values, values[1:]))
        worst = max(worst, values[-1])
    ok = worst <= 0.05 and monotone
    acceptance_log("9 roof search", ok, f"max M at budget 200 = {worst:.3e}, non-increasing={monotone}")
    assert ok


def test_fig2_determinism(acceptance_log, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "entgeom", "fig2", "--samples", "50", "--seed", "11", "--out", str(path)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    acceptance_log("10 determinism", ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
    assert ok
