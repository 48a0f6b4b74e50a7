"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line with its runtime, and
the lines are repeated in the pytest terminal summary.  The file also runs as
a plain script: ``python3 tests/test_acceptance.py``.
"""

import functools
import itertools
import math
import time

import numpy as np

from qmasat import cli
from qmasat.harness import PHI2, builtin_scenarios, projection_grid, run_scenario, satisfaction_grid, theta_sweep
from qmasat.optics import (
    PhotonModel,
    circuit_unitary,
    compile_clause_circuit,
    compile_matching_circuit,
    single_photon_dist,
    two_photon_channels,
)
from qmasat.provers import Strategy, proofs_for_round
from qmasat.sat import (
    Cnf3,
    all_clauses24,
    census,
    census_instance,
    cnf_solutions,
    complement,
    decode_reduced,
    eval_cnf,
    reduce_3sat,
    solutions,
)
from qmasat.states import overlap, proper_state, random_state
from qmasat.verifier import (
    Matching,
    TestKind,
    clause_projection_prob,
    enumerate_matchings,
    product_accept_prob,
    product_test,
    reject_exact,
    uniformity_outcome_dist,
    uniformity_reject_exact,
    uniformity_test,
)

M0 = Matching(((1, 2), (3, 4), (5, 6)))
RESULTS = []


def within(emp, p, shots, sigmas=4.0):
    return abs(emp - p) <= sigmas * math.sqrt(p * (1 - p) / shots)


def criterion(number, title, limit=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            ok, detail = False, ""
            try:
                detail = fn() or ""
                elapsed = time.perf_counter() - start
                if limit is not None and elapsed >= limit:
                    raise AssertionError(f"took {elapsed:.1f}s, limit {limit}s")
                ok = True
            except AssertionError as exc:
                detail = str(exc).splitlines()[0] if str(exc) else "assertion failed"
                raise
            finally:
                elapsed = time.perf_counter() - start
                line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({elapsed:.2f}s) {detail}".rstrip()
                RESULTS.append(line)
                print(line)

        return run

    return wrap


@criterion(1, "census(6,8) = 6435 instances, 90 satisfiable, 2 complementary solutions each", 60)
def test_c01_census():
    c = census(6, 8)
    assert c.total == 6435, c.total
    assert c.satisfiable == 90, c.satisfiable
    sat_idx = [i for i, k in enumerate(c.solution_counts) if k]
    assert all(c.solution_counts[i] == 2 for i in sat_idx)
    for i in sat_idx:
        a, b = solutions(census_instance(6, 8, i))
        assert b == complement(a)
    return f"total={c.total} satisfiable={c.satisfiable}"


@criterion(2, "15x64 clause-projection grid in {0, 1/6, 2/3}, zero exactly on satisfied clauses", 1)
def test_c02_grid():
    g = projection_grid()
    assert g.shape == (15, 64)
    targets = np.array([0.0, 1 / 6, 2 / 3])
    dist = np.abs(g[..., None] - targets).min(axis=-1)
    assert dist.max() <= 1e-15, dist.max()
    assert np.array_equal(g == 0, satisfaction_grid())
    return f"max deviation {dist.max():.1e}"


@criterion(3, "uniformity completeness: exact 0 on 64 x 15 x k=3..6, zero rejections in 10^4 shots", 30)
def test_c03_uniformity_completeness():
    states = [proper_state(a) for a in itertools.product((0, 1), repeat=6)]
    ms = enumerate_matchings(6)
    worst = max(uniformity_reject_exact(s, m, k) for s in states for m in ms for k in (3, 4, 5, 6))
    assert worst == 0, worst
    rng = np.random.default_rng(20240603)
    rejects = 0
    for shot in range(10_000):
        psi = states[int(rng.integers(64))]
        m = ms[int(rng.integers(15))]
        k = 3 + shot % 4
        rejects += not uniformity_test([psi] * k, m, rng).accept
    assert rejects == 0, rejects
    return "3840 exact cells, 10000 shots, 0 rejections"


@criterion(4, "cheat state on the common-variable instance: sat 0, uniformity 108/343, MC within 4 sigma", 30)
def test_c04_cheat():
    proofs = proofs_for_round(Strategy.common_var_cheat(2), PHI2, 3)
    p_sat = reject_exact(TestKind.SATISFIABILITY, proofs, PHI2)
    assert p_sat <= 1e-12, p_sat
    p_uni = reject_exact(TestKind.UNIFORMITY, proofs, PHI2, M0)
    assert abs(p_uni - 108 / 343) <= 1e-12, p_uni
    assert abs(p_uni - 0.3190) <= 0.005
    row = run_scenario(builtin_scenarios(seed=0, shots=100_000)["cheat-phi2"]).rows[0]
    assert within(row.empirical, p_uni, row.shots), (row.empirical, p_uni)
    return f"exact={p_uni:.6f} empirical={row.empirical:.5f} F_c={row.fidelity:.6f}"


@criterion(5, "theta sweep: 0 at pi/4, 5/12 at theta=0 k=3, nondecreasing in k on 50 points", 60)
def test_c05_theta_sweep():
    thetas = np.linspace(0, math.pi / 2, 50)
    curves = theta_sweep(M0, (3, 4, 5, 6), thetas)
    assert abs(curves[3][0] - 5 / 12) <= 1e-12
    at_quarter = theta_sweep(M0, range(2, 13), [math.pi / 4])
    assert max(at_quarter[k][0] for k in range(2, 13)) <= 1e-12
    for lo, hi in ((3, 4), (4, 5), (5, 6)):
        assert np.all(curves[hi] >= curves[lo] - 1e-12), (lo, hi)
    return f"reject(0, k=3)={curves[3][0]:.12f}"


@criterion(6, "compiled circuits match the abstract verifier within 1e-10 and are unitary within 1e-12", 120)
def test_c06_cross_layer():
    states = [proper_state(a) for a in itertools.product((0, 1), repeat=6)]
    worst_p = worst_u = 0.0
    for clause in all_clauses24(6):
        c = compile_clause_circuit(clause)
        u = circuit_unitary(c)
        worst_u = max(worst_u, np.abs(u.conj().T @ u - np.eye(6)).max())
        for s in states:
            worst_p = max(worst_p, abs(single_photon_dist(s, c)[0] - clause_projection_prob(s, clause)))
    for m in enumerate_matchings(6):
        c = compile_matching_circuit(m)
        u = circuit_unitary(c)
        worst_u = max(worst_u, np.abs(u.conj().T @ u - np.eye(6)).max())
        for s in states:
            worst_p = max(worst_p, np.abs(single_photon_dist(s, c) - uniformity_outcome_dist(s, m)).max())
    assert worst_p <= 1e-10, worst_p
    assert worst_u <= 1e-12, worst_u
    return f"max prob error {worst_p:.1e}, max unitarity error {worst_u:.1e}"


@criterion(7, "two-photon swap test: cross-side identity, bunching, corrected accept >= 0.975 at gamma >= 0.95", 30)
def test_c07_optical_swap():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        a, b = random_state(rng), random_state(rng)
        worst = max(worst, abs(two_photon_channels(a, b).reject - (1 - abs(overlap(a, b)) ** 2) / 2))
    assert worst <= 1e-9, worst
    for _ in range(20):
        s = random_state(rng)
        r = two_photon_channels(s, s)
        assert abs(r.accept_raw - 1) <= 1e-10
    uniform = proper_state((0,) * 6)
    at_095 = two_photon_channels(uniform, uniform, PhotonModel(0.95)).accept_corrected
    # (1 + gamma)/2 is exactly 0.975 at the boundary
    assert at_095 >= 0.975 - 1e-12, at_095
    for g in np.linspace(0.951, 1.0, 10):
        assert two_photon_channels(uniform, uniform, PhotonModel(g)).accept_corrected > 0.975
    return f"max identity error {worst:.1e}, corrected accept at 0.95 = {at_095:.15f}"


@criterion(8, "product test: exact accept vs 10^5 sampled rounds within 4 sigma for 10 cases", 60)
def test_c08_product():
    rng = np.random.default_rng(88)
    shots = 100_000
    report = []
    for case in range(10):
        k = 2 + case % 4
        a = [random_state(rng) for _ in range(k)]
        # mix in near-identical slots so accept probabilities spread out
        b = [a[t] if (case + t) % 3 == 0 else random_state(rng) for t in range(k)]
        p = product_accept_prob(a, b)
        hits = sum(product_test(a, b, rng).accept for _ in range(shots))
        assert within(hits / shots, p, shots), (case, hits / shots, p)
        report.append(f"{p:.3f}")
        assert all(product_test(a, a, rng).accept for _ in range(1000))
    return "p=" + ",".join(report)


def _cnf_pool(n):
    lits = []
    for vs in itertools.combinations(range(1, n + 1), 3):
        for signs in itertools.product((1, -1), repeat=3):
            lits.append(tuple(s * v for s, v in zip(signs, vs)))
    return lits


def _check_reduction(cnf):
    inst = reduce_3sat(cnf)
    ref = cnf_solutions(cnf, limit=1)
    got = solutions(inst, limit=1)
    assert bool(ref) == bool(got), cnf
    if got:
        assert eval_cnf(cnf, decode_reduced(cnf, got[0])), cnf


@criterion(9, "3-SAT reduction preserves satisfiability: exhaustive n<=4 m<=4 plus 200 random n<=8", 120)
def test_c09_reduction():
    count = 0
    for n in (3, 4):
        pool = _cnf_pool(n)
        for m in range(5):
            for clauses in itertools.combinations(pool, m):
                _check_reduction(Cnf3(n, clauses))
                count += 1
    rng = np.random.default_rng(99)
    for _ in range(200):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(1, 5))
        pool = _cnf_pool(n)
        picks = rng.choice(len(pool), m, replace=False)
        _check_reduction(Cnf3(n, tuple(pool[i] for i in picks)))
    # the unsatisfiable direction: all 8 sign patterns, and every 7-subset
    full = tuple(_cnf_pool(3))
    _check_reduction(Cnf3(3, full))
    assert not solutions(reduce_3sat(Cnf3(3, full)))
    for drop in range(8):
        _check_reduction(Cnf3(3, full[:drop] + full[drop + 1 :]))
    return f"{count} exhaustive + 200 random + 9 boundary CNFs"


@criterion(10, "verify reports are byte-identical across reruns and worker counts")
def test_c10_reproducibility():
    import contextlib
    import io

    def verify(*argv):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            assert cli.main(list(argv)) == 0
        return buf.getvalue()

    runs = [
        ("verify", "--scenario", "cheat-phi2", "--shots", "20000", "--seed", "12345678901234"),
        ("verify", "--scenario", "proper-phi2", "--shots", "20000", "--seed", "3"),
        ("verify", "--instance", "builtin:phi2", "--strategy", "improper:0.3", "--test", "composite",
         "--shots", "20000", "--seed", str(2**64 - 1), "--format", "json"),
    ]
    for argv in runs:
        outs = {verify(*argv, "--workers", str(w)) for w in (1, 1, 2, 4)}
        assert len(outs) == 1, argv
    return f"{len(runs)} configurations x workers 1,1,2,4"


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    raise SystemExit(1 if failed else 0)
