"""Seeded Monte Carlo scenarios, exhaustive figure grids and report emission."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, InputError
from .provers import Strategy, proofs_for_round
from .sat import SatInstance24, all_clauses24, assignment_to_string, eval_clause24
from .states import improper_theta, proper_state
from .verifier import (
    TEST_ORDER,
    Matching,
    ProtocolParams,
    TestKind,
    clause_projection_prob,
    enumerate_matchings,
    protocol_reject_exact,
    reject_exact,
    run_protocol,
    run_test,
    statistical_fidelity,
    uniformity_reject_exact,
)

# Satisfiable: exactly the solutions 000111 and 111000.
PHI1 = SatInstance24(
    6,
    ((1, 2, 4, 5), (1, 2, 4, 6), (1, 2, 5, 6), (1, 3, 4, 5), (1, 3, 4, 6), (1, 3, 5, 6), (2, 3, 4, 5), (2, 3, 4, 6)),
)
# Unsatisfiable, every clause contains variable 2.
PHI2 = SatInstance24(
    6,
    ((1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 3, 6), (1, 2, 4, 5), (1, 2, 4, 6), (1, 2, 5, 6), (2, 3, 4, 5), (2, 3, 4, 6)),
)
INSTANCES = {"phi1": PHI1, "phi2": PHI2}

TESTS = ("satisfiability", "uniformity", "symmetry", "product", "composite")
CSV_COLUMNS = ("scenario", "test", "k", "exact", "empirical", "stderr", "shots", "seed", "fidelity")
#: Rounds handed to a worker at a time; results do not depend on it.
CHUNK = 4096


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    instance: SatInstance24
    strategy: Strategy
    test: str = "composite"
    k: int = 3
    weights: tuple = (0.25, 0.25, 0.25, 0.25)
    seed: int = 0
    shots: int = 10_000
    matching: Matching | None = None
    workers: int = 1

    def __post_init__(self):
        if self.test not in TESTS:
            raise InputError(f"test must be one of {TESTS}, got {self.test!r}")
        if self.shots < 1:
            raise InputError(f"shots must be >= 1, got {self.shots}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        ProtocolParams(self.k, self.weights, self.seed)

    @property
    def params(self) -> ProtocolParams:
        return ProtocolParams(self.k, self.weights, self.seed)


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    test: str
    k: int
    exact: float | None
    empirical: float
    stderr: float
    shots: int
    seed: int
    fidelity: float | None


@dataclass
class Report:
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([{c: getattr(r, c) for c in CSV_COLUMNS} for r in self.rows], indent=1) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise InputError(f"unknown format {fmt!r}")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def round_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for round ``index``; identical under any scheduling."""
    return np.random.default_rng([index, seed])


def _count_rejects(cfg: ScenarioConfig, proofs, start: int, stop: int) -> int:
    params = cfg.params
    rejects = 0
    for i in range(start, stop):
        rng = round_rng(cfg.seed, i)
        if cfg.test == "composite":
            v = run_protocol(proofs, cfg.instance, params, rng, cfg.matching)
        else:
            v = run_test(TestKind(cfg.test), proofs, cfg.instance, rng, cfg.matching)
        rejects += not v.accept
    return rejects


def _exact(cfg: ScenarioConfig, proofs):
    try:
        if cfg.test == "composite":
            return protocol_reject_exact(proofs, cfg.instance, cfg.params, cfg.matching)
        return reject_exact(TestKind(cfg.test), proofs, cfg.instance, cfg.matching)
    except CapacityError:
        return None


def run_scenario(cfg: ScenarioConfig) -> Report:
    """Run ``cfg.shots`` independent rounds and summarise them in one row.

    Round ``i`` draws from ``round_rng(seed, i)``, so the report is the same
    for any worker count.
    """
    proofs = proofs_for_round(cfg.strategy, cfg.instance, cfg.k)
    bounds = [(s, min(s + CHUNK, cfg.shots)) for s in range(0, cfg.shots, CHUNK)]
    if cfg.workers == 1:
        counts = [_count_rejects(cfg, proofs, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            counts = list(pool.map(lambda ab: _count_rejects(cfg, proofs, *ab), bounds))
    rejects = sum(counts)
    emp = rejects / cfg.shots
    exact = _exact(cfg, proofs)
    fid = statistical_fidelity(exact, emp) if exact is not None else None
    row = ReportRow(
        cfg.name, cfg.test, cfg.k, exact, emp, math.sqrt(emp * (1 - emp) / cfg.shots), cfg.shots, cfg.seed, fid
    )
    return Report([row])


def builtin_scenarios(seed: int = 0, shots: int = 100_000, workers: int = 1) -> dict:
    """The demonstration scenarios, keyed by name."""
    m0 = enumerate_matchings(6)[0]
    common = dict(seed=seed, shots=shots, workers=workers)
    return {
        "honest-phi1": ScenarioConfig("honest-phi1", PHI1, Strategy.honest(), "composite", **common),
        "proper-phi2": ScenarioConfig(
            "proper-phi2", PHI2, Strategy.fixed(proper_state((1, 0, 0, 0, 0, 0))), "composite", **common
        ),
        "cheat-phi2": ScenarioConfig(
            "cheat-phi2", PHI2, Strategy.common_var_cheat(2), "uniformity", matching=m0, **common
        ),
        "cheat-phi2-sat": ScenarioConfig(
            "cheat-phi2-sat", PHI2, Strategy.common_var_cheat(2), "satisfiability", **common
        ),
        "improper-theta0": ScenarioConfig(
            "improper-theta0", PHI2, Strategy.improper(0.0), "uniformity", matching=m0, **common
        ),
        "nonidentical-symmetry": ScenarioConfig(
            "nonidentical-symmetry",
            PHI1,
            Strategy.nonidentical([proper_state((0,) * 6), proper_state((1, 0, 0, 0, 0, 0))]),
            "symmetry",
            **common,
        ),
    }


# ---------------------------------------------------------------------------
# Figure data


def proper_columns(n: int = 6) -> list:
    """Assignments ordered 000000, 100000, 010000, ... (x_1 varies fastest)."""
    return [tuple((i >> b) & 1 for b in range(n)) for i in range(1 << n)]


def projection_grid(n: int = 6) -> np.ndarray:
    """Clause-projection probabilities, clauses as rows and proper states as columns."""
    clauses = all_clauses24(n)
    cols = proper_columns(n)
    return np.array([[clause_projection_prob(proper_state(a), c) for a in cols] for c in clauses])


def satisfaction_grid(n: int = 6) -> np.ndarray:
    clauses = all_clauses24(n)
    return np.array([[eval_clause24(c, a) for a in proper_columns(n)] for c in clauses])


def grid_rows(n: int = 6) -> list:
    """Long-format rows ``(clause, assignment, p_c, satisfied)``."""
    g = projection_grid(n)
    sat = satisfaction_grid(n)
    clauses = all_clauses24(n)
    cols = proper_columns(n)
    return [
        ("".join(map(str, c)), assignment_to_string(a), float(g[r, s]), bool(sat[r, s]))
        for r, c in enumerate(clauses)
        for s, a in enumerate(cols)
    ]


def uniformity_grid(k: int = 3, n: int = 6) -> np.ndarray:
    """Exact uniformity reject probabilities, proper states x matchings."""
    ms = enumerate_matchings(n)
    return np.array([[uniformity_reject_exact(proper_state(a), m, k) for m in ms] for a in proper_columns(n)])


def theta_sweep(matching: Matching, ks: Sequence[int] = (3, 4, 5, 6), thetas=None) -> dict:
    """Exact uniformity reject curves of the improper family, one per ``k``.

    Returns ``{"theta": array, k: array, ...}``.
    """
    if thetas is None:
        thetas = np.linspace(0, math.pi / 2, 50)
    thetas = np.asarray(thetas, dtype=float)
    out = {"theta": thetas}
    for k in ks:
        out[k] = np.array([uniformity_reject_exact(improper_theta(t, matching.n), matching, k) for t in thetas])
    return out


def rows_to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def rows_to_json(header: Sequence[str], rows) -> str:
    return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"


def per_test_exact(proofs, inst: SatInstance24, matching: Matching | None = None) -> dict:
    return {kind.value: reject_exact(kind, proofs, inst, matching) for kind in TEST_ORDER}
