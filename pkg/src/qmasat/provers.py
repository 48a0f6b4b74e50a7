"""Merlin strategies: honest and adversarial proof generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParseError, StrategyError
from .sat import SatInstance24, solutions
from .states import as_state, cheat_common_var, improper_theta, parse_state, proper_state

KINDS = ("honest", "fixed", "cheat", "improper", "nonidentical")


@dataclass(frozen=True, eq=False)
class Strategy:
    """How both Merlins build their ``k`` copies.

    ``kind`` is one of ``honest``, ``fixed`` (``state``), ``cheat``
    (``var``), ``improper`` (``theta``) or ``nonidentical`` (``states``).
    """

    kind: str
    state: np.ndarray | None = None
    var: int | None = None
    theta: float | None = None
    states: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "fixed":
            if self.state is None:
                raise InputError("a fixed strategy needs a state")
            object.__setattr__(self, "state", as_state(self.state))
        if self.kind == "cheat" and (self.var is None or self.var < 1):
            raise InputError("a cheat strategy needs a positive variable index")
        if self.kind == "improper" and self.theta is None:
            raise InputError("an improper strategy needs theta")
        if self.kind == "nonidentical":
            if len(self.states) < 2:
                raise InputError("a nonidentical strategy needs at least 2 states")
            object.__setattr__(self, "states", tuple(as_state(s) for s in self.states))

    @classmethod
    def honest(cls):
        return cls("honest")

    @classmethod
    def fixed(cls, state):
        return cls("fixed", state=state)

    @classmethod
    def common_var_cheat(cls, v: int):
        return cls("cheat", var=v)

    @classmethod
    def improper(cls, theta: float):
        return cls("improper", theta=float(theta))

    @classmethod
    def nonidentical(cls, states):
        return cls("nonidentical", states=tuple(states))


def find_common_variable(inst: SatInstance24) -> int | None:
    """Smallest variable contained in every clause, or None."""
    common = set(range(1, inst.n_vars + 1))
    for c in inst.clauses:
        common &= set(c)
    return min(common) if common else None


def proofs_for_round(st: Strategy, inst: SatInstance24, k: int) -> tuple:
    """``(merlin_a_copies, merlin_b_copies)``, ``k`` states each."""
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    n = inst.n_vars
    if st.kind == "nonidentical":
        if any(s.size != n for s in st.states):
            raise StrategyError(f"strategy states do not have {n} modes")
        a = [st.states[t % len(st.states)] for t in range(k)]
        return a, [st.states[0]] * k
    if st.kind == "honest":
        sols = solutions(inst, limit=1)
        if not sols:
            raise StrategyError("no witness exists: the instance is unsatisfiable")
        psi = proper_state(sols[0])
    elif st.kind == "fixed":
        psi = st.state
    elif st.kind == "cheat":
        if st.var > n:
            raise StrategyError(f"cheat variable {st.var} outside 1..{n}")
        psi = cheat_common_var(st.var, n)
    else:
        psi = improper_theta(st.theta, n)
    if psi.size != n:
        raise StrategyError(f"strategy state has {psi.size} modes, instance has {n}")
    return [psi] * k, [psi] * k


def parse_strategy(text: str, n: int = 6) -> Strategy:
    """``honest``, ``fixed:<state>``, ``cheat:<v>``, ``improper:<theta>``,
    ``nonidentical:<state>;<state>[;...]``."""
    text = text.strip()
    kind, _, arg = text.partition(":")
    try:
        if kind == "honest" and not arg:
            return Strategy.honest()
        if kind == "fixed":
            return Strategy.fixed(parse_state(arg, n))
        if kind == "cheat":
            return Strategy.common_var_cheat(int(arg))
        if kind == "improper":
            return Strategy.improper(float(arg))
        if kind == "nonidentical":
            return Strategy.nonidentical([parse_state(s, n) for s in arg.split(";")])
    except ValueError as exc:
        raise ParseError(f"bad strategy {text!r}: {exc}") from None
    raise ParseError(f"unknown strategy {text!r}")
