"""Set-valued fixpoint semantics over game structures.

A formula denotes the set of states from which the system can enforce it.
State sets are boolean arrays indexed by enumerated state; ``<>`` maps a set
to the states from which the system can force the next state into it in one
round, ``[]`` to those from which the environment can.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import formulas as fm
from .errors import IterationCapError, UnboundVariableError

StateSet = np.ndarray  # bool array of shape (n_states,)


@dataclass
class FixpointStats:
    """Observed fixpoint iteration counts, for cap auditing."""

    fixpoints: int = 0
    max_iterations: int = 0
    # (applications, cap) per fixpoint; stabilization happened at
    # applications - 1 strict changes, which must stay <= cap.
    caps: list[tuple[int, int]] = field(default_factory=list)

    def record(self, iterations, cap):
        self.fixpoints += 1
        self.max_iterations = max(self.max_iterations, iterations)
        self.caps.append((iterations, cap))

    def within_caps(self) -> bool:
        return all(apps - 1 <= cap for apps, cap in self.caps)


def cpre_sys(game, target: StateSet) -> StateSet:
    """States from which the system forces the next state into ``target``.

    A state with no valid input counts (the environment is deadlocked);
    a valid input with no valid output rules the state out.
    """
    t = game.tables()
    hit = t.rho_s & target[t.succ][None, :, :]
    exists_out = hit.any(axis=2)
    return (~t.rho_e | exists_out).all(axis=1)


def cpre_env(game, target: StateSet) -> StateSet:
    """States from which the environment forces the next state into ``target``.

    Requires some valid input whose every valid output lands in ``target``
    (vacuously, an input that deadlocks the system).
    """
    t = game.tables()
    all_in = (~t.rho_s | target[t.succ][None, :, :]).all(axis=2)
    return (t.rho_e & all_in).any(axis=1)


def eval_classical(game, f: fm.Formula, valuation=None, stats=None) -> StateSet:
    """The state set denoted by ``f``; negation is set complement.

    ``valuation`` maps free fixpoint variables to state sets.  Each fixpoint
    is iterated to stabilization and must stabilize within ``n_states``
    strict changes (the powerset chain height); exceeding the cap raises,
    as it indicates a broken operator.
    """
    fm.require_monotone(f)
    t = game.tables()
    n = t.n_states
    env = dict(valuation or {})

    def ev(node, env):
        if isinstance(node, fm.Atom):
            return t.state_mask(node.assertion)
        if isinstance(node, fm.NegAtom):
            return ~t.state_mask(node.assertion)
        if isinstance(node, fm.RelVar):
            if node.name not in env:
                raise UnboundVariableError(f"no value for variable {node.name!r}")
            return env[node.name]
        if isinstance(node, fm.And):
            return ev(node.left, env) & ev(node.right, env)
        if isinstance(node, fm.Or):
            return ev(node.left, env) | ev(node.right, env)
        if isinstance(node, fm.Diamond):
            return cpre_sys(game, ev(node.sub, env))
        if isinstance(node, fm.Box):
            return cpre_env(game, ev(node.sub, env))
        if isinstance(node, fm.Not):
            return ~ev(node.sub, env)
        if isinstance(node, (fm.Mu, fm.Nu)):
            grow = isinstance(node, fm.Mu)
            current = np.zeros(n, dtype=bool) if grow else np.ones(n, dtype=bool)
            cap = n
            iterations = 0
            while True:
                iterations += 1
                if iterations > cap + 1:
                    raise IterationCapError(
                        f"fixpoint of {node.name} still moving after {cap} changes"
                    )
                new = ev(node.sub, {**env, node.name: current})
                if grow and not (current <= new).all():
                    raise IterationCapError(
                        f"least-fixpoint iterate for {node.name} is not ascending"
                    )
                if not grow and not (new <= current).all():
                    raise IterationCapError(
                        f"greatest-fixpoint iterate for {node.name} is not descending"
                    )
                if (new == current).all():
                    break
                current = new
            if stats is not None:
                stats.record(iterations, cap)
            return current
        raise TypeError(f"not a formula node: {node!r}")

    return ev(f, env)
