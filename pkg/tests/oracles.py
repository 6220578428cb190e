"""Independent oracles used to compute expected values.

Everything here is deliberately written against the scalar state-level API
(or from scratch) rather than the vectorized evaluators it checks.
"""

from __future__ import annotations

import itertools

import numpy as np

from emu import (
    INF,
    EnergyFunction,
    State,
    all_states,
    cpre_sys,
    ecpre,
    env_choices,
    eval_assertion,
    join,
    meet,
    sys_choices,
    weight,
)


def energy_level_recurrence(weights, c, c0):
    """Direct recurrence over a list of step weights."""
    levels = [c0]
    for w in weights:
        levels.append(min(c, levels[-1] + w))
    return levels


def state_of(game, xi_names, yi_names=()):
    return State.of(game.vars, set(xi_names) | set(yi_names))


def cpre_sys_enum(game, member) -> set[State]:
    """States where every valid input has a valid output landing in member."""
    out = set()
    for s in all_states(game.vars):
        ok = True
        for s_x in env_choices(game, s):
            hit = False
            for s_y in sys_choices(game, s, s_x):
                t = State.of(game.vars, set(s_x) | set(s_y))
                if member(t):
                    hit = True
                    break
            if not hit:
                ok = False
                break
        if ok:
            out.add(s)
    return out


def cpre_env_enum(game, member) -> set[State]:
    """States with a valid input whose every valid output lands in member."""
    out = set()
    for s in all_states(game.vars):
        for s_x in env_choices(game, s):
            if all(
                member(State.of(game.vars, set(s_x) | set(s_y)))
                for s_y in sys_choices(game, s, s_x)
            ):
                out.add(s)
                break
    return out


def ec_scalar(game, c, s, t, e):
    """The one-step charge, written out case by case from scratch."""
    if not eval_assertion(game.rho_e, s, t):
        return 0
    if e == INF or not eval_assertion(game.rho_s, s, t):
        return int(INF)
    w = weight(game, s, t)
    if e - w > c:
        return int(INF)
    return max(0, int(e) - w)


def ecpre_enum(game, c, f: EnergyFunction) -> EnergyFunction:
    """max over inputs of min over outputs of the scalar charge."""
    vals = np.zeros(game.n_states, dtype=np.int64)
    for s in all_states(game.vars):
        worst = 0
        for xi in range(1 << len(game.vars.x_names)):
            s_x = {n for j, n in enumerate(game.vars.x_names) if (xi >> j) & 1}
            best = int(INF)
            for yi in range(1 << len(game.vars.y_names)):
                s_y = {n for j, n in enumerate(game.vars.y_names) if (yi >> j) & 1}
                t = State.of(game.vars, s_x | s_y)
                best = min(best, ec_scalar(game, c, s, t, int(f.values[t.index])))
            worst = max(worst, best)
        vals[s.index] = worst
    return EnergyFunction(c, vals)


def buchi_loop_classical(game, j_mask):
    """Nested fixpoint loop for 'visit the target set infinitely often'."""
    n = game.n_states
    z = np.ones(n, dtype=bool)
    while True:
        recurr = j_mask & cpre_sys(game, z)
        y = np.zeros(n, dtype=bool)
        while True:
            new = recurr | cpre_sys(game, y)
            if (new == y).all():
                break
            y = new
        if (y == z).all():
            return z
        z = y


def buchi_loop_energy(game, c, f_j: EnergyFunction) -> EnergyFunction:
    """Credit-function version of the same loop; max/min are meet/join."""
    n = game.n_states
    z = EnergyFunction.top(c, n)
    while True:
        recurr = meet(f_j, ecpre(game, c, z))
        y = EnergyFunction.bottom(c, n)
        while True:
            new = join(recurr, ecpre(game, c, y))
            if new == y:
                break
            y = new
        if y == z:
            return z
        z = y


def _play_winner(pg, start, choice0, choice1):
    """Winner of the unique play under two memoryless strategies."""
    seen = {}
    path = []
    s = start
    while s not in seen:
        seen[s] = len(path)
        path.append(s)
        succs = pg.edges[s]
        if not succs:
            # deadlock loses for its owner
            return 1 - pg.owners[s]
        s = choice0[s] if pg.owners[s] == 0 else choice1[s]
    cycle = path[seen[s]:]
    return 0 if min(pg.prios[v] for v in cycle) % 2 == 0 else 1


def parity_winners_brute(pg):
    """Winning regions by enumerating memoryless strategies of both players."""
    n = pg.n_states
    options = []
    for s in range(n):
        succs = list(pg.edges[s])
        options.append(succs if succs else [None])
    own0 = [s for s in range(n) if pg.owners[s] == 0]
    own1 = [s for s in range(n) if pg.owners[s] == 1]

    def strategies(owned):
        pools = [options[s] for s in owned]
        for combo in itertools.product(*pools):
            yield dict(zip(owned, combo))

    w0 = set()
    for start in range(n):
        winning = False
        for c0 in strategies(own0):
            if all(
                _play_winner(pg, start, c0, c1) == 0
                for c1 in strategies(own1)
            ):
                winning = True
                break
        if winning:
            w0.add(start)
    return w0, set(range(n)) - w0


def random_valid_prefix(rng, game, max_len=6):
    """A random consecution-valid play prefix (None if stuck immediately)."""
    from emu import PlayPrefix, successors

    s = State(game.vars, rng.randrange(game.n_states))
    states = [s]
    for _ in range(rng.randint(0, max_len)):
        succs = sorted(successors(game, states[-1]), key=lambda t: t.index)
        if not succs:
            break
        states.append(rng.choice(succs))
    return PlayPrefix(tuple(states))
