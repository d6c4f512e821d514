"""Shared fixtures: small handcrafted games and benchmark instances."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pubcoord import PokerSpec, ToySpec, gen_kuhn3, gen_toy
from pubcoord.model import CHANCE, Edge, Node, VEFG, parse_role, validate_game

T0, T1, O = parse_role("t0"), parse_role("t1"), parse_role("o")
ALL = (T0, T1, O)


def mini_team_game(seed: int = 0, chance_outcomes: int = 2) -> VEFG:
    """Chance deals a private signal to t0; then t0, o, t1 act publicly in
    turn; seeded integer payoffs.  Small enough for every solver path."""
    rng = random.Random(seed)
    nodes: list[Node] = []

    def add(node: Node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    ids: dict = {}
    for c in range(chance_outcomes):
        for a in "LR":
            for b in "lr":
                term = {d: add(Node(utility=Fraction(rng.randint(-3, 3))))
                        for d in "UD"}
                ids[(c, a, b)] = add(Node(player=T1, edges=tuple(
                    Edge(d, term[d], None, frozenset(ALL)) for d in "UD")))
    for c in range(chance_outcomes):
        for a in "LR":
            ids[(c, a)] = add(Node(player=O, edges=tuple(
                Edge(b, ids[(c, a, b)], None, frozenset(ALL)) for b in "lr")))
    for c in range(chance_outcomes):
        ids[(c,)] = add(Node(player=T0, edges=tuple(
            Edge(a, ids[(c, a)], None, frozenset(ALL)) for a in "LR")))
    root = add(Node(player=CHANCE, edges=tuple(
        Edge(f"c{c}", ids[(c,)], Fraction(1, chance_outcomes),
             frozenset({T0})) for c in range(chance_outcomes))))
    g = VEFG(name=f"mini-s{seed}-c{chance_outcomes}", players=ALL,
             nodes=tuple(nodes), root=root)
    validate_game(g)
    return g


@pytest.fixture(scope="session")
def kuhn0():
    return gen_kuhn3(PokerSpec("kuhn", 3, adversary_position=0))


@pytest.fixture(scope="session")
def toy322():
    return gen_toy(ToySpec(3, 2, 2, payoff_seed=7))


@pytest.fixture
def mini():
    return mini_team_game(0)
