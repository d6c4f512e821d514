"""Extensive-form games with explicit per-edge, per-player visibility.

A game tree is a tuple of immutable nodes.  Every edge records which players
observe it (``seen_by``); information sets and public states are *derived*
from visibility rather than being stored, by grouping histories on the
subsequence of edge labels a player (or a set of players) has seen.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from .errors import (
    ActionMismatchWithinInfoset,
    CyclicStructure,
    NotATeamGame,
    ProbabilityNotNormalized,
    UnknownPlayer,
)

PROB_TOL = 1e-12

Prob = Union[Fraction, float]
Utility = Union[Fraction, float, int]


@dataclass(frozen=True, slots=True)
class PlayerRole:
    """A participant: team member (indexed), opponent, chance or coordinator."""

    kind: str  # "team" | "opponent" | "chance" | "coordinator"
    index: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("team", "opponent", "chance", "coordinator"):
            raise UnknownPlayer(f"unknown player kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind == "team":
            return f"t{self.index}"
        return {"opponent": "o", "chance": "c", "coordinator": "coord"}[self.kind]

    def sort_key(self) -> tuple[int, int]:
        order = {"team": 0, "opponent": 1, "coordinator": 2, "chance": 3}
        return (order[self.kind], self.index)

    def __repr__(self) -> str:  # compact in debug dumps
        return self.name


CHANCE = PlayerRole("chance")
OPPONENT = PlayerRole("opponent")
COORDINATOR = PlayerRole("coordinator")


def team_member(index: int) -> PlayerRole:
    return PlayerRole("team", index)


def parse_role(name: str) -> PlayerRole:
    if name == "o":
        return OPPONENT
    if name == "c":
        return CHANCE
    if name == "coord":
        return COORDINATOR
    if name.startswith("t") and name[1:].isdigit():
        return team_member(int(name[1:]))
    raise UnknownPlayer(f"cannot parse player name {name!r}")


@dataclass(frozen=True, slots=True)
class Edge:
    """One action edge: label, child node id, chance probability, observers."""

    label: str
    child: int
    prob: Optional[Prob] = None
    seen_by: frozenset[PlayerRole] = frozenset()


@dataclass(frozen=True, slots=True)
class Node:
    """Decision / chance node (player set, edges non-empty) or terminal."""

    player: Optional[PlayerRole] = None
    edges: tuple[Edge, ...] = ()
    utility: Utility = 0.0

    @property
    def is_terminal(self) -> bool:
        return self.player is None

    @property
    def is_chance(self) -> bool:
        return self.player == CHANCE


@dataclass(frozen=True)
class VEFG:
    """Immutable game tree with visibility annotations.

    ``players`` lists the strategic (non-chance) players.  Terminal nodes
    store the team utility; the opponent's utility is its negation.
    """

    name: str
    players: tuple[PlayerRole, ...]
    nodes: tuple[Node, ...]
    root: int = 0

    def node(self, nid: int) -> Node:
        return self.nodes[nid]

    def team_players(self) -> tuple[PlayerRole, ...]:
        return tuple(p for p in self.players if p.kind == "team")

    def opponent(self) -> Optional[PlayerRole]:
        for p in self.players:
            if p.kind == "opponent":
                return p
        return None

    def __len__(self) -> int:
        return len(self.nodes)


InfosetKey = tuple[str, ...]


def validate_game(game: VEFG) -> None:
    """Check tree structure, probability normalization and role invariants."""
    n = len(game.nodes)
    if not (0 <= game.root < n):
        raise CyclicStructure(f"root id {game.root} out of range")
    seen = bytearray(n)
    stack = [game.root]
    while stack:
        nid = stack.pop()
        if seen[nid]:
            raise CyclicStructure(f"node {nid} has multiple parents or a cycle")
        seen[nid] = 1
        node = game.nodes[nid]
        if node.player is not None and not node.edges:
            raise CyclicStructure(f"non-terminal node {nid} has no edges")
        labels = set()
        for e in node.edges:
            if not (0 <= e.child < n):
                raise CyclicStructure(f"edge child {e.child} out of range")
            if e.label in labels:
                raise ActionMismatchWithinInfoset(
                    f"duplicate action label {e.label!r} at node {nid}")
            labels.add(e.label)
            stack.append(e.child)
        if node.is_chance:
            if any(e.prob is None for e in node.edges):
                raise ProbabilityNotNormalized(
                    f"chance node {nid} has an edge without probability")
            total = sum(e.prob for e in node.edges)
            if isinstance(total, Fraction):
                ok = total == 1
            else:
                ok = abs(total - 1.0) <= PROB_TOL
            if not ok:
                raise ProbabilityNotNormalized(
                    f"chance node {nid} probabilities sum to {total}")
        elif node.player is not None:
            if node.player not in game.players:
                raise UnknownPlayer(f"node {nid} acted by unlisted player "
                                    f"{node.player.name}")
            if any(e.prob is not None for e in node.edges):
                raise ProbabilityNotNormalized(
                    f"decision node {nid} carries chance probabilities")
    if not all(seen):
        unreachable = next(i for i in range(n) if not seen[i])
        raise CyclicStructure(f"node {unreachable} unreachable from root")
    kinds = [p.kind for p in game.players]
    if kinds.count("opponent") > 1:
        raise UnknownPlayer("more than one opponent player")
    if "team" in kinds and "coordinator" in kinds:
        raise UnknownPlayer("team members and coordinator cannot coexist")
    team_idx = sorted(p.index for p in game.players if p.kind == "team")
    if team_idx != list(range(len(team_idx))):
        raise UnknownPlayer(f"team indices not contiguous from 0: {team_idx}")


def derive_visibility_class(edge: Edge, player_set: Iterable[PlayerRole]) -> str:
    """Classify an edge for a set of observers: pub / priv / hidden."""
    players = list(player_set)
    if not players:
        raise UnknownPlayer("empty observer set")
    if any(p.kind == "chance" for p in players):
        raise UnknownPlayer("chance is not an observer")
    seen = sum(1 for p in players if p in edge.seen_by)
    if seen == len(players):
        return "pub"
    if seen == 0:
        return "hidden"
    return "priv"


def _walk(game: VEFG) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield (node id, path of (parent, edge index)) — not used in hot paths."""
    stack: list[tuple[int, tuple[int, ...]]] = [(game.root, ())]
    while stack:
        nid, path = stack.pop()
        yield nid, path
        for i, e in enumerate(game.nodes[nid].edges):
            stack.append((e.child, path + (nid,)))


def seen_sequences(game: VEFG, player: PlayerRole) -> dict[int, InfosetKey]:
    """Observed label sequence at every node, for one player."""
    out: dict[int, InfosetKey] = {}
    stack: list[tuple[int, InfosetKey]] = [(game.root, ())]
    while stack:
        nid, seq = stack.pop()
        out[nid] = seq
        for e in game.nodes[nid].edges:
            stack.append((e.child, seq + (e.label,) if player in e.seen_by else seq))
    return out


def infosets(game: VEFG, player: PlayerRole) -> dict[InfosetKey, list[int]]:
    """Partition the player's decision nodes by observed-action sequence."""
    groups: dict[InfosetKey, list[int]] = {}
    stack: list[tuple[int, InfosetKey]] = [(game.root, ())]
    while stack:
        nid, seq = stack.pop()
        node = game.nodes[nid]
        if node.player == player:
            groups.setdefault(seq, []).append(nid)
        for e in node.edges:
            stack.append((e.child, seq + (e.label,) if player in e.seen_by else seq))
    for key, members in groups.items():
        members.sort()
        actions = tuple(e.label for e in game.nodes[members[0]].edges)
        for nid in members[1:]:
            if tuple(e.label for e in game.nodes[nid].edges) != actions:
                raise ActionMismatchWithinInfoset(
                    f"nodes {members[0]} and {nid} share infoset "
                    f"{key!r} of {player.name} but have different actions")
    return groups


def public_states(game: VEFG, observer_set: Iterable[PlayerRole]
                  ) -> dict[InfosetKey, list[int]]:
    """Partition *all* histories by their public (seen-by-all) subsequence."""
    observers = frozenset(observer_set)
    if not observers:
        raise UnknownPlayer("empty observer set")
    groups: dict[InfosetKey, list[int]] = {}
    stack: list[tuple[int, InfosetKey]] = [(game.root, ())]
    while stack:
        nid, seq = stack.pop()
        groups.setdefault(seq, []).append(nid)
        for e in game.nodes[nid].edges:
            pub = observers <= e.seen_by
            stack.append((e.child, seq + (e.label,) if pub else seq))
    for members in groups.values():
        members.sort()
    return groups


def validate_perfect_recall(game: VEFG) -> list[tuple[PlayerRole, int]]:
    """Report (player, node) pairs violating perfect recall; empty means ok."""
    violations: list[tuple[PlayerRole, int]] = []
    for nid, node in enumerate(game.nodes):
        if node.player is not None and not node.is_chance:
            for e in node.edges:
                if node.player not in e.seen_by:
                    violations.append((node.player, nid))
                    break
    # Consistent action sequences: grouping by seen-sequence must give uniform
    # action lists; report the offending nodes instead of raising.
    for player in game.players:
        try:
            infosets(game, player)
        except ActionMismatchWithinInfoset:
            groups: dict[InfosetKey, list[int]] = {}
            seqs = seen_sequences(game, player)
            for nid, node in enumerate(game.nodes):
                if node.player == player:
                    groups.setdefault(seqs[nid], []).append(nid)
            for members in groups.values():
                members.sort()
                ref = tuple(e.label for e in game.nodes[members[0]].edges)
                for nid in members[1:]:
                    if tuple(e.label for e in game.nodes[nid].edges) != ref:
                        violations.append((player, nid))
    return violations


def team_perfect_recall_refinement(game: VEFG) -> VEFG:
    """Mark every team-member action as seen by all team members."""
    team = frozenset(game.team_players())
    if not team:
        raise NotATeamGame(f"game {game.name!r} has no team members")
    new_nodes = []
    changed = False
    for node in game.nodes:
        if node.player is not None and node.player.kind == "team":
            edges = tuple(replace(e, seen_by=e.seen_by | team) for e in node.edges)
            if edges != node.edges:
                changed = True
                node = replace(node, edges=edges)
        new_nodes.append(node)
    if not changed:
        return game
    return replace(game, nodes=tuple(new_nodes))


def _acting_role(node: Node) -> Optional[PlayerRole]:
    return node.player


def is_public_turn_taking(game: VEFG) -> bool:
    """True iff within every infoset all histories share the acting-player
    sequence of their prefixes."""
    # Carry, per strategic player, the observed sequence, plus the acting
    # sequence of the path; compare acting sequences within each infoset.
    players = game.players
    first: dict[tuple[PlayerRole, InfosetKey], tuple] = {}
    stack: list[tuple[int, tuple[InfosetKey, ...], tuple]] = [
        (game.root, tuple(() for _ in players), ())]
    while stack:
        nid, seqs, acts = stack.pop()
        node = game.nodes[nid]
        if node.player is not None and not node.is_chance:
            pi = players.index(node.player)
            key = (node.player, seqs[pi])
            if key in first:
                if first[key] != acts:
                    return False
            else:
                first[key] = acts
        if node.edges:
            next_acts = acts + (node.player,)
            for e in node.edges:
                nseqs = tuple(
                    seq + (e.label,) if p in e.seen_by else seq
                    for p, seq in zip(players, seqs))
                stack.append((e.child, nseqs, next_acts))
    return True


def make_public_turn_taking(game: VEFG) -> VEFG:
    """Force public turn-taking by inserting single-noop decision levels.

    Depth levels cycle through all players (chance included); a node whose
    actor is not the designated player of its level is postponed behind a
    single "noop" edge seen only by the inserted actor.  Returns the input
    unchanged when the property already holds.
    """
    if is_public_turn_taking(game):
        return game
    cycle: tuple[PlayerRole, ...] = game.players + (CHANCE,)
    nodes: list[Node] = []

    def build(nid: int, level: int) -> int:
        node = game.nodes[nid]
        if node.is_terminal:
            nodes.append(node)
            return len(nodes) - 1
        designated = cycle[level % len(cycle)]
        if node.player == designated:
            edges = tuple(
                replace(e, child=build(e.child, level + 1)) for e in node.edges)
            nodes.append(replace(node, edges=edges))
        else:
            child = build(nid, level + 1)
            if designated == CHANCE:
                edge = Edge("noop", child, prob=Fraction(1), seen_by=frozenset())
            else:
                edge = Edge("noop", child, seen_by=frozenset((designated,)))
            nodes.append(Node(player=designated, edges=(edge,)))
        return len(nodes) - 1

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(game.nodes) * (len(cycle) + 1) + 1000))
    try:
        root = build(game.root, 0)
    finally:
        sys.setrecursionlimit(limit)
    return replace(game, nodes=tuple(nodes), root=root)
