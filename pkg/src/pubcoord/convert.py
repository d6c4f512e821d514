"""Public-coordinator conversion of adversarial team games.

Converts a team game (team members vs. at most one opponent, ex-ante
coordination) into a two-player zero-sum game between a *coordinator* and the
opponent.  At every team decision point the coordinator publicly commits to a
*prescription*: one action for every private state (team infoset) compatible
with the public information.  A probability-one chance edge then plays the
action prescribed for the actual private state.

Three information-lossless representations are provided:

- ``basic``   — one coordinator node per original team history.
- ``pruned``  — private states whose prescribed action differs from the action
                actually played are excluded from later prescriptions.
- ``folded``  — team-private, opponent-unseen chance outcomes are never
                branched; a belief over private states is carried instead and
                the prescription is resolved by a chance node with one outcome
                per distinct prescribed action.

``apply_safe_imperfect_recall`` additionally merges coordinator infosets by
forgetting prescription components that addressed already-excluded states.
Forgetting them completely (including *when* each state was excluded) leaves
exactly the public observation sequence plus the prescriptions to the states
that are still compatible — and those prescribed actions are forced to equal
the publicly observed actions.  The merged infoset key is therefore the
current compatible-state set itself, which both determines and is determined
by the information the coordinator retains.
"""
from __future__ import annotations

import itertools
import random
import sys
from dataclasses import dataclass, replace as dc_replace
from fractions import Fraction
from typing import Optional

from .errors import (
    ExclusionDataMissing,
    IllegalActionInPlan,
    IllegalPrescription,
    ImperfectRecallInput,
    NotPublicTurnTaking,
)
from .model import (
    CHANCE,
    COORDINATOR,
    OPPONENT,
    Edge,
    InfosetKey,
    Node,
    PlayerRole,
    VEFG,
    infosets,
    is_public_turn_taking,
    seen_sequences,
    team_perfect_recall_refinement,
    validate_perfect_recall,
)

TeamInfosetRef = tuple[PlayerRole, InfosetKey]

# Prescription as stored per coordinator edge: ((iset id, action label), ...)
PrescriptionT = tuple[tuple[int, str], ...]


def game_digest(game: VEFG) -> str:
    """Stable structural digest used to tie converted games to their source."""
    import hashlib

    h = hashlib.sha256()
    h.update(repr((game.name, game.players, game.root)).encode())
    for node in game.nodes:
        h.update(repr((node.player, node.utility)).encode())
        for e in node.edges:
            h.update(repr((e.label, e.child, e.prob,
                           sorted(p.name for p in e.seen_by))).encode())
    return h.hexdigest()


@dataclass(frozen=True)
class ConvertedGame:
    """A converted two-player zero-sum game plus conversion bookkeeping.

    Parallel per-node tuples describe each converted node's origin:
    ``node_kind`` is one of ``coord`` (coordinator decision), ``dummy``
    (probability-one chance playing the extracted action), ``presc``
    (folded prescription-resolving chance), ``copy`` (chance / opponent /
    terminal copied from the source).
    """

    game: VEFG
    mode: str                     # "basic" | "pruned" | "folded"
    safe_ir_applied: bool
    source_name: str
    source_digest: str
    node_kind: tuple[str, ...]
    origin_player: tuple[Optional[PlayerRole], ...]
    origin_node: tuple[Optional[int], ...]
    active: tuple[Optional[tuple[int, ...]], ...]
    excluded: tuple[Optional[frozenset[int]], ...]
    beliefs: tuple[Optional[tuple[tuple[int, Fraction], ...]], ...]
    prescriptions: tuple[Optional[tuple[PrescriptionT, ...]], ...]
    iset_refs: tuple[TeamInfosetRef, ...]        # team iset id -> (player, key)
    iset_actions: tuple[tuple[str, ...], ...]    # team iset id -> action labels
    # compatible original states per coordinator node (sorted source node ids)
    supports: tuple[Optional[tuple[int, ...]], ...] = ()
    coordinator_keys: Optional[tuple] = None     # safe-IR infoset key per node


def _prepare(game: VEFG) -> VEFG:
    g = team_perfect_recall_refinement(game)
    violations = validate_perfect_recall(g)
    if violations:
        raise ImperfectRecallInput(
            f"perfect recall violated at {violations[:3]} (total "
            f"{len(violations)})")
    if not is_public_turn_taking(g):
        raise NotPublicTurnTaking(
            f"game {game.name!r} is not public turn-taking; apply "
            "make_public_turn_taking first")
    return g


def _team_isets(g: VEFG):
    """Globally-indexed team infosets in canonical (player, key) order."""
    refs: list[TeamInfosetRef] = []
    actions: list[tuple[str, ...]] = []
    of: dict[int, int] = {}
    for p in sorted(g.team_players(), key=lambda r: r.sort_key()):
        for key, members in sorted(infosets(g, p).items()):
            iid = len(refs)
            refs.append((p, key))
            actions.append(tuple(e.label for e in g.nodes[members[0]].edges))
            for nid in members:
                of[nid] = iid
    return refs, actions, of


class _Builder:
    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.kind: list[str] = []
        self.oplayer: list[Optional[PlayerRole]] = []
        self.onode: list[Optional[int]] = []
        self.active: list[Optional[tuple[int, ...]]] = []
        self.excluded: list[Optional[frozenset[int]]] = []
        self.beliefs: list = []
        self.prescriptions: list = []
        self.supports: list = []

    def emit(self, node: Node, kind: str, oplayer=None, onode=None,
             active=None, excluded=None, belief=None, presc=None,
             support=None) -> int:
        self.nodes.append(node)
        self.kind.append(kind)
        self.oplayer.append(oplayer)
        self.onode.append(onode)
        self.active.append(active)
        self.excluded.append(excluded)
        self.beliefs.append(belief)
        self.prescriptions.append(presc)
        self.supports.append(tuple(sorted(support))
                             if support is not None else None)
        return len(self.nodes) - 1


def _convert(game: VEFG, mode: str) -> ConvertedGame:
    g = _prepare(game)
    team_set = frozenset(g.team_players())
    opp = g.opponent()
    refs, iset_actions, iset_of = _team_isets(g)
    b = _Builder()

    def conv_seen(e: Edge) -> frozenset[PlayerRole]:
        seen = set()
        if team_set <= e.seen_by:
            seen.add(COORDINATOR)
        if opp is not None and opp in e.seen_by:
            seen.add(OPPONENT)
        return frozenset(seen)

    def team_public(e: Edge) -> bool:
        return team_set <= e.seen_by

    def presc_label(active: tuple[int, ...], gamma: dict[int, str]) -> str:
        return "G[" + ",".join(f"{i}={gamma[i]}" for i in active) + "]"

    def rec(h: int, support: tuple[int, ...], excl: frozenset[int]) -> int:
        node = g.nodes[h]
        if node.is_terminal:
            return b.emit(Node(utility=node.utility), "copy", onode=h)
        if node.is_chance or (opp is not None and node.player == opp):
            edges = []
            for e in node.edges:
                if team_public(e):
                    sup = tuple(ee.child for gg in support
                                for ee in g.nodes[gg].edges
                                if ee.label == e.label)
                else:
                    sup = tuple(ee.child for gg in support
                                for ee in g.nodes[gg].edges)
                child = rec(e.child, sup, excl)
                edges.append(Edge(e.label, child, e.prob, conv_seen(e)))
            return b.emit(Node(player=node.player, edges=tuple(edges)),
                          "copy", onode=h)
        # team decision node -> coordinator node with prescriptions
        active = tuple(sorted({iset_of[gg] for gg in support}))
        my = iset_of[h]
        assert my in active
        edge_of = {e.label: e for e in node.edges}
        # per (infoset, action): children of the support states in that
        # infoset reached by that action, so the per-prescription support
        # is a concatenation instead of a fresh scan
        kids: dict[tuple[int, str], tuple[int, ...]] = {}
        for i in active:
            states = [gg for gg in support if iset_of[gg] == i]
            for a in iset_actions[i]:
                kids[(i, a)] = tuple(ee.child for gg in states
                                     for ee in g.nodes[gg].edges
                                     if ee.label == a)
        basic_sup = {a: tuple(ch for i in active for ch in kids[(i, a)])
                     for a in iset_actions[my]}
        pres_edges: list[Edge] = []
        pres_list: list[PrescriptionT] = []
        for combo in itertools.product(
                *(iset_actions[i] for i in active)):
            gamma = dict(zip(active, combo))
            a = gamma[my]
            orig_edge = edge_of[a]
            if mode == "pruned":
                new_excl = excl | {i for i in active if gamma[i] != a}
                new_sup = tuple(ch for i in active if gamma[i] == a
                                for ch in kids[(i, a)])
            else:
                new_excl = excl
                new_sup = basic_sup[a]
            child = rec(orig_edge.child, new_sup, new_excl)
            dummy_seen = {COORDINATOR}
            if opp is not None and opp in orig_edge.seen_by:
                dummy_seen.add(OPPONENT)
            dummy = b.emit(
                Node(player=CHANCE,
                     edges=(Edge(a, child, Fraction(1), frozenset(dummy_seen)),)),
                "dummy", oplayer=node.player, onode=h)
            pres_edges.append(Edge(presc_label(active, gamma), dummy,
                                   None, frozenset((COORDINATOR,))))
            pres_list.append(tuple((i, gamma[i]) for i in active))
        return b.emit(Node(player=COORDINATOR, edges=tuple(pres_edges)),
                      "coord", oplayer=node.player, onode=h,
                      active=active, excluded=excl, presc=tuple(pres_list),
                      support=support)

    def foldable(nid: int) -> bool:
        node = g.nodes[nid]
        for e in node.edges:
            if team_public(e):
                return False
            if opp is not None and opp in e.seen_by:
                return False
        return True

    def recf(belief: tuple[tuple[int, Fraction], ...],
             support: tuple[int, ...], excl: frozenset[int]) -> int:
        # ``belief`` is the branch-local state distribution (conditioned on
        # everything on the path, including opponent-private chance) and
        # yields chance probabilities and terminal weights.  ``support`` is
        # the coordinator's compatible-state set (conditioned only on
        # coordinator-visible information) and determines the active infosets
        # a prescription must cover — these differ whenever opponent-private
        # chance was branched explicitly.
        node0 = g.nodes[belief[0][0]]
        if node0.is_terminal:
            assert all(g.nodes[nid].is_terminal for nid, _ in belief)
            util = sum((w * Fraction(g.nodes[nid].utility)
                        for nid, w in belief), Fraction(0))
            return b.emit(Node(utility=util), "copy",
                          onode=belief[0][0] if len(belief) == 1 else None,
                          belief=belief)
        if node0.is_chance:
            if foldable(belief[0][0]):
                newbel = tuple((e.child, w * Fraction(e.prob))
                               for nid, w in belief
                               for e in g.nodes[nid].edges)
                newsup = tuple(e.child for nid in support
                               for e in g.nodes[nid].edges)
                return recf(newbel, newsup, excl)
            # explicit chance: branch by label with belief-marginal probs
            labels: list[str] = []
            for nid, _ in belief:
                for e in g.nodes[nid].edges:
                    if e.label not in labels:
                        labels.append(e.label)
            rep0 = g.nodes[belief[0][0]].edges[0]
            coordinator_sees = team_public(rep0)
            edges = []
            for lab in labels:
                q = Fraction(0)
                nb: list[tuple[int, Fraction]] = []
                rep: Optional[Edge] = None
                for nid, w in belief:
                    for e in g.nodes[nid].edges:
                        if e.label == lab:
                            rep = e
                            q += w * Fraction(e.prob)
                            nb.append((e.child, w * Fraction(e.prob)))
                if q == 0:
                    continue
                nb = tuple((nid, w / q) for nid, w in nb)
                if coordinator_sees:
                    newsup = tuple(e.child for nid in support
                                   for e in g.nodes[nid].edges
                                   if e.label == lab)
                else:
                    newsup = tuple(e.child for nid in support
                                   for e in g.nodes[nid].edges)
                child = recf(nb, newsup, excl)
                edges.append(Edge(lab, child, q, conv_seen(rep)))
            return b.emit(Node(player=CHANCE, edges=tuple(edges)), "copy",
                          belief=belief)
        if opp is not None and node0.player == opp:
            labels = tuple(e.label for e in node0.edges)
            assert all(tuple(e.label for e in g.nodes[nid].edges) == labels
                       for nid, _ in belief)
            edges = []
            for k, e0 in enumerate(node0.edges):
                nb = tuple((g.nodes[nid].edges[k].child, w)
                           for nid, w in belief)
                if team_public(e0):
                    newsup = tuple(e.child for nid in support
                                   for e in g.nodes[nid].edges
                                   if e.label == e0.label)
                else:
                    newsup = tuple(e.child for nid in support
                                   for e in g.nodes[nid].edges)
                child = recf(nb, newsup, excl)
                edges.append(Edge(e0.label, child, None, conv_seen(e0)))
            return b.emit(Node(player=OPPONENT, edges=tuple(edges)), "copy",
                          belief=belief)
        # team decision node
        active = tuple(sorted({iset_of[nid] for nid in support}))
        pres_edges = []
        pres_list: list[PrescriptionT] = []
        for combo in itertools.product(*(iset_actions[i] for i in active)):
            gamma = dict(zip(active, combo))
            # distinct actions prescribed to states in the local belief, in
            # declaration order of the acting infoset's action list
            acts: list[str] = []
            for nid, _ in belief:
                a = gamma[iset_of[nid]]
                if a not in acts:
                    acts.append(a)
            order = {lab: k for k, lab in
                     enumerate(iset_actions[iset_of[belief[0][0]]])}
            acts.sort(key=lambda lab: order.get(lab, len(order)))
            out_edges = []
            for a in acts:
                q = sum((w for nid, w in belief
                         if gamma[iset_of[nid]] == a), Fraction(0))
                nb = []
                rep = None
                for nid, w in belief:
                    if gamma[iset_of[nid]] == a:
                        e = next(e for e in g.nodes[nid].edges
                                 if e.label == a)
                        rep = e
                        nb.append((e.child, w / q))
                newsup = tuple(e.child for nid in support
                               if gamma[iset_of[nid]] == a
                               for e in g.nodes[nid].edges
                               if e.label == a)
                new_excl = excl | {i for i in active if gamma[i] != a}
                child = recf(tuple(nb), newsup, new_excl)
                seen = {COORDINATOR}
                if opp is not None and opp in rep.seen_by:
                    seen.add(OPPONENT)
                out_edges.append(Edge(a, child, q, frozenset(seen)))
            presc_node = b.emit(
                Node(player=CHANCE, edges=tuple(out_edges)), "presc",
                oplayer=node0.player, belief=belief)
            pres_edges.append(Edge(presc_label(active, gamma), presc_node,
                                   None, frozenset((COORDINATOR,))))
            pres_list.append(tuple((i, gamma[i]) for i in active))
        return b.emit(Node(player=COORDINATOR, edges=tuple(pres_edges)),
                      "coord", oplayer=node0.player,
                      active=active, excluded=excl, presc=tuple(pres_list),
                      belief=belief, support=support)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(1_000_000)
    try:
        if mode == "folded":
            root = recf(((g.root, Fraction(1)),), (g.root,), frozenset())
        else:
            root = rec(g.root, (g.root,), frozenset())
    finally:
        sys.setrecursionlimit(limit)

    players = ((COORDINATOR, OPPONENT) if opp is not None else (COORDINATOR,))
    cg = VEFG(name=f"{game.name}[{mode}]", players=players,
              nodes=tuple(b.nodes), root=root)
    return ConvertedGame(
        game=cg, mode=mode, safe_ir_applied=False,
        source_name=game.name, source_digest=game_digest(game),
        node_kind=tuple(b.kind), origin_player=tuple(b.oplayer),
        origin_node=tuple(b.onode), active=tuple(b.active),
        excluded=tuple(b.excluded), beliefs=tuple(b.beliefs),
        prescriptions=tuple(b.prescriptions),
        iset_refs=tuple(refs), iset_actions=tuple(iset_actions),
        supports=tuple(b.supports))


def convert_basic(game: VEFG) -> ConvertedGame:
    return _convert(game, "basic")


def convert_pruned(game: VEFG) -> ConvertedGame:
    return _convert(game, "pruned")


def convert_folded(game: VEFG) -> ConvertedGame:
    return _convert(game, "folded")


def coordinator_node_keys(cg: ConvertedGame) -> dict[int, tuple]:
    """Infoset key per coordinator decision node.

    With safe imperfect recall applied this is the merged key; otherwise it is
    the visibility-derived observation sequence.
    """
    if cg.coordinator_keys is not None:
        return {nid: key for nid, key in enumerate(cg.coordinator_keys)
                if key is not None}
    seqs = seen_sequences(cg.game, COORDINATOR)
    return {nid: seqs[nid] for nid, node in enumerate(cg.game.nodes)
            if node.player == COORDINATOR}


def apply_safe_imperfect_recall(cg: ConvertedGame) -> ConvertedGame:
    """Merge coordinator infosets by forgetting prescriptions for excluded
    states.

    What the coordinator retains after forgetting every prescription
    component addressed to a state excluded on the path (including the time
    at which each exclusion happened) is the public observation sequence
    plus the prescriptions to the still-compatible states — and the latter
    necessarily equal the publicly observed actions.  Both are determined by
    the current compatible-state set, so that set is the merged infoset key.
    Node counts are unchanged; two coordinator nodes merge exactly when they
    carry the same compatible states.
    """
    if cg.mode not in ("pruned", "folded"):
        raise ExclusionDataMissing(
            f"safe imperfect recall needs exclusion data; mode {cg.mode!r} "
            "does not track exclusions")
    g = cg.game
    keys: list = [None] * len(g.nodes)
    for nid, node in enumerate(g.nodes):
        if node.player == COORDINATOR:
            keys[nid] = ("sir",) + cg.supports[nid]
    return dc_replace(cg, safe_ir_applied=True, coordinator_keys=tuple(keys))


# ---------------------------------------------------------------------------
# Strategy mappings rho / sigma and payoff equivalence
# ---------------------------------------------------------------------------


def _plan_action(cg: ConvertedGame, joint_plan, iid: int) -> str:
    ref = cg.iset_refs[iid]
    a = joint_plan.get(ref)
    if a is None:
        return cg.iset_actions[iid][0]
    if a not in cg.iset_actions[iid]:
        raise IllegalActionInPlan(
            f"action {a!r} illegal at infoset {ref}; legal: "
            f"{cg.iset_actions[iid]}")
    return a


def coordinator_choices(cg: ConvertedGame, joint_plan) -> dict[int, int]:
    """Per coordinator node, the index of the prescription edge selected by a
    joint team plan (rho at node level)."""
    # validate plan actions
    ref_to_iid = {ref: i for i, ref in enumerate(cg.iset_refs)}
    for ref, a in joint_plan.items():
        iid = ref_to_iid.get(ref)
        if iid is not None and a not in cg.iset_actions[iid]:
            raise IllegalActionInPlan(
                f"action {a!r} illegal at infoset {ref}")
    choices: dict[int, int] = {}
    for nid, presc in enumerate(cg.prescriptions):
        if presc is None:
            continue
        for k, assignment in enumerate(presc):
            if all(_plan_action(cg, joint_plan, iid) == a
                   for iid, a in assignment):
                choices[nid] = k
                break
        else:  # pragma: no cover - product structure guarantees a match
            raise IllegalActionInPlan(f"no prescription matches at node {nid}")
    return choices


def map_team_to_coordinator(game: VEFG, cg: ConvertedGame, joint_plan
                            ) -> dict[tuple, str]:
    """rho: map a joint team pure plan to a coordinator pure strategy.

    ``joint_plan`` maps (player, infoset key) -> action label; infosets left
    unassigned (e.g. unreachable under the plan's own choices) default to the
    first declared action.  Returns coordinator infoset key -> prescription
    edge label.
    """
    choices = coordinator_choices(cg, joint_plan)
    keys = coordinator_node_keys(cg)
    out: dict[tuple, str] = {}
    for nid, k in choices.items():
        label = cg.game.nodes[nid].edges[k].label
        prev = out.get(keys[nid])
        if prev is not None and prev != label:
            raise IllegalPrescription(
                f"inconsistent prescriptions within coordinator infoset "
                f"{keys[nid]!r}")
        out[keys[nid]] = label
    return out


def map_coordinator_to_team(game: VEFG, cg: ConvertedGame, pi_t
                            ) -> dict[TeamInfosetRef, str]:
    """sigma: map a coordinator pure strategy to a joint team pure plan.

    ``pi_t`` maps coordinator infoset key -> prescription edge label.  The
    team plays, at each infoset, the action the traversed prescriptions
    assign to it; infosets never prescribed get the first declared action.
    """
    keys = coordinator_node_keys(cg)
    plan: dict[TeamInfosetRef, str] = {}
    g = cg.game
    stack = [g.root]
    while stack:
        nid = stack.pop()
        node = g.nodes[nid]
        if node.player == COORDINATOR:
            label = pi_t.get(keys[nid])
            if label is None:
                raise IllegalPrescription(
                    f"coordinator strategy undefined at infoset {keys[nid]!r}")
            k = next((i for i, e in enumerate(node.edges) if e.label == label),
                     None)
            if k is None:
                raise IllegalPrescription(
                    f"prescription {label!r} not available at node {nid}")
            for iid, a in cg.prescriptions[nid][k]:
                ref = cg.iset_refs[iid]
                prev = plan.get(ref)
                if prev is not None and prev != a:
                    raise IllegalPrescription(
                        f"conflicting actions {prev!r}/{a!r} prescribed at "
                        f"team infoset {ref}")
                plan[ref] = a
            stack.append(node.edges[k].child)
        else:
            for e in node.edges:
                stack.append(e.child)
    for iid, ref in enumerate(cg.iset_refs):
        plan.setdefault(ref, cg.iset_actions[iid][0])
    return plan


def exact_expected_value(game: VEFG, choice) -> Fraction:
    """Expected team utility under a pure choice function, exact arithmetic.

    ``choice(nid)`` returns the selected edge index at non-chance decision
    nodes; chance is enumerated.
    """
    total = Fraction(0)
    stack: list[tuple[int, Fraction]] = [(game.root, Fraction(1))]
    while stack:
        nid, w = stack.pop()
        node = game.nodes[nid]
        if node.is_terminal:
            total += w * Fraction(node.utility)
        elif node.is_chance:
            for e in node.edges:
                p = Fraction(e.prob)
                if p:
                    stack.append((e.child, w * p))
        else:
            stack.append((node.edges[choice(nid)].child, w))
    return total


def _random_profile(g: VEFG, cg: ConvertedGame, rng: random.Random):
    joint_plan = {}
    for iid, ref in enumerate(cg.iset_refs):
        joint_plan[ref] = rng.choice(cg.iset_actions[iid])
    opp_plan: dict[InfosetKey, str] = {}
    opp = g.opponent()
    if opp is not None:
        for key, members in sorted(infosets(g, opp).items()):
            labels = tuple(e.label for e in g.nodes[members[0]].edges)
            opp_plan[key] = rng.choice(labels)
    return joint_plan, opp_plan


def check_payoff_equivalence(game: VEFG, cg: ConvertedGame, samples: int,
                             seed: int = 0) -> dict:
    """Sample pure profiles, map the team plan through rho, and compare exact
    expected utilities in the original and converted games."""
    g = _prepare(game)
    rng = random.Random(seed)
    # per-node infoset references in the original (refined) game
    team_seq = {p: seen_sequences(g, p) for p in g.team_players()}
    opp = g.opponent()
    opp_seq_orig = seen_sequences(g, opp) if opp is not None else None
    opp_seq_conv = (seen_sequences(cg.game, OPPONENT)
                    if opp is not None else None)
    report = {"samples": samples, "max_abs_diff": 0.0}
    for _ in range(samples):
        joint_plan, opp_plan = _random_profile(g, cg, rng)

        def choice_orig(nid: int) -> int:
            node = g.nodes[nid]
            if node.player.kind == "team":
                a = joint_plan[(node.player, team_seq[node.player][nid])]
            else:
                a = opp_plan[opp_seq_orig[nid]]
            return next(i for i, e in enumerate(node.edges) if e.label == a)

        coord = coordinator_choices(cg, joint_plan)

        def choice_conv(nid: int) -> int:
            node = cg.game.nodes[nid]
            if node.player == COORDINATOR:
                return coord[nid]
            a = opp_plan[opp_seq_conv[nid]]
            return next(i for i, e in enumerate(node.edges) if e.label == a)

        diff = abs(exact_expected_value(g, choice_orig)
                   - exact_expected_value(cg.game, choice_conv))
        report["max_abs_diff"] = max(report["max_abs_diff"], float(diff))
    return report
