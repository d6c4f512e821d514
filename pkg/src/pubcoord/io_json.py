"""JSON serialization of games and converted games.

Schema (games)::

    {"name": ..., "players": ["t0", "t1", "o"], "root": 0,
     "nodes": [{"id": 0, "kind": "chance"|"decision"|"terminal",
                "player": "t0",            # decision nodes only
                "team_utility": 1.5,       # terminal nodes only
                "edges": [{"label": "a", "child": 3, "prob": "1/3",
                           "vis": {"t0": "seen", "t1": "unseen", "o": "seen"}}]}]}

Probabilities and utilities are JSON numbers or exact-rational strings
``"num/den"``.  Every edge carries a visibility entry for every strategic
player.  Round trips are structurally exact: parse(serialize(g)) == g.

Converted games use the same schema plus an ``origin`` section recording the
conversion mode, the source game's name/digest, per-node origin bookkeeping
and per-edge prescriptions as arrays of {"infoset", "action"}.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .convert import ConvertedGame
from .errors import DuplicateNodeId, MissingVisibilityEntry, UnknownPlayer
from .model import (
    CHANCE,
    Edge,
    Node,
    PlayerRole,
    VEFG,
    parse_role,
    validate_game,
)


def _num_to_json(x) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def _num_from_json(x) -> Any:
    if isinstance(x, str):
        num, _, den = x.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    return x


def game_to_dict(game: VEFG) -> dict:
    players = [p.name for p in game.players]
    nodes = []
    for nid, node in enumerate(game.nodes):
        entry: dict[str, Any] = {"id": nid}
        if node.is_terminal:
            entry["kind"] = "terminal"
            entry["team_utility"] = _num_to_json(node.utility)
        else:
            if node.is_chance:
                entry["kind"] = "chance"
            else:
                entry["kind"] = "decision"
                entry["player"] = node.player.name
            edges = []
            for e in node.edges:
                ed: dict[str, Any] = {"label": e.label, "child": e.child}
                if e.prob is not None:
                    ed["prob"] = _num_to_json(e.prob)
                ed["vis"] = {p.name: ("seen" if p in e.seen_by else "unseen")
                             for p in game.players}
                edges.append(ed)
            entry["edges"] = edges
        nodes.append(entry)
    return {"name": game.name, "players": players, "root": game.root,
            "nodes": nodes}


def game_from_dict(d: dict) -> VEFG:
    players = tuple(parse_role(name) for name in d["players"])
    id_map: dict[Any, int] = {}
    for i, entry in enumerate(d["nodes"]):
        if entry["id"] in id_map:
            raise DuplicateNodeId(f"node id {entry['id']!r} repeated")
        id_map[entry["id"]] = i
    nodes = []
    for entry in d["nodes"]:
        kind = entry["kind"]
        if kind == "terminal":
            nodes.append(Node(utility=_num_from_json(entry["team_utility"])))
            continue
        if kind == "chance":
            player = CHANCE
        elif kind == "decision":
            player = parse_role(entry["player"])
        else:
            raise UnknownPlayer(f"unknown node kind {kind!r}")
        edges = []
        for ed in entry["edges"]:
            vis = ed.get("vis", {})
            seen = set()
            for p in players:
                if p.name not in vis:
                    raise MissingVisibilityEntry(
                        f"edge {ed['label']!r} of node {entry['id']} lacks a "
                        f"visibility entry for player {p.name}")
                if vis[p.name] == "seen":
                    seen.add(p)
            edges.append(Edge(ed["label"], id_map[ed["child"]],
                              _num_from_json(ed.get("prob")),
                              frozenset(seen)))
        nodes.append(Node(player=player, edges=tuple(edges)))
    game = VEFG(name=d["name"], players=players, nodes=tuple(nodes),
                root=id_map[d["root"]])
    validate_game(game)
    return game


def _key_to_json(key) -> Any:
    # nested tuples of strings/ints -> nested lists
    if isinstance(key, tuple):
        return [_key_to_json(k) for k in key]
    return key


def _key_from_json(key) -> Any:
    if isinstance(key, list):
        return tuple(_key_from_json(k) for k in key)
    return key


def converted_to_dict(cg: ConvertedGame) -> dict:
    d = game_to_dict(cg.game)
    origin: dict[str, Any] = {
        "mode": cg.mode,
        "safe_ir": cg.safe_ir_applied,
        "source_name": cg.source_name,
        "source_digest": cg.source_digest,
        "node_kind": list(cg.node_kind),
        "origin_player": [p.name if p is not None else None
                          for p in cg.origin_player],
        "origin_node": list(cg.origin_node),
        "active": [list(a) if a is not None else None for a in cg.active],
        "excluded": [sorted(x) if x is not None else None
                     for x in cg.excluded],
        "beliefs": [[[nid, _num_to_json(w)] for nid, w in bel]
                    if bel is not None else None
                    for bel in cg.beliefs],
        "prescriptions": [
            [[{"infoset": iid, "action": a} for iid, a in assignment]
             for assignment in presc] if presc is not None else None
            for presc in cg.prescriptions],
        "iset_refs": [{"player": p.name, "obs": list(key)}
                      for p, key in cg.iset_refs],
        "iset_actions": [list(a) for a in cg.iset_actions],
        "supports": [list(s) if s is not None else None
                     for s in cg.supports],
    }
    if cg.coordinator_keys is not None:
        origin["coordinator_keys"] = [_key_to_json(k) if k is not None
                                      else None
                                      for k in cg.coordinator_keys]
    d["origin"] = origin
    return d


def converted_from_dict(d: dict) -> ConvertedGame:
    game = game_from_dict(d)
    o = d["origin"]
    coordinator_keys: Optional[tuple] = None
    if "coordinator_keys" in o:
        coordinator_keys = tuple(_key_from_json(k) if k is not None else None
                                 for k in o["coordinator_keys"])
    return ConvertedGame(
        game=game,
        mode=o["mode"],
        safe_ir_applied=o["safe_ir"],
        source_name=o["source_name"],
        source_digest=o["source_digest"],
        node_kind=tuple(o["node_kind"]),
        origin_player=tuple(parse_role(p) if p is not None else None
                            for p in o["origin_player"]),
        origin_node=tuple(o["origin_node"]),
        active=tuple(tuple(a) if a is not None else None
                     for a in o["active"]),
        excluded=tuple(frozenset(x) if x is not None else None
                       for x in o["excluded"]),
        beliefs=tuple(tuple((nid, _num_from_json(w)) for nid, w in bel)
                      if bel is not None else None
                      for bel in o["beliefs"]),
        prescriptions=tuple(
            tuple(tuple((p["infoset"], p["action"]) for p in assignment)
                  for assignment in presc) if presc is not None else None
            for presc in o["prescriptions"]),
        iset_refs=tuple((parse_role(r["player"]), tuple(r["obs"]))
                        for r in o["iset_refs"]),
        iset_actions=tuple(tuple(a) for a in o["iset_actions"]),
        supports=tuple(tuple(s) if s is not None else None
                       for s in o.get("supports", [None] * len(game.nodes))),
        coordinator_keys=coordinator_keys,
    )


def save_game(game: VEFG, path: str) -> None:
    with open(path, "w") as f:
        json.dump(game_to_dict(game), f)


def load_game(path: str) -> VEFG:
    with open(path) as f:
        return game_from_dict(json.load(f))


def save_converted(cg: ConvertedGame, path: str) -> None:
    with open(path, "w") as f:
        json.dump(converted_to_dict(cg), f)


def load_converted(path: str) -> ConvertedGame:
    with open(path) as f:
        return converted_from_dict(json.load(f))


def is_converted_file(path: str) -> bool:
    with open(path) as f:
        d = json.load(f)
    return "origin" in d
