"""JSON documents for posets, poset maps, presentations, tables and refinement steps.

Documents are written one list item per line so golden files diff cleanly.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import DihomError, ParseError
from .flow import Generator, PresentedFlow, TableFlow
from .poset import Poset, PosetMap, chain, cube, mk_poset
from .rewrite import BallOccurrence, RefinementStep

__all__ = [
    "dumps",
    "parse",
    "to_doc",
    "poset_from_doc",
    "poset_map_from_doc",
    "presentation_from_doc",
    "table_from_doc",
    "step_from_doc",
    "value_from_doc",
    "load",
    "Workspace",
]


def _line(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def dumps(doc: dict, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    keys = list(doc)
    lines = ["{"]
    for n, key in enumerate(keys):
        comma = "," if n < len(keys) - 1 else ""
        value = doc[key]
        if isinstance(value, dict) and value and all(isinstance(v, list) for v in value.values()):
            lines.append(f"{pad}{_line(key)}: {dumps(value, indent + 1)}{comma}")
        elif isinstance(value, list) and value and any(isinstance(v, (list, dict)) for v in value):
            lines.append(f"{pad}{_line(key)}: [")
            for m, item in enumerate(value):
                lines.append(f"{pad}  {_line(item)}" + ("," if m < len(value) - 1 else ""))
            lines.append(f"{pad}]{comma}")
        else:
            lines.append(f"{pad}{_line(key)}: {_line(value)}{comma}")
    lines.append("  " * indent + "}")
    return "\n".join(lines) + ("\n" if indent == 0 else "")


def parse(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object", 1, 1)
    return doc


# -- to documents --------------------------------------------------------------


def to_doc(value) -> dict:
    if isinstance(value, Poset):
        return {"elements": list(value.linear), "relations": [list(c) for c in _sorted_covers(value)]}
    if isinstance(value, PosetMap):
        return {
            "source": to_doc(value.source),
            "target": to_doc(value.target),
            "map": [[x, value(x)] for x in value.source.linear],
        }
    if isinstance(value, PresentedFlow):
        return {
            "states": list(value.states),
            "generators": [{"id": g.id, "src": g.src, "tgt": g.tgt} for g in value.generators],
            "relations": [[list(l), list(r)] for l, r in value.relations],
        }
    if isinstance(value, TableFlow):
        return {
            "states": list(value.states),
            "classes": [{"id": c, "src": s, "tgt": t} for c, (s, t) in value.classes.items()],
            "compose": [[x, y, z] for (x, y), z in value.compose.items()],
        }
    if isinstance(value, RefinementStep):
        occ = value.occurrence
        p = occ.ball_poset
        return {
            "state_embed": {x: occ.state_embed[x] for x in p.linear},
            "cover_embed": [[a, b, occ.cover_embed[(a, b)]] for a, b in _sorted_covers(p)],
            "t_map": to_doc(value.t_map),
        }
    raise TypeError(f"no document form for {type(value).__name__}")


def _sorted_covers(p: Poset):
    rank = {e: i for i, e in enumerate(p.linear)}
    return sorted(p.covers, key=lambda c: (rank[c[0]], rank[c[1]]))


# -- from documents ------------------------------------------------------------


def _field(doc, key, kind, where):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} must be a {kind.__name__}")
    return value


def _strings(items, where):
    out = []
    for i, s in enumerate(items):
        if not isinstance(s, (str, int)) or isinstance(s, bool):
            raise ParseError(f"{where}[{i}] must be a string")
        out.append(str(s))
    return out


def _pair(item, where, size=2):
    if not isinstance(item, list) or len(item) != size:
        raise ParseError(f"{where} must be a list of {size} items")
    return item


def poset_from_doc(doc, where="poset") -> Poset:
    """A poset document, or a shorthand ``{"cube": n}`` / ``{"chain": k}``."""
    if isinstance(doc, dict) and "cube" in doc:
        return cube(int(doc["cube"]))
    if isinstance(doc, dict) and "chain" in doc:
        return chain(int(doc["chain"]))
    if not isinstance(doc, dict):
        raise ParseError(f"{where} must be an object")
    elements = _strings(_field(doc, "elements", list, where), f"{where}.elements")
    rels = [
        _strings(_pair(r, f"{where}.relations[{i}]"), f"{where}.relations[{i}]")
        for i, r in enumerate(doc.get("relations", []))
    ]
    try:
        return mk_poset(elements, rels)
    except DihomError:
        raise
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None


def poset_map_from_doc(doc, where="map") -> PosetMap:
    source = poset_from_doc(_field(doc, "source", dict, where), f"{where}.source")
    target = poset_from_doc(_field(doc, "target", dict, where), f"{where}.target")
    pairs = [
        _strings(_pair(p, f"{where}.map[{i}]"), f"{where}.map[{i}]")
        for i, p in enumerate(_field(doc, "map", list, where))
    ]
    mapping = dict(pairs)
    if len(mapping) != len(pairs):
        raise ParseError(f"{where}.map sends an element twice")
    try:
        return PosetMap(source, target, mapping)
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None


def presentation_from_doc(doc, where="flow") -> PresentedFlow:
    states = _strings(_field(doc, "states", list, where), f"{where}.states")
    gens = []
    for i, g in enumerate(_field(doc, "generators", list, where)):
        w = f"{where}.generators[{i}]"
        if not isinstance(g, dict):
            raise ParseError(f"{w} must be an object")
        gens.append(Generator(*_strings([_field(g, k, (str, int), w) for k in ("id", "src", "tgt")], w)))
    rels = []
    for i, r in enumerate(doc.get("relations", [])):
        w = f"{where}.relations[{i}]"
        l, rr = _pair(r, w)
        if not isinstance(l, list) or not isinstance(rr, list):
            raise ParseError(f"{w} must pair two lists of generator ids")
        rels.append((tuple(_strings(l, w)), tuple(_strings(rr, w))))
    try:
        return PresentedFlow(states, gens, rels)
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None


def table_from_doc(doc, where="flow") -> TableFlow:
    states = _strings(_field(doc, "states", list, where), f"{where}.states")
    classes = {}
    for i, c in enumerate(_field(doc, "classes", list, where)):
        w = f"{where}.classes[{i}]"
        if not isinstance(c, dict):
            raise ParseError(f"{w} must be an object")
        cid, s, t = _strings([_field(c, k, (str, int), w) for k in ("id", "src", "tgt")], w)
        if cid in classes:
            raise ParseError(f"{w}: duplicate class id {cid!r}")
        classes[cid] = (s, t)
    compose = {}
    for i, triple in enumerate(doc.get("compose", [])):
        x, y, z = _strings(_pair(triple, f"{where}.compose[{i}]", 3), f"{where}.compose[{i}]")
        compose[(x, y)] = z
    try:
        return TableFlow(states, classes, compose)
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None


def step_from_doc(doc, host: PresentedFlow, where="step") -> RefinementStep:
    t_map = poset_map_from_doc(_field(doc, "t_map", dict, where), f"{where}.t_map")
    embed = _field(doc, "state_embed", (dict, list), where)
    if isinstance(embed, list):
        embed = dict(_pair(p, f"{where}.state_embed[{i}]") for i, p in enumerate(embed))
    covers = {}
    for i, item in enumerate(_field(doc, "cover_embed", list, where)):
        a, b, g = _strings(_pair(item, f"{where}.cover_embed[{i}]", 3), f"{where}.cover_embed[{i}]")
        covers[(a, b)] = g
    occ = BallOccurrence(host, t_map.source, embed, covers)
    return RefinementStep(occ, t_map)


def value_from_doc(doc: dict):
    """Dispatch on the fields present.  Refinement steps need a host and are not handled here."""
    if "generators" in doc:
        return presentation_from_doc(doc)
    if "classes" in doc:
        return table_from_doc(doc)
    if "map" in doc:
        return poset_map_from_doc(doc)
    if "elements" in doc or "cube" in doc or "chain" in doc:
        return poset_from_doc(doc)
    raise ParseError("unrecognised document: expected generators, classes, map or elements", 1, 1)


def load(path) -> object:
    return value_from_doc(parse(Path(path).read_text(encoding="utf-8")))


class Workspace:
    """Named values loaded from documents."""

    def __init__(self):
        self.bindings = {}

    def add(self, name, value):
        if name in self.bindings:
            raise KeyError(f"{name!r} is already bound")
        self.bindings[name] = value
        return value

    def load(self, name, path):
        return self.add(name, load(path))

    def __getitem__(self, name):
        return self.bindings[name]

    def __contains__(self, name):
        return name in self.bindings

    def dump(self, name) -> str:
        return dumps(to_doc(self.bindings[name]))
