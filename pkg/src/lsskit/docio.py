"""JSON documents for spaces, witnesses and certificates.

Documents are JSON objects written one field per line.  Points are always
referred to by label; ``"inf"`` is the only non-numeric distance; tolerances are
``"p/q"`` strings.  Parse errors carry ``line:col`` for syntax problems and a
``$.field[index]`` path for content problems.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from lsskit.errors import DocumentError
from lsskit.family import GroundSet, Scale, SetFamily
from lsskit.lss import INF, InfMetric, LssSpace, build_lss, metric_lss
from lsskit.rational import format_rational, parse_rational

SPACE_FORMAT = "lsskit-space/1"
WITNESS_FORMAT = "lsskit-witness/1"
CERT_FORMAT = "lsskit-certificate/1"


def loads(text: str, source: str = "<document>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(str(exc.strerror or exc), str(p)) from None
    return loads(text, str(p))


def _need(cond: bool, msg: str, where: str) -> None:
    if not cond:
        raise DocumentError(msg, where)


def _list(obj: Any, where: str) -> list:
    _need(isinstance(obj, list), "expected an array", where)
    return obj


def _labels_mask(ground: GroundSet, items: Any, where: str) -> int:
    m = 0
    for j, lab in enumerate(_list(items, where)):
        _need(isinstance(lab, str) and ground.has_label(lab), f"unknown label {lab!r}", f"{where}[{j}]")
        m |= 1 << ground.id_of(lab)
    return m


def parse_family(ground: GroundSet, obj: Any, where: str, scale: bool = True) -> SetFamily:
    masks = tuple(_labels_mask(ground, el, f"{where}[{i}]") for i, el in enumerate(_list(obj, where)))
    fam = SetFamily(ground, masks)
    if scale:
        try:
            return fam.as_scale()
        except ValueError as exc:
            raise DocumentError(str(exc), where) from None
    return fam


def family_labels(fam: SetFamily) -> list[list[str]]:
    return fam.as_labels()


# ------------------------------------------------------------------ spaces


@dataclass(frozen=True)
class SpaceDocument:
    ground: tuple[str, ...]
    metric: tuple[tuple[Any, ...], ...] | None = None
    generators: tuple[tuple[tuple[str, ...], ...], ...] | None = None
    scales: dict[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)
    maps: dict[str, dict[str, str]] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"format": SPACE_FORMAT, "ground": list(self.ground)}
        if self.metric is not None:
            out["metric"] = [["inf" if v == INF else int(v) for v in row] for row in self.metric]
        if self.generators is not None:
            out["generators"] = [[list(el) for el in g] for g in self.generators]
        if self.scales:
            out["scales"] = {k: [list(el) for el in v] for k, v in sorted(self.scales.items())}
        if self.maps:
            out["maps"] = {k: dict(v) for k, v in sorted(self.maps.items())}
        return out

    def ground_set(self) -> GroundSet:
        return GroundSet(self.ground)

    def build(self) -> "LoadedSpace":
        ground = self.ground_set()
        if self.metric is not None:
            metric = InfMetric(ground, self.metric)
            space = metric_lss(metric)
        else:
            metric = None
            gens = [SetFamily.from_labels(ground, g).as_scale() for g in self.generators or ()]
            space = build_lss(ground, gens)
        scales = {k: SetFamily.from_labels(ground, v) for k, v in self.scales.items()}
        return LoadedSpace(self, space, metric, scales)


@dataclass(frozen=True)
class LoadedSpace:
    doc: SpaceDocument
    space: LssSpace
    metric: InfMetric | None
    families: dict[str, SetFamily]

    def scale(self, name: str) -> Scale:
        """A named scale, ``Maximal`` for the blocks, ``Singletons``, or ``Balls<r>`` from the metric."""
        if name in self.families:
            fam = self.families[name]
            try:
                return fam.as_scale()
            except ValueError as exc:
                raise DocumentError(str(exc), f"$.scales.{name}") from None
        if name == "Maximal":
            return self.space.maximal_bounded
        if name == "Singletons":
            return Scale.singletons(self.space.ground)
        if name.startswith("Balls") and name[5:].isdigit() and self.metric is not None:
            return self.metric.ball_cover(int(name[5:]))
        known = sorted(self.families) + ["Maximal", "Singletons"] + (["Balls<r>"] if self.metric else [])
        raise DocumentError(f"unknown scale {name!r}; known: {', '.join(known)}", "$.scales")


def parse_space_obj(obj: Any, source: str = "$") -> SpaceDocument:
    _need(isinstance(obj, dict), "a space document is a JSON object", source)
    fmt = obj.get("format", SPACE_FORMAT)
    _need(fmt == SPACE_FORMAT, f"unsupported format {fmt!r}", f"{source}.format")
    unknown = set(obj) - {"format", "ground", "metric", "generators", "scales", "maps"}
    _need(not unknown, f"unknown field(s) {sorted(unknown)}", source)
    labels = _list(obj.get("ground"), f"{source}.ground")
    for i, lab in enumerate(labels):
        _need(isinstance(lab, str) and lab != "", "labels are nonempty strings", f"{source}.ground[{i}]")
    try:
        ground = GroundSet(tuple(labels))
    except ValueError as exc:
        raise DocumentError(str(exc), f"{source}.ground") from None
    has_metric, has_gens = "metric" in obj, "generators" in obj
    _need(has_metric != has_gens, "give exactly one of 'metric' or 'generators'", source)
    metric = gens = None
    if has_metric:
        rows = _list(obj["metric"], f"{source}.metric")
        _need(len(rows) == ground.size, f"expected {ground.size} rows", f"{source}.metric")
        parsed = []
        for i, row in enumerate(rows):
            _list(row, f"{source}.metric[{i}]")
            _need(len(row) == ground.size, f"expected {ground.size} entries", f"{source}.metric[{i}]")
            vals = []
            for j, v in enumerate(row):
                where = f"{source}.metric[{i}][{j}]"
                if v == "inf":
                    vals.append(INF)
                else:
                    _need(isinstance(v, int) and not isinstance(v, bool) and v >= 0,
                          "distances are natural numbers or \"inf\"", where)
                    vals.append(v)
            parsed.append(tuple(vals))
        metric = tuple(parsed)
        try:
            InfMetric(ground, metric)
        except ValueError as exc:
            raise DocumentError(str(exc), f"{source}.metric") from None
    else:
        gl = []
        for k, g in enumerate(_list(obj["generators"], f"{source}.generators")):
            fam = parse_family(ground, g, f"{source}.generators[{k}]")
            gl.append(tuple(tuple(el) for el in fam.as_labels()))
        gens = tuple(gl)
    scales = {}
    raw_scales = obj.get("scales", {})
    _need(isinstance(raw_scales, dict), "expected an object", f"{source}.scales")
    for name, fam in raw_scales.items():
        f = parse_family(ground, fam, f"{source}.scales.{name}", scale=False)
        scales[name] = tuple(tuple(el) for el in f.as_labels())
    maps = {}
    raw_maps = obj.get("maps", {})
    _need(isinstance(raw_maps, dict), "expected an object", f"{source}.maps")
    for name, table in raw_maps.items():
        where = f"{source}.maps.{name}"
        _need(isinstance(table, dict), "a map is an object from source label to target label", where)
        for k, v in table.items():
            _need(ground.has_label(k), f"unknown source label {k!r}", where)
            _need(isinstance(v, str), f"image of {k!r} must be a label", where)
        maps[name] = dict(table)
    return SpaceDocument(tuple(labels), metric, gens, scales, maps)


def parse_space_text(text: str, source: str = "<space>") -> SpaceDocument:
    return parse_space_obj(loads(text, source))


def parse_space(path: str | Path) -> SpaceDocument:
    return parse_space_obj(read(path), "$")


def emit_space(doc: SpaceDocument) -> str:
    return dumps(doc.to_json())


def space_document(space: LssSpace, metric: InfMetric | None = None, scales: dict[str, SetFamily] | None = None) -> SpaceDocument:
    """A document describing ``space`` (by metric when given, else by its blocks)."""
    labels = space.ground.labels
    named = {k: tuple(tuple(el) for el in v.as_labels()) for k, v in (scales or {}).items()}
    if metric is not None:
        return SpaceDocument(labels, metric.dist, None, named)
    gens = (tuple(tuple(el) for el in space.maximal_bounded.as_labels()),)
    return SpaceDocument(labels, None, gens, named)


# ------------------------------------------------------------------ witnesses


def _pairs_to_json(ground: GroundSet, sets) -> dict:
    return {ground.labels[x]: [[ground.labels[z], l] for z, l in sorted(a)] for x, a in enumerate(sets)}


def witness_to_json(w) -> dict:
    """Plain, scaled and Sako witnesses, in label form."""
    from lsskit.coarse import SakoWitness
    from lsskit.propa import PropertyAWitness
    from lsskit.propa_scaled import ScaledPropertyAWitness

    if isinstance(w, PropertyAWitness):
        g = w.ground
        return {
            "format": WITNESS_FORMAT, "kind": "property-a",
            "epsilon": format_rational(w.epsilon),
            "test": w.test.as_labels(), "support": w.support.as_labels(),
            "sets": _pairs_to_json(g, w.sets),
        }
    if isinstance(w, ScaledPropertyAWitness):
        return {
            "format": WITNESS_FORMAT, "kind": "scaled-property-a",
            "epsilon": format_rational(w.epsilon),
            "base": w.base.as_labels(), "queried": w.queried.as_labels(), "horizon": w.horizon.as_labels(),
            "sets": [[[j, l] for j, l in sorted(a)] for a in w.sets],
        }
    if isinstance(w, SakoWitness):
        lab = w.ground.labels
        return {
            "format": WITNESS_FORMAT, "kind": "sako",
            "epsilon": format_rational(w.epsilon),
            "T": [[lab[x], lab[y]] for x, y in sorted(w.T.pairs)],
            "S": [[lab[x], lab[y]] for x, y in sorted(w.S.pairs)],
            "A": [[lab[x], lab[y], l] for x, y, l in sorted(w.A)],
        }
    raise TypeError(f"not a witness: {type(w).__name__}")


def _eps(obj: dict, where: str) -> Fraction:
    try:
        return parse_rational(obj.get("epsilon"))
    except (ValueError, TypeError) as exc:
        raise DocumentError(str(exc), f"{where}.epsilon") from None


def _level(v: Any, where: str) -> int:
    _need(isinstance(v, int) and not isinstance(v, bool), "levels are integers", where)
    return v


def _label_id(ground: GroundSet, v: Any, where: str) -> int:
    _need(isinstance(v, str) and ground.has_label(v), f"unknown label {v!r}", where)
    return ground.id_of(v)


def witness_from_json(obj: Any, ground: GroundSet, where: str = "$"):
    from lsskit.coarse import Entourage, SakoWitness
    from lsskit.propa import PropertyAWitness
    from lsskit.propa_scaled import ScaledPropertyAWitness

    _need(isinstance(obj, dict), "a witness document is a JSON object", where)
    _need(obj.get("format", WITNESS_FORMAT) == WITNESS_FORMAT, "unsupported format", f"{where}.format")
    kind = obj.get("kind")
    eps = _eps(obj, where)
    try:
        if kind == "property-a":
            test = parse_family(ground, obj.get("test"), f"{where}.test")
            support = parse_family(ground, obj.get("support"), f"{where}.support")
            raw = obj.get("sets")
            _need(isinstance(raw, dict), "expected an object keyed by label", f"{where}.sets")
            sets = [frozenset()] * ground.size
            for lab, items in raw.items():
                x = _label_id(ground, lab, f"{where}.sets")
                s = set()
                for j, it in enumerate(_list(items, f"{where}.sets.{lab}")):
                    w = f"{where}.sets.{lab}[{j}]"
                    _need(isinstance(it, list) and len(it) == 2, "expected [label, level]", w)
                    s.add((_label_id(ground, it[0], w), _level(it[1], w)))
                sets[x] = frozenset(s)
            return PropertyAWitness(eps, test, support, tuple(sets))
        if kind == "scaled-property-a":
            base = parse_family(ground, obj.get("base"), f"{where}.base")
            queried = parse_family(ground, obj.get("queried"), f"{where}.queried")
            horizon = parse_family(ground, obj.get("horizon"), f"{where}.horizon")
            sets = []
            for i, items in enumerate(_list(obj.get("sets"), f"{where}.sets")):
                s = set()
                for j, it in enumerate(_list(items, f"{where}.sets[{i}]")):
                    w = f"{where}.sets[{i}][{j}]"
                    _need(isinstance(it, list) and len(it) == 2, "expected [index, level]", w)
                    s.add((_level(it[0], w), _level(it[1], w)))
                sets.append(frozenset(s))
            return ScaledPropertyAWitness(base, eps, queried, horizon, tuple(sets))
        if kind == "sako":
            def rel(name):
                pairs = []
                for j, it in enumerate(_list(obj.get(name), f"{where}.{name}")):
                    w = f"{where}.{name}[{j}]"
                    _need(isinstance(it, list) and len(it) == 2, "expected [label, label]", w)
                    pairs.append((_label_id(ground, it[0], w), _label_id(ground, it[1], w)))
                return Entourage.from_pairs(ground, pairs)

            triples = []
            for j, it in enumerate(_list(obj.get("A"), f"{where}.A")):
                w = f"{where}.A[{j}]"
                _need(isinstance(it, list) and len(it) == 3, "expected [label, label, level]", w)
                triples.append((_label_id(ground, it[0], w), _label_id(ground, it[1], w), _level(it[2], w)))
            return SakoWitness(eps, rel("T"), rel("S"), frozenset(triples))
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc), where) from None
    raise DocumentError(f"unknown witness kind {kind!r}", f"{where}.kind")


def parse_witness(path: str | Path, ground: GroundSet):
    return witness_from_json(read(path), ground)


def emit_witness(w) -> str:
    return dumps(witness_to_json(w))
