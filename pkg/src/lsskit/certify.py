"""Self-contained certificates: every computation is a pure function of its inputs.

A certificate records the kind of computation, its inputs (space documents are
embedded, not referenced by path), the oracle limits in force, the verdict and
the result.  ``recheck`` recomputes the result from the recorded inputs and
compares it field by field.
"""
from __future__ import annotations

import json
from typing import Any, Callable

from lsskit import __version__
from lsskit.docio import (
    CERT_FORMAT,
    LoadedSpace,
    parse_family,
    parse_space_obj,
    witness_from_json,
    witness_to_json,
)
from lsskit.errors import DocumentError, PreconditionError
from lsskit.family import Scale, Subset, star
from lsskit.limits import OracleLimits
from lsskit.rational import format_rational, positive

TRUE, FALSE, EXHAUSTED = "true", "false", "exhausted"

Evaluator = Callable[[dict, OracleLimits], tuple[str, dict]]
_REGISTRY: dict[str, Evaluator] = {}


def evaluator(kind: str):
    def wrap(fn: Evaluator) -> Evaluator:
        _REGISTRY[kind] = fn
        return fn
    return wrap


def kinds() -> list[str]:
    return sorted(_REGISTRY)


def _load(inputs: dict, key: str = "space") -> LoadedSpace:
    if key not in inputs:
        raise DocumentError(f"missing input {key!r}", "$.inputs")
    return parse_space_obj(inputs[key], f"$.inputs.{key}").build()


def _scale(ls: LoadedSpace, spec: Any, what: str) -> Scale:
    """A scale given by name or inline as an array of label arrays."""
    if isinstance(spec, str):
        return ls.scale(spec)
    return parse_family(ls.space.ground, spec, f"$.inputs.{what}")


def _labels(ls: LoadedSpace, mask: int) -> list[str]:
    return ls.space.ground.labels_of(mask)


def _map(src: LoadedSpace, tgt: LoadedSpace, table: Any):
    from lsskit.maps import SpaceMap

    if not isinstance(table, dict):
        raise DocumentError("a map is an object from source label to target label", "$.inputs.map")
    for k, v in table.items():
        if not tgt.space.ground.has_label(v):
            raise DocumentError(f"image {v!r} of {k!r} is not a target label", "$.inputs.map")
    try:
        return SpaceMap.from_labels(src.space, tgt.space, table)
    except (KeyError, ValueError) as exc:
        raise DocumentError(str(exc), "$.inputs.map") from None


def _violations(ls: LoadedSpace, viols, point_labels: bool = True) -> list[dict]:
    lab = ls.space.ground.labels
    out = []
    for v in viols:
        d = {"kind": v.kind}
        for key in ("x", "y"):
            val = getattr(v, key)
            if val is not None and val >= 0:
                d[key] = lab[val] if point_labels else val
        if v.kind == "ratio":
            d["delta"], d["intersection"] = v.delta, v.inter
        pair = getattr(v, "pair", None)
        if pair is not None:
            d["pair"] = [lab[pair[0]] if point_labels and 0 <= pair[0] < len(lab) else pair[0], pair[1]]
        out.append(d)
    return out


# ------------------------------------------------------------------ evaluators


@evaluator("space-validate")
def _space_validate(inputs: dict, limits: OracleLimits):
    from lsskit.propa import has_bounded_geometry

    ls = _load(inputs)
    return TRUE, {
        "points": ls.space.size,
        "maximal_bounded": ls.space.maximal_bounded.as_labels(),
        "bounded_geometry": has_bounded_geometry(ls.space).witness,
        "scales": sorted(ls.families),
    }


@evaluator("star")
def _star(inputs: dict, limits: OracleLimits):
    ls = _load(inputs)
    fam = _scale(ls, inputs["scale"], "scale")
    target = Subset(ls.space.ground, ls.space.ground.mask_of_labels(inputs["target"]))
    return TRUE, {"star": star(target, fam).labels()}


@evaluator("net")
def _net(inputs: dict, limits: OracleLimits):
    from lsskit.nets import enumerate_nets, greedy_net

    ls = _load(inputs)
    fam = _scale(ls, inputs["scale"], "scale")
    g = ls.space.ground
    within = Subset(g, g.full if inputs.get("within") is None else g.mask_of_labels(inputs["within"]))
    if inputs.get("all"):
        nets = enumerate_nets(within, fam, limits)
        return TRUE, {"count": len(nets), "nets": [n.members.labels() for n in nets]}
    return TRUE, {"net": greedy_net(within, fam).members.labels()}


@evaluator("bsm")
def _bsm(inputs: dict, limits: OracleLimits):
    from lsskit.nets import COVERING, check_bsm

    ls = _load(inputs)
    base = _scale(ls, inputs["base"], "base")
    cert = check_bsm(ls.space, base, inputs["mode"], limits)
    if cert.mode == COVERING:
        wit = [list(w) for w in cert.witnesses]
    else:
        wit = [[ls.space.ground.labels[i] for i in w] for w in cert.witnesses]
    return TRUE, {
        "mode": cert.mode,
        "bound": cert.bound,
        "queried": cert.queried.as_labels(),
        "constants": list(cert.constants),
        "witnesses": wit,
    }


def _report_json(src: LoadedSpace, tgt: LoadedSpace, report) -> dict:
    def block(ls, v):
        return None if v.ok else _labels(ls, v.witness)

    out = {
        "bornologous": report.bornologous.ok,
        "bornologous_counterexample": block(src, report.bornologous),
        "coarse_embedding": report.coarse_embedding.ok,
        "coarse_embedding_counterexample": block(tgt, report.coarse_embedding),
        "coarsely_surjective": report.coarsely_surjective.ok,
        "coarsely_surjective_witness": (
            report.coarsely_surjective.witness.as_labels() if report.coarsely_surjective.ok
            else _labels(tgt, report.coarsely_surjective.witness)
        ),
        "equivalence": report.equivalence,
        "routes": dict(sorted(report.routes.items())),
    }
    if report.inverse is not None:
        out["inverse"] = report.inverse.labels()
    return out


@evaluator("map-classify")
def _map_classify(inputs: dict, limits: OracleLimits):
    from lsskit.maps import is_coarse_equivalence

    src, tgt = _load(inputs, "source"), _load(inputs, "target")
    report = is_coarse_equivalence(_map(src, tgt, inputs["map"]))
    return (TRUE if report.equivalence else FALSE), _report_json(src, tgt, report)


@evaluator("map-invert")
def _map_invert(inputs: dict, limits: OracleLimits):
    from lsskit.maps import construct_coarse_inverse, is_coarse_equivalence

    src, tgt = _load(inputs, "source"), _load(inputs, "target")
    f = _map(src, tgt, inputs["map"])
    report = is_coarse_equivalence(f)
    if not report.equivalence:
        return FALSE, _report_json(src, tgt, report)
    return TRUE, {"inverse": construct_coarse_inverse(f).labels()}


@evaluator("propa-verify")
def _propa_verify(inputs: dict, limits: OracleLimits):
    from lsskit.propa import max_ratio, verify_witness

    ls = _load(inputs)
    w = witness_from_json(inputs["witness"], ls.space.ground, "$.inputs.witness")
    v = verify_witness(ls.space, w)
    r = max_ratio(w.sets, w.test)
    return (TRUE if v else FALSE), {
        "violations": _violations(ls, v.witness),
        "max_ratio": None if r is None else format_rational(r),
    }


@evaluator("propa-search")
def _propa_search(inputs: dict, limits: OracleLimits):
    from lsskit.propa import search_witness

    ls = _load(inputs)
    res = search_witness(
        ls.space, positive(inputs["epsilon"]), _scale(ls, inputs["test"], "test"),
        _scale(ls, inputs["support"], "support"), int(inputs.get("max_level", 1)), limits,
    )
    if not res:
        return EXHAUSTED, {"note": "no witness with this support and level budget; not a disproof of property A"}
    return TRUE, {"witness": witness_to_json(res.witness)}


@evaluator("propa-construct-asdim")
def _propa_construct(inputs: dict, limits: OracleLimits):
    from lsskit.propa import certify_for_tower, construct_witness_asdim, max_ratio, tower_height, verify_witness

    ls = _load(inputs)
    k, eps = int(inputs["k"]), positive(inputs["epsilon"])
    test = _scale(ls, inputs["test"], "test")
    cv = certify_for_tower(ls.space, k, eps, test)
    if not cv:
        return FALSE, {"asdim_failure": str(cv.witness)}
    w = construct_witness_asdim(ls.space, cv.witness, eps, test)
    v = verify_witness(ls.space, w)
    r = max_ratio(w.sets, w.test)
    return (TRUE if v else FALSE), {
        "tower_height": tower_height(k, eps),
        "coarsening": cv.witness.coarsenings[0][1].as_labels(),
        "witness": witness_to_json(w),
        "violations": _violations(ls, v.witness),
        "max_ratio": None if r is None else format_rational(r),
    }


@evaluator("propa-transfer")
def _propa_transfer(inputs: dict, limits: OracleLimits):
    from lsskit.propa import transfer_witness

    src, tgt = _load(inputs, "source"), _load(inputs, "target")
    f = _map(src, tgt, inputs["map"])
    w = witness_from_json(inputs["witness"], tgt.space.ground, "$.inputs.witness")
    t = transfer_witness(f, w, positive(inputs["epsilon"]))
    return (TRUE if t.verdict else FALSE), {
        "fiber_bound": t.fiber_bound,
        "target_budget": format_rational(t.budget),
        "witness": witness_to_json(t.witness),
        "violations": _violations(src, t.verdict.witness),
    }


@evaluator("scaled-verify")
def _scaled_verify(inputs: dict, limits: OracleLimits):
    from lsskit.propa_scaled import verify_scaled_witness

    ls = _load(inputs)
    w = witness_from_json(inputs["witness"], ls.space.ground, "$.inputs.witness")
    v = verify_scaled_witness(ls.space, w, bool(inputs.get("allow_trivial_queried")))
    return (TRUE if v else FALSE), {"violations": _violations(ls, v.witness, point_labels=False)}


@evaluator("scaled-reduce")
def _scaled_reduce(inputs: dict, limits: OracleLimits):
    from lsskit.propa import verify_witness
    from lsskit.propa_scaled import reduce_trivial_base

    ls = _load(inputs)
    w = witness_from_json(inputs["witness"], ls.space.ground, "$.inputs.witness")
    red = reduce_trivial_base(w)
    v = verify_witness(ls.space, red.witness)
    lab = ls.space.ground.labels
    return (TRUE if v else FALSE), {
        "witness": witness_to_json(red.witness),
        "triggers_agree": red.triggers_agree,
        "scaled_trigger": [[lab[a], lab[b]] for a, b in red.scaled_trigger],
        "violations": _violations(ls, v.witness),
    }


@evaluator("scaled-transfer")
def _scaled_transfer(inputs: dict, limits: OracleLimits):
    from lsskit.propa_scaled import transfer_scaled_witness

    src, tgt = _load(inputs, "source"), _load(inputs, "target")
    f = _map(src, tgt, inputs["map"])
    w = witness_from_json(inputs["witness"], tgt.space.ground, "$.inputs.witness")
    t = transfer_scaled_witness(
        f, w, _scale(src, inputs["base"], "base"), positive(inputs["epsilon"]),
        _scale(src, inputs["queried"], "queried"), limits, bool(inputs.get("allow_trivial_queried")),
    )
    return (TRUE if t.verdict else FALSE), {
        "m": t.m, "n": t.n, "target_budget": format_rational(t.budget),
        "witness": witness_to_json(t.witness),
        "violations": _violations(src, t.verdict.witness, point_labels=False),
        "counts": [list(c) for c in t.counts],
    }


@evaluator("coarse-convert")
def _coarse_convert(inputs: dict, limits: OracleLimits):
    from lsskit.coarse import coarse_to_lss, is_uniformly_locally_finite, lss_to_coarse

    ls = _load(inputs)
    cs = lss_to_coarse(ls.space)
    back = coarse_to_lss(cs)
    lab = ls.space.ground.labels
    return (TRUE if back == ls.space else FALSE), {
        "maximal_controlled": [[[lab[x], lab[y]] for x, y in sorted(m.pairs)] for m in cs.maximal],
        "uniformly_locally_finite": is_uniformly_locally_finite(cs).witness,
        "round_trip_blocks": back.maximal_bounded.as_labels(),
    }


@evaluator("sako-verify")
def _sako_verify(inputs: dict, limits: OracleLimits):
    from lsskit.coarse import lss_to_coarse, verify_sako_witness

    ls = _load(inputs)
    w = witness_from_json(inputs["witness"], ls.space.ground, "$.inputs.witness")
    v = verify_sako_witness(lss_to_coarse(ls.space), w)
    return (TRUE if v else FALSE), {"violations": _violations(ls, v.witness)}


@evaluator("convert-witness")
def _convert_witness(inputs: dict, limits: OracleLimits):
    from lsskit.coarse import (
        SakoWitness,
        lss_to_coarse,
        verify_sako_witness,
        witness_lss_to_sako,
        witness_sako_to_lss,
    )
    from lsskit.propa import verify_witness

    ls = _load(inputs)
    w = witness_from_json(inputs["witness"], ls.space.ground, "$.inputs.witness")
    cs = lss_to_coarse(ls.space)
    if isinstance(w, SakoWitness):
        out = witness_sako_to_lss(cs, w)
        v = verify_witness(ls.space, out)
    else:
        out = witness_lss_to_sako(ls.space, w)
        v = verify_sako_witness(cs, out)
    return (TRUE if v else FALSE), {"witness": witness_to_json(out)}


@evaluator("fixture")
def _fixture(inputs: dict, limits: OracleLimits):
    from lsskit import fixtures
    from lsskit.docio import space_document

    kind = inputs["family"]
    params = inputs.get("params", {})
    if kind not in fixtures.GENERATORS:
        raise PreconditionError(f"unknown fixture family {kind!r}")
    fx = fixtures.GENERATORS[kind](**params)
    return TRUE, {"name": fx.name, "document": space_document(fx.space, fx.metric, fx.scales).to_json()}


# ------------------------------------------------------------------ certificates


def evaluate(kind: str, inputs: dict, limits: OracleLimits) -> tuple[str, dict]:
    if kind not in _REGISTRY:
        raise DocumentError(f"unknown certificate kind {kind!r}", "$.kind")
    return _REGISTRY[kind](inputs, limits)


def certificate(kind: str, inputs: dict, limits: OracleLimits, command: list[str] | None = None) -> dict:
    verdict, result = evaluate(kind, inputs, limits)
    return {
        "format": CERT_FORMAT,
        "tool": {"name": "lsskit", "version": __version__},
        "command": list(command or []),
        "kind": kind,
        "limits": limits.as_dict(),
        "inputs": inputs,
        "verdict": verdict,
        "result": result,
    }


def recheck(cert: Any) -> tuple[bool, str, dict]:
    """Recompute a certificate; returns ``(agrees, fresh verdict, fresh result)``."""
    if not isinstance(cert, dict) or cert.get("format") != CERT_FORMAT:
        raise DocumentError("not an lsskit certificate", "$.format")
    for key in ("kind", "inputs", "verdict", "result"):
        if key not in cert:
            raise DocumentError(f"missing field {key!r}", "$")
    raw = cert.get("limits") or {}
    try:
        limits = OracleLimits(**raw)
    except TypeError as exc:
        raise DocumentError(str(exc), "$.limits") from None
    verdict, result = evaluate(cert["kind"], cert["inputs"], limits)
    # compare in JSON form so tuples and lists agree
    result = json.loads(json.dumps(result))
    return verdict == cert["verdict"] and result == cert["result"], verdict, result
