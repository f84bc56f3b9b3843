"""Command line interface.

Every command prints a JSON certificate (or writes it with ``--out``).  Exit
codes: 0 verdict true, 1 verdict false, 2 error (including oracle limits, which
are reported as such), 3 bounded search exhausted without a verdict.
"""
from __future__ import annotations

import sys

import click

from lsskit import certify, docio
from lsskit.errors import LssError, OracleLimitExceeded
from lsskit.limits import ENV_VAR, OracleLimits

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_EXHAUSTED = 0, 1, 2, 3
_EXIT = {certify.TRUE: EXIT_TRUE, certify.FALSE: EXIT_FALSE, certify.EXHAUSTED: EXIT_EXHAUSTED}


def _fail(msg: str) -> None:
    click.echo(msg, err=True)
    sys.exit(EXIT_ERROR)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OracleLimitExceeded as exc:
        _fail(f"oracle limit exceeded: {exc.what} has size {exc.size}, limit {exc.limit} "
              f"(raise it with {ENV_VAR})")
    except (LssError, ValueError, KeyError) as exc:
        _fail(f"error: {exc}")


def _space(path: str) -> dict:
    return _guard(lambda: docio.parse_space(path).to_json())


def _witness(path: str) -> dict:
    return _guard(docio.read, path)


def _map_table(source_doc: dict, name: str) -> dict:
    maps = source_doc.get("maps", {})
    if name not in maps:
        _fail(f"error: source document has no map {name!r} (known: {', '.join(sorted(maps)) or 'none'})")
    return maps[name]


def _run(kind: str, inputs: dict, out: str | None, witness_out: str | None = None) -> None:
    limits = _guard(OracleLimits.from_env)
    cert = _guard(certify.certificate, kind, inputs, limits, sys.argv[1:])
    _write(docio.dumps(cert), out)
    if witness_out:
        wit = cert["result"].get("witness")
        if wit is None:
            click.echo("no witness produced", err=True)
        else:
            with open(witness_out, "w", encoding="utf-8") as fh:
                fh.write(docio.dumps(wit))
    sys.exit(_EXIT[cert["verdict"]])


def _labels(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [t for t in (s.strip() for s in text.split(",")) if t]


out_option = click.option("--out", type=click.Path(dir_okay=False), help="Write the certificate here instead of stdout.")
witness_out_option = click.option("--witness-out", type=click.Path(dir_okay=False), help="Also write the produced witness document here.")
space_arg = click.argument("space", type=click.Path(exists=True, dir_okay=False))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="lsskit")
def main() -> None:
    """Certificates for coarse geometry on finite large-scale spaces."""


# ------------------------------------------------------------------ space, star, nets


@main.group()
def space() -> None:
    """Space documents."""


@space.command("validate")
@space_arg
@out_option
def space_validate(space: str, out: str | None) -> None:
    """Parse SPACE and report its maximal bounded sets."""
    _run("space-validate", {"space": _space(space)}, out)


@main.command("star")
@space_arg
@click.option("--target", required=True, help="Comma-separated labels.")
@click.option("--scale", required=True, help="Scale name (named scale, Maximal, Singletons or Balls<r>).")
@out_option
def star_cmd(space: str, target: str, scale: str, out: str | None) -> None:
    """Union of the SCALE elements meeting TARGET."""
    _run("star", {"space": _space(space), "target": _labels(target), "scale": scale}, out)


@main.group()
def net() -> None:
    """U-nets."""


@net.command("compute")
@space_arg
@click.option("--scale", required=True)
@click.option("--within", default=None, help="Comma-separated labels of the ambient set (default: everything).")
@click.option("--all", "all_", is_flag=True, help="Enumerate every net instead of the greedy one.")
@out_option
def net_compute(space: str, scale: str, within: str | None, all_: bool, out: str | None) -> None:
    _run("net", {"space": _space(space), "scale": scale, "within": _labels(within), "all": all_}, out)


@main.group()
def bsm() -> None:
    """Bounded scale measure."""


@bsm.command("check")
@space_arg
@click.option("--base", required=True, help="Base scale name.")
@click.option("--mode", type=click.Choice(["all-nets", "exists-net", "covering"]), default="covering", show_default=True)
@out_option
def bsm_check(space: str, base: str, mode: str, out: str | None) -> None:
    """Constants of SPACE at BASE, queried at the maximal bounded sets."""
    _run("bsm", {"space": _space(space), "base": base, "mode": mode}, out)


# ------------------------------------------------------------------ maps


def _map_inputs(source: str, target: str | None, map_name: str) -> dict:
    src = _space(source)
    tgt = _space(target) if target else src
    return {"source": src, "target": tgt, "map": _map_table(src, map_name)}


@main.group("map")
def map_group() -> None:
    """Maps between spaces (tables live under "maps" in the source document)."""


@map_group.command("classify")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--target", type=click.Path(exists=True, dir_okay=False), help="Target space (default: SOURCE).")
@click.option("--map", "map_name", required=True)
@out_option
def map_classify(source: str, target: str | None, map_name: str, out: str | None) -> None:
    _run("map-classify", _map_inputs(source, target, map_name), out)


@map_group.command("invert")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--target", type=click.Path(exists=True, dir_okay=False))
@click.option("--map", "map_name", required=True)
@out_option
def map_invert(source: str, target: str | None, map_name: str, out: str | None) -> None:
    _run("map-invert", _map_inputs(source, target, map_name), out)


# ------------------------------------------------------------------ property A


@main.group()
def propa() -> None:
    """Property A witnesses."""


@propa.command("verify")
@space_arg
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@out_option
def propa_verify(space: str, witness: str, out: str | None) -> None:
    _run("propa-verify", {"space": _space(space), "witness": _witness(witness)}, out)


@propa.command("search")
@space_arg
@click.option("--epsilon", required=True, help="Tolerance as p/q.")
@click.option("--test", required=True)
@click.option("--support", required=True)
@click.option("--max-level", type=int, default=1, show_default=True)
@out_option
@witness_out_option
def propa_search(space, epsilon, test, support, max_level, out, witness_out) -> None:
    """Bounded search; exit 3 means this support and level budget is exhausted, not that property A fails."""
    inputs = {"space": _space(space), "epsilon": epsilon, "test": test, "support": support, "max_level": max_level}
    _run("propa-search", inputs, out, witness_out)


@propa.command("construct-asdim")
@space_arg
@click.option("--k", type=int, required=True, help="Dimension bound.")
@click.option("--epsilon", required=True)
@click.option("--test", required=True)
@out_option
@witness_out_option
def propa_construct(space, k, epsilon, test, out, witness_out) -> None:
    inputs = {"space": _space(space), "k": k, "epsilon": epsilon, "test": test}
    _run("propa-construct-asdim", inputs, out, witness_out)


@propa.command("transfer")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@click.option("--target", type=click.Path(exists=True, dir_okay=False))
@click.option("--map", "map_name", required=True)
@click.option("--epsilon", required=True)
@out_option
@witness_out_option
def propa_transfer(source, witness, target, map_name, epsilon, out, witness_out) -> None:
    """Pull WITNESS (on the target) back to SOURCE."""
    inputs = _map_inputs(source, target, map_name)
    inputs.update(witness=_witness(witness), epsilon=epsilon)
    _run("propa-transfer", inputs, out, witness_out)


@main.group("propa-scaled")
def propa_scaled() -> None:
    """Property A at a scale."""


@propa_scaled.command("verify")
@space_arg
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@click.option("--allow-trivial-queried", is_flag=True)
@out_option
def scaled_verify(space, witness, allow_trivial_queried, out) -> None:
    inputs = {"space": _space(space), "witness": _witness(witness), "allow_trivial_queried": allow_trivial_queried}
    _run("scaled-verify", inputs, out)


@propa_scaled.command("reduce")
@space_arg
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@out_option
@witness_out_option
def scaled_reduce(space, witness, out, witness_out) -> None:
    _run("scaled-reduce", {"space": _space(space), "witness": _witness(witness)}, out, witness_out)


@propa_scaled.command("transfer")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@click.option("--target", type=click.Path(exists=True, dir_okay=False))
@click.option("--map", "map_name", required=True)
@click.option("--base", required=True, help="Base scale on SOURCE.")
@click.option("--queried", required=True, help="Queried scale on SOURCE.")
@click.option("--epsilon", required=True)
@click.option("--allow-trivial-queried", is_flag=True)
@out_option
@witness_out_option
def scaled_transfer(source, witness, target, map_name, base, queried, epsilon, allow_trivial_queried, out, witness_out) -> None:
    inputs = _map_inputs(source, target, map_name)
    inputs.update(witness=_witness(witness), base=base, queried=queried, epsilon=epsilon,
                  allow_trivial_queried=allow_trivial_queried)
    _run("scaled-transfer", inputs, out, witness_out)


# ------------------------------------------------------------------ coarse structures


@main.group()
def coarse() -> None:
    """Entourage-side representation."""


@coarse.command("convert")
@space_arg
@out_option
def coarse_convert(space, out) -> None:
    """Coarse structure of SPACE and the round trip back."""
    _run("coarse-convert", {"space": _space(space)}, out)


@coarse.command("verify-sako")
@space_arg
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@out_option
def coarse_verify_sako(space, witness, out) -> None:
    _run("sako-verify", {"space": _space(space), "witness": _witness(witness)}, out)


@coarse.command("convert-witness")
@space_arg
@click.argument("witness", type=click.Path(exists=True, dir_okay=False))
@out_option
@witness_out_option
def coarse_convert_witness(space, witness, out, witness_out) -> None:
    """Plain witness to entourage form, or back (direction chosen by the witness kind)."""
    _run("convert-witness", {"space": _space(space), "witness": _witness(witness)}, out, witness_out)


# ------------------------------------------------------------------ fixtures and verify


@main.group()
def fixtures() -> None:
    """Fixture space documents."""


@fixtures.command("generate")
@click.argument("family", type=click.Choice(["path", "components", "grid", "product", "random"]))
@click.option("--n", type=int, help="path length / random space size")
@click.option("--sizes", help="components: comma-separated sizes")
@click.option("--d", type=int, help="grid dimension")
@click.option("--side", type=int, default=5, show_default=True, help="grid side")
@click.option("--t", type=int, help="product: number of factors")
@click.option("--s", type=int, default=2, show_default=True, help="product: side of each factor")
@click.option("--seed", type=int, default=0, show_default=True, help="random: seed")
@out_option
def fixtures_generate(family, n, sizes, d, side, t, s, seed, out) -> None:
    """Write a space document for a fixture family."""
    if family == "path":
        params = {"n": n if n is not None else 5}
    elif family == "components":
        params = {"sizes": [int(x) for x in _labels(sizes or "2,3")]}
    elif family == "grid":
        params = {"d": d if d is not None else 1, "side": side}
    elif family == "product":
        params = {"t": t if t is not None else 1, "s": s}
    else:
        params = {"n": n if n is not None else 6, "seed": seed}
    limits = OracleLimits.from_env()
    _, result = _guard(certify.evaluate, "fixture", {"family": family, "params": params}, limits)
    _write(docio.dumps(result["document"]), out)


@main.command("verify")
@click.argument("cert", type=click.Path(exists=True, dir_okay=False))
def verify_cmd(cert: str) -> None:
    """Recompute CERT from its recorded inputs; exit 0 when everything matches."""
    doc = _guard(docio.read, cert)
    agrees, verdict, _ = _guard(certify.recheck, doc)
    click.echo(docio.dumps({"certificate": cert, "agrees": agrees, "verdict": verdict,
                            "recorded_verdict": doc.get("verdict")}), nl=False)
    sys.exit(EXIT_TRUE if agrees else EXIT_FALSE)


if __name__ == "__main__":  # pragma: no cover
    main()
