"""Command-line entry point: single operations on JSON inputs and exhaustive verification campaigns.

Exit status is 0 on success or PASS, 1 when a check fails or a campaign
finds a counterexample, and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import alpha_forcing as af
from . import product_iteration as pi
from . import steel_forcing as sf
from . import verification as vf
from . import wf_complexity as wf
from .alpha_forcing import AlphaCondition
from .borel_codes import BorelCode, code_class, exact_level_oracle, interpret
from .ordinals import NotationError, as_ordinal
from .report import CampaignReport, run_sharded
from .template_trees import format_address, parse_address


class InputError(Exception):
    """Bad input; the message names the offending field."""


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(data: dict, key: str, where: str = "input"):
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected an object")
    if key not in data:
        raise InputError(f"{where}.{key}: missing")
    return data[key]


def _ordinal(text, where: str):
    try:
        return as_ordinal(text)
    except (NotationError, ValueError, TypeError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _ordinal_list(text: str, where: str) -> list:
    """Comma-separated ordinals; ``a..b`` expands a finite range."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            if not (lo.isdigit() and hi.isdigit()):
                raise InputError(f"{where}: ranges must be finite, got {part!r}")
            out.extend(str(i) for i in range(int(lo), int(hi) + 1))
        elif part:
            _ordinal(part, where)
            out.append(part)
    if not out:
        raise InputError(f"{where}: empty list")
    return out


def _kind(data: dict) -> str:
    if isinstance(data, dict) and "spec" in data:
        return "good"
    cond = data.get("condition", data) if isinstance(data, dict) else None
    if isinstance(cond, dict) and ({"rho", "rho_bar", "t"} & set(cond)):
        return "steel"
    return "alpha"


def _alpha_input(data: dict):
    params = pi.params_from_json(_field(data, "params"), "params")
    try:
        cond = AlphaCondition.from_json(_field(data, "condition"))
    except ValueError as exc:
        raise InputError(f"condition: {exc}") from None
    return params, cond


def _good_input(data: dict):
    spec = pi.IterationSpec.from_json(_field(data, "spec"))
    try:
        cond = pi.GoodCondition.from_json(_field(data, "condition"))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return spec, cond


def _steel_input(data: dict):
    if isinstance(data, dict) and "condition" in data:
        alpha = data.get("alpha", vf.STEEL_ALPHA)
        reading = data.get("reading", sf.STRUCTURAL)
        raw = data["condition"]
    else:
        alpha, reading, raw = vf.STEEL_ALPHA, sf.STRUCTURAL, data
    if reading not in sf.READINGS:
        raise InputError(f"input.reading: expected one of {list(sf.READINGS)}")
    try:
        return _ordinal(alpha, "input.alpha"), reading, sf.SteelCondition.from_json(raw)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _locus(spec, data: dict):
    raw = data.get("H", {})
    try:
        if isinstance(raw, dict):
            H = pi.GroundLocus.make(spec, {int(k): v for k, v in raw.items()})
        else:
            H = pi.GroundLocus.make(spec, raw)
    except (ValueError, TypeError) as exc:
        raise InputError(f"H: {exc}") from None
    bad = pi.locus_violations(spec, H)
    if bad:
        raise InputError(f"H: {bad[0]}")
    return H


# single operations


def cmd_validate(args) -> tuple[dict, int]:
    data = _load(args.input)
    kind = _kind(data)
    if kind == "alpha":
        params, cond = _alpha_input(data)
        bad = af.validate(params, cond, params.size_cap if args.cap else None)
        out = {"kind": kind, "valid": not bad, "violations": [v.to_json() for v in bad]}
        if not bad:
            out["strict"] = af.is_strict(params, cond)
    elif kind == "good":
        spec, cond = _good_input(data)
        bad = pi.validate_good(spec, cond)
        out = {"kind": kind, "valid": not bad, "violations": [{"stage": g, **v.to_json()} for g, v in bad]}
    else:
        alpha, reading, cond = _steel_input(data)
        bad = sf.steel_validate(alpha, cond, reading)
        out = {"kind": kind, "reading": reading, "valid": not bad, "violations": bad}
        if not bad:
            out["strict"] = cond.is_strict()
    return out, 0 if out["valid"] else 1


def cmd_strengthen(args) -> tuple[dict, int]:
    data = _load(args.input)
    params, cond = _alpha_input(data)
    try:
        eta = parse_address(_field(data, "eta"))
    except ValueError as exc:
        raise InputError(f"input.eta: {exc}") from None
    x = _field(data, "x")
    if x not in params.space.universe:
        raise InputError(f"input.x: {x!r} is not a point of the space")
    bad = af.validate(params, cond)
    if bad:
        return {"error": "input condition is invalid", "violations": [v.to_json() for v in bad]}, 1
    try:
        out = af.strengthen_into_D(params, cond, eta, x)
    except af.StrengtheningError as exc:
        return {"error": str(exc)}, 1
    return {"condition": out.to_json(), "in_D": af.in_D(params, out, eta, x)}, 0


def cmd_rank(args) -> tuple[dict, int]:
    data = _load(args.input)
    kind = _kind(data)
    if kind == "alpha":
        params, cond = _alpha_input(data)
        H = frozenset(data.get("H", []))
        return {"kind": kind, "crank": str(af.crank_single(params, cond, H))}, 0
    if kind == "good":
        spec, cond = _good_input(data)
        return {"kind": kind, "crank": str(pi.crank_ground(spec, cond, _locus(spec, data)))}, 0
    _, _, cond = _steel_input(data)
    return {"kind": kind, "crank": str(sf.steel_crank(cond))}, 0


def cmd_reduct(args) -> tuple[dict, int]:
    data = _load(args.input)
    beta = _ordinal(args.beta, "--beta")
    kind = _kind(data)
    if kind == "alpha":
        params, cond = _alpha_input(data)
        H = frozenset(data.get("H", []))
        prepared, q = af.rank_reduct_single(params, cond, beta, H, prepare=not args.no_prepare)
        out = {"prepared": prepared.to_json(), "reduct": q.to_json(), "crank": str(af.crank_single(params, q, H))}
    elif kind == "good":
        spec, cond = _good_input(data)
        H = _locus(spec, data)
        try:
            prepared, q = pi.rank_reduct_ground(spec, cond, beta, H, prepare=not args.no_prepare)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        out = {"prepared": prepared.to_json(), "reduct": q.to_json(), "crank": str(pi.crank_ground(spec, q, H))}
    else:
        raise InputError("input: tagged-tree conditions use the retag command")
    return {"kind": kind, "beta": str(beta), **out}, 0


def cmd_retag(args) -> tuple[dict, int]:
    data = _load(args.input)
    _, _, cond = _steel_input(data)
    beta = _ordinal(args.beta, "--beta")
    if args.refined is not None:
        b2, q = sf.refined_threshold(cond, beta, args.refined)
        return {"beta": str(beta), "beta_prime": str(b2), "condition": q.to_json()}, 0
    q = sf.retag(cond, beta)
    return {"beta": str(beta), "condition": q.to_json(), "crank": str(sf.steel_crank(q))}, 0


def cmd_wf_rank(args) -> tuple[dict, int]:
    data = _load(args.input)
    raw = data.get("tree") if isinstance(data, dict) else data
    if not isinstance(raw, list):
        raise InputError("input.tree: expected a list of addresses")
    try:
        tree = frozenset(parse_address(a) for a in raw)
    except ValueError as exc:
        raise InputError(f"input.tree: {exc}") from None
    if not wf.is_prefix_closed(tree):
        raise InputError("input.tree: not closed under prefixes")
    out = {"rank": str(wf.wf_rank(tree))}
    if args.alpha is not None:
        out["alpha"] = str(_ordinal(args.alpha, "--alpha"))
        out["member"] = wf.wf_membership(tree, out["alpha"])
    return out, 0


def cmd_build_code(args) -> tuple[dict, int]:
    alpha = _ordinal(args.alpha, "--alpha")
    try:
        grid = wf.Grid.parse(args.grid)
        eta = parse_address(args.eta)
        code = wf.build_wf_code(alpha, grid, eta)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pol, lvl = code_class(code)
    cpol, clvl = wf.claimed_class(alpha)
    return {
        "alpha": str(alpha),
        "grid": args.grid,
        "code_class": [pol, lvl],
        "claimed_class": [cpol, str(clvl)],
        "code": code.to_json(),
    }, 0


def cmd_eval_code(args) -> tuple[dict, int]:
    try:
        code = BorelCode.from_json(_load(args.code))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    space = _space_arg(args.space)
    try:
        node = parse_address(args.node)
        got = interpret(code, space, node)
    except KeyError as exc:
        raise InputError(f"code: {exc.args[0]} (unknown label or node)") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pol, lvl = code_class(code, node)
    return {"node": format_address(node), "points": [p for p in space.points if p in got], "class": [pol, lvl]}, 0


def _space_arg(text: str):
    """A space given inline as JSON, as a reference like ``cylinders:2``, or as a file path."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"--space: invalid JSON: {exc.msg}") from None
    elif text.startswith(("cylinders:", "grid(")):
        data = text
    else:
        data = _load(text)
    try:
        return pi._space_from_json(data, "space")
    except pi.SpecError as exc:
        raise InputError(str(exc)) from None


def cmd_ord_oracle(args) -> tuple[object, int]:
    if args.space is None:
        return _campaign(args, vf.borel_oracle_campaign, max_nodes=args.max_nodes)
    space = _space_arg(args.space)
    target = [t for t in (args.target or "").split(",") if t]
    try:
        level = exact_level_oracle(space, target)
    except ValueError as exc:
        raise InputError(f"--target: {exc}") from None
    return {"target": target, "level": level}, 0


# campaigns


FRAGMENTS = {"F0": vf.fragment_f0, "F1": vf.fragment_f1}


def _fragment(name: str):
    try:
        return FRAGMENTS[name]()
    except KeyError:
        raise InputError(f"--fragment: expected one of {sorted(FRAGMENTS)}") from None


def _campaign(args, fn, shardable: bool = False, **kwargs) -> tuple[CampaignReport, int]:
    try:
        if shardable:
            rep = run_sharded(fn, args.jobs, **kwargs)
        else:
            rep = fn(**kwargs)
    except vf.CampaignTooLarge as exc:
        raise InputError(str(exc)) from None
    if getattr(args, "figures", None):
        from .figures import counts_figure, wf_membership_figure

        rep.notes.append({"figure": counts_figure(rep, args.figures)})
        if rep.id == "wf-oracle":
            rep.notes.append({"figure": wf_membership_figure(kwargs["grid_text"], kwargs["alphas"], args.figures)})
    return rep, 0 if rep.verdict == "PASS" else 1


def _ground_frags(path: Optional[str]):
    if path is None:
        return [vf.ground_stage_f0(), vf.ground_stage_one()]
    data = _load(path)
    spec = pi.IterationSpec.from_json(data)
    depths = [st.get("depth", 2) if isinstance(st, dict) else 2 for st in data]
    return [vf.Fragment(P, int(d)) for P, d in zip(spec.stages, depths)]


def cmd_verify(args) -> tuple[CampaignReport, int]:
    t = args.target
    if t == "alpha-rank":
        betas = _ordinal_list(args.betas or "0,1,2,w", "--betas")
        frag = _fragment(args.fragment or "F0")
        return _campaign(args, vf.rank_campaign, True, frag=frag, betas=betas, prepare=not args.no_prepare, mode=args.mode)
    if t == "ground-rank":
        betas = _ordinal_list(args.betas or "0,1", "--betas")
        frags = _ground_frags(args.spec)
        return _campaign(args, vf.ground_rank_campaign, True, frags=frags, betas=betas, prepare=not args.no_prepare,
                         low_children=not args.no_low_children)
    if t in ("steel-rank", "steel-refined"):
        tags = _ordinal_list(args.tags or ",".join(vf.STEEL_MENU), "--tags")
        common = dict(menu=tuple(tags), size=args.size, width=args.width, alpha=args.alpha or vf.STEEL_ALPHA,
                      reading=args.reading)
        if t == "steel-rank":
            return _campaign(args, vf.steel_rank_campaign, True, floor=not args.no_floor, **common)
        return _campaign(args, vf.refined_campaign, True, at_least_beta=args.at_least_beta, **common)
    if t == "heart":
        return _campaign(args, vf.heart_campaign, frag=_fragment(args.fragment or "F1"), rounds=args.rounds)
    if t == "density":
        return _campaign(args, vf.density_campaign, frag=_fragment(args.fragment or "F0"))
    if t == "criticality":
        return _campaign(args, vf.criticality_campaign, frag=_fragment(args.fragment or "F1"))
    if t == "glb":
        return _campaign(args, vf.glb_campaign, frag=_fragment(args.fragment or "F0"))
    if t == "wf-oracle":
        alphas = _ordinal_list(args.alphas or ",".join(vf.WF_ALPHAS), "--alphas")
        return _campaign(args, vf.wf_oracle_campaign, grid_text=args.grid, alphas=alphas)
    if t == "ord-oracle":
        return _campaign(args, vf.borel_oracle_campaign, max_nodes=args.max_nodes)
    if t == "ordinal-laws":
        return _campaign(args, vf.ordinal_laws_campaign)
    raise InputError(f"unknown verify target {t!r}")


VERIFY_TARGETS = (
    "alpha-rank", "ground-rank", "steel-rank", "steel-refined", "heart", "density",
    "criticality", "glb", "wf-oracle", "ord-oracle", "ordinal-laws",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forcinglab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--no-meta", action="store_true", help="omit wall-clock fields so output is byte-stable")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, "check a condition and list violated clauses")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cap", action="store_true", help="also enforce the size cap s")
    p = add("strengthen", cmd_strengthen, "extend a condition into the dense set for (eta, x)")
    p.add_argument("--in", dest="input", required=True)
    p = add("rank", cmd_rank, "rank of a condition")
    p.add_argument("--in", dest="input", required=True)
    p = add("reduct", cmd_reduct, "rank reduct of a condition at beta")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--no-prepare", action="store_true")
    p = add("retag", cmd_retag, "retag a tagged-tree condition at beta")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--refined", type=int, metavar="HEIGHT_BOUND", help="use the refined threshold instead of beta")
    p = add("wf-rank", cmd_wf_rank, "well-founded rank of a finite tree")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--alpha")
    p = add("build-code", cmd_build_code, "Borel code for trees of rank below alpha on a grid")
    p.add_argument("--alpha", required=True)
    p.add_argument("--grid", default="grid(b=2,d=2)")
    p.add_argument("--eta", default="[]")
    p = add("eval-code", cmd_eval_code, "interpret a Borel code on a finite space")
    p.add_argument("--code", required=True)
    p.add_argument("--space", required=True, help="space JSON file, cylinders:N or grid(b=..,d=..)")
    p.add_argument("--node", default="[]")
    p = add("ord-oracle", cmd_ord_oracle, "exact level of a target set, or the corpus campaign")
    p.add_argument("--space")
    p.add_argument("--target", help="comma-separated point ids")
    p.add_argument("--max-nodes", type=int, default=4)
    p.add_argument("--figures", metavar="DIR")

    p = add("verify", cmd_verify, "run an exhaustive verification campaign")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--figures", metavar="DIR", help="also render PNG summaries here")
    p.add_argument("--fragment", help="F0 or F1")
    p.add_argument("--betas")
    p.add_argument("--no-prepare", action="store_true")
    p.add_argument("--mode", choices=("cores", "full"), default="cores")
    p.add_argument("--spec", help="iteration spec JSON (stages may carry a depth)")
    p.add_argument("--no-low-children", action="store_true")
    p.add_argument("--tags")
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--alpha")
    p.add_argument("--reading", choices=sf.READINGS, default=sf.STRUCTURAL)
    p.add_argument("--no-floor", action="store_true")
    p.add_argument("--at-least-beta", action="store_true")
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--grid", default="grid(b=2,d=2)")
    p.add_argument("--alphas")
    p.add_argument("--max-nodes", type=int, default=4)
    return parser


def _emit(result, args) -> None:
    if isinstance(result, CampaignReport):
        text = result.dumps(meta=not args.no_meta)
    else:
        text = json.dumps(result, indent=2, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    if getattr(args, "figures", None) is None:
        args.figures = None
    try:
        result, status = args.fn(args)
    except (InputError, pi.SpecError, NotationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
