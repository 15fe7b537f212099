"""Command line driver for desk-scale experiments.

Every subcommand prints aligned text, or JSON with ``--json``. Options can
also come from a ``--config`` file of ``key = value`` lines (keys are the
long option names); command line flags win. All randomness is derived from
``--seed`` via :func:`rainbow_factors.seeding.derive_seed`.

Exit codes: 0 success, 2 input error, 3 resource cap hit, 4 verification
failure, 5 object verified absent, 6 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import bounds as pb
from . import colouring as col
from . import factors as fc
from . import hypergraph as hg
from . import lll
from . import shuffle as sh
from . import switching as sw
from .errors import InputError, ResourceLimitError
from .seeding import derive_seed

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4
EXIT_ABSENT = 5
EXIT_TIMEOUT = 6

DEFAULTS = {
    "n": 6,
    "r": 2,
    "host": "complete",
    "edge_prob": "1/2",
    "pattern": "edge",
    "scheme": "rainbow",
    "seed": 0,
    "trials": 1000,
    "cap": 1_000_000,
    "mu": None,
    "epsilon": "1",
    "m": 2,
    "p": None,
    "ell": 1,
    "delta_hat": "0",
    "h0": 0,
    "max_steps": 200,
}


class VerificationError(Exception):
    pass


class CommandResult(dict):
    """Payload plus the exit code it should produce."""

    def __init__(self, payload: dict, code: int = EXIT_OK):
        super().__init__(payload)
        self.code = code


# -- option handling ------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    add = parent.add_argument
    add("--config", help="key = value file supplying defaults")
    add("--json", action="store_true", default=None, help="emit JSON")
    add("--seed", type=int)
    add("--trials", type=int)
    add("--cap", type=int, help="work cap for enumerations")
    add("--mu")
    add("--epsilon")
    add("--m", type=int)
    add("--p")
    add("--ell", type=int)
    add("--delta-hat", dest="delta_hat")
    add("--graph", help="hypergraph file")
    add("--colouring", help="colouring file (references its hypergraph)")
    add("--n", type=int)
    add("--r", type=int)
    add("--host", help="complete | cycle | random")
    add("--edge-prob", dest="edge_prob")
    add("--pattern", help="edge | triangle | complete:h | cycle:k | path:k | FILE")
    add("--scheme", help="rainbow | mono | prefix | bounded")
    add("--h0", type=int, help="index of H0 within the initial factor")
    add("--max-steps", dest="max_steps", type=int)
    add("--out", help="write the report here as well")
    return parent


def read_config(path: str | Path) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"config line {raw!r} is not key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve(ns: argparse.Namespace) -> argparse.Namespace:
    config = read_config(ns.config) if ns.config else {}
    for key, value in config.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, value)
    for key, value in DEFAULTS.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, value)
    for key in ("n", "r", "seed", "trials", "cap", "m", "ell", "h0", "max_steps"):
        setattr(ns, key, int(getattr(ns, key)))
    ns.json = ns.json in (True, "1", "true", "yes")
    return ns


def _fraction(value, name: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--{name} must be a rational number, got {value!r}") from exc


# -- instances ------------------------------------------------------------


def build_pattern(spec: str, r: int) -> hg.Hypergraph:
    if spec == "edge":
        return hg.single_edge(r)
    if spec == "triangle":
        return hg.complete(3, 2)
    kind, _, arg = spec.partition(":")
    if kind == "complete" and arg:
        return hg.complete(int(arg), r)
    if kind == "cycle" and arg:
        return hg.cycle(int(arg))
    if kind == "path" and arg:
        return hg.path(int(arg))
    if Path(spec).exists():
        return hg.load(spec)
    raise InputError(f"unknown pattern {spec!r}")


def build_host(ns) -> hg.Hypergraph:
    if ns.colouring:
        return col.load(ns.colouring).host
    if ns.graph:
        return hg.load(ns.graph)
    if ns.host == "complete":
        return hg.complete(ns.n, ns.r)
    if ns.host == "cycle":
        return hg.cycle(ns.n)
    if ns.host == "random":
        import random
        from itertools import combinations

        rng = random.Random(derive_seed(ns.seed, "host"))
        q = _fraction(ns.edge_prob, "edge-prob")
        return hg.Hypergraph(ns.n, ns.r, [e for e in combinations(range(ns.n), ns.r) if rng.random() < q])
    raise InputError(f"unknown host {ns.host!r}")


def build_colouring(ns, G: hg.Hypergraph) -> col.Colouring:
    if ns.colouring:
        C = col.load(ns.colouring)
        if C.host != G:
            raise InputError("colouring host differs from the selected graph")
        return C
    if ns.scheme == "rainbow":
        return col.rainbow_colouring(G)
    if ns.scheme == "mono":
        return col.monochromatic_colouring(G)
    if ns.scheme == "prefix":
        C = col.gen_prefix_colouring(G.n, G.r)
        if C.host != G:
            raise InputError("prefix colouring needs the complete host")
        return C
    if ns.scheme == "bounded":
        if ns.mu is None:
            raise InputError("--scheme bounded needs --mu")
        return col.gen_random_bounded(G, _fraction(ns.mu, "mu"), derive_seed(ns.seed, "colouring"))
    raise InputError(f"unknown colouring scheme {ns.scheme!r}")


def build_context(ns, G, H, C) -> sw.SwitchContext:
    F0 = fc.find_factor(G, H, cap=ns.cap)
    if F0 is None:
        raise InputError("the host has no H-factor")
    if not 0 <= ns.h0 < len(F0):
        raise InputError(f"--h0 must index one of the {len(F0)} factor copies")
    return sw.SwitchContext(G, H, C, F0, F0.copies[ns.h0])


def _instance(ns):
    G = build_host(ns)
    H = build_pattern(ns.pattern, G.r)
    return G, H, build_colouring(ns, G)


def _verify(condition: bool, message: str) -> None:
    if not condition:
        raise VerificationError(message)


# -- subcommands ----------------------------------------------------------


def cmd_check_bounded(ns) -> CommandResult:
    G = build_host(ns)
    C = build_colouring(ns, G)
    mu_star = col.min_mu(C)
    out = {"n": G.n, "r": G.r, "edges": len(G), "colours": len(C.colours()), "min_mu": str(mu_star)}
    if ns.mu is not None:
        verdict = col.is_mu_bounded(C, _fraction(ns.mu, "mu"))
        _verify(verdict.ok == (_fraction(ns.mu, "mu") >= mu_star), "boundedness verdict disagrees with min_mu")
        out.update(mu=str(ns.mu), verdict=verdict.ok, violation=_jsonable(verdict.witness) or None,
                   condition=verdict.condition)
    return CommandResult(out)


def cmd_find_factor(ns) -> CommandResult:
    G, H, _ = _instance(ns)
    F = fc.find_factor(G, H, cap=ns.cap)
    if F is None:
        return CommandResult({"factor": None, "status": "none"}, EXIT_ABSENT)
    _verify(fc.is_factor(G, H, F), "returned factor failed validation")
    return CommandResult({"status": "found", "factor": F.to_json()})


def cmd_find_rainbow(ns) -> CommandResult:
    G, H, C = _instance(ns)
    use_oracle = ns.oracle or not ns.repair
    use_repair = ns.repair or not ns.oracle
    out: dict = {"methods": [m for m, on in (("oracle", use_oracle), ("repair", use_repair)) if on]}
    code = EXIT_OK
    if use_oracle:
        F = fc.find_rainbow_factor_bruteforce(G, H, C, cap=ns.cap)
        if F is None:
            out["oracle"] = {"status": "none", "verified_absent": True}
            code = EXIT_ABSENT
        else:
            _verify(fc.is_factor(G, H, F) and col.is_rainbow(C, F.edges), "oracle factor failed validation")
            out["oracle"] = {"status": "found", "factor": F.to_json()}
    if use_repair:
        res = lll.rainbow_repair(G, H, C, ns.m, derive_seed(ns.seed, "repair"), ns.max_steps)
        entry = {"status": res.status, "steps": res.steps}
        if res.ok:
            _verify(fc.is_factor(G, H, res.factor) and col.is_rainbow(C, res.factor.edges),
                    "repaired factor failed validation")
            entry["factor"] = res.factor.to_json()
            if code == EXIT_ABSENT:
                raise VerificationError("repair succeeded where the oracle proved absence")
        elif code == EXIT_OK and not use_oracle:
            code = EXIT_TIMEOUT
        out["repair"] = entry
    out["status"] = "none" if code == EXIT_ABSENT else ("found" if code == EXIT_OK else "timeout")
    return CommandResult(out, code)


def cmd_count_switchings(ns) -> CommandResult:
    G, H, C = _instance(ns)
    ctx = build_context(ns, G, H, C)
    count = sw.count_feasible_switchings(ctx, ns.m, cap=ns.cap)
    return CommandResult({"F0": ctx.F0.to_json(), "H0": ctx.H0.to_json(), "m": ns.m, "count": count})


def _choose_x(ns, ctx: sw.SwitchContext, p: Fraction) -> sh.ShuffleSample:
    seed = derive_seed(ns.seed, "construct")
    for t in range(ns.trials):
        s = sh.sample(ctx, p, seed, t)
        if len(s.X) == ns.m:
            return s
    raise InputError(f"no sample with |X| = {ns.m} in {ns.trials} trials")


def cmd_construct_switching(ns) -> CommandResult:
    G, H, C = _instance(ns)
    ctx = build_context(ns, G, H, C)
    n_copies = len(ctx.F0)
    if ns.m == n_copies:
        X = ctx.F0
        rng = sh.trial_rng(derive_seed(ns.seed, "partition"))
        parts = [[] for _ in range(H.n)]
        for c in X:
            for v, i in zip(sorted(c.vertices), rng.permutation(H.n)):
                parts[i].append(v)
        P = sw.TransversePartition(parts)
    else:
        p = _fraction(ns.p, "p") if ns.p is not None else sh.default_p(G.n, H.n, ns.m)
        s = _choose_x(ns, ctx, p)
        X, P = s.X, s.P
    eps = _fraction(ns.epsilon, "epsilon")
    suitable = sw.is_suitable(ctx, X, eps)
    res = sw.construct_switching(ctx, X, P, eps, _fraction(ns.delta_hat, "delta-hat"), ns.ell)
    out = {
        "X": X.to_json(),
        "partition": P.to_json(),
        "suitable": suitable.ok,
        "suitability_violation": suitable.condition,
        "part_edges": res.part_edges,
        "deleted_edges": res.deleted_edges,
        "part_degrees": res.part_degrees,
        "degree_target": str(res.degree_target),
        "degree_condition": res.degree_condition,
    }
    if not res.ok:
        out.update(status="failed", failed_part=res.failed_part)
        return CommandResult(out, EXIT_ABSENT)
    _verify(sw.is_feasible_switching(ctx, res.switching).ok, "constructed switching is infeasible")
    out.update(status="found", switching=res.switching.to_json())
    return CommandResult(out)


def cmd_shuffle_estimate(ns) -> CommandResult:
    G, H, C = _instance(ns)
    ctx = build_context(ns, G, H, C)
    p = _fraction(ns.p, "p") if ns.p is not None else None
    est = sh.estimate_events(ctx, _fraction(ns.epsilon, "epsilon"), ns.m, ns.trials,
                             derive_seed(ns.seed, "shuffle"), _fraction(ns.delta_hat, "delta-hat"), p, ns.ell)
    if ns.csv:
        Path(ns.csv).write_text(est.to_csv())
    out = est.to_json()
    out["stream_seed"] = out.pop("seed")
    return CommandResult(out)


def cmd_lll_census(ns) -> CommandResult:
    G, H, C = _instance(ns)
    events = lll.build_events(G, H, C, positive_only=ns.positive, cap=ns.cap)
    gamma = lll.build_dependency_graph(events)
    mu = col.min_mu(C)
    deg = lll.event_degrees(gamma, G.n, H.n, G.r, mu)
    params = lll.lll_parameters(G.n, H.n, ns.m, d_A=deg.d_A, d_B=deg.d_B)
    if ns.dot:
        Path(ns.dot).write_text(gamma.to_dot())
    return CommandResult({
        "events": {"A": sum(e.kind == "A" for e in events), "B": sum(e.kind == "B" for e in events)},
        "dependency_edges": len(gamma.edges()),
        "d_A": deg.d_A,
        "d_B": deg.d_B,
        "min_mu": str(mu),
        "reported_bound_A": deg.bound_A,
        "reported_bound_B": deg.bound_B,
        "gamma": str(params.gamma),
        "p_A": str(params.p_A),
        "p_B": str(params.p_B),
        "condition_value": str(params.condition),
        "condition_holds": params.holds,
    })


def cmd_multigraph_a(ns) -> CommandResult:
    G, H, C = _instance(ns)
    factors = fc.enumerate_factors(G, H, cap=ns.cap)
    if not factors:
        raise InputError("the host has no H-factor")
    H0 = factors[0].copies[ns.h0]
    mg = lll.switching_multigraph_A(G, H, C, H0, factors, ns.m)
    bound = mg.ratio_bound()
    return CommandResult({
        "H0": H0.to_json(),
        "factors": len(factors),
        "with_H0": len(mg.left),
        "edges": len(mg.edges),
        "delta_A": mg.min_left,
        "Delta_A": mg.max_right,
        "ratio": str(mg.ratio),
        "ratio_bound": None if bound is None else str(bound),
        "ratio_check": None if bound is None else mg.ratio <= bound,
        "handshake": sum(mg.left_degrees()) == sum(mg.right_degrees()) == len(mg.edges),
    })


def cmd_bounds(ns) -> CommandResult:
    out: dict = {}
    if ns.c is not None:
        P = pb.TalagrandParams(float(ns.c), float(ns.cert_r), float(ns.mean), float(ns.t))
        out["talagrand"] = {"bound": pb.talagrand_bound(P), "radius": P.radius}
    if ns.janson_mu is not None:
        J = pb.JansonParams(float(ns.janson_mu), float(ns.janson_delta), float(ns.janson_Delta), float(ns.eta))
        out["janson"] = {"bound": pb.janson_bound(J)}
    if ns.empirical:
        G, H, C = _instance(ns)
        ctx = build_context(ns, G, H, C)
        p = _fraction(ns.p, "p") if ns.p is not None else sh.default_p(G.n, H.n, ns.m)
        reports = []
        outside = sorted(set(range(G.n)) - ctx.h0_vertices)
        I = outside[: G.r - 1]
        L = outside[: ns.ell]
        seed = derive_seed(ns.seed, "bounds")
        for fam in (pb.conflict_count_family(ctx, I, p, shift=1.0), pb.part_completion_family(ctx, L, p)):
            rep = pb.empirical_tail_check(fam, ns.trials, seed)
            reports.append(rep.to_json())
        out["empirical"] = reports
        if any(r["verdict"] == "violation" for r in reports):
            return CommandResult(out, EXIT_VERIFY)
    if not out:
        raise InputError("nothing to evaluate: give --c/--cert-r/--mean/--t, --janson-mu/... or --empirical")
    return CommandResult(out)


def cmd_gen(ns) -> CommandResult:
    G = build_host(ns)
    C = build_colouring(ns, G)
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_path = out_dir / f"{ns.name}.hg"
    colour_path = out_dir / f"{ns.name}.col"
    hg.save(G, graph_path)
    col.save(C, colour_path, graph_path.name)
    _verify(col.load(colour_path) == C, "colouring did not round-trip")
    return CommandResult({"graph": str(graph_path), "colouring": str(colour_path),
                          "edges": len(G), "min_mu": str(col.min_mu(C))})


def cmd_pipeline(ns) -> CommandResult:
    G = build_host(ns)
    H = build_pattern(ns.pattern, G.r)
    out: dict = {"n": G.n, "r": G.r, "h": H.n}
    if ns.colouring or (ns.scheme != "bounded" and ns.mu is None):
        C = build_colouring(ns, G)
        out["mu_requested"] = None
    else:
        requested = _fraction(ns.mu if ns.mu is not None else Fraction(1, G.n), "mu")
        floor_mu = Fraction(1, G.n)
        mu = max(requested, floor_mu)
        out.update(mu_requested=str(requested), mu_used=str(mu), mu_clamped=mu != requested)
        C = col.gen_random_bounded(G, mu, derive_seed(ns.seed, "colouring"))
    mu_star = col.min_mu(C)
    out["min_mu"] = str(mu_star)
    if out.get("mu_used") is not None:
        _verify(col.is_mu_bounded(C, Fraction(out["mu_used"])).ok, "generated colouring is not bounded")
    eps = _fraction(ns.epsilon, "epsilon")
    delta_hat = _fraction(ns.delta_hat, "delta-hat")
    if 1 <= ns.ell < G.r:
        d = hg.min_ell_degree(G, ns.ell)
        target = (delta_hat + eps) * G.n ** (G.r - ns.ell)
        out.update(min_degree=d, degree_target=str(target), degree_condition=d >= target)
    res = lll.rainbow_repair(G, H, C, ns.m, derive_seed(ns.seed, "repair"), ns.max_steps)
    out.update(repair_status=res.status, repair_steps=res.steps)
    if res.status == "no-initial-factor":
        return CommandResult(out, EXIT_ABSENT)
    if not res.ok:
        return CommandResult(out, EXIT_TIMEOUT)
    _verify(fc.is_factor(G, H, res.factor), "repaired factor is not an H-factor")
    _verify(col.is_rainbow(C, res.factor.edges), "repaired factor is not rainbow")
    out.update(verified=True, factor=res.factor.to_json())
    return CommandResult(out)


# -- output ---------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in seq]
    return obj


def render_text(payload: dict, indent: int = 0) -> str:
    lines = []
    width = max((len(str(k)) for k in payload), default=0)
    for key, value in payload.items():
        pad = " " * indent
        if isinstance(value, dict) and value and not {"copies", "vertices"} & value.keys():
            lines.append(f"{pad}{key}:")
            lines.append(render_text(value, indent + 2))
        else:
            text = json.dumps(_jsonable(value), sort_keys=True) if isinstance(value, (dict, list)) else value
            lines.append(f"{pad}{str(key).ljust(width)}  {text}")
    return "\n".join(lines)


COMMANDS = {
    "check-bounded": cmd_check_bounded,
    "find-factor": cmd_find_factor,
    "find-rainbow": cmd_find_rainbow,
    "count-switchings": cmd_count_switchings,
    "construct-switching": cmd_construct_switching,
    "shuffle-estimate": cmd_shuffle_estimate,
    "lll-census": cmd_lll_census,
    "multigraph-a": cmd_multigraph_a,
    "bounds": cmd_bounds,
    "gen": cmd_gen,
    "pipeline": cmd_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainbow-factors", description=__doc__.splitlines()[0])
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}
    subs["find-rainbow"].add_argument("--oracle", action="store_true", help="exhaustive search")
    subs["find-rainbow"].add_argument("--repair", action="store_true", help="switching repair heuristic")
    subs["shuffle-estimate"].add_argument("--csv", help="also write the estimates as CSV")
    subs["lll-census"].add_argument("--positive", action="store_true",
                                    help="keep only events realised by some factor")
    subs["lll-census"].add_argument("--dot", help="write the dependency graph in DOT format")
    b = subs["bounds"]
    b.add_argument("--c")
    b.add_argument("--cert-r", dest="cert_r", default="1")
    b.add_argument("--mean")
    b.add_argument("--t")
    b.add_argument("--janson-mu", dest="janson_mu")
    b.add_argument("--janson-delta", dest="janson_delta", default="0")
    b.add_argument("--janson-Delta", dest="janson_Delta", default="0")
    b.add_argument("--eta", default="0.5")
    b.add_argument("--empirical", action="store_true", help="run the Monte Carlo tail checks")
    g = subs["gen"]
    g.add_argument("--out-dir", dest="out_dir", default=".")
    g.add_argument("--name", default="instance")
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns = resolve(ns)
        result = COMMANDS[ns.command](ns)
        code = result.code
        payload = {"command": ns.command, "seed": ns.seed, **result}
    except InputError as exc:
        code, payload = EXIT_INPUT, {"command": ns.command, "error": "input", "message": str(exc)}
    except ResourceLimitError as exc:
        code, payload = EXIT_RESOURCE, {"command": ns.command, "error": "resource", "message": str(exc),
                                        "partial": exc.partial, "partial_valid": False}
    except VerificationError as exc:
        code, payload = EXIT_VERIFY, {"command": ns.command, "error": "verification", "message": str(exc)}
    payload["exit_code"] = code
    payload["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    payload = _jsonable(payload)
    text = json.dumps(payload, sort_keys=True, indent=2) if ns.json else render_text(payload)
    print(text, file=stdout)
    if getattr(ns, "out", None):
        Path(ns.out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
