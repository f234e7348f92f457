#!/usr/bin/env python3
"""
Main entry point for the spider-web graph toolkit.
Command-line interface for generating graphs, products, derangements,
lamplighter computations, isomorphism searches, spectra, convergence
reports and the verification suites.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv

from derangement import component_derangements, components, predict_components
from families import INFINITY, cycle, de_bruijn, rose, spider_web, theta_graph, theta_graph_M
from graph_core import BaseGraph, OrientedGraph
from graph_storage import GraphStorage, read_graph, write_graph
from lamplighter import (
    act_level,
    cayley_ball,
    evaluate,
    exp_X,
    finite_quotient_cayley,
    h_predicate,
    kesten_measure,
    normality_report,
    parse_word,
    schreier_level_graph,
    subgroup_triple,
    w_predicate,
)
from limits import convergence_report
from morphisms import (
    SearchLimits,
    SearchStatus,
    de_bruijn_sequence,
    eulerian_circuit,
    find_iso,
    hamiltonian_cycle,
    spiderweb_hamiltonian_cycle,
    verify_path,
)
from products import line_graph, tensor
from spectra import DEFAULT_EXPANSION_CAP, closed_form_spectrum, numeric_spectrum, spiderweb_charpoly, symmetrized_adjacency
from utils import InvalidParameterError, check_alphabet, format_report_table, handle_error, load_settings, setup_logging
from verification import SUITES, SuiteParams, VerificationCoordinator, exit_code, save_report

load_dotenv()

COMMANDS = ("gen", "product", "derange", "components", "lamplighter", "iso",
            "euler", "hamilton", "spectrum", "converge", "verify")
FAMILIES = ("debruijn", "cycle", "spiderweb", "theta", "rose", "schreier")
FORMATS = ("json", "dot", "csv")
GRAPH_FORMATS = ("json", "dot")


@dataclass
class RunConfig:
    """
    Validated parameters of one CLI run.

    Attributes:
        command: subcommand name
        params: subcommand parameters
        output_format: json, dot or csv
        seed: seed for every randomized step
        iso_cap: vertex cap for isomorphism and Hamiltonian searches
        node_cap: backtracking node cap
        degree_cap: largest characteristic polynomial that is expanded
        output_dir: directory for reports and generated files
    """

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    seed: int = 0
    iso_cap: int = 512
    node_cap: int = 200_000
    degree_cap: int = DEFAULT_EXPANSION_CAP
    output_dir: Path = Path("output")

    @property
    def limits(self) -> SearchLimits:
        return SearchLimits(self.iso_cap, self.node_cap)

    def validate(self):
        """Raise InvalidParameterError before anything is computed."""
        if self.command not in COMMANDS:
            raise InvalidParameterError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise InvalidParameterError(f"unknown output format {self.output_format!r}")
        if self.command in ("gen", "product") and self.output_format not in GRAPH_FORMATS:
            raise InvalidParameterError(f"graphs are written as json or dot, not {self.output_format}")
        if min(self.iso_cap, self.node_cap, self.degree_cap) < 1:
            raise InvalidParameterError("caps must be positive")

        p = self.params
        if p.get("family") is not None and p["family"] not in FAMILIES:
            raise InvalidParameterError(f"unknown family {p['family']!r}; expected one of {FAMILIES}")
        for k in ([p["k"]] if p.get("k") is not None else []) + list(p.get("k_values") or []):
            check_alphabet(k)
        for name in ("n", "nmax", "r", "rmax"):
            if p.get(name) is not None and p[name] < 0:
                raise InvalidParameterError(f"--{name} must be non-negative")
        for name in ("mmax", "q_max", "l", "bound", "samples"):
            if p.get(name) is not None and p[name] < 1:
                raise InvalidParameterError(f"--{name.replace('_', '-')} must be positive")
        m = p.get("m")
        if m is not None and m != INFINITY and m < 1:
            raise InvalidParameterError("--m must be positive or 'inf'")
        if self.command == "verify" and p.get("suite") not in SUITES + ("all",):
            raise InvalidParameterError(f"unknown suite {p.get('suite')!r}; expected one of {SUITES} or 'all'")


def cycle_length(text: str):
    """argparse type for --m: a positive integer or 'inf'."""
    if text.lower() in ("inf", "infinity"):
        return INFINITY
    return int(text)


def parse_pairs(text: str) -> List[tuple]:
    """'2,2;4,4;8,8' -> [(2, 2), (4, 4), (8, 8)]."""
    try:
        return [tuple(int(x) for x in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]
    except ValueError as e:
        raise InvalidParameterError(f"bad --pairs value {text!r}") from e


def build_family(p: Dict[str, Any]) -> BaseGraph:
    """Construct the graph named by --family and its size parameters."""
    family, k, n, m = p["family"], p.get("k") or 2, p.get("n") or 0, p.get("m") or 1
    window = p.get("window")
    if family == "debruijn":
        return de_bruijn(k, n)
    if family == "cycle":
        # --n is the cycle length for "components --family cycle --n 4 --m 10"
        return cycle(n if n else m, window)
    if family == "spiderweb":
        return spider_web(k, n, m, window)
    if family == "theta":
        return theta_graph(k, n) if m == 1 else theta_graph_M(k, n, m)
    if family == "rose":
        return rose(k)
    return schreier_level_graph(k, n)


def load_graph(ref: str, config: RunConfig) -> BaseGraph:
    """A graph file path, or the name of a graph in the local store."""
    if Path(ref).exists():
        return read_graph(ref)
    stored = GraphStorage(config.output_dir / "graphs").get_graph(ref)
    if stored is None:
        raise FileNotFoundError(ref)
    return stored


def input_graph(config: RunConfig) -> BaseGraph:
    p = config.params
    if p.get("graph"):
        return load_graph(p["graph"], config)
    if p.get("family"):
        return build_family(p)
    raise InvalidParameterError("give a graph file or --family")


def output_path(config: RunConfig, stem: str, suffix: Optional[str] = None) -> Path:
    explicit = config.params.get("out")
    if explicit:
        return Path(explicit)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config.output_dir / f"{stem}.{suffix or config.output_format}"


def emit_graph(config: RunConfig, graph: BaseGraph, stem: str) -> int:
    if config.output_format not in GRAPH_FORMATS:
        raise InvalidParameterError(f"graphs are written as json or dot, not {config.output_format}")
    path = output_path(config, stem)
    write_graph(path, graph)
    if config.params.get("store"):
        GraphStorage(config.output_dir / "graphs").save_graph(config.params["store"], graph)
    print(f"✅ Wrote {path} ({graph.n} vertices, {graph.m} edges)")
    return 0


def emit_json(config: RunConfig, data: Dict[str, Any], stem: str) -> int:
    text = json.dumps(data, indent=2, default=str)
    print(text)
    if config.params.get("out"):
        output_path(config, stem, "json").write_text(text)
    return 0


def write_csv(path: Path, rows: Sequence[Dict[str, Any]]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        if rows:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    print(f"✅ Wrote {path} ({len(rows)} rows)")


def family_stem(p: Dict[str, Any]) -> str:
    parts = [p.get("family") or "graph"]
    for key in ("k", "n", "m"):
        if p.get(key) is not None:
            parts.append(f"{key}{p[key]}")
    return "-".join(parts)


def cmd_gen(config: RunConfig) -> int:
    return emit_graph(config, build_family(config.params), family_stem(config.params))


def cmd_product(config: RunConfig) -> int:
    p = config.params
    g = load_graph(p["first"], config)
    if p["op"] == "line":
        if not isinstance(g, OrientedGraph):
            raise InvalidParameterError("line graphs are taken of oriented graphs")
        return emit_graph(config, line_graph(g), "line")
    if not p.get("second"):
        raise InvalidParameterError("the tensor product needs two graphs")
    return emit_graph(config, tensor(g, load_graph(p["second"], config)), "tensor")


def cmd_derange(config: RunConfig) -> int:
    g = input_graph(config)
    per_component = component_derangements(g)
    data = {
        "components": len(per_component),
        "derangements": [d for _, d in per_component],
    }
    if len(per_component) == 1:
        data["derangement"] = per_component[0][1]
    return emit_json(config, data, "derange")


def cmd_components(config: RunConfig) -> int:
    p = config.params
    g = input_graph(config)
    M = p.get("m") or 1
    prediction = predict_components(g, M)
    data = prediction.to_dict()
    if M != INFINITY:
        data["union_find"] = len(components(tensor(g, cycle(M))))
    emit_json(config, data, "components")
    if prediction.discrepancy:
        print(f"⚠️  gcd formula gives {prediction.canonical}, residue formula gives {prediction.residue_formula}")
    if M != INFINITY and data["union_find"] != prediction.canonical:
        return 1
    return 0


def cmd_lamplighter(config: RunConfig) -> int:
    p = config.params
    k, task = p.get("k") or 2, p["task"]
    if task == "eval":
        word = parse_word(p.get("word") or "")
        g = evaluate(word, k)
        return emit_json(config, {"element": str(g), "exp_X": exp_X(word), "shift": g.shift}, "eval")
    if task == "act":
        if not p.get("x"):
            raise InvalidParameterError("--x is required for the act task")
        image = act_level(parse_word(p.get("word") or ""), p["x"], k)
        return emit_json(config, {"x": p["x"], "image": image}, "act")
    if task in ("normality", "triple"):
        n, m = p.get("n") or 0, p.get("m") or 1
        pred = h_predicate(n, m) if p.get("subgroup", "H") == "H" else w_predicate(n, m)
        if task == "normality":
            report = normality_report(pred, k, p.get("bound") or 6)
            return emit_json(config, {"subgroup": p.get("subgroup"), "N": n, "M": m, **report.to_dict()}, "normality")
        triple = subgroup_triple(pred, k)
        return emit_json(config, {"subgroup": p.get("subgroup"), "N": n, "M": m, "s": triple.s, "v": str(triple.v)}, "triple")
    if task == "kesten":
        measure = kesten_measure(k, p.get("q_max") or 30)
        write_csv(output_path(config, f"kesten-k{k}", "csv"), measure.to_csv_rows())
        print(f"📊 Total mass {float(measure.total_mass()):.12f}")
        return 0
    if task in ("cayley", "cayley-ball"):
        r = 2 if p.get("r") is None else p["r"]
        return emit_graph(config, cayley_ball(k, r).graph, f"cayley-k{k}-r{r}")
    if task == "quotient":
        n, l = p.get("n") or 1, p.get("l") or 1
        return emit_graph(config, finite_quotient_cayley(k, n, l), f"quotient-k{k}-n{n}-l{l}")
    return emit_graph(config, schreier_level_graph(k, p.get("n") or 0), f"schreier-k{k}-n{p.get('n') or 0}")


def cmd_iso(config: RunConfig) -> int:
    p = config.params
    g, h = load_graph(p["first"], config), load_graph(p["second"], config)
    roots = tuple(p["roots"]) if p.get("roots") else None
    result = find_iso(g, h, p.get("kind") or "weak", roots=roots, limits=config.limits)
    data: Dict[str, Any] = {"status": result.status.value, "kind": p.get("kind"), "nodes": result.nodes}
    if result.found:
        phi = result.witness.morphism
        data["vertex_map"] = {g.name(v): h.name(w) for v, w in enumerate(phi.vertex_map)}
    emit_json(config, data, "iso")
    return 3 if result.status is SearchStatus.UNDECIDED else 0


def cmd_euler(config: RunConfig) -> int:
    g = input_graph(config)
    circuit = eulerian_circuit(g)
    ok = verify_path(circuit, "euler")
    emit_json(config, {"length": len(circuit), "start": g.name(circuit.start),
                       "edges": list(circuit.edges), "verified": ok}, "euler")
    return 0 if ok else 1


def cmd_hamilton(config: RunConfig) -> int:
    p = config.params
    if p.get("sequence"):
        return emit_json(config, {"k": p.get("k") or 2, "n": p.get("n"),
                                  "sequence": de_bruijn_sequence(p.get("k") or 2, p.get("n") or 1)}, "sequence")
    if not p.get("graph") and p.get("family") == "spiderweb" and p.get("m") != INFINITY:
        path = spiderweb_hamiltonian_cycle(p.get("k") or 2, p.get("n") or 0, p.get("m") or 1)
        status = SearchStatus.FOUND
    else:
        result = hamiltonian_cycle(input_graph(config), config.limits)
        path, status = result.path, result.status
    data: Dict[str, Any] = {"status": status.value}
    if path is not None:
        data["vertices"] = [path.graph.name(v) for v in path.vertices()]
        data["verified"] = verify_path(path, "hamilton")
    emit_json(config, data, "hamilton")
    if status is SearchStatus.UNDECIDED:
        return 3
    return 0 if path is None or data["verified"] else 1


def cmd_spectrum(config: RunConfig) -> int:
    p = config.params
    k, n, m = p.get("k") or 2, p.get("n") or 0, p.get("m") or 1
    charpoly = spiderweb_charpoly(k, n, m)
    print(f"🧮 charpoly = {charpoly}")
    if p.get("expand"):
        print(f"🧮 expanded = {charpoly.expand(config.degree_cap).as_expr()}")
    measure = closed_form_spectrum(k, n, m)
    write_csv(output_path(config, f"spectrum-k{k}-n{n}-m{m}", "csv"), measure.to_csv_rows())
    if p.get("numeric"):
        numeric = numeric_spectrum(symmetrized_adjacency(spider_web(k, n, m)))
        closed = measure.multiset()
        worst = max((abs(x - y) for x, y in zip(numeric, closed)), default=0.0)
        print(f"🔢 numeric vs closed form: max deviation {worst:.3e}")
        return 0 if len(numeric) == len(closed) and worst <= 1e-8 * max(1, 2 * k) else 1
    return 0


def cmd_converge(config: RunConfig) -> int:
    p = config.params
    k = p.get("k") or 2
    rows = convergence_report(k, parse_pairs(p.get("pairs") or "2,2;4,4;8,8"), p.get("rmax") or 0, p.get("q_max") or 30)
    write_csv(output_path(config, f"converge-k{k}", "csv"), [row.to_dict() for row in rows])
    return 0


def cmd_verify(config: RunConfig) -> int:
    p = config.params
    params = SuiteParams(
        ks=tuple(p["k_values"]) if p.get("k_values") else None,
        n_max=p.get("nmax"),
        m_max=p.get("mmax"),
        bound=p.get("bound") or 6,
        samples=p.get("samples") or 10_000,
    )
    coordinator = VerificationCoordinator(params, config.seed, config.limits)
    results = coordinator.run(p["suite"])
    print(format_report_table([r.to_dict() for r in results]))
    path = Path(p["out"]) if p.get("out") else config.output_dir / f"report-{p['suite']}.json"
    if save_report(results, path, config.seed):
        print(f"📄 Report written to {path}")
    return exit_code(results)


HANDLERS = {
    "gen": cmd_gen,
    "product": cmd_product,
    "derange": cmd_derange,
    "components": cmd_components,
    "lamplighter": cmd_lamplighter,
    "iso": cmd_iso,
    "euler": cmd_euler,
    "hamilton": cmd_hamilton,
    "spectrum": cmd_spectrum,
    "converge": cmd_converge,
    "verify": cmd_verify,
}


def run(config: RunConfig) -> int:
    """
    Validate and execute one subcommand.

    Args:
        config: run configuration

    Returns:
        Exit code: 0 success, 1 failed check, 2 invalid input, 3 undecided search
    """
    try:
        config.validate()
        logging.info(f"Running {config.command} with {config.params} (seed={config.seed})")
        return HANDLERS[config.command](config)
    except Exception as e:
        message, code = handle_error(e, config.command)
        print(message)
        return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="output_format", choices=FORMATS, default="json")
    common.add_argument("--output-dir", default=None, help="defaults to SPIDERWEB_OUTPUT_DIR or ./output")
    common.add_argument("--iso-cap", type=int, default=None)
    common.add_argument("--node-cap", type=int, default=None)
    common.add_argument("--degree-cap", type=int, default=DEFAULT_EXPANSION_CAP)
    common.add_argument("--log-level", default=None)
    parser = argparse.ArgumentParser(description="Spider-web, de Bruijn and lamplighter graph toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def family_args(p, graph_positional: bool = False):
        if graph_positional:
            p.add_argument("graph", nargs="?", help="graph file (.json/.dot) or stored graph name")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--k", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=cycle_length)
        p.add_argument("--window", type=int)
        p.add_argument("--out")

    gen = sub.add_parser("gen", help="generate a graph family", parents=[common])
    family_args(gen)
    gen.add_argument("--store", help="also save under this name in the local graph store")
    gen.set_defaults(family="spiderweb")

    product = sub.add_parser("product", help="tensor product or line graph", parents=[common])
    product.add_argument("first")
    product.add_argument("second", nargs="?")
    product.add_argument("--op", choices=("tensor", "line"), default="tensor")
    product.add_argument("--out")
    product.add_argument("--store")

    for name, text in (("derange", "graph derangement"), ("components", "components of g ⊗ C_M"),
                       ("euler", "Euler circuit"), ("hamilton", "Hamiltonian cycle")):
        family_args(sub.add_parser(name, help=text, parents=[common]), graph_positional=True)
    sub.choices["hamilton"].add_argument("--sequence", action="store_true",
                                         help="print the de Bruijn sequence for --k and --n")

    lamp = sub.add_parser("lamplighter", help="lamplighter group computations", parents=[common])
    lamp.add_argument("task", choices=("eval", "act", "normality", "triple", "kesten", "cayley", "cayley-ball", "quotient", "schreier"))
    lamp.add_argument("--k", type=int, default=2)
    lamp.add_argument("--word", default="")
    lamp.add_argument("--x")
    lamp.add_argument("--n", type=int)
    lamp.add_argument("--m", type=cycle_length)
    lamp.add_argument("--l", type=int)
    lamp.add_argument("--r", type=int)
    lamp.add_argument("--subgroup", choices=("H", "W"), default="H")
    lamp.add_argument("--bound", type=int, default=6)
    lamp.add_argument("--q-max", "--qmax", dest="q_max", type=int, default=30)
    lamp.add_argument("--out")

    iso = sub.add_parser("iso", help="isomorphism search", parents=[common])
    iso.add_argument("first")
    iso.add_argument("second")
    iso.add_argument("--kind", choices=("weak", "strong"), default="weak")
    iso.add_argument("--roots", type=int, nargs=2)
    iso.add_argument("--out")

    spectrum = sub.add_parser("spectrum", help="spider-web spectrum", parents=[common])
    spectrum.add_argument("--k", type=int, default=2)
    spectrum.add_argument("--n", type=int, default=0)
    spectrum.add_argument("--m", type=int, default=1)
    spectrum.add_argument("--numeric", action="store_true")
    spectrum.add_argument("--expand", action="store_true")
    spectrum.add_argument("--out")

    converge = sub.add_parser("converge", help="Benjamini-Schramm convergence report", parents=[common])
    converge.add_argument("--k", type=int, default=2)
    converge.add_argument("--pairs", default="2,2;4,4;8,8")
    converge.add_argument("--rmax", type=int, default=2)
    converge.add_argument("--q-max", "--qmax", dest="q_max", type=int, default=30)
    converge.add_argument("--out")

    verify = sub.add_parser("verify", help="run a verification suite", parents=[common])
    verify.add_argument("suite", choices=SUITES + ("all",))
    verify.add_argument("--k", dest="k_values", type=int, action="append")
    verify.add_argument("--nmax", type=int)
    verify.add_argument("--mmax", type=int)
    verify.add_argument("--bound", type=int, default=6)
    verify.add_argument("--samples", type=int, default=10_000)
    verify.add_argument("--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, configure logging and run the subcommand."""
    settings = load_settings()
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.log_level, settings.log_file)

    global_keys = {"command", "seed", "output_format", "output_dir", "iso_cap", "node_cap", "degree_cap", "log_level"}
    config = RunConfig(
        command=args.command,
        params={key: value for key, value in vars(args).items() if key not in global_keys},
        output_format=args.output_format,
        seed=args.seed,
        iso_cap=args.iso_cap or settings.iso_cap,
        node_cap=args.node_cap or settings.node_cap,
        degree_cap=args.degree_cap,
        output_dir=Path(args.output_dir) if args.output_dir else settings.output_dir,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
