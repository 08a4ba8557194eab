"""
Command-line interface for oreforge.

    oreforge define <file>
    oreforge compute <verb> <args...> [--spec FILE] [--json]
    oreforge verify <suite> [--seed N] [--samples N] [--mutate M]
    oreforge builtin <name>

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 validation error.
"""

import argparse
import json
import logging
import random
import sys
from typing import Dict, List, Optional, Sequence

try:
    from .abelian import Ambient, group_from_generators
    from .catalog import BuiltinCatalog
    from .config import Config, load_config, setup_logging
    from .eigen import (
        Section, cocycle_table, ev_structure, homogeneous_components, presentation, torsion_block, weigh_generators,
        weight_ball,
    )
    from .endo import LinMap, MapKind, apply_map, is_involution, negation_map, transpose_map
    from .errors import DuplicateName, OreForgeError, ParseError, UnknownName
    from .exact import to_rational
    from .reports import (
        Report, components_report, emit, ev_report, good_report, group_report, presentation_report, torsion_report,
        verify_reports, weights_report,
    )
    from .spec_parser import TowerSpec, dumps_spec, export_spec, import_spec, parse_element, tower_to_spec
    from .tower import Tower, enveloping_tower, good_construction_report, opposite_tower, tensor_towers
    from .verify import MUTATIONS, SUITES, ElementSampler, run_suites
except ImportError:
    from abelian import Ambient, group_from_generators
    from catalog import BuiltinCatalog
    from config import Config, load_config, setup_logging
    from eigen import (
        Section, cocycle_table, ev_structure, homogeneous_components, presentation, torsion_block, weigh_generators,
        weight_ball,
    )
    from endo import LinMap, MapKind, apply_map, is_involution, negation_map, transpose_map
    from errors import DuplicateName, OreForgeError, ParseError, UnknownName
    from exact import to_rational
    from reports import (
        Report, components_report, emit, ev_report, good_report, group_report, presentation_report, torsion_report,
        verify_reports, weights_report,
    )
    from spec_parser import TowerSpec, dumps_spec, export_spec, import_spec, parse_element, tower_to_spec
    from tower import Tower, enveloping_tower, good_construction_report, opposite_tower, tensor_towers
    from verify import MUTATIONS, SUITES, ElementSampler, run_suites

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

VERBS = ("mul", "opposite", "tensor", "envelope", "good", "apply", "weights", "ev", "group", "components",
         "presentation", "torsion", "transpose-check")


class UsageError(OreForgeError):
    """Bad command-line arguments for a compute verb."""


class Workspace:
    """Towers and maps known to one invocation: builtins plus loaded spec files."""

    def __init__(self, catalog: Optional[BuiltinCatalog] = None):
        self.catalog = catalog or BuiltinCatalog()
        self.towers: Dict[str, TowerSpec] = {}
        self.reports: List[Report] = []

    def register(self, loaded: TowerSpec, name: Optional[str] = None) -> str:
        name = name or loaded.name or f"tower{len(self.towers) + 1}"
        if name in self.towers:
            raise DuplicateName(f"tower {name!r} is already defined")
        self.towers[name] = loaded
        logger.info(f"Registered tower {name}: {loaded.tower.describe()}")
        return name

    def load_file(self, path: str) -> str:
        return self.register(import_spec(path))

    def spec(self, name: str) -> TowerSpec:
        if name in self.towers:
            return self.towers[name]
        return self.catalog.load(name)

    def tower(self, name: str) -> Tower:
        return self.spec(name).tower

    def map(self, tower_name: str, map_name: str) -> LinMap:
        loaded = self.spec(tower_name)
        if map_name in loaded.maps:
            return loaded.maps[map_name]
        if map_name == "transpose":
            return transpose_map(loaded.tower)
        if map_name == "negation":
            return negation_map(loaded.tower)
        raise UnknownName(f"tower {tower_name} has no map {map_name!r}; known: {', '.join(loaded.maps) or 'none'}")

    def log(self, report: Report) -> Report:
        self.reports.append(report)
        return report


def parse_weight(text: str, ambient: Ambient):
    """'2', '1/2' or '(1, 2)'."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    try:
        return ambient.check([to_rational(part) for part in body.split(",")])
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot read weight {text!r}")


def _need(args: Sequence[str], count: int, usage: str) -> None:
    if len(args) < count:
        raise UsageError(f"usage: compute {usage}")


def cmd_define(ws: Workspace, path: str) -> Report:
    name = ws.load_file(path)
    loaded = ws.towers[name]
    report = Report("define")
    report.add("name", name)
    report.add("tower", loaded.tower.describe())
    report.add("construction", loaded.tower.construction_kind())
    report.add("levels", [level.describe() for level in loaded.tower.levels])
    report.add("maps", [m.describe() for m in loaded.maps.values()])
    return ws.log(report)


def _weighted(ws: Workspace, tower_name: str, map_names: Sequence[str]):
    tower = ws.tower(tower_name)
    return weigh_generators(tower, [ws.map(tower_name, m) for m in map_names])


def cmd_compute(ws: Workspace, verb: str, args: Sequence[str], config: Config, options: argparse.Namespace) -> Report:
    """Run one computation verb; returns its report."""
    if verb == "mul":
        _need(args, 3, "mul TOWER A B [C ...]")
        tower = ws.tower(args[0])
        factors = [parse_element(tower, a) for a in args[1:]]
        result = factors[0]
        for f in factors[1:]:
            result = result * f
        report = Report("mul").add("tower", args[0]).add("factors", [f.render() for f in factors])
        report.add("result", result.render())
        return ws.log(report)

    if verb == "opposite":
        _need(args, 1, "opposite TOWER")
        tower = ws.tower(args[0])
        op = opposite_tower(tower)
        spec = tower_to_spec(op.target)
        report = Report("opposite").add("tower", args[0]).add("opposite", op.target.describe())
        report.add("levels", [level.describe() for level in op.target.levels])
        report.add("spec", json.dumps(spec, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
        if options.out:
            export_spec(op.target, options.out)
            report.add("spec_file", options.out)
        return ws.log(report)

    if verb in ("tensor", "envelope"):
        if verb == "tensor":
            _need(args, 2, "tensor TOWER_A TOWER_B")
            product = tensor_towers(ws.tower(args[0]), ws.tower(args[1]), name=f"{args[0]}⊗{args[1]}")
        else:
            _need(args, 1, "envelope TOWER")
            product, _ = enveloping_tower(ws.tower(args[0]))
        report = Report(verb).add("towers", list(args[:2] if verb == "tensor" else args[:1]))
        report.add("product", product.tower.describe())
        report.add("construction", product.tower.construction_kind())
        report.add("left", [f"{g} -> {h}" for g, h in product.left.renaming.items()])
        report.add("right", [f"{g} -> {h}" for g, h in product.right.renaming.items()])
        if options.out:
            export_spec(product.tower, options.out)
            report.add("spec_file", options.out)
        return ws.log(report)

    if verb == "good":
        _need(args, 1, "good TOWER")
        return ws.log(good_report(good_construction_report(ws.tower(args[0]))))

    if verb == "apply":
        _need(args, 3, "apply TOWER MAP ELEMENT")
        tower = ws.tower(args[0])
        m = ws.map(args[0], args[1])
        a = parse_element(tower, args[2])
        report = Report("apply").add("tower", args[0]).add("map", m.describe())
        report.add("element", a.render()).add("image", apply_map(m, a).render())
        return ws.log(report)

    if verb == "weights":
        _need(args, 2, "weights TOWER MAP [MAP ...]")
        return ws.log(weights_report(_weighted(ws, args[0], args[1:])))

    if verb == "ev":
        _need(args, 2, "ev TOWER MAP [MAP ...]")
        wt = _weighted(ws, args[0], args[1:])
        return ws.log(ev_report(wt, ev_structure(wt)))

    if verb == "group":
        _need(args, 2, "group additive|multiplicative WEIGHT [WEIGHT ...]")
        if args[0] not in ("additive", "multiplicative"):
            raise UsageError(f"ambient must be additive or multiplicative, not {args[0]!r}")
        dim = args[1].count(",") + 1
        ambient = Ambient.additive(dim) if args[0] == "additive" else Ambient.multiplicative(dim)
        gens = [parse_weight(w, ambient) for w in args[1:]]
        return ws.log(group_report(group_from_generators(gens, ambient)))

    if verb == "components":
        _need(args, 2, "components TOWER MAP [MAP ...] --element E")
        if not options.element:
            raise UsageError("components needs --element")
        wt = _weighted(ws, args[0], args[1:])
        a = parse_element(wt.tower, options.element)
        return ws.log(components_report(wt, a, homogeneous_components(wt, a)))

    if verb == "presentation":
        _need(args, 2, "presentation TOWER MAP [MAP ...] [--subgroup W ...]")
        wt = _weighted(ws, args[0], args[1:])
        subgroup = [parse_weight(w, wt.ambient) for w in options.subgroup] if options.subgroup else None
        eigen = config.eigen
        pres = presentation(wt, subgroup, eigen.section_degree_bound, eigen.constants_degree_bound)
        table = None
        units = pres.representatives + pres.torsion_representatives
        if all(wt.tower.is_unit(u) is not None for u in units):
            section = Section(wt, eigen.section_degree_bound, ev_structure(wt).group)
            ball = weight_ball(pres.group, min(eigen.weight_ball_height, 2))
            table = cocycle_table(wt, section, ball, triple_samples=config.samples,
                                  rng=random.Random(f"{config.seed}:cocycle"))
        return ws.log(presentation_report(wt, pres, table))

    if verb == "torsion":
        _need(args, 2, "torsion TOWER MAP [MAP ...] [--element E]")
        wt = _weighted(ws, args[0], args[1:])
        section = Section(wt, config.section_degree_bound)
        element = parse_element(wt.tower, options.element) if options.element else None
        block = torsion_block(wt, section, element, config.constants_degree_bound)
        return ws.log(torsion_report(block))

    if verb == "transpose-check":
        _need(args, 2, "transpose-check TOWER MAP")
        return ws.log(transpose_check(ws, args[0], args[1], config))

    raise UsageError(f"unknown verb {verb!r}; expected one of {', '.join(VERBS)}")


def transpose_check(ws: Workspace, tower_name: str, map_name: str, config: Config) -> Report:
    """Sampled anti-automorphism check: m(PQ) = m(Q)m(P) and m(m(P)) = P for involutions."""
    tower = ws.tower(tower_name)
    m = ws.map(tower_name, map_name)
    if m.kind is not MapKind.ANTI_AUTOMORPHISM:
        raise UsageError(f"{map_name} is a {m.kind.value}, not an antiAutomorphism")
    sampler = ElementSampler(tower, random.Random(f"{config.seed}:transpose-check"), config.max_degree,
                             config.coefficient_height)
    involution = is_involution(m)
    witness = None
    for _ in range(config.samples):
        p, q = sampler.element(), sampler.element()
        if m(p * q) != m(q) * m(p):
            witness = f"P = {p.render()}, Q = {q.render()}"
            break
    report = Report("transpose-check").add("tower", tower_name).add("map", m.describe())
    report.add("samples", config.samples).add("involution", involution)
    if witness:
        report.add("witness", witness)
    report.add("status", "PASS" if witness is None else "FAIL")
    return report


def cmd_verify(config: Config, suite: str, mutation: Optional[str] = None) -> List[Report]:
    results = run_suites(suite, config.sampling, config.eigen, config.workers, mutation)
    return verify_reports(results, config.seed, config.samples)


def cmd_builtin(catalog: BuiltinCatalog, name: str) -> str:
    """The builtin as a spec file, after validation."""
    loaded = catalog.load(name)
    return dumps_spec(loaded.tower, loaded.maps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oreforge",
                                     description="Exact computations in iterated Ore and skew Laurent towers.")
    parser.add_argument("--config", default=None, help="YAML config file (default: config/oreforge.yaml)")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text records")
    parser.add_argument("--log-level", default=None, help="override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    define = sub.add_parser("define", help="validate and register a tower spec file")
    define.add_argument("file")

    compute = sub.add_parser("compute", help="run a computation")
    compute.add_argument("verb", choices=VERBS)
    compute.add_argument("args", nargs="*")
    compute.add_argument("--spec", action="append", default=[], help="load a tower spec file first (repeatable)")
    compute.add_argument("--subgroup", action="append", default=[], help="subgroup generator weight for presentation")
    compute.add_argument("--element", default=None, help="element for components or the torsion division check")
    compute.add_argument("--out", default=None, help="write the resulting tower spec to this file")
    compute.add_argument("--samples", type=int, default=None)
    compute.add_argument("--seed", type=int, default=None)

    verify = sub.add_parser("verify", help="run property suites")
    verify.add_argument("suite", choices=SUITES + ("all",))
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--samples", type=int, default=None)
    verify.add_argument("--workers", type=int, default=None)
    verify.add_argument("--mutate", choices=MUTATIONS, default=None, help="run against a deliberately broken kernel")

    builtin = sub.add_parser("builtin", help="print a builtin tower spec")
    builtin.add_argument("name", nargs="?", default=None)
    builtin.add_argument("--list", action="store_true")
    return parser


class _Overrides(Config):
    """Config with command-line overrides on top of a loaded config."""

    def __init__(self, base: Config, seed: Optional[int] = None, samples: Optional[int] = None,
                 workers: Optional[int] = None):
        self.config_path = base.config_path
        self._config = base._config
        self._seed = seed
        self._samples = samples
        self._workers = workers

    @property
    def seed(self) -> int:
        return self._seed if self._seed is not None else super().seed

    @property
    def samples(self) -> int:
        return self._samples if self._samples is not None else super().samples

    @property
    def workers(self) -> int:
        return self._workers if self._workers is not None else super().workers


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        options = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    config = load_config(options.config)
    config = _Overrides(config, getattr(options, "seed", None), getattr(options, "samples", None),
                        getattr(options, "workers", None))
    setup_logging(config)
    if options.log_level:
        logging.getLogger().setLevel(options.log_level.upper())

    try:
        catalog = BuiltinCatalog()
        catalog.self_test()
        if options.command == "builtin":
            if options.list or not options.name:
                print("\n".join(catalog.names()))
            else:
                print(cmd_builtin(catalog, options.name))
            return EXIT_OK

        if options.command == "verify":
            reports = cmd_verify(config, options.suite, options.mutate)
            print(emit(reports, options.json))
            return EXIT_OK if reports[-1].get("status") == "PASS" else EXIT_VERIFY_FAILED

        ws = Workspace(catalog)
        if options.command == "define":
            print(emit([cmd_define(ws, options.file)], options.json))
            return EXIT_OK

        for path in options.spec:
            ws.load_file(path)
        report = cmd_compute(ws, options.verb, options.args, config, options)
        print(emit([report], options.json))
        if report.kind == "transpose-check" and report.get("status") != "PASS":
            return EXIT_VERIFY_FAILED
        return EXIT_OK
    except (ParseError, UnknownName, UsageError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OreForgeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
