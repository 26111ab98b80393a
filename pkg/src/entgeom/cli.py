"""Command-line entry point: ``entgeom <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors (bad spec, invalid state,
I/O) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .entropy import SubsystemEntropyCache
from .experiment import ExperimentConfig, run_fig2
from .geometry import (
    NumericalInconsistency,
    categorize,
    convoluted_area,
    convoluted_metric,
    filter_islands,
    geometry_report,
    ono_check,
)
from .specfile import literal_spec, load_spec, spec_to_dict
from .states import SpecError, build_state, random_mixed, random_pure
from .tensor import StateError, SubsetError, compose, projector, validate_density

DIGITS = 12


def _round(x):
    if isinstance(x, float):
        return x if not math.isfinite(x) else float(f"{x:.{DIGITS}g}")
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.generic):
        return _round(x.item())
    return x


def emit(obj) -> None:
    print(json.dumps(_round(obj), indent=2))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def weakly_coupled_pair(theta: float):
    """A Bell pair on AB whose A side weakly rotates C, in a product with |0>_D.

    (|000> + |11>(cos(theta/2)|0> + sin(theta/2)|1>)) / sqrt(2), then x |0>.
    """
    v = np.zeros(8, dtype=complex)
    v[0b000] = 1
    v[0b110] = math.cos(theta / 2)
    v[0b111] = math.sin(theta / 2)
    abc = validate_density(projector(v), (2, 2, 2))
    d = validate_density(projector([1, 0]), (2,))
    return compose(abc, d)


def cmd_analyze(args) -> int:
    state = build_state(load_spec(args.spec))
    report = geometry_report(state, args.volumes)
    emit(report.to_dict())
    return 0


def cmd_fig2(args) -> int:
    config = ExperimentConfig(
        samples=args.samples,
        seed=args.seed,
        rank=args.rank,
        csv_path=Path(args.out) if args.out else None,
        plot_path=Path(args.plot) if args.plot else None,
        inject_bell=args.inject_bell,
        workers=args.workers,
    )
    _, summary = run_fig2(config)
    emit(summary)
    return 0


def cmd_filter(args) -> int:
    state = build_state(load_spec(args.spec))
    report = filter_islands(state, query=args.subset, exhaustive=args.exhaustive, eps=args.eps)
    emit(asdict(report))
    return 0


def cmd_categorize(args) -> int:
    state = build_state(load_spec(args.spec))
    r = categorize(state, eps=args.eps)
    emit(
        {
            "pattern": r.pattern,
            "islands": r.islands,
            "pair_metric": r.pair_metric,
            "triple_area": r.triple_area,
            "vanishing_pairs": r.vanishing_pairs,
            "vanishing_triples": r.vanishing_triples,
        }
    )
    return 0


def cmd_monogamy(args) -> int:
    state = weakly_coupled_pair(args.theta)
    cache = SubsystemEntropyCache(state)
    m_ab, m_ac, m_bc = (convoluted_metric(cache, *p) for p in ((0, 1), (0, 2), (1, 2)))
    area = convoluted_area(cache, 0, 1, 2)
    measured = ono_check(m_ab, m_ac, m_bc, max(area, 0.0))
    symmetric = max(m_ac, m_bc)
    forced = ono_check(None, symmetric, symmetric, 0.0)
    emit(
        {
            "theta": args.theta,
            "metrics": {"AB": m_ab, "AC": m_ac, "BC": m_bc},
            "area_ABC": area,
            "measured": asdict(measured),
            "symmetric_premise": asdict(forced),
            "forced_m_ab": forced.selected_ab,
        }
    )
    return 0


def cmd_random(args) -> int:
    if args.pure:
        state = random_pure(args.dims, args.seed)
    else:
        state = random_mixed(args.dims, args.seed, args.rank)
    print(json.dumps(spec_to_dict(literal_spec(state))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entgeom", description="Entropic-geometry entanglement monotones.")
    sub = p.add_subparsers(dest="command", metavar="{analyze,fig2,filter,categorize,monogamy,random}")

    a = sub.add_parser("analyze", help="all pair metrics, triple areas, volumes and E for a spec file")
    a.add_argument("--spec", required=True)
    a.add_argument("--volumes", type=_int_list, default=None, help="volume sizes, e.g. 4,5 (default: all)")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("fig2", help="concurrence vs E on random rho12 x rho34 samples")
    f.add_argument("--samples", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--rank", type=int, default=4)
    f.add_argument("--out", help="CSV output path")
    f.add_argument("--plot", help="plot-data output path")
    f.add_argument("--inject-bell", action="store_true", help="append a Bell x Bell row")
    f.add_argument("--workers", type=int, default=1)
    f.set_defaults(func=cmd_fig2)

    fl = sub.add_parser("filter", help="island test for a subset, or exhaustive island partition")
    fl.add_argument("--spec", required=True)
    g = fl.add_mutually_exclusive_group(required=True)
    g.add_argument("--subset", type=_int_list)
    g.add_argument("--exhaustive", action="store_true")
    fl.add_argument("--eps", type=float, default=1e-8)
    fl.set_defaults(func=cmd_filter)

    c = sub.add_parser("categorize", help="vanishing pattern of pair metrics and triple areas")
    c.add_argument("--spec", required=True)
    c.add_argument("--eps", type=float, default=1e-8)
    c.set_defaults(func=cmd_categorize)

    m = sub.add_parser("monogamy", help="Ono-inequality check on a weakly coupled Bell pair")
    m.add_argument("--theta", type=float, default=0.2, help="coupling rotation angle")
    m.set_defaults(func=cmd_monogamy)

    r = sub.add_parser("random", help="print a literal spec for a seeded random state")
    r.add_argument("--dims", type=_int_list, required=True)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--rank", type=int, default=None)
    r.add_argument("--pure", action="store_true")
    r.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SpecError, StateError, SubsetError, NumericalInconsistency, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
