"""Command-line front end: ``bathflow {flow,ghz,run,sweep}``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .channels import dephase_all, ghz_offdiagonal_factor, pure_density
from .flow import DEFAULT_ETA, BathSpec, FullyLocalized, bath_exponent, flow_closed_form, stopping_frequency
from .models import AFMInstance, ghz_state, parse_edges, random_afm_instance
from .pauli import PauliParseError, format_number, parse_pauli_text
from .sweep import (
    DEFAULT_OMEGA_C,
    FIGURES,
    ConfigError,
    SweepConfig,
    figure_config,
    load_config,
    records_csv,
    run_point,
    run_sweep,
    run_trajectories,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
GHZ_CHECK_MAX_QUBITS = 12
GHZ_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha_list(text: str, n: int) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse --alpha {text!r}") from None
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise UsageError(f"--alpha lists {len(values)} couplings for {n} qubits")
    return values


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_flow(args) -> int:
    h = parse_pauli_text(args.hamiltonian)
    bath = BathSpec(args.omega_c, _alpha_list(args.alpha, h.n))
    if args.auto:
        try:
            omega0 = stopping_frequency(h, bath, args.eta)
        except FullyLocalized as exc:
            print(f"fully localized: no self-consistent cutoff above {format_number(exc.floor)}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"omega0* = {format_number(omega0)}")
    elif args.omega0 is None:
        raise UsageError("give --omega0 or --auto")
    else:
        omega0 = args.omega0
    h_eff = flow_closed_form(h, bath, omega0)
    print(f"omega_c = {format_number(bath.omega_c)}")
    print(f"omega0 = {format_number(omega0)}")
    print("string,c,delta,delta_eff")
    for s, c in h.items():
        print(f"{s.label},{format_number(bath_exponent(s, bath))},{format_number(c)},{format_number(h_eff[s])}")
    print(f"H_eff = {h_eff}")
    return EXIT_OK


def cmd_ghz(args) -> int:
    analytic = ghz_offdiagonal_factor(args.n, args.alpha, args.ratio)
    print(f"analytic = {format_number(analytic)}")
    if args.n > GHZ_CHECK_MAX_QUBITS:
        print("measured = skipped (n > 12)")
        return EXIT_OK
    bath = BathSpec.uniform(args.n, args.alpha, 1.0)
    rho = dephase_all(pure_density(ghz_state(args.n)), bath, args.ratio)
    measured = 2.0 * abs(rho[0, -1])
    print(f"measured = {format_number(measured)}")
    if abs(measured - analytic) > GHZ_TOL:
        print("analytic and channel values disagree", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _point_config(args) -> SweepConfig:
    if args.config:
        return load_config(args.config, overrides={"omega_c": args.omega_c, "eta": args.eta})
    if args.hamiltonian:
        return SweepConfig(
            hamiltonian=parse_pauli_text(args.hamiltonian),
            omega_c=args.omega_c or DEFAULT_OMEGA_C,
            eta=args.eta or DEFAULT_ETA,
        )
    if args.edges:
        inst = AFMInstance(args.n, parse_edges(args.edges), args.s)
    else:
        inst = random_afm_instance(args.n, args.degree, args.seed, args.s)
    return SweepConfig(instance=inst, omega_c=args.omega_c or DEFAULT_OMEGA_C, eta=args.eta or DEFAULT_ETA)


def cmd_run(args) -> int:
    cfg = _point_config(args)
    record = run_point(cfg, args.s, args.alpha)
    sys.stdout.write(records_csv([record]))
    return EXIT_NUMERIC if any(f.startswith("error") for f in record.flags) else EXIT_OK


def cmd_sweep(args) -> int:
    out_dir = Path(args.out) if args.out else None
    overrides = {
        "omega_c": args.omega_c,
        "eta": args.eta,
        "workers": args.workers,
        "alphas": _float_list(args.alpha) if args.alpha else None,
        "s_values": _float_list(args.s) if args.s else None,
    }
    if args.figure:
        if args.config:
            raise UsageError("--figure and a config file are mutually exclusive")
        cfg = figure_config(args.figure, out_dir or Path("."))
        changes = {k: v for k, v in overrides.items() if v is not None}
        if changes:
            if cfg.instance is not None and changes.get("s_values"):
                changes["instance"] = cfg.instance.with_s(changes["s_values"][0])
            cfg = dataclasses.replace(cfg, **changes)
    elif args.config:
        cfg = load_config(args.config, out_dir, overrides)
    else:
        raise UsageError("give a config file or --figure")

    if cfg.mode == "trajectories":
        rows = run_trajectories(cfg)
        print(f"trajectories: {len(cfg.exponents)} curves, {len(rows)} samples")
    else:
        records = run_sweep(cfg)
        flagged = [r for r in records if r.flags]
        errors = [r for r in records if r.regime == "error"]
        print(f"grid: {len(set(cfg.s_values))} s x {len(set(cfg.alphas))} alpha = {len(records)} points")
        print(f"flagged points: {len(flagged)} (errors: {len(errors)})")
        for r in flagged:
            print(f"  s={format_number(r.s)} alpha={format_number(r.alpha)}: {';'.join(r.flags)}")
    for path in (cfg.csv_path, cfg.json_path):
        if path is not None:
            print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bathflow", description="Ohmic-bath effects on annealing Hamiltonians via poor man's scaling.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("flow", help="flow a Pauli-string Hamiltonian to a lower cutoff")
    f.add_argument("hamiltonian", help='Hamiltonian text, e.g. "0.5*XX + 0.25*ZZ"')
    f.add_argument("--alpha", required=True, help="coupling per qubit (comma list) or one value for all")
    f.add_argument("--omega-c", type=float, default=30.0, help="bath cutoff frequency (default 30)")
    f.add_argument("--omega0", type=float, help="final cutoff")
    f.add_argument("--auto", action="store_true", help="solve for the stopping cutoff instead of --omega0")
    f.add_argument("--eta", type=float, default=DEFAULT_ETA, help="margin for the stopping criterion (default 10)")
    f.set_defaults(func=cmd_flow)

    g = sub.add_parser("ghz", help="GHZ coherence suppression: analytic vs dense channel")
    g.add_argument("n", type=int, help="number of qubits")
    g.add_argument("--alpha", type=float, required=True, help="uniform coupling")
    g.add_argument("--ratio", type=float, required=True, help="omega0 / omega_c")
    g.set_defaults(func=cmd_ghz)

    r = sub.add_parser("run", help="evaluate a single (s, alpha) grid point")
    r.add_argument("--config", help="TOML config supplying the instance and bath")
    r.add_argument("--hamiltonian", help="inline Pauli-string Hamiltonian instead of the AFM model")
    r.add_argument("--n", type=int, default=12, help="qubits of the AFM instance (default 12)")
    r.add_argument("--degree", type=int, default=2, help="coupling-graph degree (default 2)")
    r.add_argument("--seed", type=int, default=1, help="graph seed (default 1)")
    r.add_argument("--edges", help="explicit edge list 'i-j,k-l,...'")
    r.add_argument("--s", type=float, default=0.8, help="annealing parameter (default 0.8)")
    r.add_argument("--alpha", type=float, required=True, help="uniform bath coupling")
    r.add_argument("--omega-c", type=float, help=f"bath cutoff (default {DEFAULT_OMEGA_C:g})")
    r.add_argument("--eta", type=float, help="stopping-criterion margin (default 10)")
    r.set_defaults(func=cmd_run)

    w = sub.add_parser("sweep", help="run a grid sweep from a config file or figure preset")
    w.add_argument("config", nargs="?", help="TOML config file")
    w.add_argument("--figure", choices=FIGURES, help="named preset configuration")
    w.add_argument("--out", help="output directory (relative output paths resolve here)")
    w.add_argument("--omega-c", type=float, help="override bath cutoff")
    w.add_argument("--eta", type=float, help="override stopping-criterion margin")
    w.add_argument("--alpha", help="override alpha grid (comma list)")
    w.add_argument("--s", help="override s grid (comma list)")
    w.add_argument("--workers", type=int, help="parallel worker processes (env BATHFLOW_WORKERS)")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, PauliParseError) as exc:
        print(f"bathflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"bathflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FullyLocalized, np.linalg.LinAlgError) as exc:
        print(f"bathflow: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
