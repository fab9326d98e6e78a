"""Command-line entry point: figure reproductions, custom sweeps, selftest.

Results are written as CSV for external plotting, with a short summary table
on stdout. Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import experiments
from .channel import (
    LOS,
    NLOS,
    array_response,
    build_frequency_grid,
    gen_channels,
    sample_path_set,
)
from .experiments import (
    BANDWIDTH_HZ_GRID,
    RIS_ELEMENTS_GRID,
    SNR_DB_GRID,
    SWEEP_VARIABLES,
    ScenarioConfig,
    SweepResult,
    run_sweep,
    schemes_for,
)
from .phase_design import design_central, design_ideal, design_mccm, design_random
from .rate_eval import (
    LinkBudget,
    effective_channel,
    ideal_rate,
    mrt_beamformer,
    rate_upper_bound,
    subcarrier_rate,
    sum_rate,
    z_factor,
)

CSV_HEADER = "scenario,scheme,sweep_variable,sweep_value,mean_rate_bits,std_error_bits,trials,seed"

_DEFAULTS = ScenarioConfig()


class UsageError(Exception):
    """Bad flags or flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 (argparse hook)
        raise UsageError(message)


@dataclass
class CliConfig:
    subcommand: str
    figure_id: int | None = None
    scenario: str = LOS
    schemes: tuple[str, ...] = ()
    sweep_variable: str = "snr_db"
    sweep_values: tuple[float, ...] = ()
    carrier_hz: float = _DEFAULTS.carrier_hz
    bandwidth_hz: float = _DEFAULTS.bandwidth_hz
    num_subcarriers: int = _DEFAULTS.num_subcarriers
    num_bs_antennas: int = _DEFAULTS.num_bs_antennas
    num_ris_elements: int = _DEFAULTS.num_ris_elements
    num_paths: int = _DEFAULTS.num_paths
    snr_db: tuple[float, ...] = _DEFAULTS.snr_db
    trials: int = _DEFAULTS.trials
    seed: int = _DEFAULTS.seed
    gain_mode: str = _DEFAULTS.gain_mode
    output_path: str = field(default="sweep.csv")


def _split_floats(raw: str, flag: str) -> tuple[float, ...]:
    values = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise UsageError(f"argument {flag}: invalid number {token!r}") from None
    if not values:
        raise UsageError(f"argument {flag}: expected at least one value")
    return tuple(values)


def _default_values(sweep_variable: str) -> tuple[float, ...]:
    grids = {
        "snr_db": SNR_DB_GRID,
        "bandwidth_hz": BANDWIDTH_HZ_GRID,
        "ris_elements": tuple(float(v) for v in RIS_ELEMENTS_GRID),
    }
    return grids[sweep_variable]


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="squintsim",
        description="Monte Carlo rate comparisons of RIS phase-design schemes "
        "over a wideband mmWave OFDM link.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add_run_flags(p: _Parser) -> None:
        p.add_argument("--trials", type=int, default=_DEFAULTS.trials, help="Monte Carlo trials per point")
        p.add_argument("--seed", type=int, default=_DEFAULTS.seed, help="base seed of the trial substreams")
        p.add_argument(
            "--gain-mode",
            choices=("unit", "random"),
            default=_DEFAULTS.gain_mode,
            help="path gains: complex standard normal or pinned to 1",
        )

    fig = sub.add_parser(
        "figure",
        help="run a preset benchmark sweep (2: SNR, 3: bandwidth, 4: surface size; 5 and 6: multipath)",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    fig.add_argument("--id", type=int, required=True, choices=(2, 3, 4, 5, 6), help="preset sweep id")
    add_run_flags(fig)
    fig.add_argument("--out", default=None, help="CSV output path (default figure<ID>.csv)")

    swp = sub.add_parser(
        "sweep",
        help="run a custom sweep",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    swp.add_argument("--scenario", choices=(LOS, NLOS), default=LOS, help="surface-to-user propagation")
    swp.add_argument(
        "--schemes",
        default=None,
        help="comma-separated scheme list (default: all schemes of the scenario)",
    )
    swp.add_argument("--var", choices=SWEEP_VARIABLES, default="snr_db", help="sweep variable")
    swp.add_argument("--values", default=None, help="comma-separated sweep values (default: built-in grid)")
    swp.add_argument("--carrier-hz", type=float, default=_DEFAULTS.carrier_hz, help="carrier frequency")
    swp.add_argument("--bandwidth-hz", type=float, default=_DEFAULTS.bandwidth_hz, help="total bandwidth")
    swp.add_argument("--subcarriers", type=int, default=_DEFAULTS.num_subcarriers, help="OFDM subcarriers")
    swp.add_argument("--bs-antennas", type=int, default=_DEFAULTS.num_bs_antennas, help="BS antennas")
    swp.add_argument("--ris-elements", type=int, default=_DEFAULTS.num_ris_elements, help="surface elements")
    swp.add_argument("--paths", type=int, default=_DEFAULTS.num_paths, help="user-side paths (nlos only)")
    swp.add_argument("--snr-db", default="10", help="operating SNR in dB for non-SNR sweeps")
    add_run_flags(swp)
    swp.add_argument("--out", default="sweep.csv", help="CSV output path")

    sub.add_parser("selftest", help="run the embedded invariant checks at small sizes")
    return parser


def parse_args(argv) -> CliConfig:
    """Parse flags into a CliConfig; raises UsageError on any bad input."""
    ns = _build_parser().parse_args(argv)

    if ns.subcommand == "selftest":
        return CliConfig(subcommand="selftest")

    if ns.subcommand == "figure":
        out = ns.out if ns.out is not None else f"figure{ns.id}.csv"
        return CliConfig(
            subcommand="figure",
            figure_id=ns.id,
            trials=ns.trials,
            seed=ns.seed,
            gain_mode=ns.gain_mode,
            output_path=out,
        )

    scenario = ns.scenario
    if ns.schemes is None:
        schemes = schemes_for(scenario)
    else:
        schemes = tuple(token.strip() for token in ns.schemes.split(",") if token.strip())
        if not schemes:
            raise UsageError("argument --schemes: expected at least one scheme")
        known = schemes_for(scenario)
        for scheme in schemes:
            if scheme not in experiments.ALL_SCHEMES:
                raise UsageError(
                    f"argument --schemes: unknown scheme {scheme!r} "
                    f"(known: {', '.join(experiments.ALL_SCHEMES)})"
                )
            if scheme not in known:
                raise UsageError(
                    f"argument --schemes: scheme {scheme!r} is not available with "
                    f"--scenario {scenario}"
                )
    values = _split_floats(ns.values, "--values") if ns.values is not None else _default_values(ns.var)
    if ns.var == "ris_elements":
        for v in values:
            if v != int(v) or v < 1:
                raise UsageError(f"argument --values: ris_elements needs positive integers, got {v}")
    snr_db = _split_floats(ns.snr_db, "--snr-db")
    if ns.trials < 1:
        raise UsageError(f"argument --trials: must be >= 1, got {ns.trials}")
    return CliConfig(
        subcommand="sweep",
        scenario=scenario,
        schemes=schemes,
        sweep_variable=ns.var,
        sweep_values=values,
        carrier_hz=ns.carrier_hz,
        bandwidth_hz=ns.bandwidth_hz,
        num_subcarriers=ns.subcarriers,
        num_bs_antennas=ns.bs_antennas,
        num_ris_elements=ns.ris_elements,
        num_paths=ns.paths,
        snr_db=snr_db,
        trials=ns.trials,
        seed=ns.seed,
        gain_mode=ns.gain_mode,
        output_path=ns.out,
    )


def _fmt(value: float) -> str:
    return format(value, ".10g")


def emit_csv(result: SweepResult, path: str) -> None:
    """Write the sweep rows as UTF-8 CSV with 10-significant-digit numbers."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in result.rows:
            fh.write(
                ",".join(
                    (
                        row.scenario,
                        row.scheme,
                        row.sweep_variable,
                        _fmt(row.sweep_value),
                        _fmt(row.mean_rate_bits),
                        _fmt(row.std_error_bits),
                        str(row.trials),
                        str(row.seed),
                    )
                )
                + "\n"
            )


def _print_summary(result: SweepResult) -> None:
    print(f"{'scenario':<9}{'scheme':<14}{'variable':<14}{'value':>14}{'mean rate':>12}{'std err':>11}")
    for row in result.rows:
        print(
            f"{row.scenario:<9}{row.scheme:<14}{row.sweep_variable:<14}"
            f"{row.sweep_value:>14.6g}{row.mean_rate_bits:>12.4f}{row.std_error_bits:>11.4f}"
        )


def _selftest_checks():
    rng = np.random.default_rng(4242)
    budget = LinkBudget.from_snr_db(10.0)

    def grid_symmetry():
        grid = build_frequency_grid(28e9, 2e9, 8)
        folded = grid.frequencies + grid.frequencies[::-1]
        return float(np.max(np.abs(folded - 2 * grid.carrier_hz)))

    def response_norm():
        worst = 0.0
        for n in (1, 2, 5, 8):
            for _ in range(20):
                vec = array_response(n, rng.uniform(-1, 1))
                worst = max(worst, abs(np.linalg.norm(vec) - 1.0))
        return worst

    def alignment_sum():
        worst = 0.0
        grid = build_frequency_grid(28e9, 2e9, 8)
        for _ in range(50):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            k = int(rng.integers(8))
            profile = design_ideal(paths, grid, 8, k)
            z = z_factor(paths, profile, grid, 8, k)
            worst = max(worst, abs(abs(z) - 8.0))
        return worst

    def aligned_closed_form():
        grid = build_frequency_grid(28e9, 2e9, 8)
        worst = 0.0
        for _ in range(50):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            k = int(rng.integers(8))
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_ideal(paths, grid, 8, k)
            rate = subcarrier_rate(effective_channel(channels.h_ris_user[k], profile, channels.h_bs_ris[k]), budget)
            expected = np.log2(1.0 + budget.snr_linear * 4 * 8**2)
            worst = max(worst, abs(rate - expected) / expected)
        return worst

    def jensen_bound():
        grid = build_frequency_grid(28e9, 2e9, 8)
        worst = -np.inf
        for _ in range(1000):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_random(rng, 8)
            mean_rate = sum_rate(channels, profile, budget).sum_rate_bits
            bound = rate_upper_bound(paths, profile, grid, 8, 4, budget)
            worst = max(worst, mean_rate - bound)
        return max(worst, 0.0)

    def central_equals_ideal_single_subcarrier():
        grid = build_frequency_grid(28e9, 2e9, 1)
        worst = 0.0
        for _ in range(20):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            channels = gen_channels(paths, grid, 4, 8)
            central = sum_rate(channels, design_central(paths, 8), budget).sum_rate_bits
            ideal = ideal_rate(channels, budget).sum_rate_bits
            worst = max(worst, abs(central - ideal) / ideal)
        return worst

    def mccm_matches_ideal_single_subcarrier():
        grid = build_frequency_grid(28e9, 2e9, 1)
        worst = 0.0
        for _ in range(20):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            channels = gen_channels(paths, grid, 4, 8)
            mccm = sum_rate(channels, design_mccm(channels), budget).sum_rate_bits
            ideal = ideal_rate(channels, budget).sum_rate_bits
            worst = max(worst, abs(mccm - ideal) / ideal)
        return worst

    def global_phase_neutrality():
        grid = build_frequency_grid(28e9, 2e9, 8)
        worst = 0.0
        for _ in range(20):
            paths = sample_path_set(rng, LOS, 1)
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_random(rng, 8)
            shifted = type(profile)(profile.phases_rad + 1.2345, profile.scheme_tag)
            a = sum_rate(channels, profile, budget).sum_rate_bits
            b = sum_rate(channels, shifted, budget).sum_rate_bits
            worst = max(worst, abs(a - b))
        return worst

    def mrt_consistency():
        grid = build_frequency_grid(28e9, 2e9, 8)
        worst = 0.0
        for _ in range(20):
            paths = sample_path_set(rng, NLOS, 3)
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_random(rng, 8)
            k = int(rng.integers(8))
            eff = effective_channel(channels.h_ris_user[k], profile, channels.h_bs_ris[k])
            f = mrt_beamformer(eff, budget.transmit_power)
            received = eff @ f
            explicit = np.log2(1.0 + np.abs(received) ** 2 / budget.noise_power)
            closed = subcarrier_rate(eff, budget)
            worst = max(worst, abs(explicit - closed))
        return worst

    return (
        ("frequency-grid-symmetry", grid_symmetry, 1e-3),
        ("array-response-norm", response_norm, 1e-12),
        ("alignment-sum-reaches-element-count", alignment_sum, 1e-9),
        ("single-subcarrier-closed-form-rate", aligned_closed_form, 1e-9),
        ("jensen-upper-bound", jensen_bound, 1e-12),
        ("central-equals-ideal-at-one-subcarrier", central_equals_ideal_single_subcarrier, 1e-9),
        ("mccm-matches-ideal-at-one-subcarrier", mccm_matches_ideal_single_subcarrier, 1e-6),
        ("global-phase-neutrality", global_phase_neutrality, 1e-9),
        ("mrt-consistency", mrt_consistency, 1e-10),
    )


def selftest() -> int:
    """Run the embedded invariant checks at small sizes; 0 means all passed."""
    failures = []
    for name, check, threshold in _selftest_checks():
        error = check()
        ok = error <= threshold
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name:<44} error={error:.3e}  (threshold {threshold:.0e})")
        if not ok:
            failures.append(name)
    if failures:
        print(f"selftest failed: {', '.join(failures)}")
        return 2
    print("selftest passed")
    return 0


def main(argv=None) -> int:
    try:
        config = parse_args(argv if argv is not None else sys.argv[1:])
    except UsageError as exc:
        print(f"squintsim: error: {exc}", file=sys.stderr)
        return 1

    try:
        if config.subcommand == "selftest":
            return selftest()
        if config.subcommand == "figure":
            result = experiments.reproduce_figure(
                config.figure_id, trials=config.trials, seed=config.seed, gain_mode=config.gain_mode
            )
        else:
            scenario_config = ScenarioConfig(
                scenario=config.scenario,
                carrier_hz=config.carrier_hz,
                bandwidth_hz=config.bandwidth_hz,
                num_subcarriers=config.num_subcarriers,
                num_bs_antennas=config.num_bs_antennas,
                num_ris_elements=config.num_ris_elements,
                num_paths=config.num_paths,
                snr_db=config.snr_db,
                trials=config.trials,
                seed=config.seed,
                gain_mode=config.gain_mode,
            )
            result = run_sweep(scenario_config, config.schemes, config.sweep_variable, config.sweep_values)
        emit_csv(result, config.output_path)
        _print_summary(result)
        print(f"wrote {len(result.rows)} rows to {config.output_path}")
    except Exception as exc:  # noqa: BLE001 (single CLI boundary)
        print(f"squintsim: failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
