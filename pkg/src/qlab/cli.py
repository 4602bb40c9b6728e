"""Command line front end.

Subcommands: limits, chsh, classicality, qdist. Every run writes one table
(CSV with a '#' header block, or JSON) built only from the configuration,
so identical configurations produce identical bytes.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, _parallel
from .bell import chsh_scan
from .coarse_povm import hidden_joint_distribution, joint_probabilities, povm_elements
from .errors import NumericalAccuracyError
from .husimi import q_joint, q_mixture_deviation, q_single, reduced_density
from .limits import default_scenarios, load_profile, profile_by_name, scenario_report
from .sphere import gauss_legendre_grid, polar_band_partition
from .spin_core import SpinLength, TwoSpinState, X_AXIS, Z_AXIS, macro_entangled_state, singlet_state

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; usage problems are exit 1 here
    def error(self, message):
        raise UsageError(message)


_CONFIG_KEYS = {
    "limits": {"profile", "profile_file", "output", "format"},
    "chsh": {"spin", "kind", "state", "state_file", "bands", "oversample",
             "angle_grid", "zero_to", "seed", "output", "format"},
    "classicality": {"state", "state_file", "sweep_spin", "sweep_bands",
                     "oversample", "seed", "output", "format"},
    "qdist": {"spin", "state", "state_file", "single", "oversample",
              "seed", "output", "format"},
}


def build_parser() -> _Parser:
    parser = _Parser(prog="qlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
        p.add_argument("--config", help="JSON file with defaults for this command's flags")

    p = sub.add_parser("limits", help="angular precision floors and spin-size bounds")
    p.add_argument("--profile", choices=["paper-oom", "precise"],
                   help="constants profile name (default paper-oom)")
    p.add_argument("--profile-file", dest="profile_file", help="JSON constants profile")
    common(p)

    p = sub.add_parser("chsh", help="scan for the best CHSH violation")
    p.add_argument("--spin", type=int, help="twice the spin, 2s (default 1)")
    p.add_argument("--kind", choices=["sharp-sign", "slot-coarse", "cat-hemisphere"],
                   help="measurement family (default sharp-sign)")
    p.add_argument("--state", choices=["singlet", "macro-entangled", "file"],
                   help="two-spin state (default singlet)")
    p.add_argument("--state-file", dest="state_file", help="JSON amplitudes for --state file")
    p.add_argument("--bands", type=int, help="polar bands per slot-coarse setting (default 2)")
    p.add_argument("--oversample", type=float, help="quadrature oversampling factor (default 1)")
    p.add_argument("--angle-grid", dest="angle_grid", type=int,
                   help="coarse scan resolution per setting (default 17)")
    p.add_argument("--zero-to", dest="zero_to", type=int, choices=[1, -1],
                   help="sign taken by the m = 0 level at integer spin (default +1)")
    p.add_argument("--seed", type=int, help="seed echoed into the header (default 0)")
    common(p)

    p = sub.add_parser("classicality", help="mixture deviation sweep over spin and slot width")
    p.add_argument("--state", choices=["singlet", "macro-entangled", "file"])
    p.add_argument("--state-file", dest="state_file")
    p.add_argument("--sweep-spin", dest="sweep_spin",
                   help="comma list of 2s values (default 4,16,36)")
    p.add_argument("--sweep-bands", dest="sweep_bands",
                   help="comma list of polar band counts (default 2,4,6)")
    p.add_argument("--oversample", type=float)
    p.add_argument("--seed", type=int)
    common(p)

    p = sub.add_parser("qdist", help="tabulate a Husimi Q distribution")
    p.add_argument("--spin", type=int, help="twice the spin, 2s (default 1)")
    p.add_argument("--state", choices=["singlet", "macro-entangled", "file"])
    p.add_argument("--state-file", dest="state_file")
    p.add_argument("--single", action="store_const", const=True,
                   help="marginal Q of party A instead of the joint table")
    p.add_argument("--oversample", type=float)
    p.add_argument("--seed", type=int)
    common(p)

    return parser


def _merge_config(args) -> dict:
    """Layer defaults under file config under explicit flags."""
    defaults = {
        "limits": {"profile": "paper-oom", "profile_file": None, "output": None, "format": "csv"},
        "chsh": {"spin": 1, "kind": "sharp-sign", "state": "singlet", "state_file": None,
                 "bands": 2, "oversample": 1.0, "angle_grid": 17, "zero_to": 1, "seed": 0,
                 "output": None, "format": "csv"},
        "classicality": {"state": "singlet", "state_file": None, "sweep_spin": "4,16,36",
                         "sweep_bands": "2,4,6", "oversample": 1.0, "seed": 0,
                         "output": None, "format": "csv"},
        "qdist": {"spin": 1, "state": "singlet", "state_file": None, "single": False,
                  "oversample": 1.0, "seed": 0, "output": None, "format": "csv"},
    }[args.command]
    merged = dict(defaults)
    if args.config:
        with open(args.config) as fh:
            file_conf = json.load(fh)
        if not isinstance(file_conf, dict):
            raise UsageError("config file must hold a JSON object")
        allowed = _CONFIG_KEYS[args.command]
        for key, value in file_conf.items():
            if key not in allowed:
                raise UsageError(f"unknown config key {key!r} for command {args.command!r}")
            merged[key] = value
    for key in merged:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


def _parse_int_list(text, field) -> list:
    text = str(text).strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"{field} must be a comma list of integers, got {text!r}") from None


def _load_state(conf) -> TwoSpinState:
    name = conf["state"]
    if name == "file":
        if not conf.get("state_file"):
            raise UsageError("--state file requires --state-file")
        with open(conf["state_file"]) as fh:
            data = json.load(fh)
        try:
            s = SpinLength(int(data["two_s"]))
            pairs = data["amplitudes"]
            amps = np.array([complex(re, im) for re, im in pairs])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"bad state file: {exc}") from None
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise UsageError("state file amplitudes are all zero")
        return TwoSpinState(s, amps / norm)
    s = SpinLength(int(conf["spin"]))
    if name == "singlet":
        return singlet_state(s)
    if name == "macro-entangled":
        return macro_entangled_state(s)
    raise UsageError(f"unknown state {name!r}")


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value:.11e}"
    return str(value)


def _config_echo(conf) -> str:
    # the destination path is I/O plumbing, not computation config; leaving it
    # out keeps outputs byte-identical no matter where they are written
    return " ".join(f"{k}={conf[k]}" for k in sorted(conf) if k != "output")


def _emit(conf, command, columns, rows, *, constants="-", grid_degree="-", footer=()):
    header = {
        "tool": f"qlab {__version__}",
        "command": command,
        "config": _config_echo(conf),
        "constants": constants,
        "grid_degree": str(grid_degree),
    }
    if conf["format"] == "json":
        doc = {
            "header": header,
            "columns": list(columns),
            "rows": [[_fmt(v) for v in row] for row in rows],
            "footer": {k: _fmt(v) for k, v in footer},
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# {k}: {v}" for k, v in header.items()]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        lines.extend(f"# {k}: {_fmt(v)}" for k, v in footer)
        text = "\n".join(lines) + "\n"
    if conf["output"]:
        with open(conf["output"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_limits(conf) -> int:
    if conf.get("profile_file"):
        constants = load_profile(conf["profile_file"])
    else:
        constants = profile_by_name(conf["profile"])
    rows = [
        (r.scenario, r.regime, r.criterion, r.log10_angle, r.angle, r.log10_spin, r.spin_bound)
        for r in scenario_report(default_scenarios(constants), constants)
    ]
    _emit(conf, "limits",
          ["scenario", "regime", "criterion", "log10_angle", "angle_rad", "log10_spin", "spin_bound"],
          rows, constants=constants.name)
    return EXIT_OK


def cmd_chsh(conf) -> int:
    state = _load_state(conf)
    kind = conf["kind"]
    grid = None
    grid_degree = "-"
    if kind in ("slot-coarse", "cat-hemisphere"):
        grid = gauss_legendre_grid(state.s, float(conf["oversample"]))
        grid_degree = grid.degree
    result = chsh_scan(
        state, kind, grid=grid, n_bands=int(conf["bands"]),
        zero_assignment=int(conf["zero_to"]), coarse_points=int(conf["angle_grid"]),
    )
    params = [p[0] for p in result.params]
    rows = [(
        state.s.two_s, kind, result.s_value, *result.correlations, *params,
    )]
    _emit(conf, "chsh",
          ["two_s", "kind", "s_value", "e_ab", "e_abp", "e_apb", "e_apbp",
           "a", "a_prime", "b", "b_prime"],
          rows, grid_degree=grid_degree)
    return EXIT_OK


def cmd_classicality(conf) -> int:
    spins = _parse_int_list(conf["sweep_spin"], "--sweep-spin")
    bands = _parse_int_list(conf["sweep_bands"], "--sweep-bands")
    for n in bands:
        if n < 2:
            raise UsageError(f"--sweep-bands entries must be >= 2, got {n}")
    oversample = float(conf["oversample"])
    cases = [(two_s, n) for two_s in spins for n in bands]

    def one(case):
        two_s, n_bands = case
        s = SpinLength(two_s)
        state_conf = dict(conf, spin=two_s)
        state = _load_state(state_conf)
        if state.s != s:
            raise UsageError("state file spin does not match sweep entry")
        grid = gauss_legendre_grid(s, oversample)
        part_a = polar_band_partition(grid, Z_AXIS, n_bands)
        part_b = polar_band_partition(grid, Z_AXIS, n_bands)
        eps = q_mixture_deviation(state, part_a, part_b)
        alt = polar_band_partition(grid, X_AXIS, n_bands)
        hidden = hidden_joint_distribution(state, part_a, alt, part_b, alt)
        povm_main = povm_elements(part_a, s)
        povm_alt = povm_elements(alt, s)
        w_main = joint_probabilities(state, povm_main, povm_main).probabilities
        w_alt = joint_probabilities(state, povm_alt, povm_alt).probabilities
        residual = max(
            np.abs(hidden.marginal_first() - w_main).max(),
            np.abs(hidden.marginal_second() - w_alt).max(),
        )
        width = math.pi / n_bands
        return (two_s, n_bands, width, width * math.sqrt(s.s), eps, float(residual), grid.degree)

    results = _parallel.parallel_map(one, cases)
    grid_degree = results[0][-1] if results else "-"
    rows = [r[:-1] for r in results]
    _emit(conf, "classicality",
          ["two_s", "n_bands", "width", "width_sqrt_s", "epsilon", "max_marginal_residual"],
          rows, grid_degree=grid_degree)
    return EXIT_OK


def cmd_qdist(conf) -> int:
    state = _load_state(conf)
    s = state.s
    grid = gauss_legendre_grid(s, float(conf["oversample"]))
    if conf["single"]:
        table = q_single(reduced_density(state, "a"), grid)
        rows = [(grid.theta[i], grid.phi[i], table.values[i]) for i in range(grid.n_nodes)]
        footer = [("normalization", table.integral())]
        _emit(conf, "qdist", ["theta", "phi", "q"], rows,
              grid_degree=grid.degree, footer=footer)
        return EXIT_OK
    table = q_joint(state, grid, grid)
    rows = [
        (grid.theta[i], grid.phi[i], grid.theta[j], grid.phi[j], table.values[i, j])
        for i in range(grid.n_nodes)
        for j in range(grid.n_nodes)
    ]
    q_a = q_single(reduced_density(state, "a"), grid)
    q_b = q_single(reduced_density(state, "b"), grid)
    residual = float(np.abs(table.values - np.outer(q_a.values, q_b.values)).max())
    footer = [
        ("normalization", table.integral()),
        ("factorization_residual", residual),
        ("factorizes", residual < 1e-10),
    ]
    _emit(conf, "qdist", ["theta_a", "phi_a", "theta_b", "phi_b", "q"], rows,
          grid_degree=grid.degree, footer=footer)
    return EXIT_OK


_COMMANDS = {
    "limits": cmd_limits,
    "chsh": cmd_chsh,
    "classicality": cmd_classicality,
    "qdist": cmd_qdist,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        conf = _merge_config(args)
        return _COMMANDS[args.command](conf)
    except UsageError as exc:
        print(f"qlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalAccuracyError as exc:
        print(f"qlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"qlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
