"""Command-line experiments producing plot-ready tables.

Each subcommand writes one table. CSV output starts with a ``#``-prefixed
JSON line echoing the resolved configuration, followed by a header row and
data rows with 17 significant digits. A one-line summary goes to stderr.

Exit status: 0 on success, 2 for usage or configuration errors, 3 when a
numerical expectation fails to converge.
"""

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import __version__
from .broadcast import BroadcastConfig, dpc_region, td_region, verify_dominance
from .ergodic import (
    ChannelConfig,
    capacity_known_interference,
    dpc_integrand,
    expand_high_snr,
    expand_low_snr,
    gap,
    gap_bound,
    rate_dpc,
)
from .errors import DivergenceError, DpcError
from .expectation import MonteCarlo, Quadrature
from .fading import DIVERGENT, parse_model
from .quasistatic import (
    OutageSpec,
    min_outage_probability,
    optimal_alpha_outage,
    outage_probability,
    rate_cdf,
)

COMMANDS = ("gap-sweep", "cdf", "outage", "region", "asympt-check", "moments")
LOW_SNR_GRID = (1e-3, 5e-4, 2.5e-4)
HIGH_SNR_GRID = (1e2, 1e3, 1e4)


class UsageError(DpcError):
    """Invalid experiment configuration."""


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def db_range(start, stop, step):
    """Inclusive dB grid ``start, start + step, ..., <= stop``."""
    if not step > 0:
        raise UsageError("dB step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise UsageError("empty dB range")
    return start + step * np.arange(count)


@dataclass
class ExperimentConfig:
    command: str
    fading: str = "rayleigh"
    snr_db: float = 10.0
    snr_db_range: List[float] = field(default_factory=lambda: [-20.0, 30.0, 0.25])
    beta: object = 1.0
    alphas: List[float] = field(default_factory=lambda: [0.3, 0.7])
    rate: float = math.log(2.0)
    rate_range: List[float] = field(default_factory=lambda: [0.0, 4.0, 0.01])
    users: List[str] = field(default_factory=lambda: ["rayleigh", "rayleigh"])
    eps: List[float] = field(default_factory=lambda: [0.5, 0.1])
    scheme: str = "both"
    steps: Optional[int] = None
    mu_steps: int = 101
    eta_steps: int = 101
    verify: bool = False
    regime: str = "both"
    nodes: int = 2048
    samples: Optional[int] = None
    seed: int = 0
    format: str = "csv"
    bits: bool = False
    out: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        self.beta = _parse_beta(self.beta)
        if any(not 0 <= a <= 1 for a in self.alphas):
            raise UsageError("alpha values must lie in [0, 1]")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.scheme not in ("td", "dpc", "both"):
            raise UsageError("scheme must be td, dpc or both")
        if self.regime not in ("low", "high", "both"):
            raise UsageError("regime must be low, high or both")
        if len(self.snr_db_range) != 3 or len(self.rate_range) != 3:
            raise UsageError("ranges take START STOP STEP")

    def engine(self):
        if self.samples:
            return MonteCarlo(self.samples, self.seed)
        return Quadrature(self.nodes)

    def echo(self):
        d = asdict(self)
        d.pop("out")
        d["beta"] = "inf" if math.isinf(self.beta) else self.beta
        return d


def _parse_beta(value):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        try:
            value = float(value)
        except ValueError:
            raise UsageError(f"beta must be a number or 'inf', got {value!r}") from None
    value = float(value)
    if not value >= 0:
        raise UsageError("beta must be >= 0")
    return value


@dataclass
class Table:
    columns: List[str]
    rows: List[list]
    rate_columns: List[str] = field(default_factory=list)
    summary: str = ""

    def in_bits(self):
        idx = [self.columns.index(c) for c in self.rate_columns]
        rows = []
        for row in self.rows:
            row = list(row)
            for i in idx:
                if isinstance(row[i], float):
                    row[i] = row[i] / math.log(2.0)
            rows.append(row)
        return Table(self.columns, rows, self.rate_columns, self.summary)


def _fmt(v):
    if v is None:
        return ""
    if v is DIVERGENT:
        return "divergent"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if v is DIVERGENT:
        return "divergent"
    if isinstance(v, np.floating):
        return float(v)
    return v


def render(table: Table, cfg: ExperimentConfig) -> str:
    meta = {"command": cfg.command, "config": cfg.echo(), "version": __version__, "units": "bits" if cfg.bits else "nats"}
    if cfg.format == "json":
        payload = {"metadata": meta, "columns": table.columns, "rows": [[_jsonable(v) for v in r] for r in table.rows]}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_table(text: str):
    """Parse CSV produced by :func:`render` into ``(metadata, columns, rows)``."""
    lines = text.splitlines()
    meta = json.loads(lines[0][2:])
    columns = lines[1].split(",")
    rows = []
    for line in lines[2:]:
        row = []
        for cell in line.split(","):
            try:
                row.append(float(cell))
            except ValueError:
                row.append(cell)
        rows.append(row)
    return meta, columns, rows


def run_gap_sweep(cfg: ExperimentConfig) -> Table:
    model = parse_model(cfg.fading)
    engine = cfg.engine()
    grid_db = db_range(*cfg.snr_db_range)
    rows = []
    if math.isinf(cfg.beta):
        columns = ["snr_db", "gap_bound"]
        for db, rho in zip(grid_db, db_to_linear(grid_db)):
            rows.append([float(db), gap_bound(float(rho), model, engine)])
    else:
        columns = ["snr_db", "rate_dpc", "capacity_bar", "gap", "gap_bound"]
        for db, rho in zip(grid_db, db_to_linear(grid_db)):
            ch = ChannelConfig(float(rho), cfg.beta)
            rows.append([
                float(db),
                rate_dpc(ch, model, engine),
                capacity_known_interference(ch, model, engine),
                gap(ch, model, engine),
                gap_bound(float(rho), model, engine),
            ])
    bounds = [r[-1] for r in rows]
    i = int(np.argmax(bounds))
    summary = f"max gap_bound {bounds[i]:.6f} nats at {rows[i][0]:g} dB ({model.label})"
    return Table(columns, rows, columns[1:], summary)


def run_cdf(cfg: ExperimentConfig) -> Table:
    if math.isinf(cfg.beta):
        raise UsageError("cdf needs a finite beta")
    model = parse_model(cfg.fading)
    rho = float(db_to_linear(cfg.snr_db))
    grid = np.round(db_range(*cfg.rate_range), 12)
    ch = ChannelConfig(rho, cfg.beta)
    ref = ChannelConfig(rho, 0.0)
    cols = [rate_cdf(ch, a, model, grid) for a in cfg.alphas]
    reference = rate_cdf(ref, 0.0, model, grid)
    columns = ["rate"] + [f"cdf_alpha_{a:g}" for a in cfg.alphas] + ["cdf_reference"]
    rows = [[float(r)] + [float(c[i]) for c in cols] + [float(reference[i])] for i, r in enumerate(grid)]
    touch = []
    for a, c in zip(cfg.alphas, cols):
        j = int(np.argmin(np.where(c < 1.0, c - reference, np.inf)))
        touch.append(f"alpha={a:g} touches reference near r={grid[j]:g}")
    return Table(columns, rows, ["rate"], "; ".join(touch))


def run_outage(cfg: ExperimentConfig) -> Table:
    if math.isinf(cfg.beta):
        raise UsageError("outage needs a finite beta")
    model = parse_model(cfg.fading)
    spec = OutageSpec(cfg.rate)
    alpha_star = optimal_alpha_outage(spec)
    grid_db = db_range(*cfg.snr_db_range)
    columns = ["snr_db", "alpha_star", "outage_alpha_star", "min_outage", "reference_outage"]
    columns += [f"outage_alpha_{a:g}" for a in cfg.alphas]
    rows = []
    for db, rho in zip(grid_db, db_to_linear(grid_db)):
        ch = ChannelConfig(float(rho), cfg.beta)
        row = [
            float(db),
            alpha_star,
            outage_probability(ch, alpha_star, spec, model),
            min_outage_probability(ch, spec, model),
            outage_probability(ChannelConfig(float(rho), 0.0), 0.0, spec, model),
        ]
        row += [outage_probability(ch, a, spec, model) for a in cfg.alphas]
        rows.append(row)
    return Table(columns, rows, [], f"alpha* = {alpha_star:.6f} for target rate {cfg.rate:g} nats")


def run_region(cfg: ExperimentConfig) -> Table:
    if len(cfg.users) != len(cfg.eps):
        raise UsageError("need one --eps value per --user")
    users = tuple((parse_model(u), e) for u, e in zip(cfg.users, cfg.eps))
    bc = BroadcastConfig(float(db_to_linear(cfg.snr_db)), users)
    k = bc.num_users
    want_td = cfg.scheme in ("td", "both")
    if want_td and k != 2:
        if cfg.scheme == "td":
            raise UsageError("time division needs exactly two users")
        want_td = False
    params = ["mu", "eta1", "eta2"] + [f"gamma{i + 1}" for i in range(k)]
    rate_cols = [f"R_{i + 1}" for i in range(k)]
    columns = ["scheme"] + rate_cols + params
    rows = []
    td = None
    if want_td:
        td = td_region(bc, cfg.mu_steps, cfg.eta_steps)
        for r, p in td.points():
            rows.append(["td"] + [float(x) for x in r] + [p["mu"], p["eta1"], p["eta2"]] + [None] * k)
    if cfg.scheme in ("dpc", "both"):
        dpc = dpc_region(bc, cfg.steps)
        for r, p in dpc.points():
            rows.append(["dpc"] + [float(x) for x in r] + [None] * 3 + [p[f"gamma{i + 1}"] for i in range(k)])
    summary = f"{len(rows)} boundary points, gains {np.round(bc.gains(), 6).tolist()}"
    if cfg.verify and k == 2:
        res = verify_dominance(bc, td)
        summary += f"; dominance {'passes' if res.dominated else 'FAILS'}"
        summary += f", strict witness {res.witness_strict}" if res.witness_strict else ", no strict witness"
    return Table(columns, rows, rate_cols, summary)


def run_asympt_check(cfg: ExperimentConfig) -> Table:
    if math.isinf(cfg.beta):
        raise UsageError("asympt-check needs a finite beta")
    model = parse_model(cfg.fading)
    engine = cfg.engine()
    beta = cfg.beta
    columns = ["regime", "snr", "numeric_rate", "expansion_value", "abs_error", "gap"]
    rows = []
    notes = []
    if cfg.regime in ("low", "both"):
        exp = expand_low_snr(ChannelConfig(1.0, beta), model)
        coeffs = []
        for rho in LOW_SNR_GRID:
            ch = ChannelConfig(rho, beta)
            r = rate_dpc(ch, model, engine)
            approx = exp.linear_coeff * rho + exp.quadratic_coeff_R * rho * rho
            rows.append(["low", rho, r, approx, abs(r - approx), gap(ch, model, engine)])
            coeffs.append((r - rho) / (rho * rho))
        # Linear extrapolation in rho of (R - rho)/rho^2 to rho = 0.
        fitted = 2.0 * coeffs[-1] - coeffs[-2]
        rows.append(["low-fit", None, fitted, exp.quadratic_coeff_R, abs(fitted - exp.quadratic_coeff_R), None])
        notes.append(f"low-SNR quadratic coefficient {fitted:.6f} vs {exp.quadratic_coeff_R:.6f}")
    if cfg.regime in ("high", "both"):
        exp = expand_high_snr(ChannelConfig(1.0, beta), model)
        coeffs = []
        for rho in HIGH_SNR_GRID:
            ch = ChannelConfig(rho, beta)
            # Subtract log A inside the expectation so quadrature error cancels.
            residual = engine.expect(
                model,
                lambda a, ch=ch: _dpc_minus_log(ch, a),
                "R - log(rho) - log A",
            ).value
            r = math.log(rho) + exp.constant_term + residual
            if exp.rate_coeff is DIVERGENT:
                approx = DIVERGENT
                err = None
            else:
                approx = math.log(rho) + exp.constant_term + exp.rate_coeff / rho
                err = abs(r - approx)
            rows.append(["high", rho, r, approx, err, gap(ch, model, engine)])
            coeffs.append(residual * rho)
        fitted = coeffs[-1] + (coeffs[-1] - coeffs[-2]) * HIGH_SNR_GRID[-2] / (HIGH_SNR_GRID[-1] - HIGH_SNR_GRID[-2])
        err = None if exp.rate_coeff is DIVERGENT else abs(fitted - exp.rate_coeff)
        rows.append(["high-fit", None, fitted, exp.rate_coeff, err, None])
        notes.append(f"high-SNR 1/rho coefficient {fitted:.6f} vs {exp.rate_coeff}")
    return Table(columns, rows, ["numeric_rate", "expansion_value", "abs_error", "gap"], "; ".join(notes))


def _dpc_minus_log(ch, a):
    return dpc_integrand(ch, a) - np.log(ch.snr) - np.log(a)


def run_moments(cfg: ExperimentConfig) -> Table:
    model = parse_model(cfg.fading)
    m = model.moments()
    row = [model.label, m.second_moment, m.mean_log, m.mean_inverse]
    return Table(["model", "second_moment", "mean_log", "mean_inverse"], [row], [], f"moments of {model.label}")


RUNNERS = {
    "gap-sweep": run_gap_sweep,
    "cdf": run_cdf,
    "outage": run_outage,
    "region": run_region,
    "asympt-check": run_asympt_check,
    "moments": run_moments,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--bits", action="store_true", help="report rates in bits instead of nats")
    common.add_argument("--nodes", type=int, help="quadrature nodes")
    common.add_argument("--samples", type=int, help="use Monte Carlo with this many samples")
    common.add_argument("--seed", type=int)
    common.add_argument("--fading", help="rayleigh, constant, rician:K=2, nakagami:m=4, empirical:PATH")

    parser = argparse.ArgumentParser(prog="dpcfading", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap-sweep", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--snr-db-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p.add_argument("--beta", help="interference-to-power ratio or 'inf'")

    p = sub.add_parser("cdf", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--beta")
    p.add_argument("--alphas", nargs="+", type=float)
    p.add_argument("--rate-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))

    p = sub.add_parser("outage", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--snr-db-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p.add_argument("--beta")
    p.add_argument("--rate", type=float, help="target rate in nats")
    p.add_argument("--alphas", nargs="+", type=float)

    p = sub.add_parser("region", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--user", dest="users", action="append", help="fading model of one user (repeat)")
    p.add_argument("--eps", nargs="+", type=float, help="target outage per user")
    p.add_argument("--snr-db", type=float)
    p.add_argument("--scheme", choices=("td", "dpc", "both"))
    p.add_argument("--steps", type=int, help="simplex steps per dimension for DPC")
    p.add_argument("--mu-steps", type=int)
    p.add_argument("--eta-steps", type=int)
    p.add_argument("--verify", action="store_true", help="check TD containment (two users)")

    p = sub.add_parser("asympt-check", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--beta")
    p.add_argument("--regime", choices=("low", "high", "both"))

    sub.add_parser("moments", parents=[common], argument_default=argparse.SUPPRESS)
    return parser


def resolve_config(argv) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    values = {}
    path = args.pop("config", None)
    if path:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from None
        if not isinstance(values, dict):
            raise UsageError("config file must hold a JSON object")
        values = {k.replace("-", "_"): v for k, v in values.items()}
    values.update(args)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**values)


def run(cfg: ExperimentConfig) -> Table:
    table = RUNNERS[cfg.command](cfg)
    return table.in_bits() if cfg.bits else table


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        table = run(cfg)
        text = render(table, cfg)
    except DivergenceError as exc:
        print(f"dpcfading: numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    except (DpcError, ValueError, TypeError) as exc:
        print(f"dpcfading: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if table.summary:
        print(table.summary, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
