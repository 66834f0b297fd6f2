"""Command-line front end: ``sweep``, ``verify`` and ``entropy``.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 capacity error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import attenuation_channel
from .entropy import Policy, mutual_entropy, relative_entropy, von_neumann
from .errors import CapacityError, DomainError
from .fock import DensityOperator, FockBasis
from .modulation import Alphabet, compare_modulators
from .verify import FAIL, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

CSV_COLUMNS = (
    "eta", "d", "M", "scheme", "S_tilde", "I_closed", "I_brute",
    "ratio_closed", "ratio_brute", "theorem5_pass", "theorem6_pass", "discrepancy",
)
# columns carrying entropies; converted to the output log base on write
ENTROPY_COLUMNS = {"S_tilde", "I_closed", "I_brute"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    eta_grid: tuple[float, ...]
    d_list: tuple[int, ...] = (1,)
    M_list: tuple[int, ...] = (2,)
    distribution: str = "uniform"
    log_base: str = "e"
    block_max: int = 3
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.eta_grid:
            raise ConfigError("eta grid is empty")
        for eta in self.eta_grid:
            if not 0.0 <= eta <= 1.0:
                raise ConfigError(f"eta={eta} outside [0, 1]")
        if not self.d_list or any(d < 1 for d in self.d_list):
            raise ConfigError(f"d values must be >= 1, got {self.d_list}")
        if not self.M_list or any(M < 2 for M in self.M_list):
            raise ConfigError(f"M values must be >= 2, got {self.M_list}")
        if self.log_base not in ("e", "2"):
            raise ConfigError(f"log base must be e or 2, got {self.log_base!r}")
        if not 1 <= self.block_max <= 4:
            raise ConfigError(f"block max must be in [1, 4], got {self.block_max}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.output_format!r}")
        for M in self.M_list:
            self.alphabet(M)

    def alphabet(self, M: int) -> Alphabet:
        kind, _, arg = self.distribution.partition(":")
        try:
            if kind == "uniform" and not arg:
                a = Alphabet.uniform(M)
            elif kind == "geometric":
                a = Alphabet.geometric(M, float(arg))
            elif kind == "explicit":
                lam = tuple(float(x) for x in arg.split(","))
                if len(lam) != M:
                    raise ConfigError(f"explicit distribution has {len(lam)} entries, M={M}")
                if abs(sum(lam) - 1.0) > 1e-9:
                    raise ConfigError(f"explicit distribution sums to {sum(lam)!r}")
                a = Alphabet(tuple(x / sum(lam) for x in lam))
            else:
                raise ConfigError(f"unknown distribution {self.distribution!r}")
        except (ValueError, DomainError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad distribution {self.distribution!r}: {exc}") from exc
        if max(a.lam) >= 1.0:
            raise ConfigError("entropy ratio is undefined for a deterministic source")
        return a


@dataclass
class SweepRow:
    eta: float
    d: int
    M: int
    scheme: str
    S_tilde: float
    I_closed: float
    I_brute: float
    ratio_closed: float
    ratio_brute: float
    theorem5_pass: bool
    theorem6_pass: bool
    discrepancy: bool
    notes: list[str] = field(default_factory=list)


def sweep_rows(config: SweepConfig) -> list[SweepRow]:
    rows = []
    for eta in config.eta_grid:
        for d in config.d_list:
            for M in config.M_list:
                try:
                    rep = compare_modulators(config.alphabet(M), eta, d, config.block_max)
                except CapacityError as exc:
                    raise CapacityError(f"grid point eta={eta} d={d} M={M}: {exc}", exc.dimension) from exc
                for kind in ("PPM", "PWM"):
                    k = kind.lower()
                    rows.append(SweepRow(
                        eta=eta, d=d, M=M, scheme=kind,
                        S_tilde=rep.S_tilde,
                        I_closed=getattr(rep, f"I_{k}_closed"),
                        I_brute=getattr(rep, f"I_{k}_brute"),
                        ratio_closed=getattr(rep, f"r_{k}_closed"),
                        ratio_brute=getattr(rep, f"r_{k}_brute"),
                        theorem5_pass=rep.theorem5_pass,
                        theorem6_pass=rep.theorem6_pass,
                        discrepancy=rep.discrepancy(kind),
                        notes=[n for n in rep.discrepancy_notes if n.startswith(kind)],
                    ))
    return rows


def _fmt(value, column: str, log_base: str) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    if column in ENTROPY_COLUMNS and log_base == "2":
        value = value / math.log(2)
    return format(value, ".17g")


def render(rows: list[SweepRow], fmt: str, log_base: str = "e") -> str:
    if fmt == "csv":
        out = io.StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for r in rows:
            out.write(",".join(_fmt(getattr(r, c), c, log_base) for c in CSV_COLUMNS) + "\n")
        return out.getvalue()
    objs = []
    for r in rows:
        fields = []
        for c in CSV_COLUMNS:
            v = _fmt(getattr(r, c), c, log_base)
            fields.append(f"{json.dumps(c)}: {json.dumps(v) if c == 'scheme' else v}")
        objs.append("  {" + ", ".join(fields) + "}")
    return "[\n" + ",\n".join(objs) + "\n]\n"


def cmd_sweep(config: SweepConfig, err=None) -> int:
    err = err or sys.stderr
    try:
        rows = sweep_rows(config)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=err)
        return EXIT_CAPACITY
    text = render(rows, config.output_format, config.log_base)
    for r in rows:
        for note in r.notes:
            print(f"WARN discrepancy: {note}", file=err)
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(level: str = "fast", out=None) -> int:
    out = out or sys.stdout
    results = run_checks(level)
    for r in results:
        print(r.line(), file=out)
    failed = [r for r in results if r.status == FAIL]
    if failed:
        print(f"verification FAILED: {failed[0].name}", file=out)
        return EXIT_VERIFY
    print(f"verification passed ({level})", file=out)
    return EXIT_OK


def _parse_entry(x):
    if isinstance(x, list):
        return complex(x[0], x[1])
    return complex(x)


def parse_state(text: str | None = None, path: str | None = None) -> DensityOperator:
    """Inline comma list (diagonal) or a JSON file holding a list or a matrix.

    Matrix entries may be numbers or ``[re, im]`` pairs.
    """
    if path is not None:
        data = json.loads(Path(path).read_text())
    else:
        data = [float(x) for x in text.split(",")]
    if data and all(isinstance(row, list) for row in data):
        m = np.array([[_parse_entry(x) for x in row] for row in data], dtype=complex)
    else:
        m = np.diag(np.array([float(x) for x in data]))
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError("state must be a square matrix or a diagonal list")
    return DensityOperator(FockBasis(1, m.shape[0] - 1), m)


def _parse_policy(text: str, seed: int) -> Policy:
    if text == "canonical":
        return Policy.canonical()
    kind, _, rounds = text.partition(":")
    if kind != "randomized":
        raise DomainError(f"unknown policy {text!r}")
    return Policy.randomized(int(rounds), seed)


def cmd_entropy(args, out=None) -> int:
    out = out or sys.stdout
    scale = math.log(2) if args.log_base == "2" else 1.0

    def show(name, val):
        txt = "inf" if not val.finite else format(val.value / scale, ".17g")
        print(f"{name}: {txt}", file=out)

    rho = parse_state(args.state, args.state_file)
    show("von_neumann", von_neumann(rho))
    if args.sigma or args.sigma_file:
        sigma = parse_state(args.sigma, args.sigma_file)
        show("relative_entropy", relative_entropy(rho, sigma))
    if args.eta is not None:
        ch = attenuation_channel(args.eta, rho.basis.n_max)
        policy = _parse_policy(args.policy, args.seed)
        show("mutual_entropy", mutual_entropy(rho, ch, policy))
    return EXIT_OK


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qmodulation",
        description="Attenuation-channel entropies and PPM/PWM transmission efficiency.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="tabulate closed-form and brute-force entropy ratios")
    sw.add_argument("--eta", type=_floats, required=True, help="comma list of transition ratios")
    sw.add_argument("--d", type=_ints, default=(1,), help="comma list of pulse amplitudes")
    sw.add_argument("--M", type=_ints, default=(2,), help="comma list of alphabet sizes")
    sw.add_argument("--dist", default="uniform", help="uniform | geometric:<p> | explicit:<l1,l2,...>")
    sw.add_argument("--log-base", default="e", choices=("e", "2"))
    sw.add_argument("--block-max", type=int, default=3)
    sw.add_argument("--format", default="csv", choices=("csv", "json"))
    sw.add_argument("--out", default=None)
    sw.add_argument("--seed", type=int, default=0)

    vf = sub.add_parser("verify", help="run the built-in property suites")
    vf.add_argument("--level", default="fast", choices=("fast", "full"))

    en = sub.add_parser("entropy", help="entropies of an ad-hoc single-mode state")
    src = en.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="comma list of diagonal probabilities")
    src.add_argument("--state-file", help="JSON file with a diagonal list or matrix")
    en.add_argument("--sigma", help="second state (diagonal list) for relative entropy")
    en.add_argument("--sigma-file")
    en.add_argument("--eta", type=float, default=None, help="attenuation for mutual entropy")
    en.add_argument("--policy", default="canonical", help="canonical | randomized:<rounds>")
    en.add_argument("--seed", type=int, default=0)
    en.add_argument("--log-base", default="e", choices=("e", "2"))
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    if args.command == "verify":
        return cmd_verify(args.level)
    try:
        if args.command == "sweep":
            config = SweepConfig(
                eta_grid=args.eta, d_list=args.d, M_list=args.M, distribution=args.dist,
                log_base=args.log_base, block_max=args.block_max, output_format=args.format,
                output_path=args.out, seed=args.seed,
            )
            return cmd_sweep(config)
        return cmd_entropy(args)
    except (ConfigError, DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
