"""Command-line driver: evolve | sweep | bch-check | list-schemes.

Configuration is flat key=value text (optional [section] headers are
ignored) overridden by command-line flags; flags win. All numeric CSV
output uses the shortest representation that round-trips the double.
Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

import argparse
import os
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .grids import builtin_potential, make_grid, l2_norm, synthesize_initial, truncated_h1_norm
from .modified_energy import (
    assemble_modified_energy,
    h0_estimate,
    z0_composition,
    z1_closed_form,
    z_ell_recursion,
)
from .operators import (
    BranchCutError,
    alpha_norm,
    collocation_potential_operator,
    operator_norm,
    quadratic_form,
    unitary_log_generator,
)
from .experiments import default_h_grid, frequency_split, oscillation_sweep
from .modified_energy import exact_energy
from .schemes import (
    Scheme,
    Stage,
    StageKind,
    builtin_scheme,
    evolve,
    resolvent_scales,
    scheme_matrix,
    scheme_names,
)

__all__ = ["main", "RunConfig"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scheme: str = "lie-midpoint"
    stages: str = ""           # custom scheme: "P:0.5, R:1.0, P:0.5", product order
    order: int = 1             # declared order for custom schemes
    K: int = 64
    h: float = 0.01
    h_min: float = 0.01
    h_max: float = 0.1
    h_count: int = 200
    T: float = 50.0
    band: int = 20
    potential: str = "cos-sin6"
    initial: str = "bump"
    L: int = 2
    k_max: int = 20
    alpha: float = 2.0
    out: str = "out.csv"
    threads: int = 0           # 0 = available parallelism
    spike_factor: float = 10.0
    flat_factor: float = 5.0

    def validate(self):
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if self.h <= 0 or self.h_min <= 0 or self.h_max <= 0:
            raise ConfigError("stepsizes must be positive")
        if self.h_min > self.h_max:
            raise ConfigError("h_min must not exceed h_max")
        if self.h_count < 1:
            raise ConfigError("h_count must be >= 1")
        if self.T < 0:
            raise ConfigError("T must be >= 0")
        if self.band > self.K:
            raise ConfigError("band must not exceed K")
        if self.L < 0:
            raise ConfigError("L must be >= 0")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0")

    def dump(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name}={getattr(self, f.name)}")
        return "\n".join(lines) + "\n"


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    try:
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}")


def parse_config_file(path: str) -> dict:
    values = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = _coerce(key, raw.strip('"'))
    return values


def parse_stage_list(text: str, order: int) -> Scheme:
    """Custom scheme from "P:0.5, R:1.0, P:0.5" (operator product order)."""
    kinds = {"P": StageKind.POTENTIAL, "R": StageKind.RESOLVENT,
             "E": StageKind.EXACT}
    stages = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            kind, scale = item.split(":")
            stages.append(Stage(kinds[kind.strip().upper()], float(scale)))
        except (ValueError, KeyError):
            raise ConfigError(f"bad stage spec {item!r} (expected KIND:SCALE)")
    if not stages:
        raise ConfigError("empty stage list")
    try:
        # product order is right-to-left; application order is the reverse
        return Scheme("custom", tuple(reversed(stages)), order)
    except ValueError as exc:
        raise ConfigError(str(exc))


def resolve_scheme(cfg: RunConfig) -> Scheme:
    if cfg.stages:
        return parse_stage_list(cfg.stages, cfg.order)
    try:
        return builtin_scheme(cfg.scheme)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_lines(path: str, lines) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _build_setup(cfg: RunConfig):
    grid = make_grid(1, cfg.K)
    try:
        u0 = synthesize_initial(cfg.initial, grid)
        v = builtin_potential(cfg.potential)
    except ValueError as exc:
        raise ConfigError(str(exc))
    return grid, u0, v


def _modified_generator(cfg: RunConfig, scheme: Scheme, grid):
    """S_L for a single-potential-kick scheme, or None when L is 0."""
    v = builtin_potential(cfg.potential)
    gammas = resolvent_scales(scheme)
    z0 = z0_composition(gammas, cfg.h, grid) if gammas else None
    if z0 is None:
        raise ConfigError("modified energy needs at least one resolvent stage")
    if cfg.L == 0:
        return assemble_modified_energy(cfg.h, z0, [], 0)
    v_op = collocation_potential_operator(v, grid)
    corrections = [z1_closed_form(v_op, z0)]
    if cfg.L >= 2:
        corrections += z_ell_recursion(v_op, z0, cfg.L, k_max=cfg.k_max)
    return assemble_modified_energy(cfg.h, z0, corrections, cfg.L)


def cmd_evolve(cfg: RunConfig) -> int:
    scheme = resolve_scheme(cfg)
    grid, u0, v = _build_setup(cfg)
    s_op = _modified_generator(cfg, scheme, grid)
    v_op = collocation_potential_operator(v, grid)
    nsteps = int(round(cfg.T / cfg.h))
    rows = []

    def record(n, u):
        rows.append(",".join([
            str(n),
            _fmt(n * cfg.h),
            _fmt(l2_norm(u)),
            _fmt(truncated_h1_norm(u, cfg.band)),
            _fmt(exact_energy(u, v_op)),
            _fmt(quadratic_form(u, s_op)),
            _fmt(frequency_split(u, cfg.h)),
        ]))

    evolve(scheme, u0, cfg.h, nsteps, v, observers=[record])
    header = "step,time,l2,h1_band,exact_energy,modified_energy_L,freq_split"
    _write_lines(cfg.out, [header] + rows)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    scheme = resolve_scheme(cfg)
    grid, u0, v = _build_setup(cfg)
    h_grid = default_h_grid(cfg.h_min, cfg.h_max, cfg.h_count)
    workers = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
    result = oscillation_sweep(scheme, h_grid, cfg.T, u0, v, cfg.band,
                               workers=workers)
    lines = ["h,oscillation,l2_drift,seconds"]
    for row in result.rows:
        lines.append(",".join([_fmt(row.h), _fmt(row.oscillation),
                               _fmt(row.l2_drift), _fmt(row.seconds)]))
    osc = result.oscillations
    med = float(np.median(osc))
    spikes = result.spikes(cfg.spike_factor)
    summary = (f"# summary scheme={scheme.name} median={_fmt(med)} "
               f"max={_fmt(float(osc.max()))} spikes={len(spikes)}"
               + ("" if not spikes else " at=" + ";".join(_fmt(h) for h in spikes)))
    _write_lines(cfg.out, lines + [summary])
    print(summary.lstrip("# "))
    return EXIT_OK


def cmd_bch_check(cfg: RunConfig) -> int:
    if cfg.K > 64:
        raise ConfigError("bch-check is a dense diagnostic; K must be <= 64")
    scheme = resolve_scheme(cfg)
    n_kicks = sum(1 for s in scheme.stages if s.kind is StageKind.POTENTIAL)
    if n_kicks != 1 or not resolvent_scales(scheme):
        raise ConfigError(
            "bch-check needs a scheme with one potential kick and resolvent stages"
        )
    grid, _, v = _build_setup(cfg)
    u_mat = scheme_matrix(scheme, cfg.h, grid, v)
    s_oracle = unitary_log_generator(u_mat, cfg.h)
    v_op = collocation_potential_operator(v, grid)
    z0 = z0_composition(resolvent_scales(scheme), cfg.h, grid)
    l_max = max(cfg.L, 1)
    corrections = [z1_closed_form(v_op, z0)]
    if l_max >= 2:
        corrections += z_ell_recursion(v_op, z0, l_max, k_max=cfg.k_max)

    lines = [f"scheme={scheme.name} K={cfg.K} h={_fmt(cfg.h)}",
             f"h0_estimate={_fmt(h0_estimate(v_op, cfg.alpha))}"]
    for ell, z in enumerate(corrections, start=1):
        lines.append(f"alpha_norm_Z{ell}={_fmt(alpha_norm(z, cfg.alpha))}")
    for ell in range(l_max + 1):
        s_l = assemble_modified_energy(cfg.h, z0, corrections, ell)
        gen_err = operator_norm(s_l.entries - s_oracle.entries)
        evals, evecs = np.linalg.eigh(s_l.entries)
        u_l = (evecs * np.exp(1j * cfg.h * evals)) @ evecs.conj().T
        rec_err = operator_norm(u_l - u_mat.entries)
        lines.append(f"L={ell} generator_error={_fmt(gen_err)} "
                     f"reconstruction_error={_fmt(rec_err)}")
    _write_lines(cfg.out, lines)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_list_schemes(machine: bool) -> int:
    for name in scheme_names():
        scheme = builtin_scheme(name)
        stage_text = ",".join(f"{s.kind.value}:{s.scale:.12g}"
                              for s in reversed(scheme.stages))
        if machine:
            print(f"name={name} order={scheme.declared_order} stages={stage_text}")
        else:
            print(f"{name} (order {scheme.declared_order}): {stage_text}")
    return EXIT_OK


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--scheme")
    p.add_argument("--stages")
    p.add_argument("--order", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--h", type=float)
    p.add_argument("--h-min", dest="h_min", type=float)
    p.add_argument("--h-max", dest="h_max", type=float)
    p.add_argument("--h-count", dest="h_count", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--band", type=int)
    p.add_argument("--potential")
    p.add_argument("--initial")
    p.add_argument("--L", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--spike-factor", dest="spike_factor", type=float)
    p.add_argument("--flat-factor", dest="flat_factor", type=float)
    p.add_argument("--dump-config", action="store_true")


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in parse_config_file(args.config).items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
    cfg.validate()
    return cfg


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="torusplit",
        description="Fourier-spectral splitting integrators on the torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "sweep", "bch-check"):
        _add_common_flags(sub.add_parser(name))
    ls = sub.add_parser("list-schemes")
    ls.add_argument("--machine", action="store_true")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    if args.command == "list-schemes":
        return cmd_list_schemes(args.machine)

    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK

    handler = {"evolve": cmd_evolve, "sweep": cmd_sweep,
               "bch-check": cmd_bch_check}[args.command]
    try:
        return handler(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BranchCutError as exc:
        print(f"numerical error (resonant h): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
