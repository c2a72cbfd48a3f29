"""Command-line entry points.

The pole and gate paths run without any simulation so they can serve as
fast smoke checks; `run` and `figure` are the long-running data producers.
"""

from __future__ import annotations

import sys

import click

from .config import ConfigError, parse_config
from .infodecomp import DiscreteJoint, broja_pid, load_gate
from .params import SystemParams
from .response import retarded_poles_analytic, retarded_poles_numeric
from .sweep import emit_csv, figure_specs, run_figure, run_sweep

# Expected decomposition of the bundled gate distributions, in bits.
_GATE_EXPECTED = {
    "and": {"redundancy": 0.31127812445913283, "synergy": 0.5,
            "unique1": 0.0, "unique2": 0.0},
    "xor": {"redundancy": 0.0, "synergy": 1.0, "unique1": 0.0, "unique2": 0.0},
    "copy": {"redundancy": 1.0, "synergy": 0.0, "unique1": 0.0, "unique2": 0.0},
}
_GATE_TOL = {"and": 1e-3, "xor": 1e-6, "copy": 1e-6}


@click.group()
def main():
    """Driven dissipative Kerr-pair simulator and analysis toolkit."""


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default="sweep.csv", show_default=True,
              help="CSV output path; a .meta.json sidecar is written next to it.")
def run(config_file, output):
    """Run the sweep described by a YAML config file."""
    try:
        with open(config_file) as fh:
            config = parse_config(fh.read())
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    records = run_sweep(config)
    emit_csv(records, output, config)
    failed = [rec for rec in records if rec.error]
    click.echo(f"wrote {output} ({len(records)} points, "
               f"{len(failed)} failed)")
    if failed:
        for rec in failed:
            click.echo(f"  {config.sweep_parameter}={rec.value:g}: {rec.error}",
                       err=True)


@main.command()
@click.argument("name")
@click.option("-o", "--outdir", default="figures", show_default=True)
def figure(name, outdir):
    """Regenerate the data behind a named figure panel."""
    if name == "list":
        for key in sorted(figure_specs()):
            click.echo(key)
        return
    try:
        written = run_figure(name, outdir)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
@click.argument("joint_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", default=1e-9, show_default=True)
def pid(joint_csv, tol):
    """Decompose a joint distribution stored as (s, x1, x2, prob) CSV."""
    result = broja_pid(DiscreteJoint.from_csv(joint_csv), tol=tol)
    for name in ("mi_joint", "mi_1", "mi_2", "redundancy", "synergy",
                 "unique1", "unique2", "syn_norm", "rdn_norm"):
        click.echo(f"{name} = {getattr(result, name):.6f}")


@main.command()
@click.option("--delta", default=-2.0, show_default=True)
@click.option("--j", default=2.0, show_default=True)
@click.option("--gamma", default=0.5, show_default=True)
def poles(delta, j, gamma):
    """Vacuum response poles, analytic and numeric."""
    params = SystemParams(delta=delta, j_coupling=j, u1=0.0, u2=0.0,
                          gamma=gamma, f_strength=0.0)
    ana = retarded_poles_analytic(params)
    num = retarded_poles_numeric(params)
    for label, ps in (("analytic", ana), ("numeric", num)):
        click.echo(f"{label}: slow {ps.slow[0]:.6g}, {ps.slow[1]:.6g} | "
                   f"fast {ps.fast[0]:.6g}, {ps.fast[1]:.6g}")


@main.command("validate-gates")
def validate_gates():
    """Check the bundled gate distributions against their exact decompositions."""
    failed = False
    for name, expected in _GATE_EXPECTED.items():
        result = broja_pid(load_gate(name))
        tol = _GATE_TOL[name]
        worst = max(abs(getattr(result, key) - val)
                    for key, val in expected.items())
        status = "ok" if worst <= tol else "FAIL"
        failed = failed or worst > tol
        click.echo(f"{name:<5} max deviation {worst:.2e} (tol {tol:g}) {status}")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
