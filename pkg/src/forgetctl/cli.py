"""Command-line entry points.

Five commands: verify (residue scan for a selector), lint (anti-pattern scan
of a store config), match (precedent matching between two corpus files),
treemap (corpus summary export), bench (throughput and cleansing-impact
experiments), and serve (the HTTP request API).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .clock import SystemClock
from .cleanse.orchestrator import CleansingService
from .cleanse.register import VerificationRegister
from .engine.core import SearchEngine
from .errors import StoreError
from .selectors import parse_selector


@click.group()
def main() -> None:
    """Document store with verified right-to-be-forgotten erasure."""


@main.command()
@click.argument("selector")
@click.option("--data-dir", type=click.Path(path_type=Path), default=Path("data"),
              show_default=True, help="Engine data directory.")
def verify(selector: str, data_dir: Path) -> None:
    """Byte-scan every surface for residue of SELECTOR's documents.

    SELECTOR forms: 'subject=<id>', 'docs=<id1>,<id2>', or a bare subject id.
    """
    clock = SystemClock()
    engine = SearchEngine(data_dir / "engine", clock=clock)
    register = VerificationRegister(data_dir / "register")
    cleanser = CleansingService(engine, register, data_dir / "receipts", clock)
    report = cleanser.verify_absence(parse_selector(selector))
    click.echo(json.dumps(report.to_payload(), indent=1))
    sys.exit(0 if report.clean else 1)


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
def lint(config: Path) -> None:
    """Scan a store configuration for the six erasure anti-patterns."""
    from .precedent.linter import lint_file

    findings = lint_file(config)
    for finding in findings:
        click.echo(f"AP{finding.pattern_id} [{finding.severity}] "
                   f"{finding.location}: {finding.message}")
    if not findings:
        click.echo("no findings")
    sys.exit(0 if not findings else 2)


@main.command()
@click.argument("new_cases", type=click.Path(exists=True, path_type=Path))
@click.argument("corpus", type=click.Path(exists=True, path_type=Path))
@click.option("--details/--no-details", default=False,
              help="Print one line per case, not just the tally.")
def match(new_cases: Path, corpus: Path, details: bool) -> None:
    """Match each case in NEW_CASES against the precedent CORPUS."""
    from .precedent.cases import load_corpus
    from .precedent.matching import match_all, tally

    results = match_all(load_corpus(new_cases), load_corpus(corpus))
    if details:
        for case_id, result in sorted(results.items()):
            line = f"{case_id}: {result.kind}"
            if result.category is not None:
                line += f" ({result.category.value}"
                if result.matched_case_id:
                    line += f" via {result.matched_case_id}"
                line += ")"
            click.echo(line)
    click.echo(json.dumps(tally(results)))


@main.command()
@click.argument("corpus", type=click.Path(exists=True, path_type=Path))
@click.option("--json-out", type=click.Path(path_type=Path),
              default=Path("treemap.json"), show_default=True)
@click.option("--svg-out", type=click.Path(path_type=Path),
              default=Path("treemap.svg"), show_default=True)
def treemap(corpus: Path, json_out: Path, svg_out: Path) -> None:
    """Summarize CORPUS and export its category treemap."""
    from .precedent.cases import load_corpus
    from .precedent.summary import export_treemap, summarize

    summary = summarize(load_corpus(corpus))
    export_treemap(summary, json_out, svg_out)
    click.echo(json.dumps(summary.to_payload(), indent=1))
    click.echo(f"wrote {json_out} and {svg_out}", err=True)


@main.command()
@click.option("--track-size", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--challenge", "challenge_name", default="high-low",
              show_default=True,
              help="One of: high-low, prefix, range, fuzzy, wildcard, agg-wc-fz.")
@click.option("--impact-mode", type=click.Choice(["none", "single-doc", "batch-1k"]),
              default="none", show_default=True,
              help="Inject a cleansing delete mid-run and measure its impact.")
@click.option("--data-dir", type=click.Path(path_type=Path), default=None,
              help="Where to build the engine (default: a temporary directory).")
@click.option("--out", type=click.Path(path_type=Path), default=Path("bench-report.json"),
              show_default=True, help="JSON report path.")
@click.option("--plot", type=click.Path(path_type=Path), default=Path("bench-plot.png"),
              show_default=True, help="Throughput-vs-time plot path.")
@click.option("--workers", type=int, default=2, show_default=True)
def bench(track_size: int, seed: int, challenge_name: str, impact_mode: str,
          data_dir: Path | None, out: Path, plot: Path, workers: int) -> None:
    """Generate a track, load it, and run a throughput or impact experiment."""
    import tempfile

    from .bench import (Challenge, cleansing_impact, generate_track,
                        load_engine, render_plot, run_challenge)

    challenge = Challenge(challenge_name)
    click.echo(f"generating track: {track_size} docs, seed {seed}", err=True)
    track = generate_track(track_size, seed)

    with tempfile.TemporaryDirectory() as tmp:
        root = data_dir if data_dir is not None else Path(tmp)
        click.echo("indexing track", err=True)
        engine, cleanser = load_engine(track, root)
        if impact_mode == "none":
            click.echo(f"running challenge {challenge.name}", err=True)
            report = run_challenge(engine, track, challenge, seed=seed)
        else:
            click.echo(f"running {challenge.name} with {impact_mode} cleansing",
                       err=True)
            report = cleansing_impact(engine, cleanser, track, challenge,
                                      impact_mode, seed=seed, workers=workers)
    report.save(out)
    render_plot(report, plot)
    click.echo(json.dumps(report.summary, indent=1))
    click.echo(f"wrote {out} and {plot}", err=True)


@main.command()
@click.option("--data-dir", type=click.Path(path_type=Path), default=Path("data"),
              show_default=True)
@click.option("--policy-config", type=click.Path(exists=True, path_type=Path),
              default=None, help="Retention rules and exemption assertions (YAML).")
@click.option("--lint-config", type=click.Path(exists=True, path_type=Path),
              default=None, help="Store config served by GET /lint.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8571, show_default=True)
def serve(data_dir: Path, policy_config: Path | None,
          lint_config: Path | None, host: str, port: int) -> None:
    """Run the erasure-request HTTP API."""
    import uvicorn

    from .lifecycle.http import create_app
    from .lifecycle.service import RTBFService

    clock = SystemClock()
    engine = SearchEngine(data_dir / "engine", clock=clock)
    register = VerificationRegister(data_dir / "register")
    cleanser = CleansingService(engine, register, data_dir / "receipts", clock)
    policy = None
    if policy_config is not None:
        from .policy.config import load_policy_config
        policy = load_policy_config(policy_config)
    service = RTBFService(cleanser, clock, data_dir / "service",
                          policy_config=policy)
    app = create_app(service, lint_config=lint_config)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    try:
        main()
    except StoreError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
