"""CLI commands powered by Click."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from loguru import logger
from pydantic import ValidationError

from src.config.models import BaselineName, UnfoldMode

EXIT_INVALID = 1
EXIT_RUNTIME = 2


@click.group()
@click.option(
    "--config",
    "config_path",
    default="config/config.yaml",
    show_default=True,
    help="Path to a config YAML or a run report JSON.",
)
@click.option("--seed", type=int, default=None, help="Override the master seed.")
@click.option("--out", "output_dir", default=None, help="Override the output directory.")
@click.pass_context
def cli(ctx: click.Context, config_path: str, seed: int | None, output_dir: str | None) -> None:
    """Multi-level sequence learners on graph unfoldings."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["overrides"] = {"seed": seed, "output_dir": output_dir}


def _guarded(action: Callable[[], Any]) -> Any:
    """Run ``action`` and map failures to exit codes (1 invalid input, 2 runtime)."""
    try:
        return action()
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        click.echo(f"Error: {exc}", err=True)
        raise SystemExit(EXIT_INVALID) from exc
    except Exception as exc:
        logger.exception(f"Run failed: {exc}")
        click.echo(f"Runtime error: {exc}", err=True)
        raise SystemExit(EXIT_RUNTIME) from exc


def _experiment(ctx: click.Context):
    from src.config.loader import load_config
    from src.core.experiment import Experiment
    from src.utils.logger import setup_logger

    config = load_config(ctx.obj["config_path"], ctx.obj["overrides"])
    setup_logger(config.logging, Path(config.output_dir) / "logs")
    return Experiment(config)


def _print_metrics(results: dict[str, dict[str, Any]], title: str) -> None:
    from rich.console import Console

    from src.data.export import metrics_table

    Console().print(metrics_table(results, title))


# ── synth ────────────────────────────────────────────────


@cli.command()
@click.pass_context
def synth(ctx: click.Context) -> None:
    """Generate a spammer-hammer dataset (edges, labels, truth)."""

    def _synth() -> None:
        result = _experiment(ctx).run_synth()
        click.echo(
            f"Wrote {result.metrics['n_edges']} edges and {result.metrics['n_labels']} labels"
        )
        for name, path in result.artifacts.items():
            click.echo(f"  {name}: {path}")

    _guarded(_synth)


# ── train ────────────────────────────────────────────────


@cli.command()
@click.pass_context
def train(ctx: click.Context) -> None:
    """Train an MLSL model; writes model, history, metrics and report."""

    def _train() -> None:
        result = _experiment(ctx).run_train()
        _print_metrics({"mlsl": result.metrics}, "Test metrics")
        click.echo(f"Model -> {result.artifacts['model']}")

    _guarded(_train)


# ── eval ─────────────────────────────────────────────────


@cli.command("eval")
@click.option("--model", "model_path", default=None, help="Model file (default: <out>/model.json).")
@click.pass_context
def eval_cmd(ctx: click.Context, model_path: str | None) -> None:
    """Evaluate a saved model on the configured test split."""

    def _eval() -> None:
        experiment = _experiment(ctx)
        path = model_path or str(experiment.output_dir / "model.json")
        result = experiment.run_eval(path)
        _print_metrics({"mlsl": result.metrics}, "Evaluation")
        click.echo(f"Metrics -> {result.artifacts['metrics']}")

    _guarded(_eval)


# ── baseline ─────────────────────────────────────────────


@cli.command()
@click.option(
    "--which",
    type=click.Choice([b.value for b in BaselineName], case_sensitive=False),
    default=None,
    help="Baseline to run (default: baseline.name from config).",
)
@click.pass_context
def baseline(ctx: click.Context, which: str | None) -> None:
    """Run a label-aggregation baseline and score it on the test split."""

    def _baseline() -> None:
        result = _experiment(ctx).run_baseline(which)
        name = result.command.removeprefix("baseline_")
        _print_metrics({name: result.metrics}, "Baseline")
        click.echo(f"Metrics -> {result.artifacts['metrics']}")

    _guarded(_baseline)


# ── unfold ───────────────────────────────────────────────


@cli.command()
@click.argument("graph_path")
@click.argument("root")
@click.option("--depth", type=int, default=2, show_default=True)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in UnfoldMode], case_sensitive=False),
    default=UnfoldMode.ASYMMETRIC.value,
    show_default=True,
)
def unfold(graph_path: str, root: str, depth: int, mode: str) -> None:
    """Print the unfolding of GRAPH_PATH at ROOT."""

    def _unfold() -> None:
        from rich.console import Console
        from rich.text import Text
        from rich.tree import Tree

        from src.core.unfolding import unfold as unfold_graph
        from src.data.io import load_graph

        graph = load_graph(graph_path)
        tree = unfold_graph(graph, root, depth, UnfoldMode(mode))

        def label(node_id: int) -> Text:
            node = tree.node(node_id)
            text = f"{node.graph_node}  depth={node.depth}"
            if node.features is not None:
                feats = ", ".join(f"{v:g}" for v in node.features)
                text += f"  edge={node.edge_index} g=[{feats}]"
            return Text(text)

        view = Tree(label(tree.root))
        stack = [(tree.root, view)]
        while stack:
            node_id, branch = stack.pop()
            for child in tree.children_of(node_id):
                stack.append((child, branch.add(label(child))))

        console = Console()
        console.print(view)
        console.print(Text(f"{len(tree)} nodes ({mode}, depth {depth})"))

    _guarded(_unfold)


# ── check-config ─────────────────────────────────────────


@cli.command("check-config")
@click.pass_context
def check_config(ctx: click.Context) -> None:
    """Validate configuration without running anything."""
    try:
        from src.config.loader import load_config

        config = load_config(ctx.obj["config_path"], ctx.obj["overrides"])
        click.echo("Config is valid!")
        click.echo(f"  Seed:        {config.seed}")
        click.echo(f"  Data:        {config.data.source.value} (n_train={config.data.n_train})")
        click.echo(f"  Model:       depth={config.model.depth} levels={config.model.level_sizes}")
        click.echo(f"  Unfolding:   {config.train.unfolding.value}")
        click.echo(f"  Child order: {config.train.child_order.policy.value}")
        click.echo(f"  Epochs:      {config.train.epochs}")
        click.echo(f"  Baseline:    {config.baseline.name.value}")
        click.echo(f"  Output:      {config.output_dir}")
    except Exception as exc:
        click.echo(f"Config validation FAILED: {exc}", err=True)
        raise SystemExit(EXIT_INVALID) from exc
