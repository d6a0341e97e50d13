import logging

import sentry_sdk
import typer
from sentry_sdk.scrubber import EventScrubber

from disct.commands.discovery import discover_command
from disct.commands.experiments import (
    demo_chain_command,
    discover_sweep_command,
    power_command,
    type1_command,
)
from disct.commands.inference import citest_command, pair_command
from disct.commands.synth import gen_command
from disct.core.config import settings
from disct.utils.logger import setup_logging

logger = logging.getLogger(__name__)


def init_sentry() -> None:
    """Enable error reporting when a DSN is configured."""
    if not settings.sentry_dsn:
        return
    sentry_sdk.init(
        dsn=settings.sentry_dsn.strip().strip('"'),
        traces_sample_rate=0.0,
        environment=settings.sentry_environment,
        send_default_pii=False,
        event_scrubber=EventScrubber(),
    )
    logger.info("Sentry reporting enabled (%s)", settings.sentry_environment)


app = typer.Typer(
    name="disct",
    help=f"{settings.project_name}: conditional independence testing under discretization",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def startup() -> None:
    setup_logging(settings.log_level)
    init_sentry()


app.command("test", help="Latent independence test of one column pair")(pair_command)
app.command("citest", help="Conditional independence test given a conditioning set")(citest_command)
app.command("discover", help="PC causal discovery on a CSV table")(discover_command)
app.command("gen", help="Generate synthetic data")(gen_command)
app.command("type1", help="Type I error experiment")(type1_command)
app.command("power", help="Calibrated Type II error experiment")(power_command)
app.command("discover-sweep", help="Causal discovery sweep over random DAGs")(discover_sweep_command)
app.command("demo-chain", help="Binarized-chain demonstration")(demo_chain_command)


if __name__ == "__main__":
    app()
