from __future__ import annotations

import asyncio
import logging
import sys

from dotenv import load_dotenv

from rabi.config import load_settings
from rabi.logging import configure_logging
from rabi.main import EXIT_USAGE, main
from rabi.utils.errors import ConfigError


def run() -> int:
    load_dotenv()
    try:
        settings = load_settings()
    except ConfigError as exc:
        configure_logging()
        logging.getLogger("runner").error("invalid environment settings: %s", exc)
        return EXIT_USAGE
    configure_logging(settings.log_level)
    return asyncio.run(main(settings=settings))


if __name__ == "__main__":
    sys.exit(run())
