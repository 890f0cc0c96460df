# quality-clusters command-line entry point
import asyncio
import logging
import sys
from logging.handlers import TimedRotatingFileHandler
from typing import Sequence

from cli import responses
from cli.handlers import handlers
from cli.parser import build_parser
from core.config import settings
from core.errors import QualityEvaluationError

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


def setup_logging() -> None:
    log_handlers: list[logging.Handler] = [logging.StreamHandler()]
    if settings.LOG_FILE:
        file_handler = TimedRotatingFileHandler(
            filename=settings.LOG_FILE,
            when="midnight",  # Rotate at midnight
            interval=1,
            backupCount=settings.LOG_BACKUP_DAYS,
            encoding="utf-8",
        )
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        log_handlers.append(file_handler)

    logging.basicConfig(
        level=settings.LOG_LEVEL.upper(),
        format=LOG_FORMAT,
        handlers=log_handlers,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = handlers()[args.command]
    logger.info("Running command %s", args.command)
    try:
        return asyncio.run(handler(args))
    except QualityEvaluationError as e:
        logger.error(f"Command {args.command} failed: {e}")
        print(responses.STAGE_FAILED.format(error=e), file=sys.stderr)
        return 1
    except Exception:
        logger.exception(f"Fatal error in command {args.command}")
        print(responses.UNEXPECTED_ERROR, file=sys.stderr)
        return 2


if __name__ == "__main__":
    setup_logging()
    sys.exit(main())
