"""DateTime utilities for the application.

Centralizes timezone-related functionality to avoid code duplication.
"""

from __future__ import annotations

from datetime import datetime, timezone

import pytz

from core.config import settings


def report_timezone() -> pytz.BaseTzInfo:
    """Return the pytz zone configured for report timestamps."""
    return pytz.timezone(settings.REPORT_TIMEZONE)


def now_report_tz() -> datetime:
    """Return current naive datetime in the report timezone."""
    return datetime.now(timezone.utc).astimezone(report_timezone()).replace(tzinfo=None)


def report_timestamp() -> str:
    """Return an ISO-8601 stamp (seconds precision) with the zone name appended."""
    return f"{now_report_tz().isoformat(timespec='seconds')} {settings.REPORT_TIMEZONE}"
