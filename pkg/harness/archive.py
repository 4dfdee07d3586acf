import logging

from django.conf import settings

logger = logging.getLogger(__name__)


def archive_sweep(manifest, rows):
    """
    Store a finished sweep in MongoDB when USE_MONGODB is on. Returns the
    run id, or None when archiving is off or failed; failures are logged only.
    """
    if not settings.USE_MONGODB:
        return None
    from mongo_models import MongoSweepRun

    try:
        return MongoSweepRun.create_run(manifest, rows).run_id
    except Exception as e:
        logger.error(f"Could not archive sweep run: {e}")
        return None
