"""
MongoDB document model for archived sweep runs.

One document per completed sweep: the run manifest plus its result rows,
stored in the `sweep_runs` collection.
"""

import logging
import math
import uuid
from datetime import datetime, timezone

from mongodb_handler import mongo_handler

logger = logging.getLogger(__name__)

COLLECTION = 'sweep_runs'


def _clean(value):
    # NaN cells are stored as null
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


class MongoSweepRun:
    """MongoDB sweep run document"""

    def __init__(self, **kwargs):
        self.collection = mongo_handler.get_collection(COLLECTION)
        self.data = kwargs

    @classmethod
    def create_run(cls, manifest, rows):
        """Archive a manifest dict and its result rows; returns the stored run."""
        run_data = {
            'run_id': uuid.uuid4().hex,
            'command': manifest.get('command'),
            'master_seed': manifest.get('master_seed'),
            'tool_version': manifest.get('tool_version'),
            'manifest': manifest,
            'rows': [{key: _clean(value) for key, value in row.items()} for row in rows],
            'created_at': datetime.now(timezone.utc),
        }
        collection = mongo_handler.get_collection(COLLECTION)
        result = collection.insert_one(run_data)
        run_data['_id'] = result.inserted_id
        logger.info(f"Archived sweep run {run_data['run_id']} ({len(rows)} rows)")
        return cls(**run_data)

    @classmethod
    def get_by_run_id(cls, run_id):
        collection = mongo_handler.get_collection(COLLECTION)
        run_data = collection.find_one({'run_id': run_id})
        return cls(**run_data) if run_data else None

    @classmethod
    def get_by_seed(cls, master_seed):
        """All archived runs for one master seed, newest first"""
        collection = mongo_handler.get_collection(COLLECTION)
        cursor = collection.find({'master_seed': master_seed}).sort('created_at', -1)
        return [cls(**run_data) for run_data in cursor]

    def delete(self):
        result = self.collection.delete_one({'_id': self.data['_id']})
        return result.deleted_count == 1

    def to_dict(self):
        return {
            'id': str(self.data.get('_id')),
            'run_id': self.data.get('run_id'),
            'command': self.data.get('command'),
            'master_seed': self.data.get('master_seed'),
            'tool_version': self.data.get('tool_version'),
            'rows': len(self.data.get('rows', [])),
            'created_at': self.data.get('created_at'),
        }

    @property
    def run_id(self):
        return self.data.get('run_id')

    @property
    def rows(self):
        return self.data.get('rows', [])

    @property
    def manifest(self):
        return self.data.get('manifest', {})
