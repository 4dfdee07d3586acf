"""
MongoDB connection handler for archiving sweep runs.

The simulator's products are the CSV and manifest files; MongoDB is an
optional archive enabled with USE_MONGODB. The connection is opened on
first use, so importing this module never touches the network.
"""

import logging

import pymongo
from django.conf import settings

logger = logging.getLogger(__name__)


class MongoDBHandler:
    _instance = None
    _client = None
    _database = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def connect(self):
        """Establish connection to MongoDB"""
        try:
            connection_string = settings.MONGODB_CONNECTION_STRING
            database_name = settings.MONGODB_DATABASE_NAME

            self._client = pymongo.MongoClient(connection_string, serverSelectionTimeoutMS=5000)
            self._database = self._client[database_name]

            # Test connection
            self._client.server_info()
            logger.info(f"Connected to MongoDB database: {database_name}")

        except Exception as e:
            logger.error(f"Failed to connect to MongoDB: {e}")
            self._client = None
            self._database = None
            raise

    def get_database(self):
        if self._database is None:
            self.connect()
        return self._database

    def get_collection(self, collection_name):
        return self.get_database()[collection_name]

    def close_connection(self):
        if self._client:
            self._client.close()
            self._client = None
            self._database = None


# Global instance
mongo_handler = MongoDBHandler()
