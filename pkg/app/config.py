# app/config.py
import os


class Config:
    THREADS = max(1, int(os.environ.get('INVISISCAT_THREADS', os.cpu_count() or 1)))
    LOG_FILE = os.environ.get('INVISISCAT_LOG_FILE')
    LOG_LEVEL = os.environ.get('INVISISCAT_LOG_LEVEL', 'INFO')
    WORK_BUDGET = int(os.environ.get('INVISISCAT_WORK_BUDGET', 10_000_000))
    SEED = int(os.environ.get('INVISISCAT_SEED', 20240611))
    TESTING = False


class TestingConfig(Config):
    THREADS = 1
    TESTING = True
