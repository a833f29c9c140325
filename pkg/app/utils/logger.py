import logging
import sys

from app.config import Config

logger = logging.getLogger("InvisiScat")
logger.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))

if Config.LOG_FILE:
    handler = logging.FileHandler(Config.LOG_FILE)
else:
    handler = logging.StreamHandler(sys.stderr)
formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)

if not logger.hasHandlers():
    logger.addHandler(handler)
