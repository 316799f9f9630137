"""Process-wide logger. Sweep workers log with the same format, the
process name tells them apart."""
import logging
import sys

from mps2cl.consts import LOGGER_NAME

LOG_FORMAT = '%(asctime)s | %(levelname)8s | %(processName)s | %(message)s'

logging.basicConfig(
    stream=sys.stdout,
    level=logging.INFO,
    format=LOG_FORMAT,
)
logging.captureWarnings(True)
LOGGER = logging.getLogger(LOGGER_NAME)


def set_level(level):
    """Apply ``level`` to our logger and to captured numpy/scipy warnings;
    also used as worker initializer."""
    LOGGER.setLevel(level)
    logging.getLogger('py.warnings').setLevel(level)
