import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

DETERMINIZE_CAP = int(os.getenv("WQOSEP_DETERMINIZE_CAP", "65536"))
DEFAULT_BUDGET  = int(os.getenv("WQOSEP_DEFAULT_BUDGET", "4"))
MAX_D           = int(os.getenv("WQOSEP_MAX_D", "64"))
DATA_DIR        = Path(os.getenv("WQOSEP_DATA_DIR", "."))
LOG_LEVEL       = os.getenv("WQOSEP_LOG_LEVEL", "WARNING").upper()
LOGGING_CONFIG  = Path(
    os.getenv("WQOSEP_LOGGING_CONFIG", str(Path(__file__).resolve().parent.parent / "logging.ini"))
)
LOG_FORMAT      = "%(levelname)-5.5s [%(name)s] %(message)s"
ALLOWED_ORIGINS = os.getenv("ALLOWED_ORIGINS", "*").split(",")


def setup_logging(verbose: bool = False) -> None:
    """Configure logging from logging.ini, or a plain stderr handler when it is missing."""
    import logging
    import logging.config

    if LOGGING_CONFIG.is_file():
        logging.config.fileConfig(LOGGING_CONFIG, disable_existing_loggers=False)
    else:
        logging.basicConfig(format=LOG_FORMAT, datefmt="%H:%M:%S")
    logging.getLogger("wqosep").setLevel("DEBUG" if verbose else LOG_LEVEL)
