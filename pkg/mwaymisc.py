from pathlib import Path
from datetime import datetime
from logging.handlers import RotatingFileHandler
import hashlib

import psutil # type: ignore

from simpleLogger import slogger, CustomFormatter, CHATTY, DEBUG, INFO, WARN, ERROR, CRITICAL  # noqa: F401

# ============================================================================================
def human_count(value) -> str:
    value = int(value or 0)
    units = (
        (1_000_000_000, "B"),
        (1_000_000, "M"),
        (1_000, "k"),
    )
    for scale, suffix in units:
        if abs(value) >= scale:
            return f"{value / scale:.4g}{suffix}"
    return str(value)

# ============================================================================================
def resident_memory_mb() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)

# ============================================================================================
def stable_digest(*parts, size: int = 8) -> str:
    """Hex digest of the repr of parts. Independent of PYTHONHASHSEED, unlike hash()."""
    h = hashlib.blake2b(digest_size=size)
    for part in parts:
        h.update(repr(part).encode('utf-8'))
        h.update(b'\x1f')
    return h.hexdigest()

# ============================================================================================
def setup_rot_handler(logdir: str, tag: str = 'multiway') -> str:
    """Attach a size-rotated daily log file under logdir/tag. Returns the directory."""
    sublogdir = f"{logdir.rstrip('/')}/{tag}"
    Path(sublogdir).mkdir( parents=True, exist_ok=True )
    RotFileHandler = RotatingFileHandler(
        filename=f"{sublogdir}/{str(datetime.today().date())}.log",
        mode='a',
        maxBytes=25*1024*1024,
        backupCount=10,
        encoding=None,
        delay=0
    )
    RotFileHandler.setFormatter(CustomFormatter(use_color=False))
    slogger.addHandler(RotFileHandler)

    return sublogdir

