import logging

# ============================================================================
# Extra level below DEBUG for per-match / per-token chatter
CHATTY_LEVEL_NUM = 5
logging.addLevelName(CHATTY_LEVEL_NUM, "CHATTY")

def chatty(self, message, *args, **kws):
    if self.isEnabledFor(CHATTY_LEVEL_NUM):
        self._log(CHATTY_LEVEL_NUM, message, args, stacklevel=2, **kws)
logging.Logger.chatty = chatty

LEVEL_NAMES = ('CHATTY', 'DEBUG', 'INFO', 'WARN', 'WARNING', 'ERROR', 'CRITICAL')

# ============================================================================
class CustomFormatter(logging.Formatter):
    """Colored console output. Source location is only shown where it helps debugging."""
    grey     = "\x1b[38;20m"
    yellow   = "\x1b[33;20m"
    green    = "\x1b[32;20m"
    blue     = "\x1b[36;20m"
    red      = "\x1b[31;20m"
    bold_red = "\x1b[31;1m"
    reset    = "\x1b[0m"
    base     = "%(asctime)s %(name)s [%(levelname)s] %(message)s"
    where    = " (%(filename)s:%(lineno)d)"

    def __init__(self, use_color: bool = True):
        super().__init__()
        tint = {
            CHATTY_LEVEL_NUM: self.yellow,
            logging.DEBUG:    self.grey,
            logging.INFO:     self.green,
            logging.WARNING:  self.blue,
            logging.ERROR:    self.red,
            logging.CRITICAL: self.bold_red,
        }
        self.formatters = {}
        for level, color in tint.items():
            fmt = self.base if level == logging.INFO else self.base + self.where
            if use_color:
                fmt = color + fmt + self.reset
            self.formatters[level] = logging.Formatter(fmt)
        self.fallback = logging.Formatter(self.base)

    def format(self, record):
        return self.formatters.get(record.levelno, self.fallback).format(record)

# ============================================================================
slogger = logging.getLogger( 'multiway' )
# Completion traces go to a child so they can be filtered or redirected on their own
tracelogger = slogger.getChild( 'trace' )

if not slogger.hasHandlers():
    ch = logging.StreamHandler()
    ch.setFormatter(CustomFormatter())
    slogger.addHandler(ch)
    slogger.setLevel(logging.WARNING)

def set_level(name: str) -> None:
    """Accepts the CLI spelling (WARN, CHATTY, ...) as well as numeric strings."""
    name = str(name).upper()
    if name == 'WARN':
        name = 'WARNING'
    if name.isdigit():
        slogger.setLevel(int(name))
        return
    if name not in LEVEL_NAMES:
        raise ValueError(f"Unknown log level '{name}'")
    slogger.setLevel(name)

CHATTY   = slogger.chatty
DEBUG    = slogger.debug
INFO     = slogger.info
WARN     = slogger.warning
ERROR    = slogger.error
CRITICAL = slogger.critical
TRACE    = tracelogger.info
