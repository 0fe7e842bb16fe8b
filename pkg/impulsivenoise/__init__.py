#
# I M P U L S I V E N O I S E
#
# Poisson shot noise of random AR(2) impulses over Gaussian background, with
# closed-form cumulants, densities and spectra to check simulated or measured traces.
#
#
import logging
from datetime import datetime

__NAME__ = "impulsivenoise"
__DESCRIPTION__ = "Non-Gaussian impulsive noise synthesis and closed-form statistics for shot-noise processes"
__LICENSE__ = "MIT"
__LICENSEURL__ = "https://mit-license.org"
__COPYRIGHT__ = f"© 2024-{datetime.now().strftime('%Y')} impulsivenoise developers"
__version__ = "1.2.0"
__version_info__ = tuple(map(int, __version__.split(".")))
__version_name__ = "production"
#
#
# ##########################################################################

SPAM_LEVEL = 15
SPAM = "SPAM"
LOGFILE = None  # "impulsivenoise.log"
FORMAT = "[%(asctime)s] %(levelname)s %(threadName)s %(filename)s:%(funcName)s:%(lineno)d: %(message)s"

logging.addLevelName(SPAM_LEVEL, SPAM)

# ##############################################################
# References used throughout the package
#
from .constant import *
from .error import *

#
# ##########################################################################


# ##############################################################
# Utility functions
#
def all_subclasses(cls) -> list:
    """Returns the list of all subclasses.

    Recurses through all sub-sub classes

    Returns:
        [list]: list of all subclasses

    Raises:
        ValueError: If invalid class found in recursion (types, etc.)
    """
    if cls == type:
        raise ValueError("Invalid class - 'type' is not a class")
    subclasses = set()
    stack = []
    try:
        stack.extend(cls.__subclasses__())
    except (TypeError, AttributeError) as ex:
        raise ValueError("Invalid class" + repr(cls)) from ex
    while stack:
        sub = stack.pop()
        subclasses.add(sub)
        try:
            stack.extend(s for s in sub.__subclasses__() if s not in subclasses)
        except (TypeError, AttributeError):
            continue
    return sorted(subclasses, key=lambda c: c.__name__)


def set_logging_level(names: str | list):
    """Switches the named loggers to DEBUG.

    Names are either a list or a comma-separated string, as in ROOT_DEBUG.
    """
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip() != ""]
    for name in names:
        l = logging.getLogger(name)
        l.setLevel(logging.DEBUG)
        l.debug(f"set_logging_level: {name} set to debug")
