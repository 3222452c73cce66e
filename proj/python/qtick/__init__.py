from ._qtick import *  # noqa: F401,F403
from ._qtick import __version__  # noqa: F401
