from qclab._qclab import *  # noqa: F401,F403
from qclab._qclab import __doc__  # noqa: F401

__version__ = "0.1.0"
