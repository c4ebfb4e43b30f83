"""Contact sub-Finsler geometry engine: truncated metric connections,
Wagner-type curvature and parallel transport, with manifest-driven commands.

The heavy lifting lives in the compiled extension ``_core``; this package
re-exports it. When running from a build tree the extension may sit on
``sys.path`` directly rather than inside the package.
"""

try:
    from wagner._core import *  # noqa: F401,F403
    from wagner._core import __version__  # noqa: F401
except ImportError:
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
