"""Select the interface-kernel implementation at import time.

The compiled extension is preferred; set GRPSSE_BACKEND=python to force the
pure-Python kernels (or =compiled to fail loudly when the extension is absent).
"""

import os

_choice = os.environ.get("GRPSSE_BACKEND", "auto").lower()

if _choice == "python":
    from . import _pykernels as kernels
elif _choice == "compiled":
    from . import _kernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _pykernels as kernels

BACKEND = "compiled" if kernels.__name__.endswith("._kernels") else "python"

__all__ = ["kernels", "BACKEND"]
