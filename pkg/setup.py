"""Build script for the optional compiled interface kernels.

Without Cython or a C compiler the package still installs and falls back to
the pure-Python kernels.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build-time fallback
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("grpsse._kernels", ["src/grpsse/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
