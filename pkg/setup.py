"""Build script: compiles the optional event-loop extension.

The package works without the extension (a pure-Python backend with
identical semantics is selected at import time), so any build failure
here is downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "glauberlab.engine._ckernels",
                ["src/glauberlab/engine/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - depends on toolchain
    warnings.warn(f"compiled engine disabled ({exc}); using pure-Python backend")
    ext_modules = []

setup(ext_modules=ext_modules)
