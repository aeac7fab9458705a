"""Build hook for the optional compiled enumeration kernel.

The package works without the extension (a pure Python twin is selected at
import time); set RTNFLOW_NO_EXT=1 to skip building it on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RTNFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("rtnflow._enum_core", ["src/rtnflow/_enum_core.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
