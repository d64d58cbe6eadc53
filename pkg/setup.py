"""Build hooks for the optional compiled Bessel core.

The package is pure Python plus one optional Cython extension,
``paulilt.specfun._corex``.  If Cython or a C compiler is missing the build
degrades to the NumPy fallback in ``paulilt.specfun._core`` (selected at
import time), so the extension failing to build must never fail the install.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades any compilation failure to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - best effort by design
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: building paulilt.specfun._corex failed ({exc!r}); "
              "falling back to the pure NumPy implementation.")


def _extensions():
    if os.environ.get("PAULILT_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "paulilt.specfun._corex",
        ["src/paulilt/specfun/_corex.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
