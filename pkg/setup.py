"""Build script: compiles the DSP kernel extension when Cython + a C compiler
are available. The package works without it (pure-Python kernels are selected
at import), so a failed extension build degrades to a warning, not an error.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"skipping compiled kernels ({exc}); "
                          "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); "
                          "pure-Python fallback will be used")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("voicebot._kernels._fast", ["src/voicebot/_kernels/_fast.pyx"])],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
