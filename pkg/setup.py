"""Build shim for the optional compiled kernel.

The package works without the extension (the pure-Python kernels are selected
at import time), so a missing Cython/compiler only costs speed.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "closurelab._kernels._fast",
                ["src/closurelab/_kernels/_fast.pyx"],
                # -ffp-contract=off: keep IEEE-identical results with the
                # pure-Python reference kernels (no FMA contraction).
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
