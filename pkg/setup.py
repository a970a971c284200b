"""Build script: compiles the hot-loop kernels as a C extension when Cython
and a C compiler are available; otherwise the pure-Python kernels are used.

Set ROVERGYM_NO_EXT=1 to force a pure-Python install.

-ffp-contract=off (no fused multiply-add reassociation) and the disabled
sin/cos builtins (no sincos() fusion, which rounds differently from separate
libm calls) keep the compiled kernels bit-identical to the pure backend.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ROVERGYM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rovergym._kernels._core",
                    ["src/rovergym/_kernels/_core.pyx"],
                    extra_compile_args=[
                        "-O3",
                        "-ffp-contract=off",
                        "-fno-builtin-sin",
                        "-fno-builtin-cos",
                        "-fno-builtin-sincos",
                    ],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
