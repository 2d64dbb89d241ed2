"""Build hook for the optional compiled loop kernel.

The package works without the extension (a pure-Python mirror is selected
at import time); the extension only accelerates the closed-loop simulator.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "rehabloop._kernel",
                ["src/rehabloop/_kernel.pyx"],
                # Keep scalar libm sin/cos: the sincos fusion GCC applies by
                # default differs from them by 1 ulp at some arguments, which
                # would break bit-identity with the pure-Python loop driver.
                extra_compile_args=[
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                    "-ffp-contract=off",
                ],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
