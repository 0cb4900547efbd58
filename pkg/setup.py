"""Build script: compiles the Cython stepping kernel when a toolchain is
available, otherwise installs the pure-Python package (the solver falls back
to the numpy kernel at import time)."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from setuptools import Extension
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nlwrad._step_kernels",
                ["src/nlwrad/_step_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
