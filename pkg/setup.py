import numpy
from setuptools import Extension, setup

# The compiled kernel is optional: if Cython (or a C compiler) is missing the
# package falls back to the pure-numpy implementation in shearedge.kernels.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "shearedge._speedup",
                ["src/shearedge/_speedup.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
