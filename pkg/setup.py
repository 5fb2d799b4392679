"""Builds the optional compiled kernels. Without Cython the package still
installs and uses the pure-Python kernels."""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("grail._kernels", ["src/grail/_kernels.pyx"],
                   include_dirs=[np.get_include()])],
        compiler_directives={"language_level": 3, "boundscheck": False,
                             "wraparound": False, "cdivision": True},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
