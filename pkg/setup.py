import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "treecost._kernels",
        ["src/treecost/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# Without Cython the package still installs; treecost._backend falls back to
# the pure-numpy kernels at import time.
setup(ext_modules=cythonize(extensions, language_level=3) if cythonize else [])
