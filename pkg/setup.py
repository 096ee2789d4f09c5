"""Build script for the optional compiled scheduling kernel."""

from setuptools import Extension, setup
from Cython.Build import cythonize

dpcore = Extension(
    "linewsn._dpcore",
    ["src/linewsn/_dpcore.pyx"],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize(
        [dpcore],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    ),
)
