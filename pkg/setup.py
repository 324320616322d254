import warnings

from setuptools import setup

# The compiled kernel is optional: if Cython or a C compiler is missing the
# package installs anyway and falls back to the pure-Python solver.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/voltplan/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    warnings.warn(f"building without compiled flow kernel: {exc}")

setup(ext_modules=ext_modules)
