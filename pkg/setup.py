from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "crosscomm.mapeq._kernel",
                ["src/crosscomm/mapeq/_kernel.pyx"],
                # keep floating point bit-identical with the Python fallback
                extra_compile_args=["-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # No Cython available: install without the compiled kernel; the package
    # falls back to the pure-Python implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
