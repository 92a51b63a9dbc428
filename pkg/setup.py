import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FLUIDLIGHT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "fluidlight._kernel_cy",
                    ["src/fluidlight/_kernel_cy.pyx"],
                    # no -ffast-math: results must match the pure-Python
                    # kernel bit for bit
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
