from setuptools import Extension, setup

# The compiled kernels are optional: rbte.kernels falls back to the numpy
# backend when the extension is missing (see rbte/kernels/__init__.py).
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rbte.kernels._native",
                ["src/rbte/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: the numpy fallback must stay bit-identical,
                # FMA contraction would perturb the orientation binning.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
