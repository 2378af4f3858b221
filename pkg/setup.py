import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [
            Extension(
                "pachnerlab.kernels._ckernels",
                ["src/pachnerlab/kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
)
