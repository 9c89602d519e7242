from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

ext_module = Extension(
    "dentropy._kernels",
    ["src/dentropy/_kernels.pyx"],
    include_dirs=[np.get_include()],
    libraries=["m"],
    extra_compile_args=["-O3", "-funroll-loops"],
)

setup(ext_modules=cythonize(ext_module, language_level=3))
