import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DABRADAR_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("dabradar.estimators._kernel",
                       ["src/dabradar/estimators/_kernel.pyx"],
                       include_dirs=[np.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3", "-fcx-limited-range"])],
            language_level=3,
        )
    except ImportError:
        # no Cython/numpy at build time: ship the pure-Python kernel only
        ext_modules = []

setup(ext_modules=ext_modules)
