"""Build the optional compiled kernels; the package falls back to numpy without them."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [
            Extension(
                "icap._kernels",
                ["src/icap/_kernels.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
