from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: the pure-Python kernel is used at runtime
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("tseqmine._span", ["src/tseqmine/_span.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
