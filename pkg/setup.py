"""Build the optional compiled kernels.

The extension is skipped when Cython is missing or compilation fails;
the package then runs on its NumPy kernels.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """Treat a failed extension build as a warning."""

    def run(self):
        try:
            super().run()
        except Exception as err:  # compiler missing or failing
            print(f"warning: compiled kernels not built ({err}); using the NumPy kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as err:
            print(f"warning: {ext.name} not built ({err}); using the NumPy kernels")


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("leakywire._kernels", ["src/leakywire/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False, "cdivision": True},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
