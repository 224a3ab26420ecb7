from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    # -ffp-contract=off keeps the compiled stepper bit-identical to the
    # pure-Python fallback (no FMA fusion of the relaxation update).
    ext = Extension(
        "vo2onn._simcore_cy",
        ["src/vo2onn/_simcore_cy.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off"],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
