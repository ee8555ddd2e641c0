import subprocess

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def pkg_config(flag, package):
    out = subprocess.check_output(["pkg-config", flag, package], text=True)
    return out.split()


fftw_cflags = pkg_config("--cflags", "fftw3")
fftw_libs = pkg_config("--libs", "fftw3")

ext = Pybind11Extension(
    "qclab._qclab",
    sources=[
        "src/gauge.cpp",
        "src/measure.cpp",
        "src/contents.cpp",
        "src/wolff.cpp",
        "src/cantor.cpp",
        "src/beurling.cpp",
        "src/distortion.cpp",
        "bindings/module.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    extra_compile_args=fftw_cflags,
    extra_link_args=fftw_libs,
)

setup(
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
    packages=["qclab"],
    package_dir={"qclab": "python/qclab"},
)
