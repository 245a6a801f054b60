"""
efcap Package Setup
Emden-Fowler equation on spherical caps: library, CLI and acceptance suites
"""

from pathlib import Path

from setuptools import setup, find_packages

HERE = Path(__file__).parent


def get_version() -> str:
    # core/__init__.py is the single version source
    for line in (HERE / "core" / "__init__.py").read_text().splitlines():
        if line.startswith("__version__"):
            return line.split("=", 1)[1].strip().strip("\"'")
    raise RuntimeError("core/__init__.py defines no __version__")


def get_long_description() -> str:
    readme = HERE / "README.md"
    return readme.read_text(encoding="utf-8") if readme.exists() else ""


setup(
    name="efcap",
    version=get_version(),
    author="efcap developers",
    description="Shooting, branch tracing and nonexistence certificates for -ΔU = |U|^{p-1}U on caps of S^N",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["core", "config"]),
    py_modules=["validate_results"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.20.0",
        "scipy>=1.7.0",
        "pandas>=1.5.0",
        "toml>=0.10.0",
        "rich>=10.0.0",
        "tqdm>=4.60.0",
    ],
    extras_require={
        "dev": [
            "pytest>=6.0.0",
            "hypothesis>=6.0.0",
            "mpmath>=1.2.0",
            "black>=21.0.0",
            "flake8>=3.9.0",
            "mypy>=0.910",
        ],
    },
    entry_points={
        "console_scripts": [
            "efcap=core.cli:main",
            "efcap-validate=validate_results:main",
        ],
    },
    package_data={"config": ["efcap_config.toml"]},
    include_package_data=True,
    zip_safe=False,
)
