#!/usr/bin/env python3
"""
MPCA Setup Script
Installs the app package and the `mpca` console command
"""

from pathlib import Path

from setuptools import find_packages, setup

# test tooling stays in requirements.txt only
TEST_ONLY = ("pytest", "hypothesis")


def read_requirements():
    """Runtime requirements from requirements.txt"""
    lines = Path(__file__).with_name("requirements.txt").read_text().splitlines()
    return [
        line.strip() for line in lines
        if line.strip() and not line.startswith("#") and not line.startswith(TEST_ONLY)
    ]


setup(
    name="mpca",
    version="1.0.0",
    description="Minimum-power channel allocation solvers",
    long_description=Path(__file__).with_name("README.md").read_text(encoding="utf-8"),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["app", "app.*"]),
    py_modules=["main"],
    python_requires=">=3.8",
    install_requires=read_requirements(),
    extras_require={"test": ["pytest==7.4.2", "hypothesis==6.87.1"]},
    entry_points={"console_scripts": ["mpca=main:cli"]},
)
