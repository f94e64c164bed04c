from setuptools import setup, find_packages

setup(
    name="bssd-toolkit",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    entry_points={"console_scripts": ["bssd = src.cli:main"]},
)
