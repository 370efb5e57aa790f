from setuptools import setup, find_packages

setup(
    name="iterscb",
    version="1.0.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",
        "pandas>=1.5",
        "requests>=2.28"
    ],
    extras_require={"test": ["pytest>=7.0"]},
    entry_points={"console_scripts": ["iterscb = main:main"]}
)
