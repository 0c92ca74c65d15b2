from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="lpp-lab",
    version="0.1.0",
    author="lpp-lab developers",
    description="Exact Pfaffian distributions and Monte Carlo for stationary half-space last passage percolation",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["cli"],
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "pydantic>=2.0.0",
        "typing-extensions>=4.0.0",
        "click>=8.0.0",
        "rich>=13.0.0",
        "numpy>=1.24.0",
        "scipy>=1.11.0",
    ],
    entry_points={
        "console_scripts": [
            "lpp-lab=cli:main",
        ],
    },
)
