from setuptools import find_packages, setup

setup(
    name="biflow",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=open("requirements.txt", encoding="utf-8").read().splitlines(),
    entry_points={
        "console_scripts": [
            "biflow=biflow.main:cli",
        ],
    },
    description="Numerical lab for fourth-order parabolic flows: biharmonic heat kernel, BMO norms, mild solutions",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    keywords=["pde", "biharmonic", "spectral", "bmo", "thin film"],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.11",
)
