from setuptools import setup, find_packages

with open("nefflow/version.py", encoding="utf-8") as fp:
    version = fp.read().split('"')[1]

setup(
    name="nefflow",
    version=version,
    description="Group actions on variance functions of natural exponential families",
    license="MIT",
    packages=find_packages(
        exclude=["*.__pycache__.*", "test", "test.*"],
    ),
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",
        "pyyaml>=5.4",
        "typeguard==4.0.0",
        "typing_extensions==4.5.0",
        "tqdm>=4.62",
        "prettytable>=2.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "nefflow=nefflow.cli.cli:main",
        ]
    },
    classifiers=[],
    python_requires=">=3.8, <3.13",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
)
