from setuptools import setup, find_packages

setup(
    name="trisrsma",
    version="1.0.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    py_modules=["main"],
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "python-dotenv>=1.0.0",
        "psutil>=5.9.5",
    ],
    extras_require={
        "test": ["pytest>=7.4.0"],
    },
    entry_points={
        "console_scripts": ["trisrsma=main:main"],
    },
    author="silvioiatech",
    description="Energy-efficient RSMA precoding for TRIS transmitters in cognitive radio networks",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    python_requires=">=3.10",
)
