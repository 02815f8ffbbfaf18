from setuptools import setup, find_packages

setup(
    name="semigroup-gka",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "python-dotenv",
        "sympy",
    ],
    extras_require={
        "test": [
            "pytest",
            "pytest-cov",
            "hypothesis",
        ],
    },
    entry_points={
        "console_scripts": [
            "semigroup-gka=semigroup_gka.cli:main",
            "sgka=semigroup_gka.cli:main",
        ],
    },
    python_requires=">=3.9",
    description="Semigroup GKA - group key agreement over commutative semigroup actions",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Security :: Cryptography",
    ],
)
