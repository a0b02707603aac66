from setuptools import setup, find_packages
import os

def read_readme():
    readme_path = os.path.join(os.path.dirname(__file__), 'README.md')
    if os.path.exists(readme_path):
        with open(readme_path, 'r', encoding='utf-8') as f:
            return f.read()
    return "Partition Rank - extreme ranks and rank percentiles of a subset over connected partitions"

setup(
    name="partition-rank",
    version="0.1.0",
    description="Extreme ranks and rank percentiles of a subset over connected partitions",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    license="MIT",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"partition_rank": ["data/*.txt"]},
    install_requires=[
        "pydantic>=2.6.0",
        "networkx>=3.0",
    ],
    extras_require={"dev": ["pytest>=7.0"]},
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
    ],
    keywords=["partition", "rank", "percentile", "graph", "optimization"],
    entry_points={
        "console_scripts": [
            "partition-rank=partition_rank.main:main",
        ],
    },
    include_package_data=True,
)
