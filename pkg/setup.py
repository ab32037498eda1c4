import setuptools

from panel_fusion.__version__ import __version__

with open(file="README.md", mode="r", encoding="utf-8") as fh:
    long_description = fh.read()

base_packages = [
    "torch >= 1.13",
    "tqdm >= 4.66",
    "scikit-learn >= 1.5.0",
    "scipy >= 1.10",
    "numpy >= 1.24",
    "pandas >= 2.0",
]

dev = [
    "mkdocs-material == 9.2.8",
    "mkdocs-awesome-pages-plugin == 2.9.2",
    "pytest >= 7.4",
    "pytest-cov >= 4.1",
    "jsonschema >= 4.19",
]

setuptools.setup(
    name="panel_fusion",
    version=f"{__version__}",
    license="MIT",
    description="Latent block structures in panel regressions through doubly fused penalties.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=[
        "panel data",
        "heterogeneous coefficients",
        "fused penalty",
        "SCAD",
        "MCP",
        "ADMM",
        "clustering",
        "structural breaks",
    ],
    packages=setuptools.find_packages(exclude=["tests", "examples", "examples.*"]),
    package_data={"panel_fusion": ["schema/*.json"]},
    install_requires=base_packages,
    extras_require={"dev": base_packages + dev},
    entry_points={"console_scripts": ["panel-fusion = panel_fusion.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
)
