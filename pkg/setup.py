from setuptools import setup, find_packages

with open("README.md") as f:
    LONG_DESC = f.read()

setup(
    name="acep",
    version=0.1,
    description="Stallings-graph tools for the almost congruence extension property of subgroups of free groups",
    long_description=LONG_DESC,
    packages=find_packages(),
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "scipy",
        "matplotlib",
        "networkx",
        "tqdm",
        "ConfigArgParse",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={
        "console_scripts": [
            "acep-analyze = acep.scripts.acep_analyze:main",
            "acep-closure = acep.scripts.acep_closure:main",
            "acep-metric = acep.scripts.acep_metric:main",
        ]
    },
)
