from setuptools import find_packages, setup


def read_requirements(path="requirements.txt"):
    with open(path) as f:
        return [
            line.strip()
            for line in f
            if line.strip() and not line.startswith("#") and not line.startswith(("pytest", "setuptools", "packaging"))
        ]


setup(
    name="eo-strata",
    version="0.1.0",
    description="Ekedahl-Oort stratum combinatorics for orthogonal and unitary Shimura varieties",
    packages=find_packages(exclude=["backend.tests"]),
    package_data={"backend": ["schemas/*.json"]},
    include_package_data=True,
    python_requires=">=3.9",
    install_requires=read_requirements(),
    entry_points={"console_scripts": ["eo=app.app:cli"]},
)
