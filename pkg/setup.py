#!/usr/bin/env python3
import os
import setuptools

here = os.path.abspath(os.path.dirname(__file__))


def requirements() -> str:
    with open(os.path.join(here, "requirements.txt")) as file:
        return "".join(
            line
            for line in file.readlines()
            if not line.startswith("-")
        )


if __name__ == "__main__":
    setuptools.setup(
        name="hkcalc",
        version=os.getenv("VERSION") or "0.0",
        description="Hilbert-Kunz functions of disjoint-term trinomials over F_p",
        license="MIT",
        packages=setuptools.find_packages(include=[
            "hkcalc",
            "hkcalc.*",
        ]),
        package_data={
            "hkcalc": ["configs/*"],
        },
        entry_points={
          "console_scripts": [
              "hkcalc = hkcalc.hkcalc:main",
          ],
        },
        python_requires=">=3.9",
        install_requires=requirements(),
        include_package_data=True,
    )
