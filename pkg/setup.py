#!/usr/bin/env python
# -*- coding:utf-8 -*-

from setuptools import setup, find_packages

setup(
    name='ballcalc',
    version='0.1.0',
    description='Ball-basis calculus on finite measure spaces: maximal operators, BMO/BLO norms'
    ' and the experiments checking their inequalities',
    packages=find_packages(exclude=["tests", "tests.*"]),
    zip_safe=False,
    python_requires=">=3.7",
    install_requires=[
        "click>=8.0",
        "click-log",
        "click-didyoumean",
        "tabulate",
        "networkx",
        "humanize",
        "cached-property",
        "numpy",
        "scipy",
    ],
    extras_require={
        "tests": [
            "pytest",
        ],
    },
    entry_points={
        'console_scripts':
        [
            'ballcalc=ballcalc.main:main',
        ]
    },
)
