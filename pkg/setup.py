#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os

from setuptools import setup

root = os.path.abspath(os.path.dirname(__file__))

version = __import__('fedcompare').__version__

with open(os.path.join(root, 'README.rst')) as f:
    README = f.read()

setup(
    name='fed-compare',
    version=version,
    license='MIT',

    description='Local, centralized and federated learning compared on '
                'synthetic non-IID cohorts',
    long_description=README + '\n\n',

    keywords='federated learning fedavg roc auc delong wilcoxon kappa',
    zip_safe=False,
    python_requires='>=3.6',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.3',
        'scikit-learn>=0.22',
        'xworkflows>=1.0.0',
    ],
    extras_require={
        'test': [
            'mock>=3.0',
            'hypothesis>=5.0',
            'pytest',
        ],
    },
    entry_points={
        'console_scripts': [
            'fedcompare = fedcompare.cli:main',
        ],
    },

    package_dir={'': '.'},
    include_package_data=False,
    package_data={'fedcompare': ['presets/*.cfg']},

    packages=[
        'fedcompare',
        'fedcompare.actors',
        'fedcompare.models',
        'fedcompare.querysets',
    ],
)
