from setuptools import setup, find_namespace_packages

from os import path
this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()


setup(

    name="eulerchaos",
    version="0.1.0",
    description="Euler schemes, discretized Itô processes and interacting particle systems "
      "with measurable coefficients, with statistical verification of their error bounds.",
    packages=find_namespace_packages(include=['eulerchaos', 'eulerchaos.*']),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],

    entry_points={
        'console_scripts': [
            'eulerchaos = eulerchaos.app.eulerchaos:cli',
        ],
    },

    long_description=long_description,
    long_description_content_type='text/markdown',

    include_package_data=True,

    install_requires = [
        "numpy>=1.17",
        "numba",
        "scipy",
        "simple-parsing",
        "cached-property",
        "py-structs>=0.2.7,<1.0",
        "omegaconf>=2.1",
        "tqdm"
    ],

    extras_require={
        'tests': ['pytest'],
    },

    python_requires='>=3.8',
)
