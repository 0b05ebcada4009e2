"""
IceVertex
States, determinant formulas for the partition function and exact state counts of the
six-vertex model with domain-wall boundaries and a partially reflecting end.
"""
import re
import sys
from setuptools import setup, find_packages

short_description = "Six-vertex model with domain-wall boundaries and a partially reflecting end."

# from https://github.com/pytest-dev/pytest-runner#conditional-requirement
needs_pytest = {'pytest', 'test', 'ptr'}.intersection(sys.argv)
pytest_runner = ['pytest-runner'] if needs_pytest else []

try:
    with open("README.md", "r") as handle:
        long_description = handle.read()
except IOError:
    long_description = None

with open("icevertex/_version.py", "r") as handle:
    version = re.search(r"__version__ = '([^']+)'", handle.read()).group(1)


setup(
    # Self-descriptive entries which should always be present
    name='icevertex',
    author='Luis Galvez',
    author_email='luisegalvezg@gmail.com',
    description=short_description,
    long_description=long_description,
    long_description_content_type="text/markdown",
    version=version,
    license='MIT',

    # Which Python importable modules should be included when your package is installed
    # Handled automatically by setuptools. Use 'exclude' to prevent some specific
    # subpackage(s) from being added, if needed
    packages=find_packages(),

    # Ships the sample parameter and state files in icevertex/data
    include_package_data=True,
    package_data={'icevertex': ['data/*.json', 'data/*.jsonl']},

    # Allows `setup.py test` to work correctly with pytest
    setup_requires=[] + pytest_runner,

    install_requires=['numpy >= 1.19.0',
                      'scipy >= 1.6.0',
                      'sympy >= 1.9',
                      'mpmath >= 1.2.0',
                      'matplotlib >= 3.1.3'],
    extras_require={'test': ['pytest >= 6.0',
                             'pytest-cov',
                             'hypothesis >= 6.0']},
    platforms=['Linux',
               'Mac OS-X',
               'Unix'],            # Valid platforms your code works on, adjust to your flavor
    python_requires=">=3.8",          # Python version restrictions

    # Manual control if final package is compressible or not, set False to
    # prevent the .egg from being made
    zip_safe=False,

    entry_points={
        'console_scripts': ['icevertex=icevertex.cli:main']
    },

)
