#!/usr/bin/env python3

from setuptools import find_packages, setup

setup(
    name='taseplib',
    version='0.0.0.dev2',
    description='Exact identities and asymptotics of multicolor TASEP',
    long_description=open('README.rst').read(),
    long_description_content_type='text/x-rst',
    url='https://github.com/blueskysolarracing/taseplib',
    author='Blue Sky Solar Racing',
    author_email='blueskysolar@studentorg.utoronto.ca',
    license='MIT',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'Topic :: Education',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],
    keywords=[
        'backwards geodesics',
        'exclusion process',
        'interacting particle systems',
        'kpz',
        'multicolor',
        'python',
        'second class particle',
        'shocks',
        'tasep',
        'tracy-widom',
    ],
    project_urls={
        'Documentation': 'https://taseplib.readthedocs.io/en/latest/',
        'Source': 'https://github.com/blueskysolarracing/taseplib',
        'Tracker': 'https://github.com/blueskysolarracing/taseplib/issues',
    },
    packages=find_packages(),
    install_requires=[
        'numba>=0.59.0,<1',
        'numpy>=1.26.0,<3',
        'scipy>=1.12.0,<2',
    ],
    python_requires='>=3.10',
    package_data={'taseplib': ['py.typed', 'data/*.csv']},
)
