#!/usr/bin/env python
from setuptools import find_packages, setup

readme = open('README.rst').read()

setup(
    name='django-mahnn',
    version='0.1.0',
    description="""A multichannel attention text classifier for django""",
    long_description=readme,
    long_description_content_type='text/x-rst',
    packages=find_packages(include=['mahnn', 'mahnn.*']),
    include_package_data=True,
    python_requires='>=3.7',
    install_requires=[
        'Django >= 3.1',
        'numpy >= 1.17',
    ],
    test_suite="runtests.runtests",
    license="GNU Public License",
    zip_safe=False,
    keywords='django-mahnn text classification attention lstm cnn',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: Django',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
)
