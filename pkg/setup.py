from setuptools import setup, find_packages


with open('README.md') as f:
    long_description = ''.join(f.readlines())

setup(
    name='mps2cl',
    version='0.3.0',
    description='Parent Hamiltonians of matrix product states, their renormalization '
                'to classical Hamiltonians and spectral gap stability checks',
    long_description=long_description,
    long_description_content_type='text/markdown',
    keywords='matrix product states parent hamiltonian spectral gap quantum channels',
    license='Apache License 2.0',
    packages=find_packages(exclude=['tests']),
    classifiers=[
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Utilities',
    ],
    zip_safe=False,
    python_requires='>=3.8, <4',
    install_requires=[
        'click',
        'numpy',
        'PyYAML',
        'scipy',
        'tenacity',
    ],
    extras_require={
        'test': ['pytest'],
    },
    setup_requires=[
        'wheel',
    ],
    entry_points={
        'console_scripts': [
            'mps2cl=mps2cl:main',
        ],
    },
)
