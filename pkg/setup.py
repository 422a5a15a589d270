from setuptools import setup

setup(
    name='nhemitters',
    version='0.1.0',
    description='Quantum emitters coupled to non-Hermitian photonic lattices',
    license='MIT',
    packages=[
        'nhemitters',
        'sampling'
    ],
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.21',
        'scipy>=1.7',
    ],
    extras_require={
        'plots': ['matplotlib>=3.5'],
    },
    entry_points={
        'console_scripts': ['nhemitters = nhemitters.cli:main'],
    },
    zip_safe=True,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ])
