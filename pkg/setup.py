from setuptools import setup, find_packages

setup(
    name="rtf-moment-verify",
    version="0.2.2",
    packages=find_packages(where='src'),  # Find packages inside src/
    package_dir={'': 'src'},              # Root package is in src/
    py_modules=['errors', 'precision', 'config', 'specialfn', 'modforms',
                'lfunc', 'geometric', 'verify', 'cli', 'main'],
    install_requires=[
        'numpy',
        'scipy',
        'mpmath',
    ],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['rtf-verify = main:main']},
)
