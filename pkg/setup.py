"""The setup script for the pressurelab package."""

import ast
import os
from setuptools import setup


PACKAGE_NAME = 'pressurelab'


def get_info(package_name):
    """Collect the setup() keywords from the dunder metadata at the top of the package's __init__.py."""
    # infotags is not on the package index, so the dunder tags are read straight from the syntax tree instead.
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), package_name, '__init__.py')
    with open(path, encoding='utf-8') as file:
        tree = ast.parse(file.read())
    tags = {}
    for node in tree.body:
        if isinstance(node, ast.Assign) and len(node.targets) == 1 and isinstance(node.targets[0], ast.Name):
            name = node.targets[0].id
            if name.startswith('__') and name.endswith('__'):
                try:
                    tags[name.strip('_')] = ast.literal_eval(node.value)
                except ValueError:
                    pass
    readme = os.path.join(os.path.dirname(path), os.pardir, 'README.md')
    with open(readme, encoding='utf-8') as file:
        long_description = file.read()
    return dict(
        name=package_name,
        version=tags['version'],
        author=tags['author'],
        url=tags['url'],
        license=tags['license'],
        description=tags['description'],
        long_description=long_description,
        long_description_content_type='text/markdown',
        packages=tags['packages'],
        package_data={package_name: ['model.schema.json']},
        entry_points=tags['entry_points'],
        python_requires='>=3.10',
        install_requires=['numpy>=1.17', 'scipy>=1.4', 'jsonschema>=4.0'],
        extras_require={
            'plot': ['matplotlib>=3.1'],
            'test': ['hypothesis>=5.0'],
        },
        classifiers=[
            'License :: OSI Approved :: MIT License',
            'Programming Language :: Python :: 3',
            'Topic :: Scientific/Engineering :: Mathematics',
        ],
    )


cwd = os.getcwd()
if os.path.dirname(__file__):
    os.chdir(os.path.dirname(__file__))
try:
    setup(**get_info(PACKAGE_NAME))
finally:
    os.chdir(cwd)
