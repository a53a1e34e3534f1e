"""
Reading and writing branch models.

A model file is a JSON document:

    {"branches": [{"c": 0.4, "step": -1}, {"c": 0.6, "step": 1, "left": 0.4}],
     "potential_depth": 1,
     "name": "walk"}

Either every branch gives its left endpoint or none does, in which case the branches are packed from 0 in the order
given. Wherever a model file is expected, a registered family shorthand such as rw_0.4_0.6 may be given instead.
"""

import functools
import json
import logging
import os
import tempfile

import jsonschema

from pressurelab.exceptions import ModelFileError, PressureLabError
from pressurelab.families import resolve_shorthand
from pressurelab.symbolic import BranchModel, build_model

__author__ = 'pressurelab developers'
__all__ = [
    'SCHEMA_PATH',
    'parse_model',
    'load_model',
    'dump_model',
    'write_atomically',
]


_LOGGER = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), 'model.schema.json')


def _fail(message, source):
    raise ModelFileError("%s: %s" % (source, message), module='modelfile', operation='load_model')


@functools.lru_cache(maxsize=None)
def _validator():
    with open(SCHEMA_PATH, encoding='utf-8') as file:
        schema = json.load(file)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def parse_model(document, source='<model>'):
    """Validate a decoded model document against the model schema and build the BranchModel it describes."""
    try:
        _validator().validate(document)
    except jsonschema.ValidationError as error:
        location = '/'.join(str(part) for part in error.absolute_path)
        _fail("%s%s" % ('at %s: ' % location if location else '', error.message), source)
    return build_model(document['branches'], int(document.get('potential_depth', 1)), document.get('name'))


def load_model(source, potential_depth=None):
    """
    Load a model from a JSON file path or a family shorthand.

    :param source: A path to a model file, or a shorthand such as rw_0.4_0.6.
    :param potential_depth: Overrides the depth given by the file; shorthands default to 1.
    :return: A BranchModel.
    """
    if os.path.isfile(source):
        try:
            with open(source, encoding='utf-8') as file:
                document = json.load(file)
        except (OSError, ValueError) as error:
            raise ModelFileError("%s: %s" % (source, error), module='modelfile', operation='load_model')
        if potential_depth is not None and isinstance(document, dict):
            document = dict(document, potential_depth=potential_depth)
        model = parse_model(document, source)
    else:
        try:
            model = resolve_shorthand(os.path.basename(source), potential_depth or 1)
        except PressureLabError as error:
            raise ModelFileError("%s: %s" % (source, error), module='modelfile', operation='load_model')
        if model is None:
            raise ModelFileError("%s is neither a model file nor a family shorthand." % source,
                                 module='modelfile', operation='load_model')
    _LOGGER.info("Loaded %r from %s", model, source)
    return model


def write_atomically(path, text):
    """Write text to a temporary file beside the target and move it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix='.' + os.path.basename(path) + '.')
    try:
        with os.fdopen(handle, 'w', encoding='utf-8', newline='') as file:
            file.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def dump_model(model, path=None):
    """Serialise a model in the model file layout; write it to the path if one is given and return the text."""
    assert isinstance(model, BranchModel)
    text = json.dumps(model.to_dict(), indent=2) + '\n'
    if path is not None:
        write_atomically(path, text)
    return text
