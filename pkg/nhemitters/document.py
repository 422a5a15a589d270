"""
Model-spec documents: UTF-8 JSON describing a lattice and its emitters, or a
catalog expression ``name:key=value,...``.
"""
import json
from pathlib import Path
from typing import Tuple

from nhemitters import catalog
from nhemitters.errors import DocumentError, ModelError
from nhemitters.model import EmitterSet, EmitterSpec, HoppingTerm, \
    JumpOperatorSpec, JumpTerm, LatticeSpec


def _complex(item, re='re', im='im'):
    try:
        return complex(float(item.get(re, 0.0)), float(item.get(im, 0.0)))
    except (TypeError, ValueError) as exception:
        raise DocumentError('Bad complex number in {}: {}'.format(
            item, exception))


def _require(item, key):
    try:
        return item[key]
    except (KeyError, TypeError):
        raise DocumentError('Missing field {!r} in {}'.format(key, item))


def _couplings(item):
    # one sublattice inline, or a "couplings" list for several
    entries = item.get('couplings', [item])
    return {int(c.get('sublattice', 0)): _complex(c, 'g_re', 'g_im')
            for c in entries}


def parse(text) -> Tuple[LatticeSpec, EmitterSet]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exception:
        raise DocumentError('Not valid JSON: {}'.format(exception))
    if not isinstance(document, dict):
        raise DocumentError('Model document must be a JSON object')

    try:
        if 'catalog' in document:
            lattice = catalog.lookup(document['catalog'],
                                     **document.get('params', {}))
        else:
            lattice = LatticeSpec(
                dimension=int(_require(document, 'dimension')),
                sublattice_count=int(_require(document, 'sublattices')),
                hoppings=tuple(
                    HoppingTerm(_require(h, 'offset'), int(_require(h, 'from')),
                                int(_require(h, 'to')), _complex(h))
                    for h in document.get('hoppings', [])),
                jumps=tuple(
                    JumpOperatorSpec(int(j.get('channel', n + 1)), tuple(
                        JumpTerm(_require(t, 'offset'),
                                 int(_require(t, 'sublattice')), _complex(t))
                        for t in _require(j, 'terms')))
                    for n, j in enumerate(document.get('jumps', []))),
                kappa=float(document.get('kappa', 0.0)),
                max_range=int(document.get('max_range', 2)),
                name=str(document.get('name', 'custom')))

        emitters = EmitterSet([
            EmitterSpec(_require(e, 'cell'), _couplings(e),
                        _complex(e, 'delta_re', 'delta_im'))
            for e in document.get('emitters', [])])
    except ModelError as exception:
        raise DocumentError(str(exception)) from exception
    return lattice, emitters


def serialize(lattice: LatticeSpec, emitters: EmitterSet = EmitterSet(),
              expand=False) -> str:
    """
    Catalog lattices are written by name and parameters unless ``expand`` is
    set, in which case the full hopping and jump tables are written.
    """
    if lattice.name in catalog.CATALOG and lattice.params and not expand:
        document = {'catalog': lattice.name, 'params': lattice.parameters}
    else:
        document = _tables(lattice)
    document['emitters'] = []
    for emitter in emitters:
        item = {'cell': list(emitter.cell),
                'delta_re': emitter.detuning.real,
                'delta_im': emitter.detuning.imag}
        couplings = [{'sublattice': s, 'g_re': g.real, 'g_im': g.imag}
                     for s, g in emitter.sublattice_couplings]
        if len(couplings) == 1:
            item.update(couplings[0])
        else:
            item['couplings'] = couplings
        document['emitters'].append(item)
    return json.dumps(document, indent=2)


def _tables(lattice):
    return {
        'name': lattice.name,
        'dimension': lattice.dimension,
        'sublattices': lattice.sublattice_count,
        'kappa': lattice.kappa,
        'max_range': lattice.max_range,
        'hoppings': [{'offset': list(h.offset), 'from': h.from_sublattice,
                      'to': h.to_sublattice, 're': h.amplitude.real,
                      'im': h.amplitude.imag} for h in lattice.hoppings],
        'jumps': [{'channel': j.channel,
                   'terms': [{'offset': list(t.offset),
                              'sublattice': t.sublattice,
                              're': t.coeff.real, 'im': t.coeff.imag}
                             for t in j.terms]} for j in lattice.jumps],
    }


def parse_expression(expression) -> LatticeSpec:
    """``hatano_nelson:J=0.15,kappa=1`` -> LatticeSpec."""
    name, _, arguments = expression.partition(':')
    params = {}
    for argument in filter(None, arguments.split(',')):
        key, separator, value = argument.partition('=')
        if not separator:
            raise DocumentError('Expected key=value, got {!r}'.format(argument))
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise DocumentError('Parameter {} is not a number: {!r}'.format(
                key, value))
    try:
        return catalog.lookup(name.strip(), **params)
    except ModelError as exception:
        raise DocumentError(str(exception)) from exception


def load(source) -> Tuple[LatticeSpec, EmitterSet]:
    """Read a model document from a path, or a catalog expression."""
    path = Path(source)
    if path.suffix == '.json' or path.is_file():
        try:
            return parse(path.read_text(encoding='utf-8'))
        except OSError as exception:
            raise DocumentError('Cannot read {}: {}'.format(path, exception))
    return parse_expression(source), EmitterSet()
