#
# nhemitters documentation build configuration file.
#
# Build with ``sphinx-build -b html docs docs/_build``.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
]
autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'

project = 'nhemitters'
copyright = '2024, nhemitters contributors'
author = 'nhemitters contributors'
version = '0.1'
release = '0.1.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'alabaster'
htmlhelp_basename = 'nhemittersdoc'

latex_documents = [
    (master_doc, 'nhemitters.tex', 'nhemitters Documentation', author,
     'manual'),
]
man_pages = [
    (master_doc, 'nhemitters', 'nhemitters Documentation', [author], 1),
]
