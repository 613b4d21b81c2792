# -*- coding: utf-8 -*-
#
# fed-compare documentation build configuration file.

import sys, os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('../..'))

import fedcompare

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'fed-compare'
copyright = u'2026, fed-compare contributors'

version = fedcompare.__version__
release = fedcompare.__version__

exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'alabaster'
html_static_path = []
htmlhelp_basename = 'fed-comparedoc'

man_pages = [
    ('index', 'fed-compare', u'fed-compare Documentation',
     [u'fed-compare contributors'], 1)
]
