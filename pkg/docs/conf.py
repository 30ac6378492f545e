# -*- coding: utf-8 -*-
#
# shrinkvar documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))


# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'shrinkvar'
copyright = u'2026, the shrinkvar developers'
author = u'the shrinkvar developers'

# The short X.Y version.
version = u'0.1'
# The full version, including alpha/beta/rc tags.
release = u'0.1'

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

numfig = True
numfig_secnum_depth = 1
math_number_all = True
numfig_format = {'figure': 'Figure %s', 'table': 'Table %s', 'code-block': 'Code %s', 'section': 'Section %s'}


# -- Options for HTML output ----------------------------------------------

import sphinx_rtd_theme
html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = ['_static']


# -- Options for HTMLHelp output ------------------------------------------

htmlhelp_basename = 'shrinkvardoc'


# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (master_doc, 'shrinkvar.tex', u'shrinkvar Documentation',
     u'the shrinkvar developers', 'manual'),
]


# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'shrinkvar', u'shrinkvar Documentation',
     [author], 1)
]
