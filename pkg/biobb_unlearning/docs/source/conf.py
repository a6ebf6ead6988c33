# biobb_unlearning documentation build configuration file.
import sys
from pathlib import Path

sys.path.insert(0, str(Path('../../').resolve()))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx_rtd_theme',
    'recommonmark'
]

napoleon_numpy_docstring = False
napoleon_google_docstring = True

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
master_doc = 'index'

project = u'biobb_unlearning'
copyright = u'2026, Bioexcel Project'
author = u'Bioexcel Project'
version = u'1.0.0'
release = u'1.0.0'
language = 'en'
exclude_patterns: list[str] = []
pygments_style = 'sphinx'
todo_include_todos = False

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'biobb_unlearning_doc'

latex_documents = [
    (master_doc, 'biobb_unlearning.tex', u'biobb_unlearning Documentation',
     u'Bioexcel Project', 'manual'),
]
man_pages = [
    (master_doc, 'biobb_unlearning', u'biobb_unlearning Documentation',
     [author], 1)
]
texinfo_documents = [
    (master_doc, 'biobb_unlearning', u'biobb_unlearning Documentation',
     author, 'biobb_unlearning', 'Exact machine unlearning building blocks.',
     'Miscellaneous'),
]
