from setuptools import setup

setup(name='shrinkvar',
      version='0.1',
      description='Exact risk, dominance and Bayes checks for shrinkage '
                  'estimators of a normal variance under entropy loss.',
      license='MIT licence',
      packages=['shrinkvar'],
      scripts = ['shrinkvar/shrinkvar'],
      python_requires='>=3.7',
      install_requires=[
          'numpy',
          'scipy',],
      extras_require={
          'test': ['pytest'],
          'plots': ['matplotlib'],},
      zip_safe=False)
