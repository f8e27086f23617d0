"""matprod: asymptotics of right-products of nonnegative matrices.

Modules
-------
core_linalg       exact/float matrices, scaled products, one-sided Jacobi SVD
support_algebra   support patterns, canonical column partitions, conjugation
coefficients      Lambda / lambda contraction coefficients, Birkhoff ratio
triangularization stable patterns and block-lower-triangular segment forms
limit_engine      condition-(C) checks, direction limits, decay certificates
bernoulli         the 7-dimensional linear representation of the Bernoulli
                  convolution at the root of x^3 = 2x^2 - x + 1
multifractal      natural-partition L^q exponents and Legendre spectra
experiments       worked chains: bistochastic, 3x3 divergence, 2x2 triangular,
                  random ensembles
cli               `matprod` command-line interface
"""

__version__ = "0.1.0"
