"""qpdlab: exact homological computations over graded quotient algebras.

Core pipeline: prime-field linear algebra -> Groebner bases -> truncated
graded modules -> chain complexes -> free resolutions -> quasi-projective
dimension certificates and ring classification.
"""

__version__ = "0.1.0"
