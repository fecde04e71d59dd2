"""
Knot and link concordance bounds package.
"""
