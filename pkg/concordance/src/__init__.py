"""
Exact invariants, Casson-Gordon obstructions and bound aggregation.
"""
