"""Sharp Sobolev constant engine - exact and numerical certificates."""
