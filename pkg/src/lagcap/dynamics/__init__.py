"""Model Hamiltonian dynamics: flows, chords, admissibility and extensions."""
