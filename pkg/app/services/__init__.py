"""Domain services: symplectic arithmetic, words, atlases, fibrations and bounds."""
