"""Surface bundle signature calculator: Meyer cocycle, fibration calculus and genus bounds."""
