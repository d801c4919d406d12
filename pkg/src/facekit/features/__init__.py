"""Feature families computed from normalized faces and their landmarks."""
