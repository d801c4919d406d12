"""Human-performance summaries and human-model comparison statistics."""
