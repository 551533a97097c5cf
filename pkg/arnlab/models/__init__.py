"""Persisted records: versioned artifacts, model bundles and predictions."""
