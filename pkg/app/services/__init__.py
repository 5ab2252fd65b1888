"""Services module for state construction, certification and experiments."""
