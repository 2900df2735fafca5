# ===========================================
# checks/__init__.py
# ===========================================
"""Experiment subcommands, one check per module"""
