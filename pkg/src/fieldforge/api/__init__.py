"""
API package for the FieldForge prediction service
"""
