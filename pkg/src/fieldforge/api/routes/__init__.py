"""
API routes for the FieldForge prediction service
"""
