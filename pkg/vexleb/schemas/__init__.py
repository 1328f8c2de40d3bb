# Pydantic schemas for grids, exponent fields and reports
