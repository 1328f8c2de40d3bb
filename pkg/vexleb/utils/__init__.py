# Utility functions for vexleb
