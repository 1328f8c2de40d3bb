# Service layer for vexleb
