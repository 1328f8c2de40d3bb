# CLI subcommands for vexleb
