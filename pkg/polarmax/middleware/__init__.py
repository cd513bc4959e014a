# Middleware package - subcommand wrappers
