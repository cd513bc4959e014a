# Services package - numerical solvers and domain logic
