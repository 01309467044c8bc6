from . import brownian, coefficients, diagnostics, engine, errors, io, krylov, meanfield, timegrid
