"""Finite-dimensional noncommutative martingale toolkit.

Tracial matrix algebras with filtrations, generalized singular values,
symmetric function spaces, Cuculescu projections, the two-step decomposition
bounding K-functionals of conditioned Hardy couples, and a seeded harness that
checks martingale inequalities numerically.
"""
from .algebra import AlgebraError, Filtration, TracialAlgebra
from .cuculescu import CuculescuRun, cuculescu
from .jones import (FunctionCouple, HardyCouple, JonesDecomposition, KCurve, TailRegimeError,
                    jones_decompose, k_curve, k_ref, lambda_for, real_interp_norm)
from .martingale import Martingale, SequenceBundle, hardy_norm, square_function
from .rearrangement import StepFunction, integrate_power, mu, submajorizes
from .symspaces import (FParam, GenLorentz, Lorentz, Lp, Orlicz, OrliczFunction, OrliczLorentz,
                        WeightFunction, rho_function, theta_transform, truncation_k)
from .verify import InstanceSpec, RatioReport, generate_instance, run_suite

__version__ = "0.1.0"
