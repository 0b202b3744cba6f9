from .config import SolverSettings
from .cones import (
    PSD,
    Cone,
    ConeSpec,
    Exp,
    NonNeg,
    SecondOrder,
    Zero,
    project,
    project_dual,
    project_polar,
    smat,
    svec,
    svec_dim,
)
from .program import ConeProgram, ConeSolution, ProgramBuilder, SolverStatus, dump_program, load_program
from .solver import ConeSolver, solve

__all__ = [
    'SolverSettings',
    'Cone', 'ConeSpec', 'Zero', 'NonNeg', 'SecondOrder', 'PSD', 'Exp',
    'project', 'project_dual', 'project_polar', 'svec', 'smat', 'svec_dim',
    'ConeProgram', 'ConeSolution', 'ProgramBuilder', 'SolverStatus', 'dump_program', 'load_program',
    'ConeSolver', 'solve',
]
