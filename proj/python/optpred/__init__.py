"""Optimal prediction for the Hald system and the 2D averaged Euler equations."""

from ._optpred import (
    a_enstrophy,
    a_operator,
    compare_decay,
    energy,
    equilibrium_variance,
    euler_mc,
    euler_sop,
    full_rhs,
    hald_hamiltonian,
    hald_mean_trajectory,
    hald_renormalized_hamiltonian,
    langevin_stationary_variance,
    rk4_step,
    run_cli,
    sample_equilibrium,
)

__all__ = [
    "a_enstrophy",
    "a_operator",
    "compare_decay",
    "energy",
    "equilibrium_variance",
    "euler_mc",
    "euler_sop",
    "full_rhs",
    "hald_hamiltonian",
    "hald_mean_trajectory",
    "hald_renormalized_hamiltonian",
    "langevin_stationary_variance",
    "rk4_step",
    "run_cli",
    "sample_equilibrium",
]
