"""Decay rate of co-located emitters on a clean ring versus the golden rule.

Fits ``ln P_e`` over the Markovian window for several couplings ``g`` and
prints the fitted rate, its ratio to ``16 g^4 S^2 / v_g`` and to the
closed-form rate at ``f = 1``.  Also reports ``P_f`` at the default final
time, which shows whether the ring is long enough to absorb the doublon.

    python scripts/markovian_convergence.py --l-index 11 --g 0.2 0.1 0.05
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from mosaic_doublon.bands import decay_rate, group_velocity, resonant_momentum
from mosaic_doublon.dynamics import (
    Propagator,
    evolve,
    fit_decay_rate,
    initial_state,
    markovian_window,
    pf,
    return_time,
)
from mosaic_doublon.model import EmitterSpec, LatticeSpec, build_emitter_h
from mosaic_doublon.spectral import eigensolve


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--l-index", type=int, default=11)
    p.add_argument("--g", type=float, nargs="+", default=[0.2, 0.1, 0.05])
    p.add_argument("--two-omega-e", type=float, default=-5.77)
    p.add_argument("--u", type=float, default=-5.0)
    p.add_argument("--out", type=Path, help="optional CSV path")
    args = p.parse_args(argv)

    spec = LatticeSpec.from_fibonacci(args.l_index, kappa=3, U=args.u, lam=0.0)
    t_ret = return_time(spec)
    K0 = resonant_momentum(args.two_omega_e, spec)
    print(f"L={spec.L}  K0={K0:.4f}  v_g={float(group_velocity(K0, spec)):.4f}  return time={t_ret:.1f}")
    rows = ["g,gamma_fit,r2,gamma_formula_f1,ratio_formula,pf"]
    for g in args.g:
        em = EmitterSpec(N=2, omega_e=args.two_omega_e / 2, g=g)
        prop = Propagator(eigensolve(build_emitter_h(spec, em)))
        psi = initial_state(em, spec.L)
        traj = evolve(prop, psi, np.linspace(0.0, t_ret, 801))
        fit = fit_decay_rate(traj, markovian_window(traj, spec))
        formula = decay_rate(spec, em).Gamma
        final = pf(evolve(prop, psi, [0.0, 2e4]))
        print(f"g={g:<6} Gamma={fit.gamma:.4e} R^2={fit.r2:.4f} fit/f=1 formula={fit.gamma / formula:.3f} P_f={final:.3f}")
        rows.append(f"{g!r},{fit.gamma!r},{fit.r2!r},{formula!r},{fit.gamma / formula!r},{final!r}")
    if args.out:
        args.out.write_text("\n".join(rows) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
