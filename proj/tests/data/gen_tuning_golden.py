"""Independent high-precision evaluation of the theoretical parameter schedule.

Writes tuning_golden.json next to this script. Requires mpmath.
"""
import itertools
import json
import pathlib

from mpmath import log, mp, mpf, sqrt

mp.dps = 50


def params(b, L, eps, delta, omega, tau1):
    b, L, eps, delta, omega, tau1 = map(mpf, (b, L, eps, delta, omega, tau1))
    inner = (tau1 * log(128 / omega**2)
             + (2048 * b / (omega * delta)) * log((100 / omega) * (tau1 + 1) * (8 * b / delta + 1))**2
             + 1)
    nu = (mpf(1) / 10) * (320 * b * (L + 1) / eps**2 * inner)**(-2)
    r_max = (128 / omega) * log((100 / omega) * (tau1 + 1) * (8 * b / delta + 1) + log(1 / nu))**2
    I = tau1 * log(r_max / nu) + 8 * r_max * b / delta + 1
    eta = min(1 / (10 * L), 1 / (8 * L * I))
    J = 16 * b / (eta * eps**2)
    eps_hat1 = min(eps, eta * L, delta / 8)
    L1 = sqrt(2 * L * b)
    batch_value = eps_hat1**-2 * 140**2 * b**2 * log(1 / nu)
    batch_grad_y = eps_hat1**-2 * 140**2 * L1**2 * log(1 / nu)
    nu_ok = nu <= (mpf(1) / 10) / (2 * J * I + 2 * (r_max * 8 * b / delta + 1))
    r_max_ok = r_max >= (4 / omega) * log(100 * I / omega)
    values = dict(nu=nu, r_max=r_max, I=I, eta=eta, J=J, eps_hat1=eps_hat1, L1=L1,
                  batch_value=batch_value, batch_grad_y=batch_grad_y)
    return {k: float(v) for k, v in values.items()}, bool(nu_ok), bool(r_max_ok)


def main():
    cases = []
    for eps, delta in itertools.product([0.1, 0.5, 1.0], [0.1, 0.5, 1.0]):
        values, nu_ok, r_ok = params(1, 1, eps, delta, 0.5, 1)
        cases.append(dict(b=1.0, L=1.0, eps=eps, delta=delta, omega=0.5, tau1=1.0, values=values,
                          nu_bound_holds=nu_ok, r_max_bound_holds=r_ok))
    out = pathlib.Path(__file__).with_name("tuning_golden.json")
    out.write_text(json.dumps({"cases": cases}, indent=2) + "\n")


if __name__ == "__main__":
    main()
