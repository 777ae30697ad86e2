#!/usr/bin/env python3
"""Write a synthetic Si absorption table, Im eps(omega), from a damped
Lorentz oscillator.

This is NOT measured data. It exists so the tabulated Kramers-Kronig path
has a self-contained Si input whose exact imaginary-frequency response is
known: eps(i xi) = 1 + (eps_s - 1) w0^2 / (w0^2 + xi^2 + gamma xi).
"""
import argparse
import math

HBAR_EV_S = 6.582119569e-16  # hbar in eV s

def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--static", type=float, default=11.67)
    ap.add_argument("--resonance", type=float, default=6.6e15, help="rad/s")
    ap.add_argument("--damping-ratio", type=float, default=0.1)
    ap.add_argument("--emin", type=float, default=1e-4, help="eV")
    ap.add_argument("--emax", type=float, default=1e3, help="eV")
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("-o", "--output", default="data/si_synthetic_lorentz.txt")
    a = ap.parse_args()

    w0 = a.resonance
    g = a.damping_ratio * w0
    with open(a.output, "w") as f:
        f.write("# SYNTHETIC silicon table, not measured data.\n")
        f.write(f"# damped Lorentz oscillator: eps_s = {a.static}, w0 = {w0:.6e} rad/s, gamma = {g:.6e} rad/s\n")
        f.write("# columns: photon energy (eV), Im eps\n")
        ratio = math.log(a.emax / a.emin)
        for i in range(a.rows):
            e = a.emin * math.exp(ratio * i / (a.rows - 1))
            w = e / HBAR_EV_S
            im = (a.static - 1) * w0 * w0 * g * w / ((w0 * w0 - w * w) ** 2 + (g * w) ** 2)
            f.write(f"{e:.10e} {im:.10e}\n")

if __name__ == "__main__":
    main()
