"""Generate the bundled H2O STO-3G FCIDUMP fixtures and scan manifests.

Geometry convention: O at the origin, H1 = (r sin(t/2), r cos(t/2), 0),
H2 = (-r sin(t/2), r cos(t/2), 0). Orbitals are RHF canonical orbitals in
ascending energy order.

Usage: python3 tools/gen_fixtures.py [output_dir]
"""
import math
import os
import sys

from pyscf import gto, scf
from pyscf.tools import fcidump


def water(angle_deg, length):
    half = math.radians(angle_deg) / 2.0
    x = length * math.sin(half)
    y = length * math.cos(half)
    mol = gto.M(
        atom=[["O", (0.0, 0.0, 0.0)], ["H", (x, y, 0.0)], ["H", (-x, y, 0.0)]],
        basis="sto-3g",
        unit="Angstrom",
        symmetry=False,
        verbose=0,
    )
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged, (angle_deg, length)
    return mf


def write(mf, path):
    fcidump.from_scf(mf, path, tol=1e-14)


def name(angle, length):
    return f"h2o_a{angle:.1f}_r{length:.3f}.fcidump"


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    os.makedirs(out, exist_ok=True)
    os.makedirs(os.path.join(out, "grid"), exist_ok=True)
    os.makedirs(os.path.join(out, "angle_scan"), exist_ok=True)

    write(water(104.5, 0.945), os.path.join(out, "h2o_sto3g_104.5_0.945.fcidump"))

    with open(os.path.join(out, "angle_scan.manifest"), "w") as m:
        m.write("# H2O STO-3G angle scan at fixed O-H length 0.945 A\n")
        m.write("# angle_deg length_angstrom path\n")
        for i in range(21):
            angle = 85.0 + 2.0 * i
            fname = os.path.join("angle_scan", name(angle, 0.945))
            write(water(angle, 0.945), os.path.join(out, fname))
            m.write(f"{angle:.1f} 0.945 {fname}\n")

    with open(os.path.join(out, "grid.manifest"), "w") as m:
        m.write("# H2O STO-3G 2D grid: angles 85..125 step 5 deg, lengths 0.85..1.15 step 0.05 A\n")
        m.write("# angle_deg length_angstrom path\n")
        for i in range(9):
            angle = 85.0 + 5.0 * i
            for j in range(7):
                length = round(0.85 + 0.05 * j, 3)
                fname = os.path.join("grid", name(angle, length))
                write(water(angle, length), os.path.join(out, fname))
                m.write(f"{angle:.1f} {length:.3f} {fname}\n")


if __name__ == "__main__":
    main()
