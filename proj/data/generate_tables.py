"""Regenerates the bundled attenuation tables and the default spectrum.

Requires the `xraydb` package (Elam et al. tables, which agree with the NIST
XCOM/Hubbell-Seltzer values at the NIST energies). The generated files are
committed, so the C++ build never needs this script.
"""
import numpy as np
import xraydb

MATERIALS = {
    # name: (formula or element, density g/cm3, is_element)
    "water": ("H2O", 1.0, False),
    "pmma": ("C5H8O2", 1.19, False),
    "iron": ("Fe", 7.874, True),
    "iodine": ("I", 4.93, True),
    "gadolinium": ("Gd", 7.90, True),
}
K_EDGES = {"I": 33169.0, "Gd": 50239.0}
GRID_KEV = np.round(np.arange(10.0, 150.0 + 1e-9, 0.5), 3)


def mass_mu(spec, energy_ev):
    formula, _, is_element = spec
    if is_element:
        return float(xraydb.mu_elam(formula, energy_ev))
    return float(xraydb.material_mu(formula, energy_ev, density=1.0))


def write_table(name, spec):
    formula, density, is_element = spec
    rows = [(e, mass_mu(spec, e * 1e3)) for e in GRID_KEV]
    edge = K_EDGES.get(formula) if is_element else None
    if edge is not None:
        ek = edge / 1e3
        rows = [r for r in rows if abs(r[0] - ek) > 1e-9]
        rows.append((ek, mass_mu(spec, edge - 10.0)))
        rows.append((ek, mass_mu(spec, edge + 10.0)))
        rows.sort(key=lambda r: (r[0], r[1]))
    with open(f"materials/{name}.tsv", "w") as f:
        f.write(f"# material: {name}\n")
        f.write(f"# density_g_cm3: {density}\n")
        f.write("# source: Elam/NIST-consistent photon cross sections (coherent+incoherent+photo)\n")
        f.write("# energy_keV mu_m_cm2_g\n")
        for e, v in rows:
            f.write(f"{e:.3f}\t{v:.6e}\n")


def write_spectrum():
    # Kramers-law bremsstrahlung at 80 kVp, 2.5 mm Al + 0.2 mm Cu filtration.
    # Stand-in only: the source spectrum of the original simulator is unknown.
    e = np.round(np.arange(10.0, 80.0 + 1e-9, 0.5), 3)
    kvp = 80.0
    fluence = np.clip(kvp - e, 0.0, None) / e
    mu_al = np.array([xraydb.material_mu("Al", x * 1e3) for x in e])  # 1/cm, default density
    mu_cu = np.array([xraydb.material_mu("Cu", x * 1e3) for x in e])
    fluence *= np.exp(-mu_al * 0.25 - mu_cu * 0.02)
    fluence /= fluence.max()
    with open("spectra/default_80kvp.tsv", "w") as f:
        f.write("# spectrum: kramers_80kvp_2.5mmAl_0.2mmCu\n")
        f.write("# energy_keV fluence (relative, photons per keV)\n")
        for x, v in zip(e, fluence):
            f.write(f"{x:.3f}\t{v:.6e}\n")


if __name__ == "__main__":
    for n, s in MATERIALS.items():
        write_table(n, s)
    write_spectrum()
