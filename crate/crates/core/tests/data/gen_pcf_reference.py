"""Regenerates pcf_reference.json with mpmath at 40 significant digits."""
import json
import mpmath as mp

mp.mp.dps = 40
rows = []
for eps in [-8, -3, -0.5, 0, 1, 4, 8]:
    nu = mp.mpc(-0.5, -eps)
    for deg in [45, 225, -45, 135, 10]:
        for r in [0.5, 3, 6, 9, 15, 25, 40, 50]:
            z0 = r * mp.expjpi(mp.mpf(deg) / 180)
            z = mp.mpc(float(z0.real), float(z0.imag))
            d = mp.pcfd(nu, z)
            dd = mp.diff(lambda w: mp.pcfd(nu, w), z)
            rows.append({
                "nu": [float(nu.real), float(nu.imag)],
                "z": [float(z.real), float(z.imag)],
                "d": [mp.nstr(d.real, 20), mp.nstr(d.imag, 20)],
                "dd": [mp.nstr(dd.real, 20), mp.nstr(dd.imag, 20)],
            })
with open("pcf_reference.json", "w") as f:
    json.dump(rows, f)
