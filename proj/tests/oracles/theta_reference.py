"""High-precision theta(r, t) by direct quadrature of the real integral
representation (mpmath, 80 digits). Regenerates the table in src/oracles.cpp."""
import mpmath as mp

POINTS = [(1, 1), (0.5, 2), (2, 0.5), (1, 0.25), (5, 0.125), (0.3, 0.125), (1e-3, 5),
          (1e-6, 20), (50, 1), (10, 0.05), (0.01, 500), (3, 500)]


def theta(r, t, dps=80):
    mp.mp.dps = dps
    r, t = mp.mpf(r), mp.mpf(t)
    f = lambda w: mp.exp(-w**2 / (2 * t) - r * mp.cosh(w)) * mp.sinh(w) * mp.sin(mp.pi * w / t)
    wmax = mp.mpf(1)
    while -wmax**2 / (2 * t) - r * mp.cosh(wmax) + wmax > -200:
        wmax *= 1.2
    pts = [mp.mpf(0)]
    k = 1
    while k * t < wmax and k <= 4000:
        pts.append(k * t)
        k += 1
    pts.append(wmax)
    return r / mp.sqrt(2 * mp.pi**3 * t) * mp.exp(mp.pi**2 / (2 * t)) * mp.quad(f, pts)


if __name__ == "__main__":
    for r, t in POINTS:
        print(f"{{{r!r}, {t!r}, {mp.nstr(theta(r, t), 17)}}},")
