"""Classify a few Monge-Ampère systems and decide which Poisson equations are variational."""
from edskit.geometry import WeingartenCoefficients, weingarten_orbit
from edskit.inverse import MongeAmpereSystem, is_euler_lagrange, ma_classify, poisson_el_test, poisson_system
from edskit.jets import JetChart
from edskit.noether import euclidean_frame
from edskit.scalar import to_text


def main():
    ch = JetChart(2, 1, 1)
    S = ch.coframe(1)
    p1, p2 = ch.pi(0), ch.pi(1)
    F = euclidean_frame(2)
    systems = {
        "Laplace": poisson_system(0, ch),
        "wave": MongeAmpereSystem(S, ch.theta(), S.b("dp1", "dx2") + S.b("dp2", "dx1")),
        "K = -1 surfaces": MongeAmpereSystem(F.space, F.theta, WeingartenCoefficients(1, 0, 1).psi(F)),
    }
    for name, ma in systems.items():
        print(f"{name:16s} {ma_classify(ma)['type']}")

    x1, z = ch.x[0], ch.z[0]
    for f in (x1 * (p1 ** 2 + p2 ** 2) / 2 + z * p1, p1 * p2, p1 ** 3):
        pr = poisson_el_test(f, chart=ch)
        cert = is_euler_lagrange(poisson_system(f, ch))
        print(f"Δz = {to_text(f)}: family test {pr.passed}, criterion {cert.verdict}")

    for t in [(1, 1, 1), (1, 2, 1), (5, 0, 3), (2, 7, 0), (3, 0, 0)]:
        print(f"Weingarten {t} -> {weingarten_orbit(t)}")


if __name__ == "__main__":
    main()
