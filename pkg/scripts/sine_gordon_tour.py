"""sine-Gordon from three angles: conserved densities, Bäcklund steps, the pseudosphere."""
import sys


from edskit.geometry import backlund_sg, export_mesh, pseudosphere_from_line, surface_curvature_numeric
from edskit.gensym import sine_gordon_densities
from edskit.scalar import to_text


def main(mesh_path=None):
    psi1, psi2, report = sine_gordon_densities()
    print("psi1 =", psi1.phi.to_text(), "->", psi1.transcript.verdict.value)
    print("psi2 =", psi2.phi.to_text(), "->", psi2.transcript.verdict.value)
    print("printed second density on the locus:", report["printed psi2"]["on_locus"])

    one = backlund_sg(seed=0, lam=1)
    print("first Bäcklund step from u = 0:", to_text(one.u), one.verification.verdict.value)
    two = backlund_sg(seed=one.u, lam=2, grid=101)
    print(f"second step on a 101x101 grid: residual sup {two.residual_sup:.2e}, "
          f"compatibility {two.compatibility:.2e}")

    ps = pseudosphere_from_line()
    print("pseudosphere:", [to_text(e) for e in ps.exprs])
    K = [k for k, _ in surface_curvature_numeric(ps, [(0.3, 0.5), (2.0, -1.2), (4.0, 2.5)])]
    print("Gauss curvature at three points:", [f"{float(k):.12f}" for k in K])
    if mesh_path:
        export_mesh(ps, (60, 60), mesh_path)
        print("mesh written to", mesh_path)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
