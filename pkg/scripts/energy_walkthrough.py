"""Walk through the energy functional ½|∇z|² + F(z): equation, Poincaré-Cartan form, energy law."""

from edskit.forms import VectorField
from edskit.jets import JetChart
from edskit.noether import noether
from edskit.scalar import function_symbol
from edskit.variational import el_display, el_equation, el_system, pc_form_classical


def main():
    ch = JetChart(3, 1, 1)
    F = function_symbol("F")
    L = sum(ch.pi(i) ** 2 for i in range(3)) / 2 + F(ch.z[0])
    E = el_equation(L, ch)
    print("Euler-Lagrange:", el_display(E, ch))

    pc = pc_form_classical(L, ch)
    print("Pi =", pc.Pi.to_text())
    print("checks:", pc.transcripts)

    el = el_system(pc)
    for i in range(3):
        v = VectorField.from_coordinates(pc.space, {ch.x[i]: 1})
        law = noether(v, pc, el)
        print(f"translation in x{i + 1}: d(phi) in the EL ideal -> {law.transcript.verdict.value}")
        print("   phi =", law.phi.to_text())


if __name__ == "__main__":
    main()
