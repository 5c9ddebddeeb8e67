"""Quick start script for Guichard Lab - the worked translation example in a few lines."""
import math
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from guichard_lab.utils import setup_console_encoding
from guichard_lab.families.translation import (
    TranslationConstants,
    build_translation_family,
    classify_regime,
    closed_form_l1,
    conserved_quantities,
)
from guichard_lab.geometry.curvature import curvature_row
from guichard_lab.lame.residuals import first_order_residuals
from guichard_lab.symmetry.verify import verify_generator

setup_console_encoding()
load_dotenv()


def quick_demo(xi_half_width: float = 1.0):
    """Build the c = (1, -1, -2) family, check it and print its invariants.

    Args:
        xi_half_width: Requested xi-range half width; clipped to the admissible interval
    """
    tc = TranslationConstants(
        alpha=(math.sqrt(3.0), 1.0, 2.0),
        c=(1.0, -1.0, -2.0),
        lambda_=-4.0,
        l1_0=1.0,
    )
    print(f"[*] Integrating translation family c={tc.c}, lambda={tc.lambda_}")
    net = build_translation_family(tc, (-xi_half_width, xi_half_width), clip=True)
    lo, hi = net.invariant.xi_range
    print(f"[OK] Admissible xi-interval: ({lo:.6f}, {hi:.6f})")

    report = first_order_residuals(net)
    worst = max(e.max_abs for e in report.entries)
    print(f"[{'OK' if report.passed else 'FAIL'}] First-order residuals: max {worst:.2e}")

    p = net.domain.center
    k = curvature_row(net, p)
    print(f"[OK] K1, K2, K3 = {k[0]:.10f}, {k[1]:.10f}, {k[2]:.10f}")
    print(f"[OK] Conserved quantities at xi=0: {conserved_quantities(net, 0.0)}")

    reduction = classify_regime(tc)
    print(f"[OK] Closed form: {reduction.regime} branch, k^2 = {reduction.k ** 2:.6f}")
    xi = 0.5 * hi
    print(f"     l1({xi:.4f}) closed form {closed_form_l1(tc, xi, reduction):.12f} vs integrated {net.invariant.profile(xi)[0][0]:.12f}")

    print("\n[*] Verifying the symmetry generator")
    sym = verify_generator()
    print(f"[{'OK' if sym.passed else 'FAIL'}] {len(sym.instances)} equation instances reduce to zero: {sym.passed}")


if __name__ == "__main__":
    width = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
    quick_demo(width)
