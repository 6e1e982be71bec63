#!/usr/bin/env python3
"""
Print the order-of-magnitude estimates behind the proposed experiment.

Beat length, loop fiber length, magnon angle scales, inverse-Faraday kick and
the Faraday rotation of a pass through the sphere, for a range of sphere radii.
"""

import argparse

from rich.console import Console
from rich.table import Table

from physics.magnetooptics import Orientation, faraday_angle
from physics.params import (FieldParams, MaterialParams, PhysicalParams, SphereParams,
                            absorption_ratio, fiber_length_for_delay, spin_count)


def main():
    parser = argparse.ArgumentParser(description="Physical estimates for the loop-mirror experiment")
    parser.add_argument("--f-m", type=float, default=3.0, help="Kittel frequency in GHz")
    parser.add_argument("--radii", type=float, nargs="+", default=[50.0, 100.0, 125.0, 250.0],
                        help="Sphere radii in micrometres")
    parser.add_argument("--ife-enhancement", type=float, default=1.0,
                        help="Factor on the semiclassical inverse-Faraday field")
    args = parser.parse_args()

    console = Console()
    m = MaterialParams()
    f = FieldParams.from_ghz(args.f_m, ife_enhancement=args.ife_enhancement)

    console.print(f"Beat length l_P = {PhysicalParams(material=m).beat_length * 1e3:.2f} mm, "
                  f"l_P / l_A = {absorption_ratio(m):.4f}")
    console.print(f"Loop fiber for one Kittel period: L_F = {fiber_length_for_delay(f, 1.47) * 1e3:.1f} mm")

    table = Table(title=f"Sphere estimates at f_m = {args.f_m} GHz")
    table.add_column("R_s (um)", justify="right")
    table.add_column("spins", justify="right")
    table.add_column("theta_mz", justify="right")
    table.add_column("theta_m0", justify="right")
    table.add_column("theta_IFE", justify="right")
    table.add_column("|alpha_i|", justify="right")
    table.add_column("Faraday (rad)", justify="right")

    for radius in args.radii:
        s = SphereParams.from_um(radius)
        p = PhysicalParams(material=m, sphere=s, field=f)
        table.add_row(f"{radius:g}", f"{spin_count(s, f):.2e}", f"{p.theta_mz:.2e}", f"{p.theta_m0:.2e}",
                      f"{p.theta_ife:.2e}", f"{p.alpha_i_magnitude:.2e}",
                      f"{faraday_angle(Orientation.parallel(), s, m):.4f}")

    console.print(table)
    console.print("[yellow]|alpha_i| << 1: a single pulse leaves almost no which-path information "
                  "unless the IFE is strongly enhanced.[/yellow]")


if __name__ == "__main__":
    main()
