import json
import math
from unittest import mock

from django.core.cache import cache
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy import linalg

from chiral import config_file, criticality, ed_oracle, output, sweeps
from chiral.constants import Side
from chiral.exceptions import ParameterError
from chiral.params import ModelParams


def small_spec(task, threads=1, **values):
    return sweeps.build_spec(values, task, threads)


class AxisTests(SimpleTestCase):
    def test_parse(self):
        axis = sweeps.parse_axis("phi:0:pi/2:5")
        self.assertEqual(axis.name, "phi")
        self.assertEqual(axis.stop, math.pi / 2)
        self.assertEqual(len(axis.values()), 5)
        self.assertEqual(str(axis), f"phi:0.0:{math.pi / 2!r}:5")

    def test_log_spacing(self):
        axis = sweeps.parse_axis("g:0.01:1:3:log")
        self.assertTrue(axis.log)
        self.assertAlmostEqual(axis.values()[1], 0.1, places=14)

    def test_malformed(self):
        for text in ("g:0:2", "N:1:2:3", "g:0:2:1", "g:0:2:5:lin", "g:0:2:5:log", "g:a:2:5"):
            with self.assertRaises(ParameterError, msg=text):
                sweeps.parse_axis(text)

    def test_apply_value_keeps_pinned_angle_at_zero_coupling(self):
        p = ModelParams.create(omega_z=1.5, N=10)
        moved = sweeps.apply_value(sweeps.apply_value(p, "g", 0.0, phi=0.7), "g", 1.0, phi=0.7)
        self.assertAlmostEqual(moved.phi, 0.7, places=14)
        self.assertAlmostEqual(sweeps.apply_value(p, "UN", 1.0).U, 0.1, places=14)


class ConfigParsingTests(SimpleTestCase):
    def test_numbers_and_angles(self):
        self.assertEqual(config_file.parse_number("2.5"), 2.5)
        self.assertAlmostEqual(config_file.parse_number("pi/4"), math.pi / 4, places=15)
        self.assertAlmostEqual(config_file.parse_number("3*pi/8"), 3 * math.pi / 8, places=15)
        self.assertAlmostEqual(config_file.parse_number("0.5pi"), math.pi / 2, places=15)
        self.assertAlmostEqual(config_file.parse_number("-pi/2"), -math.pi / 2, places=15)

    def test_entries(self):
        values = config_file.parse_entries({"N": "100", "phi_series": "0, pi/4", "sides": "from_superradiant"})
        self.assertEqual(values["N"], 100)
        self.assertEqual(values["phi_series"], (0.0, math.pi / 4))
        self.assertEqual(values["sides"], ("from_superradiant",))

    def test_rejections(self):
        with self.assertRaises(ValidationError) as caught:
            config_file.parse_entries({"omega": "1"})
        self.assertEqual(caught.exception.code, "unknown_key")
        for key, text in (("N", "2.5"), ("window", "1e-4"), ("sides", "sideways"), ("axis1", "g:0:1")):
            with self.assertRaises(ValidationError, msg=key):
                config_file.parse_entries({key: text})
        with self.assertRaises(ValidationError):
            config_file.parse_assignments(["g1"])
        with self.assertRaises(ValidationError):
            config_file.load_config("/nonexistent/chiral.env")


class BuildSpecTests(SimpleTestCase):
    def test_defaults(self):
        spec = small_spec("phase_map")
        self.assertEqual(spec.base.omega_z, 1.5)
        self.assertEqual(spec.base.N, 1000)
        self.assertEqual(str(spec.axis1), "g1:0.0:2.0:200")
        self.assertNotIn("threads", spec.meta())

    def test_mixed_coupling_forms(self):
        with self.assertRaises(ParameterError):
            small_spec("phase_map", g1=0.3, phi=0.2)

    def test_gap_scaling_defaults_to_degeneracy_angle(self):
        spec = small_spec("gap_scaling")
        self.assertEqual(spec.phi, criticality.degeneracy_angle(spec.base))
        self.assertEqual(spec.sides, (Side.FROM_NORMAL.value, Side.FROM_SUPERRADIANT.value))

        spec = small_spec("gap_scaling", UN=0.5)
        self.assertEqual(spec.sides, (Side.FROM_NORMAL.value,))

        spec = small_spec("gap_scaling", phi=0.3)
        self.assertEqual(spec.phi, 0.3)
        self.assertEqual(spec.sides, (Side.FROM_NORMAL.value,))

        with self.assertRaises(ParameterError):
            small_spec("gap_scaling", omega_z=0.5)


class PhaseMapTests(SimpleTestCase):
    def test_phase_inside_and_outside_circle(self):
        spec = small_spec("phase_map", axis1="g1:0:2:5", axis2="g2:0:2:5")
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 25)
        self.assertEqual(result.error_rows, [])
        self.assertEqual(result.columns[:9], sweeps.PARAM_COLUMNS)
        for row in result.rows:
            expected = "Normal" if row["g1"] ** 2 + row["g2"] ** 2 < 1.5 else "Superradiant"
            self.assertEqual(row["phase"], expected)

    def test_polar_axes_in_either_order(self):
        angles = [0.0, math.pi / 4, math.pi / 2]
        for axes in (("phi:0:pi/2:3", "g:0:2:3"), ("g:0:2:3", "phi:0:pi/2:3")):
            result = sweeps.run(small_spec("phase_map", axis1=axes[0], axis2=axes[1]))
            self.assertEqual(result.error_rows, [])
            self.assertEqual(sorted({row["phi"] for row in result.rows}), angles)
            for row in result.rows:
                if row["g"] == 2.0 and row["phi"] == math.pi / 2:
                    self.assertEqual((row["g1"], row["g2"]), (0.0, 2.0))
                self.assertAlmostEqual(math.hypot(row["g1"], row["g2"]), row["g"], places=14)
                if row["g"] > 0:
                    self.assertAlmostEqual(math.atan2(row["g2"], row["g1"]), row["phi"], places=14)

    def test_pinned_angle_for_radial_axis(self):
        result = sweeps.run(small_spec("phase_map", phi=0.6, axis1="g:0:2:3", axis2="UN:-1:1:2"))
        for row in result.rows:
            self.assertEqual(row["phi"], 0.6)
            self.assertAlmostEqual(row["g2"], row["g"] * math.sin(0.6), places=14)

    def test_invalid_points_become_error_rows(self):
        spec = small_spec("phase_map", axis1="UN:-3:3:3", axis2="g:0:1:2")
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 6)
        self.assertEqual(len(result.error_rows), 4)
        self.assertTrue(all(row["error"].startswith("ParameterError") for row in result.error_rows))

    def test_output_is_deterministic(self):
        spec = small_spec("phase_map", axis1="g1:0:2:6", axis2="UN:-1:1:3")
        serial = output.render_csv(sweeps.run(spec))
        spec.threads = 3
        threaded = output.render_csv(sweeps.run(spec))
        self.assertEqual(serial, threaded)
        self.assertEqual(output.render_json(sweeps.run(spec)), output.render_json(sweeps.run(spec)))


class SpectrumCutTests(SimpleTestCase):
    def test_routes_agree_along_cut(self):
        spec = small_spec("spectrum_cut", axis1="g:0:2:9", phi_series=(0.0, math.pi / 4))
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 18)
        self.assertEqual(result.error_rows, [])
        for row in result.rows:
            self.assertLessEqual(row["route_mismatch"], 1e-10)
            self.assertTrue(row["stable"])
            self.assertEqual(row["goldstone_count"], 1 if row["phase"] == "Superradiant" else 0)
        at_zero = [row for row in result.rows if row["g"] == 0.0]
        self.assertEqual(sorted(row["phi_series"] for row in at_zero), [0.0, math.pi / 4])

    def test_flat_mode_with_dispersive_coupling(self):
        spec = small_spec("spectrum_cut", axis1="g:0:2:5", phi_series=(0.0,), UN=1.0)
        result = sweeps.run(spec)
        for row in result.rows:
            self.assertIsNone(row["route_mismatch"])
        normal = [row for row in result.rows if row["phase"] == "Normal"]
        self.assertTrue(normal)
        for row in normal:
            modes = (row["eps_1"], row["eps_2"], row["eps_3"])
            self.assertLess(min(abs(e - 0.5) for e in modes), 1e-10)


class CriticalLineTests(SimpleTestCase):
    def test_zero_per_series(self):
        spec = small_spec("critical_line", axis1="phi:0:pi/2:9", omega_z_series=(1.5, 0.5))
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 18)
        by_series = {}
        for row in result.rows:
            by_series.setdefault(row["series_omega_z"], []).append(row)
        phi_star = criticality.degeneracy_angle(ModelParams.create(omega_z=1.5))
        self.assertAlmostEqual(by_series[1.5][0]["zero_phi"], phi_star, places=10)
        self.assertIsNone(by_series[0.5][0]["zero_phi"])
        self.assertTrue(all(row["eps_minus"] > 0 for row in by_series[0.5]))
        self.assertLess(by_series[1.5][-1]["eps_minus"], 0.0)


class GapScalingTests(SimpleTestCase):
    def test_both_sides_on_degeneracy_line(self):
        spec = small_spec("gap_scaling", points=20)
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 40)
        self.assertEqual(result.error_rows, [])
        self.assertEqual([fit.side for fit in result.fits], ["from_normal", "from_superradiant"])
        self.assertAlmostEqual(result.meta["from_normal_z_nu"], 0.5, delta=0.02)
        self.assertAlmostEqual(result.meta["from_superradiant_z_nu"], 0.5, delta=0.05)
        for row in result.rows:
            self.assertIsNotNone(row["reference_gap"])
            self.assertAlmostEqual(row["gap"] / row["reference_gap"], 1.0, delta=0.05)

    def test_failed_side_becomes_error_row(self):
        spec = small_spec("gap_scaling", phi=0.3, sides=("from_normal", "from_superradiant"), points=20)
        result = sweeps.run(spec)
        self.assertEqual(len(result.fits), 1)
        self.assertEqual(len(result.error_rows), 1)
        self.assertTrue(result.error_rows[0]["error"].startswith("BranchError"))


class ExponentMapTests(SimpleTestCase):
    def test_expected_exponents(self):
        spec = small_spec("exponent_map", axis1="phi:0:pi/4:3", points=20)
        result = sweeps.run(spec)
        self.assertEqual(len(result.rows), 3)
        for row in result.rows:
            self.assertEqual(row["expected_z_nu"], 1.0)
            self.assertAlmostEqual(row["z_nu"], 1.0, delta=0.02)
        self.assertEqual(result.rows[0]["fit_phi"], 0.0)
        for row in result.rows:
            self.assertEqual(row["phi"], row["fit_phi"])
            self.assertAlmostEqual(row["g"], math.sqrt(1.5), places=14)


class EDCheckTests(SimpleTestCase):
    def test_small_atom_numbers(self):
        spec = small_spec("ed_check", g=0.5, phi=0.4, UN=0.2, n_list=(2, 3))
        result = sweeps.run(spec)
        self.assertEqual([row["N"] for row in result.rows], [2, 3])
        self.assertEqual(result.error_rows, [])
        for row in result.rows:
            self.assertAlmostEqual(row["UN"], 0.2, places=14)
            self.assertTrue(row["variational_bound_ok"])
            self.assertIsNotNone(row["gaussian_energy_per_atom"])
            self.assertTrue(row["converged"])
            self.assertEqual(row["sector_lz"], row["sector"] - row["N"] / 2)
            self.assertGreaterEqual(row["sector_gap"], -1e-10)

    def test_solver_failure_is_error_row(self):
        cache.clear()
        spec = small_spec("ed_check", g=0.5, phi=0.4, n_list=(2, 3))
        failure = linalg.LinAlgError("eigh did not converge")
        with mock.patch.object(ed_oracle.linalg, "eigh", side_effect=failure):
            result = sweeps.run(spec)
        self.assertEqual([row["N"] for row in result.rows], [2, 3])
        self.assertEqual(len(result.error_rows), 2)
        self.assertTrue(all(row["error"].startswith("SolverError") for row in result.error_rows))

    def test_invalid_atom_number_is_error_row(self):
        spec = small_spec("ed_check", n_list=(0,))
        result = sweeps.run(spec)
        self.assertEqual(len(result.error_rows), 1)
        self.assertEqual(result.rows[0]["N"], 0)


class OutputTests(SimpleTestCase):
    def test_value_formatting(self):
        self.assertEqual(output.format_value(None), "")
        self.assertEqual(output.format_value(True), "true")
        self.assertEqual(output.format_value(0.1), "0.10000000000000001")
        self.assertEqual(output.format_value((1.0, 2.5)), "1,2.5")
        self.assertEqual(output.format_value(3), "3")

    def test_header_and_json(self):
        spec = small_spec("phase_map", axis1="g1:0:2:2", axis2="g2:0:2:2")
        result = sweeps.run(spec)
        lines = output.render_csv(result).splitlines()
        self.assertTrue(lines[0].startswith("# schema=phase_map version=1 omega_c=1 omega_z=1.5"))
        self.assertEqual(lines[1].split(","), result.columns)
        self.assertEqual(len(lines), 2 + 4)
        document = json.loads(output.render_json(result))
        self.assertEqual(document["schema"], "phase_map")
        self.assertEqual(document["version"], 1)
        # mu_tilde is infinite at g = 0
        self.assertIsNone(document["rows"][0][document["columns"].index("mu_tilde")])
