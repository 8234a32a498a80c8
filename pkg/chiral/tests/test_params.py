import math

from django.test import SimpleTestCase

from chiral.exceptions import ParameterError
from chiral.params import CouplingPolar, ModelParams, from_polar, to_polar


class CouplingPolarTests(SimpleTestCase):
    def test_round_trip_through_polar(self):
        polar = to_polar(0.3, 0.4)
        self.assertAlmostEqual(polar.g, 0.5, places=14)
        g1, g2 = from_polar(polar)
        self.assertAlmostEqual(g1, 0.3, places=14)
        self.assertAlmostEqual(g2, 0.4, places=14)

    def test_zero_coupling_has_angle_zero(self):
        self.assertEqual(to_polar(0.0, 0.0), CouplingPolar(g=0.0, phi=0.0))

    def test_quarter_turn_is_exact(self):
        self.assertEqual(from_polar(CouplingPolar(g=2.0, phi=math.pi / 2)), (0.0, 2.0))

    def test_angle_outside_quadrant_rejected(self):
        with self.assertRaises(ParameterError):
            CouplingPolar(g=1.0, phi=2.0)
        with self.assertRaises(ParameterError):
            to_polar(-1.0, 0.5)


class ModelParamsTests(SimpleTestCase):
    def test_construction_guards(self):
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=0.0, omega_z=1.0)
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=1.0, omega_z=-1.0)
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=1.0, omega_z=1.0, g1=-0.1)
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=1.0, omega_z=1.0, N=0)
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=1.0, omega_z=1.0, N=2.5)
        with self.assertRaises(ParameterError):
            ModelParams(omega_c=1.0, omega_z=1.0, g1=float("nan"))

    def test_boundedness_guard(self):
        # |UN| must stay below 2 omega_c
        ModelParams.create(omega_c=1.0, omega_z=1.0, UN=1.999, N=10)
        with self.assertRaises(ParameterError):
            ModelParams.create(omega_c=1.0, omega_z=1.0, UN=2.0, N=10)
        with self.assertRaises(ParameterError):
            ModelParams.create(omega_c=1.0, omega_z=1.0, UN=-2.5, N=10)

    def test_dressed_cavity_frequency(self):
        p = ModelParams.create(omega_c=1.0, omega_z=1.5, UN=1.0, N=100)
        self.assertAlmostEqual(p.U, 0.01, places=14)
        self.assertAlmostEqual(p.omega_c_tilde, 0.5, places=14)
        self.assertAlmostEqual(ModelParams.create(UN=-1.0, N=4).omega_c_tilde, 1.5, places=14)

    def test_polar_and_cartesian_construction_agree(self):
        p = ModelParams.create(omega_z=1.5, g=1.0, phi=math.pi / 4)
        self.assertAlmostEqual(p.g1, math.sqrt(0.5), places=14)
        self.assertAlmostEqual(p.g2, math.sqrt(0.5), places=14)
        self.assertAlmostEqual(p.phi, math.pi / 4, places=14)
        self.assertAlmostEqual(p.coupling_sq, 1.0, places=14)

    def test_mixed_coupling_forms_rejected(self):
        with self.assertRaises(ParameterError):
            ModelParams.create(g1=1.0, g=1.0)

    def test_normalized_divides_energies(self):
        p = ModelParams.create(omega_c=2.0, omega_z=3.0, g1=1.0, g2=0.5, UN=1.0, N=10)
        q = p.normalized()
        self.assertEqual(q.omega_c, 1.0)
        self.assertAlmostEqual(q.omega_z, 1.5)
        self.assertAlmostEqual(q.g2, 0.25)
        self.assertAlmostEqual(q.UN, 0.5)
        self.assertEqual(q.N, 10)

    def test_row_carries_full_tuple(self):
        row = ModelParams.create(omega_z=1.5, g1=0.3, g2=0.4, U=0.01, N=10).as_row()
        self.assertEqual(list(row), ["omega_c", "omega_z", "g1", "g2", "g", "phi", "U", "UN", "N"])
        self.assertAlmostEqual(row["UN"], 0.1)
