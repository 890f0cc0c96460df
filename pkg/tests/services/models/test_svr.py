from unittest import TestCase

import numpy as np

from services.models.svr import SvrParams, fit_svr, kkt_violation, rbf_kernel


class TestSvr(TestCase):
    def setUp(self):
        self.X = np.linspace(0.0, 2 * np.pi, 60)[:, None]
        self.y = np.sin(self.X[:, 0])

    def test_dual_feasibility(self):
        model = fit_svr(self.X, self.y, C=10.0, gamma=1.0, epsilon=0.05)
        self.assertTrue(model.converged)
        for alpha in (model.alpha_plus, model.alpha_minus):
            self.assertTrue(np.all(alpha >= 0.0))
            self.assertTrue(np.all(alpha <= model.C))
        self.assertAlmostEqual(float(model.alpha_plus.sum() - model.alpha_minus.sum()), 0.0, delta=1e-9)

    def test_kkt_gap_below_tolerance(self):
        model = fit_svr(self.X, self.y, C=10.0, gamma=1.0, epsilon=0.05)
        self.assertLess(model.kkt_violation, 1e-3)
        self.assertLess(kkt_violation(model, self.X, self.y), 1e-3 + 1e-9)

    def test_fits_sine(self):
        model = fit_svr(self.X, self.y, C=10.0, gamma=1.0, epsilon=0.05)
        residual = model.predict(self.X) - self.y
        self.assertLess(float(np.sqrt(np.mean(residual**2))), 0.1)

    def test_wide_tube_predicts_constant(self):
        model = fit_svr(self.X, 0.01 * self.y + 5.0, epsilon=1.0)
        self.assertEqual(model.support_vectors.shape[0], 0)
        np.testing.assert_allclose(model.predict(self.X[:4]), model.bias)

    def test_iteration_cap_is_reported(self):
        with self.assertLogs("services.models.svr", level="WARNING"):
            model = fit_svr(self.X, self.y, C=10.0, gamma=1.0, epsilon=0.05, max_iter=1)
        self.assertFalse(model.converged)
        self.assertEqual(model.n_iter, 1)

    def test_kernel(self):
        K = rbf_kernel(np.array([[0.0], [1.0]]), np.array([[0.0]]), gamma=2.0)
        np.testing.assert_allclose(K[:, 0], [1.0, np.exp(-2.0)])

    def test_params_validation(self):
        with self.assertRaises(ValueError):
            SvrParams(kernel="linear")
        with self.assertRaises(ValueError):
            fit_svr(self.X, self.y, C=0.0)
        with self.assertRaises(ValueError):
            fit_svr(self.X, self.y[:5])
