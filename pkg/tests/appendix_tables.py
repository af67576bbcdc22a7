"""Printed values from the case-study appendix, used as reference oracles."""
import numpy as np

JET_BASIS = ["x1", "x2", "x1^2", "x1*x2", "x2^2", "x1^3", "x1^2*x2", "x1*x2^2", "x2^3"]
LORENZ_BASIS = ["x1", "x2", "x3", "x1*x2", "x2*x3", "x1*x3"]

# lifted data matrices as printed (4 significant digits)
JET_M_MINUS = np.array([
    [0.025, 0.02498, 0.02505, 0.02513, 0.02531, 0.02553, 0.02579, 0.02599, 0.02629, 0.02649, 0.02663,
     0.02677, 0.02696, 0.02709, 0.0273],
    [0.02, -0.07338, -0.0828, -0.1773, -0.2203, -0.2598, -0.203, -0.2982, -0.1994, -0.15, -0.1369,
     -0.1928, -0.1323, -0.2048, -0.3015],
    [0.000625, 0.000624, 0.0006276, 0.0006317, 0.0006406, 0.0006517, 0.000665, 0.0006755, 0.000691,
     0.0007015, 0.0007094, 0.0007166, 0.0007269, 0.000734, 0.0007451],
    [0.0005, -0.001833, -0.002074, -0.004457, -0.005575, -0.006632, -0.005234, -0.00775, -0.005242,
     -0.003972, -0.003647, -0.00516, -0.003566, -0.00555, -0.00823],
    [0.0004, 0.005385, 0.006856, 0.03144, 0.04851, 0.06748, 0.04119, 0.08892, 0.03977, 0.0225, 0.01875,
     0.03716, 0.0175, 0.04196, 0.0909],
    [1.563e-5, 1.559e-5, 1.572e-5, 1.588e-5, 1.621e-5, 1.664e-5, 1.715e-5, 1.756e-5, 1.816e-5, 1.858e-5,
     1.889e-5, 1.918e-5, 1.96e-5, 1.989e-5, 2.034e-5],
    [1.25e-5, -4.579e-5, -5.196e-5, -0.000112, -0.0001411, -0.0001693, -0.000135, -0.0002014, -0.0001378,
     -0.0001052, -9.713e-5, -0.0001381, -9.616e-5, -0.0001504, -0.0002247],
    [1.0e-5, 0.0001345, 0.0001718, 0.0007902, 0.001228, 0.001723, 0.001062, 0.002311, 0.001045, 0.0005958,
     0.0004993, 0.0009947, 0.0004718, 0.001137, 0.002481],
    [8.0e-6, -0.0003951, -0.0005677, -0.005575, -0.01068, -0.01753, -0.008361, -0.02652, -0.00793,
     -0.003374, -0.002567, -0.007163, -0.002314, -0.008596, -0.02741],
])

LORENZ_M_MINUS = np.array([
    [1.5, 1.5, 1.501, 1.503, 1.506, 1.51, 1.515, 1.519, 1.525, 1.53, 1.534, 1.539, 1.545, 1.551, 1.557],
    [1.5, 1.632, 1.679, 1.811, 1.892, 1.969, 1.949, 2.082, 2.021, 2.009, 2.034, 2.127, 2.105, 2.215, 2.35],
    [1.5, 1.498, 1.497, 1.495, 1.493, 1.491, 1.49, 1.488, 1.486, 1.484, 1.483, 1.481, 1.479, 1.478, 1.476],
    [2.25, 2.447, 2.521, 2.723, 2.85, 2.973, 2.953, 3.163, 3.081, 3.073, 3.12, 3.275, 3.252, 3.435, 3.659],
    [2.25, 2.445, 2.513, 2.708, 2.825, 2.936, 2.904, 3.098, 3.003, 2.982, 3.015, 3.151, 3.113, 3.273, 3.468],
    [2.25, 2.247, 2.247, 2.247, 2.249, 2.252, 2.256, 2.26, 2.266, 2.271, 2.275, 2.28, 2.286, 2.292, 2.299],
])

# transformation matrices written as (row monomial, column) -> quotient monomial text
JET_THETA = {
    (0, 0): "1", (1, 1): "1", (2, 0): "x1", (3, 1): "x1", (4, 1): "x2",
    (5, 0): "x1^2", (6, 0): "x1*x2", (7, 1): "x1*x2", (8, 1): "x2^2",
}
LORENZ_THETA = {
    (0, 0): "1", (1, 1): "1", (2, 2): "1", (3, 0): "x2", (4, 1): "x3", (5, 2): "x1",
}

JET_P = 1e4 * np.array([[4.8273, 0.0023], [0.0023, 0.0161]])
JET_B = {"x1^2": 48272.6605, "x1*x2": 46.9317, "x2^2": 161.1994}
JET_ALPHA1 = 1.9392e5
JET_ALPHA2 = 3.03e5

LORENZ_P = 1e4 * np.array([[0.0636, -0.0343, 0.0209], [-0.0343, 0.1214, -0.0003], [0.0209, -0.0003, 8.6481]])
LORENZ_ALPHA1 = 3.5776e5
LORENZ_ALPHA2 = 5.5035e5

INPUTS = [93.41, 9.446, 94.54, 42.96, 39.55, -56.78, 95.25, -98.75, -49.4, -13.04, 55.88, -60.46, 72.6, 96.68,
          -67.23]
