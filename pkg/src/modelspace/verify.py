"""Seeded verification suites behind the command line front end.

Each suite draws its inputs from a seeded generator, exercises one slice of
the library against independently known ground truth, and returns a plain
dict of counters and worst-case residuals.  Reports contain no timestamps
or environment data, so a fixed seed gives byte-identical output.
"""

from __future__ import annotations

import numpy as np
import scipy.optimize

from .calculus import (
    CalculusConfig,
    apply,
    check_contractivity,
    check_multiplicativity,
    operator_norm,
)
from .errors import ImpossibleByTheoryError
from .extraction import (
    divisor_kernel_subspace,
    extract_invariant_subspace,
    is_multiplicity_free,
    minimal_function,
    minimal_function_of_vector,
    restrict,
    verify_algebraic,
)
from .inner import (
    InnerFunction,
    Polynomial,
    ProductFunction,
    RationalFunction,
    blaschke_factor,
    blaschke_product,
    divides,
    enumerate_blaschke_divisors,
    equiv,
    exact_divide,
    gcd,
    lcm,
    multiply,
)
from .model import build_model_operator, oracle_compressed_shift

SUITE_NAMES = ("lattice", "calculus", "model", "classification", "extraction")

_DEFAULT_CASES = {
    "lattice": 500,
    "calculus": 100,
    "model": 50,
    "classification": 20,
    "extraction": 200,
}

# Zeros of generated Blaschke products keep this mutual separation so that
# spectral clustering stays far from its decision bands.
_MIN_ZERO_SEPARATION = 5e-3


def _suite_rng(seed: int, label: str) -> np.random.Generator:
    key = int.from_bytes(label.encode(), "big") % (2**31)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))


def random_disk_point(rng: np.random.Generator, radius: float = 0.9) -> complex:
    r = radius * np.sqrt(rng.uniform())
    t = rng.uniform(0.0, 2.0 * np.pi)
    return complex(r * np.cos(t), r * np.sin(t))


def random_inner(rng: np.random.Generator, radius: float = 0.9) -> InnerFunction:
    """Random inner function: up to 3 zeros (multiplicity up to 2), up to 2 atoms."""
    zero_atoms = tuple(
        (random_disk_point(rng, radius), int(rng.integers(1, 3)))
        for _ in range(int(rng.integers(0, 4)))
    )
    singular_atoms = tuple(
        (float(rng.uniform(0.0, 2.0 * np.pi)), float(rng.uniform(0.2, 2.0)))
        for _ in range(int(rng.integers(0, 3)))
    )
    gamma = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
    return InnerFunction(gamma=gamma, blaschke=zero_atoms, singular=singular_atoms)


def random_finite_blaschke(
    rng: np.random.Generator,
    min_degree: int = 2,
    max_degree: int = 8,
    radius: float = 0.9,
) -> InnerFunction:
    """Random Blaschke product with well-separated zeros."""
    degree = int(rng.integers(min_degree, max_degree + 1))
    zeros: list[complex] = []
    guard = 0
    while len(zeros) < degree:
        candidate = random_disk_point(rng, radius)
        if all(abs(candidate - z) > _MIN_ZERO_SEPARATION for z in zeros):
            zeros.append(candidate)
        guard += 1
        if guard > 1000:
            raise RuntimeError("zero sampling failed to separate")
    return blaschke_product(zeros)


def random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def random_polynomial(rng: np.random.Generator, max_degree: int = 4) -> Polynomial:
    degree = int(rng.integers(0, max_degree + 1))
    coeffs = tuple(
        complex(rng.standard_normal(), rng.standard_normal()) * 0.5**k
        for k in range(degree + 1)
    )
    return Polynomial(coeffs)


def random_rational(rng: np.random.Generator, max_degree: int = 3) -> RationalFunction:
    num = random_polynomial(rng, max_degree).coefficients
    den = np.array([1.0 + 0.0j])
    for _ in range(int(rng.integers(1, max_degree + 1))):
        pole = (1.3 + rng.uniform(0.0, 1.7)) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        den = np.convolve(den, np.array([1.0, -1.0 / pole]))
    return RationalFunction(num, tuple(den))


def random_symbol(rng: np.random.Generator):
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return random_polynomial(rng)
    if kind == 1:
        return random_rational(rng)
    if kind == 2:
        return random_inner(rng)
    return ProductFunction((random_polynomial(rng, 2), random_inner(rng)))


def matched_deviation(values: np.ndarray, targets: np.ndarray) -> float:
    """Worst distance under the optimal bijective matching of two multisets."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    targets = np.asarray(targets, dtype=complex).reshape(-1)
    if values.shape != targets.shape:
        raise ValueError("multisets must have equal size")
    cost = np.abs(values[:, None] - targets[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) if values.size else 0.0


def _check(failures: int, worst: float | None = None) -> dict:
    out = {"passed": failures == 0, "failures": int(failures)}
    if worst is not None:
        out["worst"] = float(worst)
    return out


def lattice_suite(seed: int, cases: int = 500, tolerance: float = 1e-8) -> dict:
    """Lattice laws on random triples plus order-versus-modulus coherence."""
    rng = _suite_rng(seed, "lattice")
    law_failures = {
        "gcd_commutative": 0,
        "lcm_commutative": 0,
        "gcd_idempotent": 0,
        "absorption_gcd": 0,
        "absorption_lcm": 0,
        "gcd_divides_both": 0,
        "both_divide_lcm": 0,
        "product_roundtrip": 0,
    }
    for _ in range(cases):
        a = random_inner(rng)
        b = random_inner(rng)
        c = random_inner(rng)
        if not equiv(gcd(a, b), gcd(b, a)):
            law_failures["gcd_commutative"] += 1
        if not equiv(lcm(a, b), lcm(b, a)):
            law_failures["lcm_commutative"] += 1
        if not equiv(gcd(a, a), a):
            law_failures["gcd_idempotent"] += 1
        if not equiv(gcd(a, lcm(a, b)), a):
            law_failures["absorption_gcd"] += 1
        if not equiv(lcm(a, gcd(a, b)), a):
            law_failures["absorption_lcm"] += 1
        g = gcd(a, b)
        if not (divides(g, a) and divides(g, b)):
            law_failures["gcd_divides_both"] += 1
        m = lcm(a, b)
        if not (divides(a, m) and divides(b, m)):
            law_failures["both_divide_lcm"] += 1
        if not equiv(exact_divide(multiply(a, c), c), a):
            law_failures["product_roundtrip"] += 1

    order_failures = 0
    worst_excess = 0.0
    pair_count = max(1, cases // 2)
    for _ in range(pair_count):
        theta = random_inner(rng)
        phi = random_inner(rng)
        bigger = multiply(theta, phi)
        if not divides(theta, bigger):
            order_failures += 1
            continue
        extra = blaschke_factor(random_disk_point(rng))
        if divides(multiply(theta, extra), theta):
            order_failures += 1
            continue
        points = np.array([random_disk_point(rng, 0.9) for _ in range(100)])
        excess = float(
            np.max(np.abs(bigger(points)) - np.abs(theta(points)))
        )
        worst_excess = max(worst_excess, excess)
        if excess > 1e-10:
            order_failures += 1

    checks = {name: _check(count) for name, count in law_failures.items()}
    checks["order_matches_modulus"] = _check(order_failures, worst_excess)
    passed = all(c["passed"] for c in checks.values())
    return {"name": "lattice", "seed": seed, "cases": cases, "checks": checks, "passed": passed}


def calculus_suite(seed: int, cases: int = 100, tolerance: float = 1e-8) -> dict:
    """Calculus axioms on random models: exactness, products, contractivity."""
    rng = _suite_rng(seed, "calculus")
    config = CalculusConfig(verify_tolerance=tolerance)
    exact_failures = 0
    product_failures = 0
    contraction_failures = 0
    worst_product = 0.0
    worst_norm_excess = 0.0
    for _ in range(cases):
        model = build_model_operator(random_finite_blaschke(rng, 2, 8))
        T = model.matrix
        eye = np.eye(T.shape[0], dtype=complex)
        if float(np.max(np.abs(apply(Polynomial((1.0,)), T) - eye))) != 0.0:
            exact_failures += 1
        if float(np.max(np.abs(apply(Polynomial((0.0, 1.0)), T) - T))) != 0.0:
            exact_failures += 1
        u = random_symbol(rng)
        v = random_symbol(rng)
        residual = check_multiplicativity(u, v, T, config)
        worst_product = max(worst_product, residual)
        if residual > tolerance:
            product_failures += 1
        report = check_contractivity(u, T, config)
        worst_norm_excess = max(
            worst_norm_excess, report.operator_norm - report.boundary_sup
        )
        if not report.passed:
            contraction_failures += 1
    checks = {
        "unit_and_coordinate_exact": _check(exact_failures),
        "multiplicative": _check(product_failures, worst_product),
        "contractive": _check(contraction_failures, worst_norm_excess),
    }
    passed = all(c["passed"] for c in checks.values())
    return {"name": "calculus", "seed": seed, "cases": cases, "checks": checks, "passed": passed}


def model_suite(seed: int, cases: int = 50, tolerance: float = 1e-8) -> dict:
    """Model construction against zeros, the independent oracle, and symbols."""
    rng = _suite_rng(seed, "models")
    eig_failures = 0
    oracle_failures = 0
    annihilation_failures = 0
    minimal_failures = 0
    worst_eig = 0.0
    worst_oracle_eig = 0.0
    worst_oracle_sv = 0.0
    worst_annihilation = 0.0
    for _ in range(cases):
        b = random_finite_blaschke(rng, 2, 6)
        zeros = np.array(b.blaschke.zeros_with_multiplicity())
        model = build_model_operator(b)
        T = model.matrix
        dev = matched_deviation(np.linalg.eigvals(T), zeros)
        worst_eig = max(worst_eig, dev)
        if dev > tolerance:
            eig_failures += 1
        oracle_matrix, _ = oracle_compressed_shift(b, 8 * len(zeros))
        dev_o = matched_deviation(np.linalg.eigvals(oracle_matrix), zeros)
        sv_dev = float(
            np.max(
                np.abs(
                    np.linalg.svd(T, compute_uv=False)
                    - np.linalg.svd(oracle_matrix, compute_uv=False)
                )
            )
        )
        worst_oracle_eig = max(worst_oracle_eig, dev_o)
        worst_oracle_sv = max(worst_oracle_sv, sv_dev)
        if dev_o > tolerance or sv_dev > tolerance:
            oracle_failures += 1
        residual = operator_norm(apply(b, T))
        worst_annihilation = max(worst_annihilation, residual)
        if residual > tolerance:
            annihilation_failures += 1
        if not equiv(minimal_function(T), b, zero_tol=1e-6):
            minimal_failures += 1
    checks = {
        "eigenvalues_are_zeros": _check(eig_failures, worst_eig),
        "oracle_agreement": _check(
            oracle_failures, max(worst_oracle_eig, worst_oracle_sv)
        ),
        "symbol_annihilates": _check(annihilation_failures, worst_annihilation),
        "minimal_function_recovers_symbol": _check(minimal_failures),
    }
    passed = all(c["passed"] for c in checks.values())
    return {"name": "model", "seed": seed, "cases": cases, "checks": checks, "passed": passed}


def classification_suite(seed: int, cases: int = 20, tolerance: float = 1e-8) -> dict:
    """Divisor kernels of multiplicity-free models, compared per divisor."""
    rng = _suite_rng(seed, "classification")
    multiplicity_free_count = 0
    dim_failures = 0
    minimal_failures = 0
    invariance_failures = 0
    containment_failures = 0
    distinctness_failures = 0
    worst_invariance = 0.0
    for _ in range(cases):
        b = random_finite_blaschke(rng, 2, 5)
        model = build_model_operator(b)
        T = model.matrix
        if is_multiplicity_free(T, seed=int(rng.integers(2**31))):
            multiplicity_free_count += 1
        divisors = enumerate_blaschke_divisors(b)
        kernels = []
        for phi in divisors:
            K = divisor_kernel_subspace(T, phi)
            kernels.append((phi, K))
            if K.dimension != phi.blaschke_degree:
                dim_failures += 1
                continue
            res = 0.0 if K.dimension == 0 else float(
                np.linalg.norm(T @ K.frame - K.frame @ (K.frame.conj().T @ T @ K.frame), 2)
            )
            worst_invariance = max(worst_invariance, res)
            if res > tolerance:
                invariance_failures += 1
            if not equiv(minimal_function(restrict(T, K)), phi, zero_tol=1e-6):
                minimal_failures += 1
        for i in range(len(kernels)):
            for j in range(len(kernels)):
                if i == j:
                    continue
                phi_i, ki = kernels[i]
                phi_j, kj = kernels[j]
                if divides(phi_i, phi_j) and ki.dimension >= 1:
                    gap = float(
                        np.linalg.norm(ki.frame - kj.projector() @ ki.frame, 2)
                    )
                    if gap > tolerance:
                        containment_failures += 1
                if (
                    i < j
                    and ki.dimension == kj.dimension
                    and ki.dimension >= 1
                    and not equiv(phi_i, phi_j)
                ):
                    angles = ki.principal_angles(kj)
                    if float(np.max(angles)) <= 1e-6:
                        distinctness_failures += 1
    checks = {
        "multiplicity_free": _check(cases - multiplicity_free_count),
        "kernel_dimensions": _check(dim_failures),
        "restriction_minimal_functions": _check(minimal_failures),
        "kernel_invariance": _check(invariance_failures, worst_invariance),
        "divisibility_containment": _check(containment_failures),
        "distinct_subspaces": _check(distinctness_failures),
    }
    passed = all(c["passed"] for c in checks.values())
    return {
        "name": "classification",
        "seed": seed,
        "cases": cases,
        "checks": checks,
        "passed": passed,
    }


def _jordan_cell(size: int) -> np.ndarray:
    J = np.zeros((size, size), dtype=complex)
    J[np.arange(1, size), np.arange(size - 1)] = 1.0
    return J


def _extraction_round(T, h, tolerance, counters):
    n = T.shape[0]
    try:
        cert = extract_invariant_subspace(T, h, tolerance=tolerance)
    except ImpossibleByTheoryError:
        counters["impossible"] += 1
        return
    counters["branches"][cert.branch] = counters["branches"].get(cert.branch, 0) + 1
    if not (1 <= cert.subspace.dimension <= n - 1):
        counters["dim_failures"] += 1
    counters["worst_invariance"] = max(
        counters["worst_invariance"], cert.invariance_residual
    )
    if cert.invariance_residual > tolerance:
        counters["invariance_failures"] += 1
    m1 = minimal_function_of_vector(T, h)
    expected_branch = (
        "divisor_kernel" if m1.blaschke_degree >= 2 else "eigenvector_line"
    )
    if cert.branch != expected_branch:
        counters["branch_failures"] += 1
    h_arr = np.asarray(h, dtype=complex).reshape(-1)
    if verify_algebraic(T, h_arr, m1) > tolerance * float(np.linalg.norm(h_arr)):
        counters["algebraic_failures"] += 1


def extraction_suite(seed: int, cases: int = 200, tolerance: float = 1e-8) -> dict:
    """Certified extraction on random models, nilpotent cells, and reruns."""
    rng = _suite_rng(seed, "extraction")
    counters = {
        "impossible": 0,
        "dim_failures": 0,
        "invariance_failures": 0,
        "branch_failures": 0,
        "algebraic_failures": 0,
        "worst_invariance": 0.0,
        "branches": {},
    }
    for _ in range(cases):
        model = build_model_operator(random_finite_blaschke(rng, 2, 8))
        h = random_vector(rng, model.dimension)
        _extraction_round(model.matrix, h, tolerance, counters)
    for size in range(2, 9):
        for _ in range(5):
            _extraction_round(_jordan_cell(size), random_vector(rng, size), tolerance, counters)
    # the model-suite generator is re-derived here so extraction also covers
    # exactly the operators the model suite certified
    model_rng = _suite_rng(seed, "models")
    for _ in range(_DEFAULT_CASES["model"]):
        b = random_finite_blaschke(model_rng, 2, 6)
        model = build_model_operator(b)
        for _ in range(5):
            h = random_vector(rng, model.dimension)
            _extraction_round(model.matrix, h, tolerance, counters)
    checks = {
        "no_impossible_failures": _check(counters["impossible"]),
        "proper_dimensions": _check(counters["dim_failures"]),
        "invariance_certified": _check(
            counters["invariance_failures"], counters["worst_invariance"]
        ),
        "branch_matches_degree": _check(counters["branch_failures"]),
        "vectors_algebraic_for_own_minimal": _check(counters["algebraic_failures"]),
    }
    passed = all(c["passed"] for c in checks.values())
    return {
        "name": "extraction",
        "seed": seed,
        "cases": cases,
        "checks": checks,
        "branch_counts": {k: counters["branches"][k] for k in sorted(counters["branches"])},
        "passed": passed,
    }


_SUITES = {
    "lattice": lattice_suite,
    "calculus": calculus_suite,
    "model": model_suite,
    "classification": classification_suite,
    "extraction": extraction_suite,
}


def run_suite(name: str, seed: int, cases: int | None = None, tolerance: float = 1e-8) -> dict:
    if name not in _SUITES:
        raise ValueError("unknown suite %r (choose from %s)" % (name, ", ".join(SUITE_NAMES)))
    if cases is None:
        cases = _DEFAULT_CASES[name]
    if cases < 1:
        raise ValueError("cases must be positive")
    return _SUITES[name](seed, cases=cases, tolerance=tolerance)


def run_all(seed: int, cases: int | None = None, tolerance: float = 1e-8) -> dict:
    suites = {name: run_suite(name, seed, cases, tolerance) for name in SUITE_NAMES}
    return {
        "seed": seed,
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }
