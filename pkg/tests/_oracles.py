"""Independent reference computations shared by several test modules."""

from fractions import Fraction
import random

import mpmath


def random_polynomial(rng: random.Random, n: int, depth: int = 4):
    """A random polynomial tree rendered twice: caret syntax and Python syntax."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            c = rng.choice([0.5, 1.0, 2.0, 3.0, 0.25, 1.5, 0.0])
            return str(c), repr(c)
        j = rng.randint(1, n)
        return f"x{j}", f"x[{j - 1}]"
    kind = rng.choice(["+", "-", "*", "^", "neg"])
    if kind == "neg":
        a, pa = random_polynomial(rng, n, depth - 1)
        return f"(-({a}))", f"(-({pa}))"
    if kind == "^":
        a, pa = random_polynomial(rng, n, depth - 1)
        k = rng.randint(0, 3)
        return f"({a})^{k}", f"(({pa})**{k})"
    a, pa = random_polynomial(rng, n, depth - 1)
    b, pb = random_polynomial(rng, n, depth - 1)
    return f"({a}) {kind} ({b})", f"(({pa}) {kind} ({pb}))"


def python_function(source: str):
    return eval("lambda x: " + source)  # noqa: S307 - test oracle on generated text


def central_difference(fn, x, j, h=1e-5, dps=40):
    """Central difference of ``fn`` in coordinate ``j`` evaluated in high precision."""
    with mpmath.workdps(dps):
        xp = [mpmath.mpf(v) for v in x]
        xm = list(xp)
        xp[j] += h
        xm[j] -= h
        return float((fn(xp) - fn(xm)) / (2 * mpmath.mpf(h)))


def characteristic_coefficients(A):
    """Exact coefficients of det(s I - A), highest degree first, for d <= 3."""
    M = [[Fraction(v) for v in row] for row in A]
    d = len(M)
    if d == 0:
        return [Fraction(1)]
    if d == 1:
        return [Fraction(1), -M[0][0]]
    tr = sum(M[i][i] for i in range(d))
    if d == 2:
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        return [Fraction(1), -tr, det]
    minors = sum(M[i][i] * M[j][j] - M[i][j] * M[j][i] for i in range(3) for j in range(i + 1, 3))
    det = (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )
    return [Fraction(1), -tr, minors, -det]


def _sign_changes(coeffs):
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def negative_eigenvalue_count(A) -> int:
    """Descartes' rule on p(-s); exact because a symmetric matrix has only real roots."""
    coeffs = characteristic_coefficients(A)
    d = len(coeffs) - 1
    flipped = [c * (-1) ** (d - k) for k, c in enumerate(coeffs)]
    return _sign_changes(flipped)


def zero_eigenvalue_count(A) -> int:
    coeffs = characteristic_coefficients(A)
    count = 0
    for c in reversed(coeffs):
        if c != 0:
            break
        count += 1
    return count


def bisection_roots(g, lo, hi, cells=4000, iterations=200):
    """All sign-change roots of ``g`` on [lo, hi] located on a uniform bracket grid."""
    roots = []
    step = (hi - lo) / cells
    for k in range(cells):
        a, b = lo + k * step, lo + (k + 1) * step
        ga, gb = g(a), g(b)
        if ga == 0:
            roots.append(a)
            continue
        if ga * gb > 0:
            continue
        for _ in range(iterations):
            m = 0.5 * (a + b)
            if g(a) * g(m) <= 0:
                b = m
            else:
                a = m
        roots.append(0.5 * (a + b))
    return roots


def components_bfs(mask) -> int:
    """8-connected component count by breadth-first search."""
    rows, cols = len(mask), len(mask[0])
    seen = [[False] * cols for _ in range(rows)]
    count = 0
    for i in range(rows):
        for j in range(cols):
            if not mask[i][j] or seen[i][j]:
                continue
            count += 1
            queue = [(i, j)]
            seen[i][j] = True
            while queue:
                a, b = queue.pop()
                for da in (-1, 0, 1):
                    for db in (-1, 0, 1):
                        u, v = a + da, b + db
                        if 0 <= u < rows and 0 <= v < cols and mask[u][v] and not seen[u][v]:
                            seen[u][v] = True
                            queue.append((u, v))
    return count


def second_difference(fn, x, i, j, h=1e-5, dps=50):
    """Mixed central difference for the (i, j) second partial, in high precision."""
    with mpmath.workdps(dps):
        h = mpmath.mpf(h)

        def at(si, sj):
            y = [mpmath.mpf(v) for v in x]
            y[i] += si * h
            y[j] += sj * h
            return fn(y)

        return float((at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h))
