"""Exact sparse linear algebra over Q.

Rows are dicts {column index: mpq}.  Elimination keeps a reduced row echelon
form incrementally; the pivot of a new row is its smallest surviving column,
so the result depends only on the row and column order.
"""

from gmpy2 import mpq

from .errors import ValidationError

ONE = mpq(1)


def _axpy(dst, src, f):
    """dst -= f * src, dropping zeros (dicts)."""
    for k, v in src.items():
        x = dst.get(k)
        if x is None:
            dst[k] = -f * v
        else:
            x -= f * v
            if x:
                dst[k] = x
            else:
                del dst[k]


def eliminate(rows, track=False):
    """Reduced row echelon form.

    Returns (pivots, zero_combos).  pivots maps pivot column -> (row, combo)
    where row is the reduced row (pivot entry 1) and combo expresses it as a
    combination {original row index: coefficient}.  zero_combos lists the
    combinations of original rows that reduce to zero (consistency conditions).
    Combos are only tracked when track=True.
    """
    pivots = {}
    zero = []
    for idx, row in enumerate(rows):
        r = {k: v for k, v in row.items() if v}
        c = {idx: ONE} if track else None
        for col in [k for k in r if k in pivots]:
            f = r.get(col)
            if not f:
                continue
            prow, pcombo = pivots[col]
            _axpy(r, prow, f)
            if track:
                _axpy(c, pcombo, f)
        if not r:
            if track:
                zero.append(c)
            continue
        p = min(r)
        inv = ONE / r[p]
        if inv != ONE:
            r = {k: v * inv for k, v in r.items()}
            if track:
                c = {k: v * inv for k, v in c.items()}
        for col, (prow, pcombo) in pivots.items():
            f = prow.get(p)
            if f:
                _axpy(prow, r, f)
                if track:
                    _axpy(pcombo, c, f)
        pivots[p] = (r, c)
    return pivots, zero


def rank(rows):
    return len(eliminate(rows)[0])


class LinearSystemQ:
    """Linear system with labelled columns and rows, exact over Q."""

    def __init__(self, columns=()):
        self.col_labels = []
        self.col_index = {}
        self.rows = []
        self.rhs = []
        self.row_labels = []
        for c in columns:
            self.add_column(c)

    def add_column(self, label):
        if label in self.col_index:
            return self.col_index[label]
        self.col_index[label] = len(self.col_labels)
        self.col_labels.append(label)
        return self.col_index[label]

    def add_row(self, coeffs, rhs=0, label=None):
        row = {}
        for lab, v in coeffs.items():
            v = mpq(v)
            if v:
                row[self.add_column(lab)] = v
        self.rows.append(row)
        self.rhs.append(mpq(rhs))
        self.row_labels.append(label)

    @property
    def ncols(self):
        return len(self.col_labels)

    def rank(self):
        return rank(self.rows)

    def kernel_basis(self):
        pivots, _ = eliminate(self.rows)
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            v = {self.col_labels[f]: ONE}
            for p, (prow, _) in pivots.items():
                x = prow.get(f)
                if x:
                    v[self.col_labels[p]] = -x
            basis.append(v)
        return basis

    def solve(self):
        """Unique solution as {label: mpq}; raises if inconsistent or underdetermined."""
        n = self.ncols
        aug = [dict(r) for r in self.rows]
        for r, b in zip(aug, self.rhs):
            if b:
                r[n] = b
        pivots, _ = eliminate(aug)
        if n in pivots:
            raise ValidationError("inconsistent linear system")
        if len(pivots) != n:
            raise ValidationError(f"linear system has a {n - len(pivots)}-dimensional kernel")
        return {self.col_labels[p]: prow.get(n, mpq(0)) for p, (prow, _) in pivots.items()}


class SolvePlan:
    """Precomputed left inverse for repeated solves A x = b with a fixed A.

    Requires A to have full column rank.  solve(b) also verifies the
    consistency conditions, so an incompatible right-hand side is reported.
    """

    def __init__(self, rows, ncols):
        pivots, zero = eliminate(rows, track=True)
        if len(pivots) != ncols:
            raise ValidationError(f"system has a {ncols - len(pivots)}-dimensional kernel")
        self.ncols = ncols
        self.nrows = len(rows)
        self.inverse = [None] * ncols
        for p, (_, combo) in pivots.items():
            self.inverse[p] = sorted(combo.items())
        self.checks = [sorted(c.items()) for c in zero]

    def solve(self, b):
        """b: sequence (or dict) of right-hand side values indexed by row."""
        get = b.get if isinstance(b, dict) else (lambda i, d=None: b[i])
        for chk in self.checks:
            s = mpq(0)
            for i, v in chk:
                x = get(i, 0)
                if x:
                    s += v * x
            if s:
                raise ValidationError("right-hand side outside the image of the system")
        out = []
        for combo in self.inverse:
            s = mpq(0)
            for i, v in combo:
                x = get(i, 0)
                if x:
                    s += v * x
            out.append(s)
        return out
