"""Command-line front end.

Subcommands: verify, mfun, green, measure, project, blowup.  Tables go to
stdout as CSV (default) or JSON with a fixed column order and 17-significant
-digit floats, so output is byte-stable for a fixed configuration and
version.  Diagnostics go to stderr.  Every table carries a trailing `error`
column, empty on success; rows whose computation raised a domain error keep
their inputs, leave outputs blank, fill `error`, and make the command exit 1.
Configuration errors (bad flags, malformed files) exit 2 before any table
output.

Complex numbers on the command line are `a+bi` literals (also accepted:
"i", "-2i", "3").  A flat key-value config file may supply any long option
(without the leading dashes); explicit flags win.

The only environment variable read is DIRACWT_THREADS: a row-sweep thread
count (order-preserving, so output is unchanged by it).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import algebra
from .algebra import (ID2, SIGMA1, SIGMA3, SIGMA4, UMAT, UMAT_INV,
                      Conjugation, apply_conjugation, mat2_exp, wronskian)
from .errors import ConfigError, DiracwtError, PotentialFormatError
from .greens import green_dirac, green_hamiltonian
from .potential import (MatrixPotential, Model, ScalarPotential, Side,
                        build_matrix_potential, jsa_check, load_potential,
                        to_hamiltonian_potential)
from .propagate import (BoundaryFrame, cell_transfer, fundamental_matrix,
                        fundamental_matrix_grid, rk4_reference, wronskian_drift)
from .spectral import (blowup_norm, omega_interval, projection_via_stone,
                       projection_via_transform)
from .testfuncs import BumpKind, TestFunction
from .weyl import jsym_residual, m_closed_form, m_numeric, m_pair

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?i)?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse `a+bi` literals: "1+2i", "-0.5i", "i", "3"."""
    m = _COMPLEX_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ConfigError(f"bad complex literal {text!r} (expected a+bi)")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_text = m.group("im")
    if im_text is None:
        im_part = 0.0
    else:
        body = im_text[:-1]
        if body in ("", "+"):
            im_part = 1.0
        elif body == "-":
            im_part = -1.0
        else:
            im_part = float(body)
    return complex(re_part, im_part)


def fmt(x) -> str:
    return "%.17g" % float(x)


def _thread_count() -> int:
    raw = os.environ.get("DIRACWT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sweep(fn, items):
    """Order-preserving map, threaded when DIRACWT_THREADS > 1."""
    n = _thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class Table:
    def __init__(self, columns):
        self.columns = list(columns) + ["error"]
        self.rows = []
        self.failed = False

    def add(self, **fields):
        if fields.get("error"):
            self.failed = True
        self.rows.append([fields.get(c, "") for c in self.columns])

    def emit(self, out, fmt_name: str):
        if fmt_name == "json":
            payload = [dict(zip(self.columns, row)) for row in self.rows]
            out.write(json.dumps(payload, indent=None, separators=(",", ":")) + "\n")
        else:
            out.write(",".join(self.columns) + "\n")
            for row in self.rows:
                out.write(",".join(str(v) for v in row) + "\n")


def _load_config(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, val = line.split("=", 1)
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return values


def _merge_config(args, parser):
    if not getattr(args, "config", None):
        return args
    file_vals = _load_config(args.config)
    defaults = parser.parse_args([args.command])  # per-command defaults
    for key, val in file_vals.items():
        if not hasattr(args, key):
            raise ConfigError(f"unknown config key {key!r}")
        # Flags given explicitly (different from default) win over the file.
        if getattr(args, key) == getattr(defaults, key, None):
            setattr(args, key, val)
    return args


def _model(args) -> Model:
    try:
        return Model(args.model)
    except ValueError:
        raise ConfigError(f"unknown model {args.model!r}") from None


def _potential(args) -> ScalarPotential:
    if getattr(args, "potential", None):
        return load_potential(args.potential)
    q0 = parse_complex(str(args.q0))
    return ScalarPotential.constant(q0)


def _frame(args) -> BoundaryFrame:
    return BoundaryFrame(float(getattr(args, "theta", 0.0)))


def _complex_list(text) -> list[complex]:
    return [parse_complex(p) for p in str(text).split(",") if p.strip()]


def _float_list(text) -> list[float]:
    return [float(p) for p in str(text).split(",") if p.strip()]


_INLINE_Q_RE = re.compile(r"^\s*diag\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)\s*$")


def _inline_matrix(text: str) -> MatrixPotential:
    """Constant Dirac-side matrix from 'diag(a,b)' or '[[a,b],[c,d]]' literals."""
    m = _INLINE_Q_RE.match(text)
    if m:
        d1, d2 = (parse_complex(g) for g in m.groups())
        M = np.array([[d1, 0], [0, d2]], dtype=np.complex128)
    else:
        body = text.strip()
        if not (body.startswith("[[") and body.endswith("]]")):
            raise ConfigError(f"bad inline matrix {text!r}: use diag(a,b) or [[a,b],[c,d]]")
        rows = body[2:-2].split("],[")
        if len(rows) != 2:
            raise ConfigError(f"bad inline matrix {text!r}: need two rows")
        try:
            M = np.array([[parse_complex(e) for e in row.split(",")] for row in rows],
                         dtype=np.complex128)
        except (ValueError, ConfigError):
            raise ConfigError(f"bad inline matrix {text!r}") from None
        if M.shape != (2, 2):
            raise ConfigError(f"bad inline matrix {text!r}: need 2x2")
    regions = np.stack([M, M])
    return MatrixPotential(np.array([0.0]), regions, Side.DIRAC, Model.GENERAL_JSA)


# ----------------------------------------------------------------- verify --

def _verify_checks(args):
    """Yield (name, residual, tolerance) triples for the identity suite."""
    rng = np.random.default_rng(2024)
    tol = float(args.tol)
    model = _model(args)
    frame = _frame(args)

    yield "U_unitary", float(np.abs(UMAT @ UMAT.conj().T - ID2).max()), 1e-15
    yield "U_sigma3_similarity", float(np.abs(UMAT @ SIGMA3 @ UMAT_INV - 1j * SIGMA4).max()), 1e-15
    yield "U_sigma1_transpose", float(np.abs(UMAT @ SIGMA1 @ UMAT.T + 1j * ID2).max()), 1e-15

    vs = rng.normal(size=(64, 2)) + 1j * rng.normal(size=(64, 2))
    res_j = max(np.abs(apply_conjugation(Conjugation.J, apply_conjugation(Conjugation.J, v)) - v).max() for v in vs)
    res_k = max(np.abs(apply_conjugation(Conjugation.K, apply_conjugation(Conjugation.K, v)) + v).max() for v in vs)
    res_jt = max(np.abs(apply_conjugation(Conjugation.JTILDE, apply_conjugation(Conjugation.JTILDE, v)) + v).max() for v in vs)
    yield "conjugation_J_squared", float(res_j), 1e-15
    yield "conjugation_K_squared", float(res_k), 1e-15
    yield "conjugation_Jtilde_squared", float(res_jt), 1e-15

    res = 0.0
    for _ in range(32):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        det = np.linalg.det(mat2_exp(A))
        res = max(res, abs(det - np.exp(np.trace(A))) / abs(np.exp(np.trace(A))))
    yield "matrix_exp_determinant", float(res), 1e-12

    if getattr(args, "inline_Q", None):
        Q = _inline_matrix(args.inline_Q)
        ok, imbalance = jsa_check(Q)
        yield "jsa_diagonal_balance", float(imbalance), 0.0 if ok else -1.0
        zs = [1j, 1.0 + 0.5j]
        res = max(wronskian_drift(Q, z, frame, xs=np.linspace(-3, 3, 7)) for z in zs)
        yield "wronskian_growth_law", float(res), tol
        return

    pot = _potential(args)
    if model is Model.GENERAL_JSA:
        raise ConfigError("model 'general' needs --inline-Q")
    mpD = build_matrix_potential(model, pot)
    mpH = to_hamiltonian_potential(mpD)
    ok, imbalance = jsa_check(mpD)
    yield "jsa_diagonal_balance", float(imbalance), 0.0 if ok else -1.0

    zs = [2j, 1.0 + 1j, -0.7 + 0.4j]
    xs = np.linspace(-4, 4, 9)
    res = max(wronskian_drift(mpD, z, frame, xs) for z in zs)
    yield "wronskian_constancy", float(res), tol

    res = 0.0
    for z in zs:
        FD = fundamental_matrix_grid(mpD, z, xs, frame)
        FH = fundamental_matrix_grid(mpH, z, xs, frame)
        res = max(res, float(np.abs(FD - np.einsum("ij,njk->nik", UMAT_INV, FH)).max()))
    yield "dirac_hamiltonian_similarity", float(res), tol

    Q0 = mpD.region_at(0.1)
    T1 = cell_transfer(Q0, 2j, 0.6)
    T2 = cell_transfer(Q0, 2j, 0.9)
    T12 = cell_transfer(Q0, 2j, 1.5)
    yield "transfer_semigroup", float(np.abs(T2 @ T1 - T12).max()), 1e-12
    Tn = cell_transfer(Q0, 2j, -0.6)
    yield "transfer_inverse", float(np.abs(Tn @ T1 - ID2).max()), 1e-12

    z0 = 1.0 + 1j
    Fex = fundamental_matrix(mpD, z0, 1.5, frame).value
    Frk = rk4_reference(mpD, z0, 1.5, frame).value
    yield "rk4_oracle_agreement", float(np.abs(Fex - Frk).max()), 1e-8

    # Wave-function conjugation: J for defocusing (z -> zbar), K for focusing.
    op = Conjugation.J if model is Model.DEFOCUSING else Conjugation.K
    res = 0.0
    for z in zs:
        psi = fundamental_matrix(mpD, z, 1.2, frame).value[:, 0]
        psi0 = fundamental_matrix(mpD, z, 0.0, frame).value[:, 0]
        mapped0 = apply_conjugation(op, psi0)
        prop = fundamental_matrix_grid(mpD, np.conj(z), np.array([1.2]), frame)[0]
        F0 = fundamental_matrix(mpD, np.conj(z), 0.0, frame).value
        mapped = prop @ np.linalg.solve(F0, mapped0)
        res = max(res, float(np.abs(mapped - apply_conjugation(op, psi)).max()))
    yield "conjugation_wavefunction_map", float(res), tol

    res = 0.0
    for z in zs:
        mmD, mpD_ = m_pair(pot, model, z, frame, Side.DIRAC)
        mmH, mpH_ = m_pair(pot, model, z, frame, Side.HAMILTONIAN)
        res = max(res, abs(mmD - mmH), abs(mpD_ - mpH_))
    yield "m_side_equality", float(res), tol

    if pot.is_constant and abs(frame.theta) < 1e-15:
        res = 0.0
        for z in zs:
            for sign in (+1, -1):
                mc = m_closed_form(model, pot.q_right, z, sign)
                mn = m_numeric(pot, model, z, sign, frame)
                res = max(res, abs(mc.value - mn.value))
        yield "m_numeric_vs_closed_form", float(res), tol

    if model is Model.FOCUSING:
        res = max(jsym_residual(pot, z, frame) for z in zs)
        yield "conjugate_reciprocal_identity", float(res), tol
    else:
        res = 0.0
        for z in zs:
            if z.imag <= 0:
                continue
            mm, mp_ = m_pair(pot, model, z, frame)
            res = max(res, max(0.0, -mp_.imag), max(0.0, -(-mm).imag))
        yield "herglotz_sign", float(res), tol


def cmd_verify(args, out):
    table = Table(["identity", "max_residual", "tolerance", "pass"])
    all_ok = True
    for name, residual, tol in _verify_checks(args):
        if tol < 0:  # sentinel: boolean check that failed outright
            ok = False
            tol = 0.0
        else:
            ok = residual <= tol
        all_ok &= ok
        table.add(identity=name, max_residual=fmt(residual), tolerance=fmt(tol),
                  **{"pass": str(ok).lower()})
    table.emit(out, args.output)
    return 0 if all_ok else 1


# ------------------------------------------------------------------- mfun --

def cmd_mfun(args, out):
    model = _model(args)
    pot = _potential(args)
    frame = _frame(args)
    zs = _complex_list(args.z)
    table = Table(["re_z", "im_z", "re_m_plus", "im_m_plus", "re_m_minus", "im_m_minus", "provenance"])

    use_closed = args.provenance == "closed_form"
    if use_closed and not pot.is_constant:
        raise ConfigError("closed-form provenance needs a constant potential")

    def row(z):
        try:
            if use_closed:
                mp_ = m_closed_form(model, pot.q_right, z, +1, frame)
                mm = m_closed_form(model, pot.q_right, z, -1, frame)
            else:
                mp_ = m_numeric(pot, model, z, +1, frame)
                mm = m_numeric(pot, model, z, -1, frame)
            return dict(re_z=fmt(z.real), im_z=fmt(z.imag),
                        re_m_plus=fmt(mp_.value.real), im_m_plus=fmt(mp_.value.imag),
                        re_m_minus=fmt(mm.value.real), im_m_minus=fmt(mm.value.imag),
                        provenance=mp_.provenance)
        except DiracwtError as exc:
            return dict(re_z=fmt(z.real), im_z=fmt(z.imag), error=str(exc))

    for r in _sweep(row, zs):
        table.add(**r)
    table.emit(out, args.output)
    return 1 if table.failed else 0


# ------------------------------------------------------------------ green --

def cmd_green(args, out):
    model = _model(args)
    pot = _potential(args)
    frame = _frame(args)
    zs = _complex_list(args.z)
    x = float(args.x)
    xp = float(args.xp)
    side = Side(args.side)
    cols = ["re_z", "im_z", "x", "xp", "side",
            "g11_re", "g11_im", "g12_re", "g12_im", "g21_re", "g21_im", "g22_re", "g22_im"]
    table = Table(cols)

    def row(z):
        base = dict(re_z=fmt(z.real), im_z=fmt(z.imag), x=fmt(x), xp=fmt(xp), side=side.value)
        try:
            fn = green_dirac if side is Side.DIRAC else green_hamiltonian
            G = fn(pot, model, z, x, xp, frame).value
            for (i, j), tag in zip([(0, 0), (0, 1), (1, 0), (1, 1)], ["g11", "g12", "g21", "g22"]):
                base[f"{tag}_re"] = fmt(G[i, j].real)
                base[f"{tag}_im"] = fmt(G[i, j].imag)
            return base
        except DiracwtError as exc:
            base["error"] = str(exc)
            return base

    for r in _sweep(row, zs):
        table.add(**r)
    table.emit(out, args.output)
    return 1 if table.failed else 0


# ---------------------------------------------------------------- measure --

def _require_constant_for_focusing(model, pot):
    if model is Model.FOCUSING and not pot.is_constant:
        raise ConfigError("non-self-adjoint measures are supported for constant "
                          "potentials only (interval separation is only known there)")


def cmd_measure(args, out):
    model = _model(args)
    pot = _potential(args)
    frame = _frame(args)
    _require_constant_for_focusing(model, pot)
    intervals = [tuple(_float_list(part)) for part in str(args.interval).split(";") if part.strip()]
    for iv in intervals:
        if len(iv) != 2:
            raise ConfigError(f"interval must be 'a,b', got {iv}")
    cols = ["l1", "l2", "converged",
            "o11_re", "o11_im", "o12_re", "o12_im", "o21_re", "o21_im", "o22_re", "o22_im"]
    table = Table(cols)

    def row(iv):
        l1, l2 = iv
        base = dict(l1=fmt(l1), l2=fmt(l2))
        try:
            sample = omega_interval(pot, model, l1, l2, frame, tol=float(args.tol))
            base["converged"] = str(bool(sample.converged)).lower()
            V = sample.value
            for (i, j), tag in zip([(0, 0), (0, 1), (1, 0), (1, 1)], ["o11", "o12", "o21", "o22"]):
                base[f"{tag}_re"] = fmt(V[i, j].real)
                base[f"{tag}_im"] = fmt(V[i, j].imag)
            return base
        except DiracwtError as exc:
            base["error"] = str(exc)
            return base

    for r in _sweep(row, intervals):
        table.add(**r)
    table.emit(out, args.output)
    return 1 if table.failed else 0


# ---------------------------------------------------------------- project --

def _testfunction(spec: str) -> TestFunction:
    """bump spec: 'kind:center:half_width:freq:w1:w2' with a+bi weights."""
    parts = str(spec).split(":")
    if len(parts) != 6:
        raise ConfigError(f"test function spec needs 6 fields, got {spec!r}")
    kind = BumpKind(parts[0])
    return TestFunction(kind, float(parts[1]), float(parts[2]), float(parts[3]),
                        (parse_complex(parts[4]), parse_complex(parts[5])))


def cmd_project(args, out):
    model = _model(args)
    pot = _potential(args)
    frame = _frame(args)
    _require_constant_for_focusing(model, pot)
    f = _testfunction(args.f)
    g = _testfunction(args.g)
    l1, l2 = _float_list(args.interval)
    side = Side(args.side)
    methods = ["transform", "stone"] if args.method == "both" else [args.method]
    table = Table(["l1", "l2", "value_re", "value_im", "method"])
    failed = False
    for method in methods:
        base = dict(l1=fmt(l1), l2=fmt(l2), method=method)
        try:
            if method == "transform":
                v = projection_via_transform(pot, model, f, g, l1, l2, frame,
                                             tol=float(args.tol), side=side)
            else:
                v = projection_via_stone(pot, model, f, g, l1, l2, frame,
                                         tol=float(args.tol), side=side)
            base["value_re"] = fmt(v.real)
            base["value_im"] = fmt(v.imag)
        except DiracwtError as exc:
            base["error"] = str(exc)
            failed = True
        table.add(**base)
    table.emit(out, args.output)
    return 1 if (failed or table.failed) else 0


# ----------------------------------------------------------------- blowup --

def cmd_blowup(args, out):
    q0 = parse_complex(str(args.q0))
    lam2 = float(args.lambda2)
    lam1s = _float_list(args.lambda1)
    table = Table(["lambda1", "lambda2", "norm", "predicted"])
    for l1 in lam1s:
        base = dict(lambda1=fmt(l1), lambda2=fmt(lam2))
        try:
            nrm = blowup_norm(q0, l1, lam2)
            base["norm"] = fmt(nrm)
            base["predicted"] = fmt(1.0 / l1)
        except (DiracwtError, ValueError) as exc:
            base["error"] = str(exc)
        table.add(**base)
    table.emit(out, args.output)
    return 1 if table.failed else 0


# ------------------------------------------------------------------ main --

def _build_parser():
    parser = argparse.ArgumentParser(prog="diracwt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_model=True):
        if with_model:
            p.add_argument("--model", default="defocusing",
                           choices=[m.value for m in Model])
            p.add_argument("--q0", default="0", help="constant potential value, a+bi")
            p.add_argument("--potential", default=None, help="potential file path")
            p.add_argument("--theta", type=float, default=0.0, help="boundary frame angle")
        p.add_argument("--tol", default="1e-8")
        p.add_argument("--output", default="csv", choices=["csv", "json"])
        p.add_argument("--config", default=None, help="flat key=value config file")

    p = sub.add_parser("verify", help="run the identity suites")
    common(p)
    p.add_argument("--inline-Q", dest="inline_Q", default=None,
                   help="general-model constant matrix, e.g. diag(1,2)")

    p = sub.add_parser("mfun", help="half-line coefficients on a z list")
    common(p)
    p.add_argument("--z", required=True, help="comma list of a+bi points")
    p.add_argument("--provenance", default="numeric", choices=["numeric", "closed_form"])

    p = sub.add_parser("green", help="Green matrix entries")
    common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--xp", required=True)
    p.add_argument("--side", default="dirac", choices=[s.value for s in Side])

    p = sub.add_parser("measure", help="spectral measure of intervals")
    common(p)
    p.add_argument("--interval", required=True, help="'a,b' (semicolon list allowed)")
    p.set_defaults(tol="1e-6")

    p = sub.add_parser("project", help="projection bilinear form")
    common(p)
    p.add_argument("--interval", required=True)
    p.add_argument("--f", required=True, help="kind:center:width:freq:w1:w2")
    p.add_argument("--g", required=True)
    p.add_argument("--method", default="both", choices=["transform", "stone", "both"])
    p.add_argument("--side", default="hamiltonian", choices=[s.value for s in Side])
    p.set_defaults(tol="1e-6")

    p = sub.add_parser("blowup", help="crossing-point projection-norm law")
    common(p, with_model=False)
    p.add_argument("--q0", required=True)
    p.add_argument("--lambda1", required=True, help="comma list")
    p.add_argument("--lambda2", required=True)
    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "mfun": cmd_mfun,
    "green": cmd_green,
    "measure": cmd_measure,
    "project": cmd_project,
    "blowup": cmd_blowup,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args, parser)
        return _COMMANDS[args.command](args, sys.stdout)
    except (ConfigError, PotentialFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiracwtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
