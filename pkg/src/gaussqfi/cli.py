"""Command-line front end: ``gaussqfi {qfi,sweep,ellipse,state}``.

Exit codes: 0 ok, 2 input error, 3 computation error, 4 cross-check failure.
"""

import argparse
import csv
import os
import sys
from dataclasses import replace

import numpy as np

from . import qfi as Q
from .errors import (
    ApplicabilityError,
    CompositeError,
    GaussQfiError,
    PurityError,
    StructuralError,
)
from .fidelity import bures_qfi_fd
from .fock import qfi_fock_fd
from .io import (
    InputError,
    format_value,
    load_channel,
    load_probe,
    load_state,
    save_state,
    state_to_dict,
)
from .core import symplectic_eigenvalues
from .parametrization import FdConfig
from .probes import (
    FIGURE1_EPS,
    FIGURE1_THETAS,
    ChannelSpec,
    ProbeSpec,
    apply_channel_family,
    build_probe,
    ellipse_export,
)

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE, EXIT_XCHECK = 0, 2, 3, 4

QFI_HEADER = ["eps", "method", "value", "error_bound", "lambda_min", "route", "warnings"]

ALL_METHODS = (
    Q.Method.TWO_MODE_COVARIANCE,
    Q.Method.TWO_MODE_WILLIAMSON,
    Q.Method.SERIES,
    Q.Method.MULTIMODE_WILLIAMSON,
    Q.Method.ISOTHERMAL,
    Q.Method.PURE_POINT,
    Q.Method.REGULARIZED,
    Q.Method.BURES_FD,
    Q.Method.FOCK_FD,
)


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def parse_range(text):
    """``a:b:n`` -> ``n`` evenly spaced points from ``a`` to ``b`` inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, f"range must look like a:b:n, got {text!r}") from exc
    if n < 1:
        raise _Fail(EXIT_INPUT, "range needs at least one point")
    return [a] if n == 1 else list(np.linspace(a, b, n))


def _parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, f"expected comma-separated numbers, got {text!r}") from exc


class Job:
    """Resolved inputs of one invocation: family, probe (if any) and numerical settings."""

    def __init__(self, args):
        self.args = args
        self.probe = None
        try:
            self.channel = load_channel(args.channel) if args.channel else ChannelSpec("squeeze")
            if args.state and args.probe:
                raise InputError("give either --state or --probe, not both")
            if args.state:
                self.state = load_state(args.state)
            else:
                self.probe = load_probe(args.probe) if args.probe else ProbeSpec()
                self.state = build_probe(self.probe)
            self.family = apply_channel_family(self.state, self.channel)
        except (GaussQfiError, ValueError) as exc:
            raise _Fail(EXIT_INPUT, f"input error: {exc}") from exc
        fd_step = getattr(args, "fd_step", None)
        if fd_step is not None and not fd_step > 0:
            raise _Fail(EXIT_INPUT, "--fd-step must be positive")
        self.fd = FdConfig(fd_step, fd_step) if fd_step else FdConfig()
        self.convention = Q.PureConvention(getattr(args, "pure_convention", "paper"))

    def eps_grid(self):
        if self.args.eps_range:
            return parse_range(self.args.eps_range)
        return [self.args.eps]

    def with_probe(self, probe):
        clone = object.__new__(Job)
        clone.__dict__.update(self.__dict__)
        clone.probe = probe
        clone.state = build_probe(probe)
        clone.family = apply_channel_family(clone.state, self.channel)
        return clone


def run_method(job, method, eps):
    """Run one named method; raises the library's errors unchanged."""
    fam, a = job.family, job.args
    cfg = job.fd
    if method is Q.Method.TWO_MODE_COVARIANCE:
        return Q.qfi_two_mode(fam, eps, cfg)
    if method is Q.Method.TWO_MODE_WILLIAMSON:
        return Q.qfi_two_mode_williamson(fam, eps, cfg)
    if method is Q.Method.SERIES:
        return Q.qfi_series(fam, eps, tol=a.tol, cfg=cfg)
    if method is Q.Method.MULTIMODE_WILLIAMSON:
        return Q.qfi_multimode_williamson(fam, eps, job.convention, cfg)
    if method is Q.Method.ISOTHERMAL:
        return Q.qfi_isothermal(fam, eps, cfg)
    if method is Q.Method.PURE_POINT:
        return Q.qfi_pure_point(fam, eps, cfg)
    if method is Q.Method.REGULARIZED:
        return Q.qfi_regularized(fam, eps, job.convention, "auto", cfg)
    if method is Q.Method.BURES_FD:
        if job.state.modes != 2:
            raise ApplicabilityError("the two-mode fidelity formula needs two modes")
        step = a.fd_step or 1e-3
        return Q.QfiEstimate(bures_qfi_fd(fam, eps, step), method, diagnostics={"route": method.value})
    if method is Q.Method.FOCK_FD:
        if job.probe is None:
            raise ApplicabilityError("the Fock oracle needs a probe description, not a state file")
        if job.probe.modes > 2:
            raise ApplicabilityError("the Fock oracle handles one or two modes")
        step = a.fd_step or 2e-2
        return Q.QfiEstimate(qfi_fock_fd(job.probe, job.channel, eps, step), method,
                             diagnostics={"route": method.value})
    if method == "auto":
        return Q.qfi_auto(fam, eps, tol=a.tol, convention=job.convention, cfg=cfg)
    raise _Fail(EXIT_INPUT, f"unknown method {method!r}")


def _lambda_min(job, eps):
    return float(symplectic_eigenvalues(job.family(eps).covariance)[-1])


def _row(eps, label, est, lam_min, route=None, warnings=()):
    if est is None:
        return [eps, label, None, None, lam_min, route, "; ".join(warnings)]
    warns = list(est.warnings) + list(warnings)
    return [eps, label, est.value, est.error_bound, lam_min,
            route or est.diagnostics.get("route", est.method.value), "; ".join(warns)]


def max_pairwise_relative_deviation(values):
    worst = 0.0
    for i, x in enumerate(values):
        for y in values[i + 1:]:
            scale = max(abs(x), abs(y))
            if scale > 0:
                worst = max(worst, abs(x - y) / scale)
    return worst


def _method_list(name):
    if name in ("auto", "all"):
        return name
    try:
        return Q.Method(name)
    except ValueError as exc:
        choices = ", ".join(["auto", "all"] + [m.value for m in Q.Method])
        raise _Fail(EXIT_INPUT, f"unknown method {name!r}; choose from {choices}") from exc


_SKIP = (ApplicabilityError, PurityError, StructuralError)


def compute_rows(job, method, eps):
    """Rows for one eps; returns ``(rows, status)`` where status is an exit code."""
    lam_min = _lambda_min(job, eps)
    if method == "all":
        results, rows, status = [], [], EXIT_OK
        for m in ALL_METHODS:
            try:
                est = run_method(job, m, eps)
            except _SKIP as exc:
                rows.append(_row(eps, m.value, None, lam_min, "skipped", (f"not applicable: {exc}",)))
                continue
            except GaussQfiError as exc:
                rows.append(_row(eps, m.value, None, lam_min, "error", (f"{type(exc).__name__}: {exc}",)))
                status = EXIT_COMPUTE
                continue
            results.append(est.value)
            rows.append(_row(eps, m.value, est, lam_min))
        dev = max_pairwise_relative_deviation(results)
        for row in rows:
            row.append(dev)
        if status == EXIT_OK and dev > job.args.xcheck_tol:
            status = EXIT_XCHECK
        return rows, status
    est = run_method(job, method, eps)
    label = "auto" if method == "auto" else method.value
    return [_row(eps, label, est, lam_min)], EXIT_OK


class _Output:
    def __init__(self, path):
        self.path = path
        self.stream = None

    def __enter__(self):
        self.stream = open(self.path, "w", newline="") if self.path else sys.stdout
        self.writer = csv.writer(self.stream, lineterminator="\n")
        return self

    def header(self, cols):
        self.writer.writerow(cols)

    def row(self, values):
        self.writer.writerow([format_value(v) for v in values])
        self.stream.flush()

    def __exit__(self, *exc):
        if self.path:
            self.stream.close()
        else:
            self.stream.flush()


def cmd_qfi(args):
    job = Job(args)
    method = _method_list(args.method)
    grid = job.eps_grid()
    status = EXIT_OK
    with _Output(args.out) as out:
        out.header(QFI_HEADER + (["xcheck"] if method == "all" else []))
        for eps in grid:
            try:
                rows, st = compute_rows(job, method, eps)
            except _SKIP as exc:
                raise _Fail(EXIT_COMPUTE, f"eps={eps:.17g}: method not applicable: {exc}") from exc
            except GaussQfiError as exc:
                raise _Fail(EXIT_COMPUTE, f"eps={eps:.17g}: {type(exc).__name__}: {exc}") from exc
            for row in rows:
                out.row(row)
            status = max(status, st)
    if status == EXIT_XCHECK:
        print(f"cross-check deviation exceeds --xcheck-tol={args.xcheck_tol:g}", file=sys.stderr)
    elif status == EXIT_COMPUTE:
        print("one or more methods failed", file=sys.stderr)
    return status


SWEEP_FIELDS = ("n_th", "r", "theta", "d_mag", "phi", "two_mode_squeezing", "eps")


def _swept_probe(probe, field, value):
    if field in ("n_th", "r", "theta"):
        return replace(probe, **{field: value})
    if field == "two_mode_squeezing":
        return replace(probe, two_mode_squeezing=value)
    d = probe.displacement
    if field == "d_mag":
        phase = np.where(np.abs(d) > 0, np.angle(d), 0.0)
        return replace(probe, displacement=value * np.exp(1j * phase))
    if field == "phi":
        mag = np.abs(d)
        return replace(probe, displacement=mag * np.exp(1j * value))
    raise _Fail(EXIT_INPUT, f"cannot sweep {field!r}")


def cmd_sweep(args):
    try:
        field, rng = args.sweep.split("=", 1)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, "--sweep must look like field=a:b:n") from exc
    if field not in SWEEP_FIELDS:
        raise _Fail(EXIT_INPUT, f"unknown sweep field {field!r}; choose from {', '.join(SWEEP_FIELDS)}")
    values = parse_range(rng)
    job = Job(args)
    if field != "eps" and job.probe is None:
        raise _Fail(EXIT_INPUT, "sweeping a probe field needs --probe")
    method = _method_list(args.method)
    if method == "all":
        raise _Fail(EXIT_INPUT, "sweep takes a single method or auto")
    with _Output(args.out) as out:
        out.header([field, "value", "method", "route"])
        for v in values:
            if field == "eps":
                sub, eps = job, v
            else:
                try:
                    sub = job.with_probe(_swept_probe(job.probe, field, v))
                except (GaussQfiError, ValueError) as exc:
                    raise _Fail(EXIT_INPUT, f"{field}={v:.17g}: {exc}") from exc
                eps = args.eps
            try:
                est = run_method(sub, method, eps)
            except GaussQfiError as exc:
                raise _Fail(EXIT_COMPUTE, f"{field}={v:.17g}: {type(exc).__name__}: {exc}") from exc
            out.row([v, est.value, est.method.value, est.diagnostics.get("route", est.method.value)])
    return EXIT_OK


def cmd_ellipse(args):
    n_points = args.n_points
    if n_points < 1:
        raise _Fail(EXIT_INPUT, "--n-points must be positive")
    eps_values = _parse_floats(args.eps_list) if args.eps_list else list(FIGURE1_EPS)
    try:
        channel = load_channel(args.channel) if args.channel else ChannelSpec("squeeze")
        if args.state:
            bases = [(None, load_state(args.state))]
        else:
            base = load_probe(args.probe) if args.probe else ProbeSpec(r=0.8)
            thetas = _parse_floats(args.theta_list) if args.theta_list else list(FIGURE1_THETAS)
            bases = [(th, build_probe(replace(base, theta=th))) for th in thetas]
    except (GaussQfiError, ValueError) as exc:
        raise _Fail(EXIT_INPUT, f"input error: {exc}") from exc
    with _Output(args.out) as out:
        out.header(["set", "eps", "theta", "index", "x", "p"])
        set_id = 0
        for th, state in bases:
            if state.modes != 1:
                raise _Fail(EXIT_INPUT, "ellipse export needs one-mode states")
            fam = apply_channel_family(state, channel)
            for eps in eps_values:
                pts = ellipse_export(fam(eps), n_points)
                for i, (x, p) in enumerate(pts):
                    out.row([set_id, float(eps), None if th is None else float(th), i, float(x), float(p)])
                set_id += 1
    return EXIT_OK


def cmd_state(args):
    job = Job(args)
    st = job.family(args.eps)
    if args.out:
        save_state(st, args.out, args.representation)
    else:
        import json

        print(json.dumps(state_to_dict(st, args.representation), indent=1))
    return EXIT_OK


def _add_inputs(p):
    p.add_argument("--probe", help="probe JSON file or inline JSON")
    p.add_argument("--state", help="state JSON file or inline JSON")
    p.add_argument("--channel", help="channel JSON file or inline JSON (default: squeeze)")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_numerics(p):
    p.add_argument("--method", "--methods", dest="method", default="auto",
                   help="auto, all, or one of: " + ", ".join(m.value for m in Q.Method))
    p.add_argument("--eps", type=float, default=0.0, help="parameter value")
    p.add_argument("--eps-range", help="a:b:n grid of parameter values")
    p.add_argument("--fd-step", type=float, default=None, help="finite-difference step")
    p.add_argument("--tol", type=float, default=1e-10, help="series remainder tolerance")
    p.add_argument("--xcheck-tol", type=float, default=1e-2,
                   help="max pairwise relative deviation allowed with --method all")
    p.add_argument("--pure-convention", choices=[c.value for c in Q.PureConvention], default="paper",
                   help="purity term at pure modes: lambda_ddot (paper) or 0 (zero)")


def build_parser():
    parser = argparse.ArgumentParser(prog="gaussqfi", description="Quantum Fisher information of Gaussian states")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfi", help="QFI at one or more parameter values")
    _add_inputs(p)
    _add_numerics(p)
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("sweep", help="QFI while sweeping one probe field")
    _add_inputs(p)
    _add_numerics(p)
    p.add_argument("--sweep", required=True, help="field=a:b:n with field in " + ", ".join(SWEEP_FIELDS))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ellipse", help="phase-space ellipses (defaults reproduce the r=0.8 figure)")
    _add_inputs(p)
    p.add_argument("--eps-list", help="comma-separated parameter values (default 0,0.1)")
    p.add_argument("--theta-list", help="comma-separated probe rotations (default 0..pi/2 in pi/8 steps)")
    p.add_argument("--n-points", type=int, default=100)
    p.set_defaults(func=cmd_ellipse)

    p = sub.add_parser("state", help="write the state of a probe/channel family at --eps as JSON")
    _add_inputs(p)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--representation", choices=["complex", "real"], default="complex")
    p.set_defaults(func=cmd_state)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"gaussqfi: {exc}", file=sys.stderr)
        return exc.code
    except CompositeError as exc:
        print(f"gaussqfi: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the final flush
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
