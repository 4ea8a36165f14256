"""JSON readers/writers for states, probes and channels, and the CSV writer.

Complex numbers are stored as ``[re, im]`` pairs. A state file looks like::

    {"modes": 1, "representation": "complex",
     "displacement": [[0.5, 0.0], [0.5, -0.0]],
     "covariance": {"rows": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}}

With ``"representation": "real"`` the entries are the quadrature-form vector
``(x..., p...)`` and its covariance (plain numbers or ``[re, 0]`` pairs).
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .core import GaussianState, RealGaussianState, to_complex, to_real, validate_state
from .errors import StructuralError
from .probes import ChannelSpec, ProbeSpec


class InputError(StructuralError):
    """A file or inline document could not be read or does not describe a valid object."""


def _load_document(source):
    """Parse ``source`` as inline JSON (starts with ``{``) or as a path to a JSON file."""
    text = source.strip() if isinstance(source, str) else None
    try:
        if text is not None and text.startswith("{"):
            return json.loads(text)
        return json.loads(Path(source).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {source}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {source!r}: {exc}") from exc


def _number(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex entries must be [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"expected a number or [re, im] pair, got {x!r}")
    return complex(float(x), 0.0)


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def state_from_dict(doc):
    try:
        modes = int(doc["modes"])
        rep = doc.get("representation", "complex")
        disp = np.array([_number(x) for x in doc["displacement"]])
        rows = doc["covariance"]["rows"]
        cov = np.array([[_number(x) for x in row] for row in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"state document is missing or has malformed fields: {exc}") from exc
    if cov.shape != (2 * modes, 2 * modes) or disp.shape != (2 * modes,):
        raise InputError(f"state shapes {disp.shape}/{cov.shape} do not match modes={modes}")
    if rep == "complex":
        state = GaussianState(disp, cov)
    elif rep == "real":
        if np.abs(cov.imag).max(initial=0) or np.abs(disp.imag).max(initial=0):
            raise InputError("real representation must not carry imaginary parts")
        state = to_complex(RealGaussianState(disp.real, cov.real))
    else:
        raise InputError(f"unknown representation {rep!r}")
    validate_state(state)
    return state


def state_to_dict(state, representation="complex"):
    if representation == "complex":
        disp, cov = state.displacement, state.covariance
    elif representation == "real":
        real = to_real(state)
        disp, cov = real.displacement_real, real.covariance_real
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return {
        "modes": state.modes,
        "representation": representation,
        "displacement": [_pair(z) for z in disp],
        "covariance": {"rows": [[_pair(z) for z in row] for row in cov]},
    }


def load_state(source):
    return state_from_dict(_load_document(source))


def save_state(state, path, representation="complex"):
    Path(path).write_text(json.dumps(state_to_dict(state, representation), indent=1) + "\n")


def _per_mode_values(value, complex_ok=False):
    if isinstance(value, list) and value and isinstance(value[0], list):
        return [_number(v) for v in value]
    if isinstance(value, list):
        if complex_ok and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
            # a lone [re, im] pair for a one-mode probe
            return [_number(value)]
        return [float(v) for v in value]
    if complex_ok:
        return [_number(value)]
    return [float(value)]


def probe_from_dict(doc):
    known = {"modes", "n_th", "r", "theta", "displacement", "two_mode_squeezing"}
    extra = set(doc) - known
    if extra:
        raise InputError(f"unknown probe fields: {sorted(extra)}")
    try:
        kwargs = {k: _per_mode_values(doc[k]) for k in ("n_th", "r", "theta") if k in doc}
        if "displacement" in doc:
            kwargs["displacement"] = _per_mode_values(doc["displacement"], complex_ok=True)
        lengths = [len(v) for v in kwargs.values()]
        modes = int(doc.get("modes", max(lengths, default=1)))
        return ProbeSpec(modes=modes, two_mode_squeezing=float(doc.get("two_mode_squeezing", 0.0)), **kwargs)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed probe: {exc}") from exc


def probe_to_dict(spec):
    return {
        "modes": spec.modes,
        "n_th": [float(x) for x in spec.n_th],
        "r": [float(x) for x in spec.r],
        "theta": [float(x) for x in spec.theta],
        "displacement": [_pair(z) for z in spec.displacement],
        "two_mode_squeezing": spec.two_mode_squeezing,
    }


def load_probe(source):
    return probe_from_dict(_load_document(source))


def channel_from_dict(doc):
    extra = set(doc) - {"kind", "modes", "direction"}
    if extra:
        raise InputError(f"unknown channel fields: {sorted(extra)}")
    direction = doc.get("direction")
    if direction is not None:
        direction = _per_mode_values(direction, complex_ok=True)
    try:
        return ChannelSpec(doc.get("kind", "squeeze"), doc.get("modes"), direction)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed channel: {exc}") from exc


def load_channel(source):
    return channel_from_dict(_load_document(source))


def format_value(x):
    """17 significant digits for floats, empty for ``None``."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(header, rows, stream):
    """Write ``rows`` with LF line endings and ``.`` decimals."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def csv_text(header, rows):
    buf = io.StringIO()
    write_csv(header, rows, buf)
    return buf.getvalue()
