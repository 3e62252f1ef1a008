"""Command-line interface.

Subcommands::

    eigenorient orient V.csv [--eigenvalues E.csv | --from-panel]
    eigenorient generate orient.json | theta.csv
    eigenorient track panel.csv (--y-column NAME | --y y.csv)
    eigenorient dispersion track.json
    eigenorient regress panel.csv (--y-column NAME | --y y.csv) [--predict out.csv]
    eigenorient synth --axes 3,2,1 --theta 30,-20,25 --m 1000

JSON goes to ``--output`` (default stdout).  Validation failures exit with
status 2 and a JSON error object on stderr.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .dirstats import BasisEnsemble, dispersion, mean_eigenbasis
from .eigenflow import Panel, decompose_panel, predict, regress, rolling_track, sliding_windows
from .errors import EigenOrientError, ParseError
from .orient import generate_oriented_eigenvectors, orient_eigenvectors
from .synthkit import EllipsoidSpec, ellipsoid_cloud, inject_flips, random_flip_mask

COMMANDS = ("orient", "generate", "track", "dispersion", "regress", "synth")


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    eigenvalues_path: Optional[str] = None
    from_panel: bool = False
    y_path: Optional[str] = None
    y_column: Optional[str] = None
    window_len: Optional[int] = None
    stride: Optional[int] = None
    q: Optional[int] = None
    angle_unit: str = "deg"
    center: bool = True
    seed: Optional[int] = None
    ortho_tol: float = 1e-8
    reorthonormalize: bool = False
    series_dir: Optional[str] = None
    orient: bool = True
    inject_flips: Optional[int] = None
    refine: bool = False
    predict_path: Optional[str] = None
    upto: Optional[int] = None
    synth: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.command not in ("synth",) and not self.input_path:
            raise ValueError("an input path is required")
        if self.window_len is not None and self.window_len <= 0:
            raise ValueError("window length must be positive")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be at least 1")
        if self.angle_unit not in ("deg", "rad"):
            raise ValueError("angle unit must be 'deg' or 'rad'")


# -- I/O helpers ---------------------------------------------------------------

def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(path):
    """Read a numeric CSV matrix, auto-detecting a single header row.

    Returns
    -------
    data : ndarray, shape (rows, cols)
    header : list of str or None
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path} is empty")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path} has a header but no data")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{path}: rows have differing numbers of fields")
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as err:
        raise ParseError(f"{path}: non-numeric entry ({err})") from err
    if header is not None and len(header) != width:
        raise ParseError(f"{path}: header has {len(header)} fields, rows have {width}")
    return data, header


def write_csv(path, data, header=None):
    data = np.atleast_2d(np.asarray(data, dtype=float))
    np.savetxt(path, data, fmt="%.12g", delimiter=",",
               header=",".join(header) if header else "", comments="")


def _num(a):
    """JSON-ready nested lists; floats rounded to 12 significant digits."""
    a = np.asarray(a)
    if a.dtype.kind in "iub":
        return a.tolist()
    rounded = [float(f"{x:.12g}") for x in a.ravel()]
    if a.ndim == 0:
        return rounded[0]
    return np.array(rounded).reshape(a.shape).tolist()


def _angles_out(theta, unit):
    return _num(np.degrees(theta) if unit == "deg" else theta)


def _angles_in(theta, unit):
    theta = np.asarray(theta, dtype=float)
    return np.radians(theta) if unit == "deg" else theta


def _emit(cfg, payload):
    text = json.dumps(payload, indent=2)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _panel_and_y(cfg):
    data, header = read_csv(cfg.input_path)
    if cfg.y_column is not None:
        if header is None or cfg.y_column not in header:
            raise ParseError(f"column {cfg.y_column!r} not found in {cfg.input_path}")
        j = header.index(cfg.y_column)
        y = data[:, j]
        data = np.delete(data, j, axis=1)
        header = header[:j] + header[j + 1:]
    elif cfg.y_path is not None:
        y = read_csv(cfg.y_path)[0].ravel()
        if y.shape[0] != data.shape[0]:
            raise ParseError("response length does not match the panel")
    else:
        raise ParseError("a response is required: use --y-column or --y")
    return data, header, y


def _upper_labels(n):
    return [f"t{i + 1}_{j + 1}" for i in range(n) for j in range(i + 1, n)]


# -- commands ------------------------------------------------------------------

def _cmd_orient(cfg):
    data, _ = read_csv(cfg.input_path)
    if cfg.from_panel:
        V, lam = decompose_panel(Panel(data), center=cfg.center).system
    else:
        V = data
        if cfg.eigenvalues_path:
            lam = read_csv(cfg.eigenvalues_path)[0]
            if lam.ndim == 2 and lam.shape[0] == lam.shape[1] and lam.shape[0] > 1:
                lam = np.diag(lam)
            lam = lam.ravel()
        else:
            # columns taken as already ordered
            lam = np.arange(V.shape[0], 0, -1, dtype=float)
    oe = orient_eigenvectors(V, lam, ortho_tol=cfg.ortho_tol, reorthonormalize=cfg.reorthonormalize)
    _emit(cfg, {
        "n": int(oe.n),
        "signs": _num(oe.signs),
        "theta": _angles_out(oe.theta, cfg.angle_unit),
        "theta_unit": cfg.angle_unit,
        "sort_indices": _num(oe.sort_indices),
        "Vor": _num(oe.Vor),
        "eigenvalues": _num(oe.Eor),
    })


def _cmd_generate(cfg):
    if cfg.input_path.endswith(".json"):
        with open(cfg.input_path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as err:
                raise ParseError(f"{cfg.input_path}: {err}") from err
        if "theta" not in doc:
            raise ParseError(f"{cfg.input_path} has no 'theta' entry")
        theta = _angles_in(doc["theta"], doc.get("theta_unit", cfg.angle_unit))
    else:
        theta = _angles_in(read_csv(cfg.input_path)[0], cfg.angle_unit)
    R = generate_oriented_eigenvectors(theta, cfg.upto)
    _emit(cfg, {"n": int(R.shape[0]), "upto": cfg.upto, "Vor": _num(R)})


def _track(cfg):
    data, header, y = _panel_and_y(cfg)
    starts, panels, ys = [], [], []
    for start, P, yw in sliding_windows(data, y, cfg.window_len, cfg.stride):
        starts.append(start)
        panels.append(Panel(P, header))
        ys.append(yw)
    if not panels:
        raise ParseError("panel is shorter than one window")
    decomps = None
    if cfg.inject_flips is not None:
        rng = np.random.default_rng(cfg.inject_flips)
        decomps = [inject_flips(decompose_panel(p, center=cfg.center), random_flip_mask(data.shape[1], rng))
                   for p in panels]
    return rolling_track(panels, ys, cfg.q, center=cfg.center, orient=cfg.orient,
                         timestamps=starts, decompositions=decomps, ortho_tol=cfg.ortho_tol)


def _cmd_track(cfg):
    rec = _track(cfg)
    n = rec.entries[0].oriented.n
    q = rec.entries[0].model.q
    windows = [{
        "k": e.k,
        "start": int(e.timestamp),
        "signs": _num(e.oriented.signs),
        "theta": _angles_out(e.oriented.theta, cfg.angle_unit),
        "beta": _num(e.beta_hat),
        "eigenvalues": _num(e.oriented.Eor),
    } for e in rec.entries]
    _emit(cfg, {"n": n, "q": q, "theta_unit": cfg.angle_unit, "oriented": cfg.orient, "windows": windows})
    if cfg.series_dir:
        os.makedirs(cfg.series_dir, exist_ok=True)
        k = np.arange(len(rec))[:, None]
        iu = np.triu_indices(n, 1)
        thetas = rec.thetas[:, iu[0], iu[1]]
        if cfg.angle_unit == "deg":
            thetas = np.degrees(thetas)
        write_csv(os.path.join(cfg.series_dir, "beta.csv"), np.hstack([k, rec.betas]),
                  ["window"] + [f"beta{j + 1}" for j in range(q)])
        write_csv(os.path.join(cfg.series_dir, "theta.csv"), np.hstack([k, thetas]),
                  ["window"] + _upper_labels(n))
        write_csv(os.path.join(cfg.series_dir, "signs.csv"), np.hstack([k, rec.signs]),
                  ["window"] + [f"s{j + 1}" for j in range(n)])


def _cmd_dispersion(cfg):
    with open(cfg.input_path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ParseError(f"{cfg.input_path}: {err}") from err
    try:
        unit = doc.get("theta_unit", cfg.angle_unit)
        thetas = [_angles_in(w["theta"], unit) for w in doc["windows"]]
        eig = [w.get("eigenvalues") for w in doc["windows"]]
    except (KeyError, TypeError) as err:
        raise ParseError(f"{cfg.input_path}: expected a track document with windows") from err
    ens = BasisEnsemble.from_thetas(thetas, None if any(e is None for e in eig) else eig)
    rep = dispersion(ens, refine=cfg.refine)
    mean = mean_eigenbasis(ens)
    _emit(cfg, {
        "n": ens.n,
        "count": len(ens),
        "r_bar": _num(rep.r_bar),
        "circular_variance": _num(rep.circular_variance),
        "kappa_basis": _num(rep.kappa_basis),
        "kappa_capped": [bool(c) for c in rep.capped],
        "lambda_bar": _num(mean.lambda_bar),
        "theta_bar": _angles_out(mean.theta_bar, cfg.angle_unit),
        "theta_unit": cfg.angle_unit,
        "V_bar": _num(mean.V_bar),
    })
    if cfg.series_dir:
        os.makedirs(cfg.series_dir, exist_ok=True)
        write_csv(os.path.join(cfg.series_dir, "kappa.csv"),
                  np.column_stack([np.arange(1, ens.n + 1), rep.r_bar, rep.circular_variance, rep.kappa_basis]),
                  ["subspace", "r_bar", "circular_variance", "kappa"])


def _cmd_regress(cfg):
    data, header, y = _panel_and_y(cfg)
    model, oe, _ = regress(Panel(data, header), y, cfg.q, center=cfg.center, orient=cfg.orient,
                           ortho_tol=cfg.ortho_tol)
    out = {
        "n": int(oe.n),
        "q": model.q,
        "beta": _num(model.beta_hat),
        "signs": _num(oe.signs),
        "theta": _angles_out(oe.theta, cfg.angle_unit),
        "theta_unit": cfg.angle_unit,
        "eigenvalues": _num(oe.Eor),
        "sort_indices": _num(oe.sort_indices),
        "residual_rms": _num(model.residual_rms),
        "column_means": _num(model.column_means),
        "Vor": _num(oe.Vor),
    }
    if cfg.predict_path:
        P_out, _ = read_csv(cfg.predict_path)
        out["predictions"] = _num(predict(P_out, model))
    _emit(cfg, out)


def _parse_floats(text, name):
    try:
        return np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as err:
        raise ParseError(f"--{name}: expected comma-separated numbers") from err


def _cmd_synth(cfg):
    s = cfg.synth
    axes = _parse_floats(s["axes"], "axes")
    n = axes.shape[0]
    theta = np.zeros((n, n))
    if s.get("theta"):
        vals = _angles_in(_parse_floats(s["theta"], "theta"), cfg.angle_unit)
        if vals.shape[0] != n * (n - 1) // 2:
            raise ParseError(f"--theta needs {n * (n - 1) // 2} angles for n={n}")
        theta[np.triu_indices(n, 1)] = vals
    spec = EllipsoidSpec(axes, theta, s["m"], s.get("noise", 0.0), cfg.seed)
    P = ellipsoid_cloud(spec, center=cfg.center).data
    header = [f"p{j + 1}" for j in range(n)]
    if s.get("beta"):
        beta = _parse_floats(s["beta"], "beta")
        if beta.shape[0] != n:
            raise ParseError("--beta needs one weight per dimension")
        rng = np.random.default_rng(None if cfg.seed is None else cfg.seed + 1)
        y = P @ generate_oriented_eigenvectors(theta) @ beta + s.get("y_noise", 0.0) * rng.standard_normal(len(P))
        P = np.column_stack([P, y])
        header.append("y")
    if cfg.output_path:
        write_csv(cfg.output_path, P, header)
    else:
        write_csv(sys.stdout, P, header)


_DISPATCH = {
    "orient": _cmd_orient,
    "generate": _cmd_generate,
    "track": _cmd_track,
    "dispersion": _cmd_dispersion,
    "regress": _cmd_regress,
    "synth": _cmd_synth,
}


def _error(kind, err, code=2):
    payload = {"error": kind, "type": type(err).__name__, "message": str(err)}
    if getattr(err, "window", None) is not None:
        payload["window"] = err.window
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def run(config):
    """Execute one command; returns the process exit code."""
    try:
        _DISPATCH[config.command](config)
    except ParseError as err:
        return _error("ParseError", err)
    except (EigenOrientError, ValueError) as err:
        return _error("ValidationError", err)
    except OSError as err:
        return _error("IOError", err)
    return 0


# -- argument parsing ------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="eigenorient", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inp=True):
        if inp:
            p.add_argument("input", help="input file")
        p.add_argument("-o", "--output", help="output file (default stdout)")
        p.add_argument("--angle-unit", choices=("deg", "rad"), default="deg")
        p.add_argument("--ortho-tol", type=float, default=1e-8)
        p.add_argument("--seed", type=int)
        p.add_argument("--center", dest="center", action="store_true", default=True)
        p.add_argument("--no-center", dest="center", action="store_false")

    def response(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--y-column", help="name of the response column in the panel header")
        g.add_argument("--y", dest="y_path", help="CSV file with the response vector")
        p.add_argument("--q", type=int, help="retained dimension (default n)")
        p.add_argument("--no-orient", dest="orient", action="store_false",
                       help="skip orientation (baseline)")

    p = sub.add_parser("orient", help="orient an eigenvector matrix")
    common(p)
    p.add_argument("--eigenvalues", help="CSV eigenvalue vector")
    p.add_argument("--from-panel", action="store_true", help="input is a data panel, decompose it first")
    p.add_argument("--reorthonormalize", action="store_true")

    p = sub.add_parser("generate", help="rebuild Vor (or R_k) from an angle matrix")
    common(p)
    p.add_argument("--upto", type=int, help="1-based subspace index: return R_k only")

    p = sub.add_parser("track", help="rolling decompose/orient/fit over windows of a panel")
    common(p)
    response(p)
    p.add_argument("--window-len", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--series-dir", help="directory for beta.csv, theta.csv, signs.csv")
    p.add_argument("--inject-flips", type=int, metavar="SEED",
                   help="randomly flip eigenvector signs per window (testing)")

    p = sub.add_parser("dispersion", help="directional statistics of a track document")
    common(p)
    p.add_argument("--refine", action="store_true", help="refine kappa to the MLE")
    p.add_argument("--series-dir", help="directory for kappa.csv")

    p = sub.add_parser("regress", help="oriented principal-component regression on one panel")
    common(p)
    response(p)
    p.add_argument("--predict", dest="predict_path", help="out-of-sample panel CSV")

    p = sub.add_parser("synth", help="write a synthetic ellipsoid panel")
    common(p, inp=False)
    p.add_argument("--axes", required=True, help="descending axis lengths, e.g. 3,2,1")
    p.add_argument("--theta", help="upper-triangle angles, row-major")
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--beta", help="weights: append y = P G(theta) beta + noise")
    p.add_argument("--y-noise", type=float, default=0.0)
    return parser


def config_from_args(ns):
    get = lambda name, default=None: getattr(ns, name, default)
    synth = {}
    if ns.command == "synth":
        synth = {"axes": ns.axes, "theta": ns.theta, "m": ns.m, "noise": ns.noise,
                 "beta": ns.beta, "y_noise": ns.y_noise}
    return RunConfig(
        command=ns.command,
        input_path=get("input"),
        output_path=ns.output,
        eigenvalues_path=get("eigenvalues"),
        from_panel=get("from_panel", False),
        y_path=get("y_path"),
        y_column=get("y_column"),
        window_len=get("window_len"),
        stride=get("stride"),
        q=get("q"),
        angle_unit=ns.angle_unit,
        center=ns.center,
        seed=ns.seed,
        ortho_tol=ns.ortho_tol,
        reorthonormalize=get("reorthonormalize", False),
        series_dir=get("series_dir"),
        orient=get("orient", True),
        inject_flips=get("inject_flips"),
        refine=get("refine", False),
        predict_path=get("predict_path"),
        upto=get("upto"),
        synth=synth,
    )


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as err:
        return _error("ValidationError", err)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
