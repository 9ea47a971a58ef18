"""Batch front-end: JSON config in, CSV/JSON results out.

Subcommands: bands, split, admissible, random-spectrum, chern, selftest.
Every output embeds the fully resolved configuration for provenance, floats
are serialized in round-trip-exact form, and identical config + seed
produces byte-identical files.  Exit codes: 1 for validation problems, 2 for
numerical convergence failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import chern as chern_mod
from . import fiber_bands, random_field, specfun, splitting
from .errors import ConvergenceError, GapViolationError, NotAdmissibleError
from .profiles import PeriodicProfile

DEFAULTS = {
    "B": 1.0,
    "J": 2,
    "lambda": 0.0,
    "eta": 0.5,
    "L": 12.0,
    "h": 0.25,
    "seed": 0,
    "profile": "cosine",
    "basis_size": None,
    "k_samples": 256,
    "j": 1,
    "B_max": None,
    "n_realizations": 1,
    "count": None,
    "energy": None,
    "gap_index": 1,
    "window_half": None,
    "trials": 10000,
    "threads": 1,
}


def _load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(user, dict):
            raise ValueError(f"{path}:1:1: config must be a JSON object")
        unknown = set(user) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    return cfg


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    for flag, key in [
        ("B", "B"), ("J", "J"), ("lam", "lambda"), ("eta", "eta"),
        ("L", "L"), ("h", "h"), ("seed", "seed"), ("threads", "threads"),
        ("j", "j"), ("B_max", "B_max"), ("k_samples", "k_samples"),
        ("n_realizations", "n_realizations"), ("energy", "energy"),
        ("gap_index", "gap_index"), ("count", "count"), ("trials", "trials"),
        ("window_half", "window_half"), ("basis_size", "basis_size"),
    ]:
        val = getattr(args, flag, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _profile_from_config(cfg: dict) -> PeriodicProfile:
    spec = cfg["profile"]
    if spec == "cosine":
        return PeriodicProfile.cosine()
    if spec == "constant":
        return PeriodicProfile.constant()
    if isinstance(spec, dict):
        return PeriodicProfile.from_dict(spec)
    if isinstance(spec, list):
        return PeriodicProfile.from_coefficients(
            [(int(l), complex(re, im)) for l, re, im in spec]
        )
    raise ValueError(f"unrecognized profile specification: {spec!r}")


def _lambda_grid(cfg: dict) -> list[float]:
    lam = cfg["lambda"]
    if isinstance(lam, (int, float)):
        return [float(lam)]
    return [float(x) for x in lam]


def _resolved(cfg: dict, profile: PeriodicProfile) -> dict:
    out = dict(cfg)
    out["profile"] = profile.to_dict()
    return out


def _fmt(x) -> str:
    return repr(float(x))


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out is None:
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _write_csv(header: list[str], rows, config_line: dict, out: str | None) -> None:
    lines = ["# config: " + json.dumps(config_line, sort_keys=True), ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _default_count(cfg: dict) -> int:
    dim = int(round(cfg["L"] / cfg["h"])) ** 2
    est = int(cfg["J"] * cfg["B"] * cfg["L"] ** 2 / (2 * np.pi) * 1.7) + 40
    return min(est, dim - 2)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_bands(cfg: dict, out: str | None) -> int:
    profile = _profile_from_config(cfg)
    lam = _lambda_grid(cfg)[0]
    table = fiber_bands.band_table(
        int(cfg["J"]), lam, float(cfg["B"]), profile,
        k_samples=int(cfg["k_samples"]),
        basis_size=cfg["basis_size"],
    )
    _write_csv(["k", "j", "E"], table.rows(), _resolved(cfg, profile), out)
    return 0


def _cmd_split(cfg: dict, out: str | None) -> int:
    profile = _profile_from_config(cfg)
    grid = _lambda_grid(cfg)
    if grid == [0.0]:
        grid = [1e-3, 3e-3, 1e-2]
    est = splitting.estimate_splitting(
        int(cfg["j"]), float(cfg["B"]), profile, grid, k_samples=int(cfg["k_samples"])
    )
    _write_json({"config": _resolved(cfg, profile), "result": est.to_dict()}, out)
    return 0


def _cmd_admissible(cfg: dict, out: str | None) -> int:
    profile = _profile_from_config(cfg)
    report = splitting.admissibility_report(
        int(cfg["J"]), float(cfg["B"]), profile,
        B_max=cfg["B_max"], k_samples=int(cfg["k_samples"]),
    )
    _write_json({"config": _resolved(cfg, profile), "result": report.to_dict()}, out)
    return 0


def _cmd_random_spectrum(cfg: dict, out: str | None) -> int:
    profile = _profile_from_config(cfg)
    B, L, h = float(cfg["B"]), float(cfg["L"]), float(cfg["h"])
    lam, eta, J = _lambda_grid(cfg)[0], float(cfg["eta"]), int(cfg["J"])
    count = int(cfg["count"]) if cfg["count"] is not None else _default_count(cfg)
    prefix = out if out is not None else "spectrum"

    clean = random_field.discretize(L, h, B)
    clean_spec = random_field.spectrum_2d(clean, count)
    reference = random_field.check_spectral_location(
        clean_spec.values, B, 0.0, J, eigvecs=clean_spec.vectors, ham=clean
    )

    def run(r: int):
        seed_r = random_field.derive_seed(int(cfg["seed"]), r)
        couplings = random_field.sample_couplings(L, eta, seed_r)
        ham = random_field.discretize(L, h, B, lam, couplings, profile)
        spec = random_field.spectrum_2d(ham, count)
        report = random_field.check_spectral_location(
            spec.values, B, lam, J,
            reference=reference, eigvecs=spec.vectors, ham=ham,
        )
        return seed_r, spec, report

    results = _pmap(run, list(range(int(cfg["n_realizations"]))), int(cfg["threads"]))

    resolved = _resolved(cfg, profile)
    reports = []
    for r, (seed_r, spec, report) in enumerate(results):
        manifest = {
            "B": B, "lambda": lam, "eta": eta, "L": L, "h": h,
            "seed": seed_r, "profile": resolved["profile"],
        }
        _write_csv(
            ["index", "eigenvalue"],
            [(i, float(e)) for i, e in enumerate(spec.values)],
            manifest,
            f"{prefix}_r{r:03d}.csv",
        )
        reports.append({"realization": r, "seed": seed_r, "report": report.to_dict()})
    _write_json(
        {
            "config": resolved,
            "reference": reference.to_dict(),
            "realizations": reports,
        },
        f"{prefix}_clusters.json",
    )
    return 0


def _cmd_chern(cfg: dict, out: str | None) -> int:
    profile = _profile_from_config(cfg)
    B, L, h = float(cfg["B"]), float(cfg["L"]), float(cfg["h"])
    lam, eta = _lambda_grid(cfg)[0], float(cfg["eta"])
    count = int(cfg["count"]) if cfg["count"] is not None else _default_count(cfg)
    if lam > 0:
        couplings = random_field.sample_couplings(L, eta, int(cfg["seed"]))
        ham = random_field.discretize(L, h, B, lam, couplings, profile)
    else:
        ham = random_field.discretize(L, h, B)
    spec = random_field.spectrum_2d(ham, count)
    energy = float(cfg["energy"]) if cfg["energy"] is not None else 2.0 * int(cfg["gap_index"]) * B
    proj = chern_mod.fermi_projection(spec, energy)
    window = cfg["window_half"]
    result = chern_mod.hall_conductance(
        proj, chern_mod.half_plane_switches(ham), ham,
        float(window) if window is not None else None,
    )
    payload = {
        "config": _resolved(cfg, profile),
        "result": {
            "B": B, "lambda": lam, "eta": eta, "seed": int(cfg["seed"]),
            "E": energy, "sigma_hall": result.sigma,
            "imag_residual": result.imag_residual,
            "window": result.window_half,
        },
    }
    _write_json(payload, out)
    return 0


def _cmd_selftest(cfg: dict, out: str | None) -> int:
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, bool(ok), detail))

    B2 = 2 * np.pi**2
    worst = 0.0
    for j in range(1, 5):
        for s in (1.0, 2 * np.pi):
            for B in (1.0, B2):
                closed = specfun.oscillator_integral_closed(j, s, B)
                quad = specfun.oscillator_integral_quadrature(j, s, B)
                worst = max(worst, abs(closed - quad) / max(abs(closed), 1e-300))
    check("oscillator integral closed vs quadrature", worst < 1e-8, f"max rel err {worst:.2e}")

    prof = PeriodicProfile.cosine()
    table = fiber_bands.band_table(3, 0.0, 1.0, prof, k_samples=64)
    dev = float(np.max(np.abs(table.values - (2 * np.arange(1, 4) - 1.0))))
    check("unperturbed bands at Landau levels", dev < 1e-8, f"max dev {dev:.2e}")

    const = PeriodicProfile.constant()
    tab_c = fiber_bands.band_table(2, 0.5, 1.0, const, k_samples=128)
    width = max(
        tab_c.band_interval(j)[1] - tab_c.band_interval(j)[0] for j in (1, 2)
    )
    check("constant profile null splitting", width < 1e-8, f"max width {width:.2e}")

    bump = random_field.default_bump()
    tt = np.linspace(-3, 3, 10001)
    pou = sum(bump.value(tt - m) for m in range(-4, 5))
    err = float(np.max(np.abs(pou - 1.0)))
    check("bump partition of unity", err < 1e-12, f"max err {err:.2e}")

    ones = random_field.CouplingField(
        values=np.ones((13, 13)), half=6, eta=1.0, seed=None
    )
    h_rand = random_field.discretize(12, 0.25, 1.0, 0.3, ones, prof)
    h_per = random_field.discretize_periodic(12, 0.25, 1.0, 0.3, prof)
    hdiff = (h_rand.matrix - h_per.matrix).toarray() if h_rand.n <= 64 else None
    hmax = float(np.max(np.abs(hdiff)))
    check("omega=1 reproduces periodic operator", hmax < 1e-12, f"max entry diff {hmax:.2e}")

    draws = random_field.inverse_coupling_cdf(
        np.random.default_rng(1).random(10000), 0.1
    )
    grid = np.sort(draws)
    emp = np.arange(1, len(grid) + 1) / len(grid)
    ks = float(np.max(np.abs(emp - random_field.coupling_cdf(grid, 0.1))))
    check("coupling sampler matches analytic CDF", ks < 0.02, f"KS {ks:.3f}")

    ham = random_field.discretize(12, 0.25, 1.0)
    spec = random_field.spectrum_2d(ham, 60)
    proj = chern_mod.fermi_projection(spec, 2.0)
    res = chern_mod.hall_conductance(proj, chern_mod.half_plane_switches(ham), ham)
    check(
        "clean Hall conductance first gap",
        abs(res.sigma - 1.0) < 0.15,
        f"sigma {res.sigma:.4f}",
    )

    passed = sum(1 for _, ok, _ in checks if ok)
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    print(f"{passed} passed, {len(checks) - passed} failed")
    return 0 if passed == len(checks) else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landausplit",
        description="Spectral bands, splitting criterion, disorder spectra and "
        "Hall conductance for the perturbed Landau Hamiltonian.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "bands": "band functions E_j(k) as CSV (columns k, j, E)",
        "split": "splitting-amplitude estimate as JSON",
        "admissible": "admissibility report with excluded fields as JSON",
        "random-spectrum": "disorder realization spectra (CSV) and cluster report (JSON)",
        "chern": "Hall conductance report as JSON",
        "selftest": "run the oracle-equivalence battery and report pass/fail",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON configuration file")
        p.add_argument("--out", default=None, help="output path (or prefix for random-spectrum)")
        p.add_argument("--B", type=float, default=None)
        p.add_argument("--J", type=int, default=None)
        p.add_argument("--j", type=int, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--L", type=float, default=None)
        p.add_argument("--h", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--B-max", dest="B_max", type=float, default=None)
        p.add_argument("--k-samples", dest="k_samples", type=int, default=None)
        p.add_argument("--basis-size", dest="basis_size", type=int, default=None)
        p.add_argument("--n-realizations", dest="n_realizations", type=int, default=None)
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--energy", type=float, default=None)
        p.add_argument("--gap-index", dest="gap_index", type=int, default=None)
        p.add_argument("--window-half", dest="window_half", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
    return parser


_DISPATCH = {
    "bands": _cmd_bands,
    "split": _cmd_split,
    "admissible": _cmd_admissible,
    "random-spectrum": _cmd_random_spectrum,
    "chern": _cmd_chern,
    "selftest": _cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(_load_config(args.config), args)
        return _DISPATCH[args.command](cfg, args.out)
    except ConvergenceError as exc:
        print(f"error: convergence failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, NotAdmissibleError, GapViolationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
