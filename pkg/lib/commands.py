from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .codes import build_code, build_family_code, code_summary, distance_z, yield_param
from .constants import CALIBRATED_ORIENTATION, Orientation
from .distill import basin_grid, depolarizing_threshold, threshold_sweep
from .errors import TriorthoError
from .search import SearchConfig, search, write_catalog
from .selftest import run_selftest
from .triortho import (
    PunctureSet,
    construct_T_m,
    default_punctures,
    is_maximal,
    puncture,
    write_triorthogonal_matrix,
)
from .trits import write_matrix


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, Any]
    version: str = __version__
    elapsed: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def write(self, outdir: Path) -> Path:
        path = outdir / f"{self.command}_manifest.json"
        path.write_text(json.dumps(asdict(self), indent=2) + "\n")
        return path


class _Run:
    """Times a command and records its outputs into a manifest."""

    def __init__(self, command: str, outdir: str | Path, **parameters: Any) -> None:
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command, {k: _jsonable(v) for k, v in parameters.items()})
        self.start = time.perf_counter()

    def add(self, *paths: Path) -> None:
        self.manifest.outputs.extend(str(p) for p in paths)

    def finish(self) -> list[Path]:
        self.manifest.elapsed = round(time.perf_counter() - self.start, 3)
        manifest_path = self.manifest.write(self.outdir)
        print(f"Manifest: {manifest_path}")
        return [Path(p) for p in self.manifest.outputs] + [manifest_path]


def _jsonable(value: Any) -> Any:
    if isinstance(value, (Orientation, PunctureSet)):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_json(path: Path, data: Any) -> Path:
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def cmd_construct(
    m: int, k: int, outdir: str | Path, punctures: Sequence[int] | None = None
) -> list[Path]:
    run = _Run("construct", outdir, m=m, k=k, punctures=list(punctures) if punctures else None)
    space = construct_T_m(m)
    if k < 1:
        raise TriorthoError(f"k must be at least 1, got {k}")
    if k > 3 * m - 2:
        raise TriorthoError(f"k exceeds 3m-2 (k={k}, m={m})")
    chosen = PunctureSet.of(punctures, space.n) if punctures else default_punctures(m, k)
    if chosen.k != k:
        raise TriorthoError(f"{chosen.k} puncture coordinates given for k={k}")
    tm = puncture(space, chosen)
    code = build_code(tm)
    print(f"T_{m}: n={space.n}, kappa={space.kappa}")
    print(f"Punctures: {chosen}")
    print(f"Code: {code}")

    summary = code_summary(code, m)
    summary["maximal"] = str(is_maximal(space).status)
    stem = f"m{m}_k{k}"
    run.add(
        write_matrix(space.basis, run.outdir / f"basis_m{m}.txt"),
        write_triorthogonal_matrix(tm, run.outdir / f"H_{stem}.txt"),
        _write_json(run.outdir / f"code_{stem}.json", summary),
    )
    return run.finish()


def cmd_yield_table(m_max: int, outdir: str | Path) -> list[Path]:
    run = _Run("yield", outdir, m_max=m_max)
    rows = []
    for m in range(1, m_max + 1):
        n, k = 6 * m + 2, 3 * m - 2
        gamma = yield_param(n, k, 2).gamma
        rows.append((m, n, k, f"{gamma:.6f}"))
        print(f"m={m}: [{n},{k},2]_3 gamma={gamma:.3f}")
    run.add(_write_csv(run.outdir / "yield.csv", ("m", "n", "k", "gamma"), rows))
    return run.finish()


def cmd_threshold(
    m: int,
    outdir: str | Path,
    orientation: Orientation = CALIBRATED_ORIENTATION,
    alternating: bool = False,
    m_max: int | None = None,
) -> list[Path]:
    run = _Run(
        "threshold", outdir, m=m, orientation=orientation, alternating=alternating, m_max=m_max
    )
    code = build_family_code(m, 1, with_distances=False)
    result = depolarizing_threshold(code, orientation, alternating=alternating)
    print(f"{code.n}-qutrit code (m={m}, k=1): delta* = {result.delta_star:.4f}")
    data = result.to_json()
    data["code"] = f"[{code.n},1,{distance_z(code)}]_3"
    run.add(_write_json(run.outdir / f"threshold_m{m}.json", data))
    if m_max is not None:
        sweep = threshold_sweep(range(1, m_max + 1), orientation)
        for row_m, n, delta in sweep:
            print(f"m={row_m}: n={n} delta*={delta:.4f}")
        rows = [(row_m, n, f"{delta:.6f}") for row_m, n, delta in sweep]
        run.add(_write_csv(run.outdir / "thresholds.csv", ("m", "n", "delta_star"), rows))
    return run.finish()


def cmd_basin(
    m: int,
    resolution: int,
    outdir: str | Path,
    orientation: Orientation = CALIBRATED_ORIENTATION,
    workers: int = 1,
) -> list[Path]:
    run = _Run(
        "basin", outdir, m=m, resolution=resolution, orientation=orientation, workers=workers
    )
    code = build_family_code(m, 1, with_distances=False)
    points = basin_grid(code, resolution, orientation, workers)
    rows = [
        (f"{p.eps1:.10g}", f"{p.eps2:.10g}", str(p.label), str(p.in_polytope).lower())
        for p in points
    ]
    counts: dict[str, int] = {}
    for p in points:
        counts[str(p.label)] = counts.get(str(p.label), 0) + 1
    print(f"Basin grid for m={m}, resolution {resolution}: {counts}")
    path = run.outdir / f"basin_m{m}_r{resolution}.csv"
    run.add(_write_csv(path, ("eps1", "eps2", "label", "in_polytope"), rows))
    return run.finish()


def cmd_search(
    config: SearchConfig,
    outdir: str | Path,
    checkpoint: str | Path | None = None,
    resume: bool = False,
) -> list[Path]:
    run = _Run(
        "search",
        outdir,
        n=config.n,
        kappa_min=config.kappa_min,
        mode=str(config.mode),
        budget=config.budget,
        seed=config.seed,
        workers=config.workers,
    )
    report = search(config, checkpoint, resume)
    print(report)
    for i, found in enumerate(report.spaces):
        print(f"  space_{i:03d}: kappa={found.kappa} {found.maximality} ({found.triviality})")
    run.add(*write_catalog(report, run.outdir / f"catalog_n{config.n}"))
    return run.finish()


def cmd_selftest(
    orientation: Orientation = CALIBRATED_ORIENTATION, basis: Path | None = None
) -> bool:
    results = run_selftest(orientation, basis)
    for result in results:
        print(result)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} suites passed")
    return passed == len(results)
