"""Command-line entry point.

Four commands wire files into the pipeline: ``render`` turns an LNS script
into SVG or PNG, ``validate`` checks a script and its scene, ``inspect``
prints the computed geometry of every point as JSON, and ``from-csv``
converts a timestamped coefficient series into prism-scene LNS files
(splitting a four-pattern recovery series across two prisms when needed).

Exit codes: 0 success, 1 malformed input (parse/eval/schema), 2 I/O failure.
Outputs are written to a temp file and renamed, so failures leave nothing
half-written behind.
"""

import argparse
import csv
import datetime
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .geometry import (
    CoefficientVector,
    TimeAxis,
    coefficients_to_distances,
    distances_to_point,
    prism_offset,
    simplex_frame,
)
from .lns import LnsError, evaluate_source, scene_to_lns
from .render import Camera, emit_svg, project
from .raster import emit_png
from .scene import (
    Marker,
    Scene,
    SideLabels,
    Style,
    build_prism_scene,
    partition_four_pattern_series,
    validate_scene,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IO = 2

DEFAULT_WIDTH = 800
DEFAULT_HEIGHT = 600
DEFAULT_PRISM_LENGTH = 100.0
CSV_SCENE_EDGE = 200.0

# Danger palette: exhaustion, resistance, alarm, absence.
STAGE_COLORS = {3: "#E01B1B", 2: "#E0841B", 1: "#F7F307", 0: "#07F70B"}
PATTERN_COLORS = ("#E01B1B", "#E0841B", "#F7F307", "#07F70B")

# CSV column index -> recovery stage; the fourth coefficient is absence.
_COLUMN_STAGE = {0: 1, 1: 2, 2: 3, 3: 0}


class InputDataError(Exception):
    """Malformed input that is not an I/O failure (exit code 1)."""


@dataclass(frozen=True)
class SampleRow:
    """One CSV observation: object, moment, coefficients, optional stage."""

    object_id: str
    timestamp: float
    coefficients: tuple[float, ...]
    stage: int | None = None


def _write_atomic(path: Path, payload: bytes) -> None:
    tmp = path.with_name(f"{path.name}.{os.getpid()}.tmp")
    try:
        tmp.write_bytes(payload)
        os.replace(tmp, path)
    except OSError:
        tmp.unlink(missing_ok=True)
        raise


def _load_scene(path: Path) -> Scene:
    source = path.read_text(encoding="utf-8")
    try:
        return evaluate_source(source)
    except LnsError as exc:
        raise InputDataError(f"{path}: {exc}") from exc


def _camera_for(scene: Scene, args) -> Camera:
    camera = Camera.from_view(scene.view)
    overrides = {}
    if args.azimuth is not None:
        overrides["azimuth_deg"] = args.azimuth
    if args.elevation is not None:
        overrides["elevation_deg"] = args.elevation
    return replace(camera, **overrides) if overrides else camera


def _pick_format(args, output: Path | None) -> str:
    if args.format:
        return args.format
    if output is not None and output.suffix.lower() in (".svg", ".png"):
        return output.suffix.lower()[1:]
    return "png"


def cmd_render(args) -> int:
    in_path = Path(args.input)
    output = Path(args.output) if args.output else None
    fmt = _pick_format(args, output)
    if output is None:
        output = in_path.with_suffix(f".{fmt}")
    scene = _load_scene(in_path)
    try:
        plan = project(
            scene, _camera_for(scene, args), width=args.width, height=args.height
        )
    except ValueError as exc:
        raise InputDataError(f"{in_path}: {exc}") from exc
    payload = emit_svg(plan).encode("utf-8") if fmt == "svg" else emit_png(plan)
    _write_atomic(output, payload)
    return EXIT_OK


def cmd_validate(args) -> int:
    in_path = Path(args.input)
    scene = _load_scene(in_path)
    diagnostics = validate_scene(scene)
    for diag in diagnostics:
        where = "scene" if diag.index is None else f"item {diag.index}"
        print(f"{where}: [{diag.rule}] {diag.message}")
    return EXIT_INPUT if diagnostics else EXIT_OK


def _round9(value):
    if isinstance(value, float):
        return float(f"{value:.9g}")
    if isinstance(value, list):
        return [_round9(v) for v in value]
    if isinstance(value, dict):
        return {k: _round9(v) for k, v in value.items()}
    return value


def inspect_report(scene: Scene) -> dict:
    """Geometry report for every marker: coefficients, sum, distances,
    Cartesian position, and prism offset."""
    axis = scene.prism_axis
    points = []
    for index, item in enumerate(scene.items):
        if not isinstance(item, Marker):
            continue
        h = coefficients_to_distances(item.coefficients, scene.frame)
        pos = list(distances_to_point(h, scene.frame))
        offset = None
        if axis is not None and item.timestamp is not None:
            offset = prism_offset(item.timestamp, axis)
        if scene.frame.n == 2 and axis is not None:
            pos.append(offset if offset is not None else 0.0)
        points.append(
            {
                "item": index,
                "coefficients": list(item.coefficients.values),
                "coefficient_sum": item.coefficients.total,
                "distances": list(h.values),
                "position": pos,
                "prism_offset": offset,
            }
        )
    report = {
        "frame": {
            "n": scene.frame.n,
            "edge": scene.frame.edge,
            "height": scene.frame.height,
        },
        "time_axis": None
        if axis is None
        else {"t_min": axis.t_min, "t_max": axis.t_max, "length": axis.length},
        "points": points,
    }
    return _round9(report)


def cmd_inspect(args) -> int:
    scene = _load_scene(Path(args.input))
    print(json.dumps(inspect_report(scene), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# CSV conversion

_BASE_HEADER = ["object_id", "timestamp", "a1", "a2", "a3"]
_VALID_HEADERS = [
    _BASE_HEADER,
    _BASE_HEADER + ["a4"],
    _BASE_HEADER + ["stage"],
    _BASE_HEADER + ["a4", "stage"],
]


def _parse_timestamp(text: str) -> float:
    raw = text.strip()
    try:
        return float(raw)
    except ValueError:
        pass
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        moment = datetime.datetime.fromisoformat(raw)
    except ValueError:
        raise InputDataError(f"bad timestamp {text!r} (need a number or ISO-8601)")
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=datetime.timezone.utc)
    return moment.timestamp()


def read_sample_rows(path: Path) -> list[SampleRow]:
    """Load `object_id,timestamp,a1,a2,a3[,a4][,stage]` rows."""
    with open(path, newline="", encoding="utf-8") as handle:
        records = [row for row in csv.reader(handle) if row]
    if not records:
        raise InputDataError(f"{path}: no samples (empty file)")
    header = [cell.strip().lower() for cell in records[0]]
    if header not in _VALID_HEADERS:
        raise InputDataError(
            f"{path}: unexpected header {header}; need object_id,timestamp,"
            "a1,a2,a3[,a4][,stage]"
        )
    arity = 4 if "a4" in header else 3
    has_stage = "stage" in header
    body = records[1:]
    if not body:
        raise InputDataError(f"{path}: no samples")
    rows = []
    for lineno, record in enumerate(body, start=2):
        if len(record) != len(header):
            raise InputDataError(
                f"{path}: row {lineno} has {len(record)} fields, header has "
                f"{len(header)} (arity inconsistency)"
            )
        try:
            coeffs = tuple(float(v) for v in record[2 : 2 + arity])
        except ValueError:
            raise InputDataError(f"{path}: row {lineno}: bad coefficient value")
        stage = None
        if has_stage:
            try:
                stage = int(record[2 + arity])
            except ValueError:
                raise InputDataError(f"{path}: row {lineno}: bad stage label")
            if stage not in (0, 1, 2, 3):
                raise InputDataError(
                    f"{path}: row {lineno}: stage {stage} outside 0..3"
                )
        rows.append(
            SampleRow(
                object_id=record[0].strip(),
                timestamp=_parse_timestamp(record[1]),
                coefficients=coeffs,
                stage=stage,
            )
        )
    return rows


def _dominant_stage(coefficients: Sequence[float]) -> int:
    best = max(coefficients)
    # Ties break toward the more severe stage.
    return max(
        _COLUMN_STAGE[i] for i, v in enumerate(coefficients) if v == best
    )


def _marker_color(row: SampleRow) -> str:
    if row.stage is not None:
        return STAGE_COLORS[row.stage]
    if len(row.coefficients) == 4:
        return STAGE_COLORS[_dominant_stage(row.coefficients)]
    best = max(row.coefficients)
    return PATTERN_COLORS[row.coefficients.index(best)]


def _prism_scene(
    samples: Sequence[tuple[float, tuple[float, ...], str]],
    prism_length: float,
    labels: tuple[str, str, str],
) -> Scene:
    times = [t for t, _c, _col in samples]
    axis = TimeAxis(min(times), max(times), prism_length)
    frame = simplex_frame(2, CSV_SCENE_EDGE)
    try:
        scene = build_prism_scene(
            [
                (t, CoefficientVector(coeffs), Style(color=color))
                for t, coeffs, color in samples
            ],
            axis,
            frame,
        )
    except ValueError as exc:
        raise InputDataError(str(exc)) from exc
    return replace(scene, items=scene.items + (SideLabels(texts=labels),))


def scenes_from_rows(
    rows: Sequence[SampleRow], prism_length: float
) -> list[tuple[str, Scene]]:
    """Prism scenes for a sample series: one for three patterns, up to two
    (suffixed ``_A``/``_B``) for a four-pattern recovery series."""
    arities = {len(row.coefficients) for row in rows}
    if len(arities) != 1:
        raise InputDataError("arity inconsistency: mixed 3- and 4-coefficient rows")
    arity = arities.pop()

    if arity == 3:
        samples = [
            (row.timestamp, row.coefficients, _marker_color(row)) for row in rows
        ]
        return [("", _prism_scene(samples, prism_length, ("1", "2", "3")))]

    if len({row.object_id for row in rows}) > 1:
        raise InputDataError(
            "a four-pattern split needs a single object series per file"
        )
    ordered = sorted(rows, key=lambda row: row.timestamp)
    staged = [
        (
            row,
            row.stage if row.stage is not None else _dominant_stage(row.coefficients),
        )
        for row in ordered
    ]
    try:
        first, second = partition_four_pattern_series(
            [(row.timestamp, stage) for row, stage in staged]
        )
    except ValueError as exc:
        raise InputDataError(str(exc)) from exc

    def pick(row: SampleRow, columns: tuple[int, int, int]):
        return tuple(row.coefficients[c] for c in columns)

    scenes: list[tuple[str, Scene]] = []
    if first:
        samples = [
            (row.timestamp, pick(row, (2, 1, 0)), _marker_color(row))
            for row, _stage in staged[: len(first)]
        ]
        scenes.append(("A", _prism_scene(samples, prism_length, ("3", "2", "1"))))
    if second:
        samples = [
            (row.timestamp, pick(row, (1, 0, 3)), _marker_color(row))
            for row, _stage in staged[len(staged) - len(second) :]
        ]
        scenes.append(("B", _prism_scene(samples, prism_length, ("2", "1", "0"))))
    if len(scenes) == 1:
        return [("", scenes[0][1])]
    return scenes


def cmd_from_csv(args) -> int:
    in_path = Path(args.input)
    rows = read_sample_rows(in_path)
    scenes = scenes_from_rows(rows, args.prism_length)
    base = Path(args.output) if args.output else in_path.with_suffix(".lns")
    for suffix, scn in scenes:
        out = base if not suffix else base.with_name(
            f"{base.stem}_{suffix}{base.suffix or '.lns'}"
        )
        _write_atomic(out, scene_to_lns(scn).encode("utf-8"))
        print(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexfig",
        description="Render and convert barycentric simplex figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input file")
    common.add_argument("-o", "--output", help="output file path")
    common.add_argument("--width", type=int, default=DEFAULT_WIDTH, help="viewport width, px")
    common.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="viewport height, px")
    common.add_argument(
        "--format", choices=("svg", "png"), help="output format (default: from extension)"
    )
    common.add_argument("--azimuth", type=float, help="camera azimuth override, degrees")
    common.add_argument("--elevation", type=float, help="camera elevation override, degrees")
    common.add_argument(
        "--prism-length",
        type=float,
        default=DEFAULT_PRISM_LENGTH,
        help="prism axial length in scene units (from-csv)",
    )

    sub.add_parser("render", parents=[common], help="render an .lns scene to SVG/PNG").set_defaults(func=cmd_render)
    sub.add_parser("validate", parents=[common], help="check an .lns scene").set_defaults(func=cmd_validate)
    sub.add_parser("inspect", parents=[common], help="print computed geometry as JSON").set_defaults(func=cmd_inspect)
    sub.add_parser("from-csv", parents=[common], help="convert a CSV series to .lns").set_defaults(func=cmd_from_csv)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
