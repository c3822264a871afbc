"""Plain-text profile documents: a `key = value` format for piecewise
radial power profiles, with line-precise parse diagnostics."""

import math

from .core import Annulus, MorreyParams, ParameterError, PiecewiseRadialPower

FORMAT_TAG = "morreykit-profile/1"

_SCALAR_KEYS = ("p", "q", "d")


class ProfileParseError(ValueError):
    """Malformed profile document; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _parse_number(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ProfileParseError(f"not a number: {token!r}", line) from None
    if math.isnan(value):
        raise ProfileParseError("NaN is not allowed", line)
    return value


def parse_profile_document(text: str) -> PiecewiseRadialPower:
    """Parse a profile document into a validated profile.

    Recognized lines: blank, full-line comments starting with '#',
    `p = <num>`, `q = <num>`, `d = <int>`, `format = morreykit-profile/1`,
    and repeatable `segment = <r_lo> <r_hi> <coeff>` (r_hi may be inf).
    """
    scalars: dict = {}
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ProfileParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = key.strip(), value.strip()
        if key == "format":
            if value != FORMAT_TAG:
                raise ProfileParseError(f"unsupported format {value!r}", lineno)
        elif key in _SCALAR_KEYS:
            if key in scalars:
                raise ProfileParseError(f"duplicate key {key!r}", lineno)
            scalars[key] = _parse_number(value, lineno)
        elif key == "segment":
            parts = value.split()
            if len(parts) != 3:
                raise ProfileParseError(
                    f"segment needs 'r_lo r_hi coeff', got {value!r}", lineno
                )
            r_lo, r_hi, coeff = (_parse_number(t, lineno) for t in parts)
            segments.append((lineno, r_lo, r_hi, coeff))
        else:
            raise ProfileParseError(f"unknown key {key!r}", lineno)

    for key in _SCALAR_KEYS:
        if key not in scalars:
            raise ProfileParseError(f"missing required key {key!r}")
    if scalars["d"] != int(scalars["d"]):
        raise ProfileParseError(f"d must be an integer, got {scalars['d']}")
    if not segments:
        raise ProfileParseError("document contains no segments")

    try:
        params = MorreyParams(p=scalars["p"], q=scalars["q"], d=int(scalars["d"]))
    except ParameterError as exc:
        raise ProfileParseError(str(exc)) from exc

    built = []
    for lineno, r_lo, r_hi, coeff in segments:
        try:
            built.append((Annulus(r_lo, r_hi), coeff))
        except ParameterError as exc:
            raise ProfileParseError(str(exc), lineno) from exc
    built.sort(key=lambda seg: seg[0].r_lo)
    try:
        return PiecewiseRadialPower(params, tuple(built))
    except ParameterError as exc:
        raise ProfileParseError(str(exc)) from exc


def format_profile_document(profile: PiecewiseRadialPower) -> str:
    """Canonical document for a profile; reparsing yields an equal profile.

    repr() is the shortest representation that round-trips a float exactly.
    """
    params = profile.params
    lines = [
        f"format = {FORMAT_TAG}",
        f"p = {params.p!r}",
        f"q = {params.q!r}",
        f"d = {params.d}",
    ]
    for ann, coeff in profile.segments:
        lines.append(f"segment = {ann.r_lo!r} {ann.r_hi!r} {coeff!r}")
    return "\n".join(lines) + "\n"


def load_profile(path: str) -> PiecewiseRadialPower:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_profile_document(handle.read())


def save_profile(profile: PiecewiseRadialPower, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_profile_document(profile))
