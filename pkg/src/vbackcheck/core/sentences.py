"""Deterministic sentence splitting for generated responses."""

_PROTECTED = {"e.g.", "i.e.", "etc."}
_TERMINATORS = ".!?"


def _protected(text: str, i: int) -> bool:
    # The word ending at position i (inclusive) is a known abbreviation.
    j = i
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    return text[j : i + 1].lower() in _PROTECTED


def split_sentences(response: str) -> list[str]:
    """Split on '.', '!', '?' followed by whitespace or end of input.

    Decimal points never qualify (they are not followed by whitespace);
    common abbreviations are protected explicitly. Joining the returned
    units with single spaces preserves every non-whitespace character.
    """
    units: list[str] = []
    start = 0
    n = len(response)
    for i, ch in enumerate(response):
        if ch not in _TERMINATORS:
            continue
        if i + 1 < n and not response[i + 1].isspace():
            continue
        if ch == "." and _protected(response, i):
            continue
        unit = response[start : i + 1].strip()
        if unit:
            units.append(unit)
        start = i + 1
    tail = response[start:].strip()
    if tail:
        units.append(tail)
    return units
