#!/usr/bin/env python3
"""Regenerates src/unicode_data.cpp from the Python unicodedata tables.

Run from the repository root:  python3 tools/gen_unicode_data.py
"""
import sys
import unicodedata

try:
    import regex  # for the Extended_Pictographic property
except ImportError:
    regex = None

MAX_CP = 0x110000
HANGUL_S_BASE, HANGUL_S_COUNT = 0xAC00, 11172

LATIN_CASE_BLOCKS = [
    (0x0041, 0x005A), (0x00C0, 0x00DE), (0x0100, 0x024F),
    (0x1E00, 0x1EFF), (0x2C60, 0x2C7F), (0xA720, 0xA7FF),
]


def intervals(pred):
    out = []
    start = None
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            ok = False
        else:
            ok = pred(cp)
        if ok and start is None:
            start = cp
        elif not ok and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def main():
    ccc = []
    decomp = []
    comp = []
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        c = unicodedata.combining(ch)
        if c:
            ccc.append((cp, c))
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue  # algorithmic
        d = unicodedata.decomposition(ch)
        if not d or d.startswith("<"):
            continue
        parts = [int(p, 16) for p in d.split()]
        if len(parts) == 1:
            decomp.append((cp, parts[0], 0))
        elif len(parts) == 2:
            decomp.append((cp, parts[0], parts[1]))
            # A pair recomposes unless the codepoint is composition-excluded.
            if unicodedata.normalize("NFC", unicodedata.normalize("NFD", ch)) == ch:
                comp.append((parts[0], parts[1], cp))
        else:
            raise RuntimeError(f"unexpected decomposition arity for U+{cp:04X}")
    comp.sort()

    letters = intervals(lambda cp: unicodedata.category(chr(cp)).startswith("L"))
    digits = intervals(lambda cp: unicodedata.category(chr(cp)) == "Nd")
    spaces = intervals(lambda cp: chr(cp).isspace())
    if regex is not None:
        ep = regex.compile(r"\p{Extended_Pictographic}")
        picto = intervals(lambda cp: bool(ep.match(chr(cp))))
    else:
        print("warning: python 'regex' module missing; pictographic table empty",
              file=sys.stderr)
        picto = []

    lower = []
    for lo, hi in LATIN_CASE_BLOCKS:
        for cp in range(lo, hi + 1):
            l = chr(cp).lower()
            if len(l) == 1 and ord(l) != cp:
                lower.append((cp, ord(l)))

    with open("src/unicode_data.cpp", "w") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_data.py from Python unicodedata "
          f"(Unicode {unicodedata.unidata_version}). Do not edit.\n")
        w('#include "csteval/unicode_data.hpp"\n\n')
        w("namespace csteval::uni {\n\n")

        w(f"const CombiningClassEntry kCombiningClasses[{len(ccc)}] = {{\n")
        for cp, c in ccc:
            w(f"  {{0x{cp:04X}, {c}}},\n")
        w("};\n")
        w(f"const std::size_t kCombiningClassCount = {len(ccc)};\n\n")

        w(f"const DecompositionEntry kDecompositions[{len(decomp)}] = {{\n")
        for cp, a, b in decomp:
            w(f"  {{0x{cp:04X}, 0x{a:04X}, 0x{b:04X}}},\n")
        w("};\n")
        w(f"const std::size_t kDecompositionCount = {len(decomp)};\n\n")

        w(f"const CompositionEntry kCompositions[{len(comp)}] = {{\n")
        for a, b, cp in comp:
            w(f"  {{0x{a:04X}, 0x{b:04X}, 0x{cp:04X}}},\n")
        w("};\n")
        w(f"const std::size_t kCompositionCount = {len(comp)};\n\n")

        def dump_intervals(name, rows):
            w(f"const CodepointRange k{name}[{len(rows)}] = {{\n")
            for lo, hi in rows:
                w(f"  {{0x{lo:04X}, 0x{hi:04X}}},\n")
            w("};\n")
            w(f"const std::size_t k{name}Count = {len(rows)};\n\n")

        dump_intervals("Letters", letters)
        dump_intervals("DecimalDigits", digits)
        dump_intervals("Whitespace", spaces)
        dump_intervals("Pictographic", picto)

        w(f"const CaseFoldEntry kLatinLowercase[{len(lower)}] = {{\n")
        for cp, l in lower:
            w(f"  {{0x{cp:04X}, 0x{l:04X}}},\n")
        w("};\n")
        w(f"const std::size_t kLatinLowercaseCount = {len(lower)};\n\n")

        w("}  // namespace csteval::uni\n")

    print(f"ccc={len(ccc)} decomp={len(decomp)} comp={len(comp)} "
          f"letters={len(letters)} digits={len(digits)} spaces={len(spaces)} "
          f"picto={len(picto)} lower={len(lower)}")


if __name__ == "__main__":
    main()
