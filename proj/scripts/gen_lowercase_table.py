#!/usr/bin/env python3
"""Regenerates core/src/lowercase_table.inc from Python's unicodedata.

Emits the simple (1:1) lowercase mapping as a sorted array of
(codepoint, lowercase) pairs. Full lowercasing expands U+0130 to two
code points; its simple mapping is U+0069, patched in below.
"""
import sys
import unicodedata

SPECIAL = {0x0130: 0x0069}


def mappings():
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if cp in SPECIAL:
            yield cp, SPECIAL[cp]
            continue
        low = chr(cp).lower()
        if len(low) == 1 and low != chr(cp):
            yield cp, ord(low)


def main(out_path):
    pairs = list(mappings())
    with open(out_path, "w") as out:
        out.write("// Generated by scripts/gen_lowercase_table.py "
                  f"(Unicode {unicodedata.unidata_version}). Do not edit.\n")
        out.write(f"static constexpr LowercasePair kLowercaseTable[{len(pairs)}] = {{\n")
        for i in range(0, len(pairs), 4):
            row = ", ".join(f"{{0x{a:05X}, 0x{b:05X}}}" for a, b in pairs[i:i + 4])
            out.write(f"    {row},\n")
        out.write("};\n")
    print(f"wrote {len(pairs)} pairs to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "core/src/lowercase_table.inc")
