#!/usr/bin/env python3
"""Regenerate src/unicode_punct_table.inc from the running Python's unicodedata."""
import sys
import unicodedata

ranges = []
start = prev = None
for cp in range(sys.maxunicode + 1):
    if unicodedata.category(chr(cp)).startswith("P"):
        if start is None:
            start = prev = cp
        elif cp == prev + 1:
            prev = cp
        else:
            ranges.append((start, prev))
            start = prev = cp
if start is not None:
    ranges.append((start, prev))

print(f"// Generated by tools/gen_punct_table.py (Unicode {unicodedata.unidata_version}). Do not edit.")
print("// Closed code point ranges of general category P*, sorted ascending.")
for lo, hi in ranges:
    print(f"{{0x{lo:04X}, 0x{hi:04X}}},")
