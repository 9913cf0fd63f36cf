#!/usr/bin/env python3
"""Regenerates core/src/filter_tables.inc from the PyWavelets coefficient tables.

Usage: python3 tools/scripts/gen_filter_tables.py > core/src/filter_tables.inc

Taps are the reconstruction lowpass filters (h_0 = 0.4829... for D4), printed
with 17 significant digits so every constant round-trips exactly to double.
"""
import pywt

FAMILIES = (("kDaubechies", "db", range(1, 11)), ("kCoiflet", "coif", range(1, 6)))


def main():
    print("// Generated by tools/scripts/gen_filter_tables.py from PyWavelets %s." % pywt.__version__)
    print("// Do not edit by hand.")
    for table, prefix, orders in FAMILIES:
        for order in orders:
            taps = pywt.Wavelet("%s%d" % (prefix, order)).rec_lo
            print("constexpr double %s%d[] = {" % (table, order))
            for t in taps:
                print("    %s," % format(t, ".17g"))
            print("};")


if __name__ == "__main__":
    main()
