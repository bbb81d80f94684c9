#!/usr/bin/env python3
# -*- coding:utf-8 -*-

from ballcalc.core import main  # NOQA: F401
from ballcalc.overloads import entry_point


@entry_point()
def ballcalc(**kwargs):
    """Ball-basis calculus on finite measure spaces

    Validate bases and kernels, compute maximal functions and BMO/BLO norms,
    and run the verification experiments over the standard field corpus.
    """


if __name__ == "__main__":
    main()
