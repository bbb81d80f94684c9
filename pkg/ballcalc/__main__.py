#!/usr/bin/env python3
# -*- coding:utf-8 -*-

"""python -m ballcalc"""

from ballcalc.main import main


if __name__ == "__main__":
    main()
