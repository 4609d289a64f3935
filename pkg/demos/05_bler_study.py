"""A desk-scale block-error-rate sweep, printed as CSV.

Fifteen seconds of Monte-Carlo on RM(2,6): plain SC against a small
full-group SC ensemble and an SCL list of the same candidate budget.  The
same study at publication scale runs through the command line:

    aedcodes simulate --rm 4,8 --decoder sc --ensemble 32 --subgroup ga \
        --ebn0 1.0:3.0:5 --frames 200000 --target-errors 300 --seed 1
"""

import numpy as np

from aedcodes import (CSV_HEADER, ChannelConfig, EnsembleConfig, Sc, Scl,
                      format_csv_row, rm_code, run_mc)

spec = rm_code(2, 6)
decoders = [
    Sc(),
    Scl(list_size=4),
    EnsembleConfig(size=4, subgroup="ga", constituent=Sc(),
                   resample_per_frame=True, seed=11),
]

print(CSV_HEADER)
for ebn0 in np.linspace(2.0, 3.5, 4):
    for dec in decoders:
        ch = ChannelConfig(float(ebn0), spec.rate, seed=2024)
        rec = run_mc(spec, dec, ch, frames=4000, target_errors=120)
        print(format_csv_row(spec, dec, ch, rec))
