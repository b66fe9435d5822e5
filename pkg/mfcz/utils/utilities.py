"""
Helpful utility functions for mfcz
"""
import logging

import numpy as np
from prettytable import PrettyTable

logger = logging.getLogger(__name__)


def make_table(df, title=None, float_format="{:.6g}"):
    """Convert a DataFrame to a PrettyTable."""
    table = PrettyTable(title=title)
    table.field_names = [str(x) for x in df.columns]
    for row in df.itertuples(index=False):
        table.add_row(
            [float_format.format(x) if isinstance(x, (float, np.floating)) else x for x in row]
        )
    return table


def display_table(df, title=None):
    """Print a DataFrame as a text table."""
    print(make_table(df, title=title))
