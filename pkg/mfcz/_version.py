import datetime as dt

__title__ = "mfcz"
__description__ = (
    "Numerics and experiments for multi-frequency Calderon-Zygmund analysis and "
    "generalized Bochner-Riesz multipliers"
)
__url__ = "https://github.com/mfcz/mfcz"
__version__ = "0.1.0"
__author__ = "mfcz developers"
__maintainer_email__ = "mfcz-dev@users.noreply.github.com"
__license__ = "BSD-3"
__copyright__ = "Copyright {}, mfcz developers".format(dt.date.today().year)
