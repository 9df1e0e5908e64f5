"""P300 speller accuracy prediction and validation from single-trial SNR."""

from p300snr._core import *  # noqa: F401,F403
from p300snr._core import __version__  # noqa: F401
