"""
Обробники команд CLI

Кожна команда - async функція run_<command>(config, pool), яка пише свої
файли в config.output_dir і піднімає LabError при провалі.
"""

from telab.handlers.count import run_count
from telab.handlers.dispersion import run_dispersion
from telab.handlers.scan import run_scan
from telab.handlers.verify import run_verify

HANDLERS = {
    "scan": run_scan,
    "count": run_count,
    "verify": run_verify,
    "dispersion": run_dispersion,
}

__all__ = [
    "HANDLERS",
    "run_count",
    "run_dispersion",
    "run_scan",
    "run_verify",
]
