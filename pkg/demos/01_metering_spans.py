"""Metering spans: the three backends and the wraparound correction.

A span is a begin/end bracket around a block of work; its energy is the
difference between two counter snapshots.  This walkthrough uses the two
backends that run anywhere (synthetic and time-power) and shows how the
real powercap backend would be opened.
"""

from voltpick import MeterConfig, correct_wraparound, open_meter
from voltpick.errors import BackendUnavailable

# --- synthetic backend: scripted counters, fully deterministic -------------
# The script lists raw counter values in microjoules; each span consumes
# two reads.  Starting a span at 0 and ending it at 5_000_000 means 5 J.

meter = open_meter(MeterConfig("synthetic", script=[0, 5_000_000, 0, 1_250_000]))
for label in ("first", "second"):
    token = meter.span_begin()
    reading = meter.span_end(token)
    print(f"{label} synthetic span: {reading.joules} J over "
          f"{reading.elapsed_seconds} virtual s ({reading.domain})")

# --- time-power backend: E = P x t ------------------------------------------
# An estimator for hosts without counters: a device assumed to dissipate a
# constant 5 W that works for 10 s consumes 50 J.  Here the span is real,
# so expect a small number.

meter = open_meter(MeterConfig("time-power", assumed_power_watts=5.0))
token = meter.span_begin()
sum(i * i for i in range(200_000))
reading = meter.span_end(token)
print(f"time-power span: {reading.joules:.4f} J = 5 W x "
      f"{reading.elapsed_seconds:.4f} s (backend {reading.backend_id})")

# --- counter wraparound -------------------------------------------------------
# Energy counters are finite registers.  When a span crosses the wrap, the
# corrected delta is (end - start) mod counter_max; one wrap per span is
# assumed, which holds for spans that are short against the counter period.

print("no wrap:  ", correct_wraparound(2, 7, 10))   # -> 5
print("one wrap: ", correct_wraparound(5, 3, 10))   # -> 8
print("identity: ", correct_wraparound(4, 4, 10))   # -> 0

# --- the real thing ------------------------------------------------------------
# On a Linux host with readable powercap counters this opens the package
# domain; elsewhere it raises BackendUnavailable, which the CLI maps to
# exit code 2.

try:
    rapl = open_meter(MeterConfig("rapl-powercap"))
    token = rapl.span_begin()
    sum(i * i for i in range(200_000))
    reading = rapl.span_end(token)
    print(f"rapl span: {reading.joules:.6f} J from the {reading.domain} domain")
except BackendUnavailable as exc:
    print(f"rapl-powercap not available here ({exc}); the two backends above "
          "cover development hosts")
