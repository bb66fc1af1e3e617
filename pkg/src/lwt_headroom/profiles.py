"""Named hardware presets and the ``key = value`` profile file format."""

from __future__ import annotations

from dataclasses import replace

from .buffer_model import CpuProfile, NetDevice, NicProfile
from .errors import ConfigurationError, InvalidArgument

CPUS = {
    "x86-64": CpuProfile(64),
}
NICS = {
    "i40e-default": NicProfile("i40e-default", rx_headroom=192, mac_pulled=True),
    "i40e-legacy-rx": NicProfile("i40e-legacy-rx", rx_headroom=None, mac_pulled=True),
}
DEVICES = {
    "ethernet": NetDevice("ethernet", hard_header_len=14, needed_headroom=0),
}

PROFILE_KEYS = ("cpu", "nic", "device", "cache_line", "rx_headroom", "mac_pulled",
                "hard_header", "needed_headroom")


def parse_profile_file(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not value.strip():
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        if key not in PROFILE_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _int(key, value):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise InvalidArgument(f"{key} must be an integer, got {value!r}") from None


def _bool(key, value):
    if isinstance(value, bool):
        return value
    text = str(value).lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"{key} must be a boolean, got {value!r}")


def _lookup(table, kind, name):
    try:
        return table[name]
    except KeyError:
        raise InvalidArgument(
            f"unknown {kind} preset {name!r} (known: {', '.join(sorted(table))})"
        ) from None


def build_profile(settings):
    """Resolve presets and numeric overrides into ``(cpu, nic, device)``.

    ``settings`` maps profile keys to values; missing or ``None`` entries
    fall back to the x86-64 / i40e-default / ethernet presets, and numeric
    keys override whatever preset was picked.
    """
    get = lambda k: settings.get(k)  # noqa: E731
    cpu = _lookup(CPUS, "cpu", get("cpu") or "x86-64")
    nic = _lookup(NICS, "nic", get("nic") or "i40e-default")
    dev = _lookup(DEVICES, "device", get("device") or "ethernet")
    if get("cache_line") is not None:
        cpu = CpuProfile(_int("cache_line", get("cache_line")))
    if get("rx_headroom") is not None:
        rx = get("rx_headroom")
        rx = None if str(rx).lower() in ("cacheline", "cache-line") else _int("rx_headroom", rx)
        nic = NicProfile("custom", rx_headroom=rx, mac_pulled=nic.mac_pulled)
    if get("mac_pulled") is not None:
        nic = replace(nic, mac_pulled=_bool("mac_pulled", get("mac_pulled")))
    if get("hard_header") is not None:
        dev = replace(dev, hard_header_len=_int("hard_header", get("hard_header")))
    if get("needed_headroom") is not None:
        dev = replace(dev, needed_headroom=_int("needed_headroom", get("needed_headroom")))
    return cpu, nic, dev
