"""
Centralized CLI strings.

All user-facing text of the command line lives here.
"""

# =========================
# General
# =========================
STRINGS = {
    # Program
    "prog_description": "Path-dependent vector potentials, fluxes and phase quantization.",
    "run_help": "Run a scenario config file",
    "preset_help": "Run a named preset scenario",
    "list_help": "List the named presets",
    "config_help": "Path to a JSON scenario config",
    "preset_name_help": "Preset name (see `pathgauge list`)",
    "out_help": "Output directory for CSV files",
    "show_help": "Print the preset config as JSON instead of running it",
    "tol_help": "Quadrature tolerance override",
    "quad_order_help": "Gauss-Legendre order override",
    "seed_help": "Seed for randomized grids",
    "threads_help": "Worker threads for grid evaluation",
    "verbose_help": "Increase log verbosity (-v info, -vv debug)",

    # Run progress
    "scenario_header": "Scenario: {name}",
    "task_header": "[{kind}] {task}",
    "files_written": "Wrote {count} file(s) to {path}",
    "preset_line": "{name:<22} {description}",

    # Errors
    "config_not_found": "Config file not found: {path}",
    "config_unreadable": "Could not parse config {path}: {error}",
    "schema_error": "Config does not match the scenario schema:\n{error}",
    "semantic_error": "Invalid scenario: {error}",
    "unknown_preset": "Unknown preset '{name}'. Available: {available}",
    "unknown_preset_hint": "Did you mean: {suggestions}?",
    "numerical_failure": "Numerical failure in task '{task}': {error}",
    "schema_version_error": "Unsupported schema_version {found} (expected {expected})",
    "unknown_path": "Task '{task}' references unknown path '{path}'",
    "unknown_task_ref": "Task '{task}' references unknown or later task '{ref}'",
    "duplicate_task": "Duplicate task name '{task}'",
}


def t(key: str, **kwargs) -> str:
    """
    Get a formatted CLI string.

    Args:
        key: The string key to retrieve
        **kwargs: Format parameters (e.g., t("config_not_found", path="..."))

    Returns:
        The string, formatted with any kwargs
    """
    text = STRINGS.get(key, f"[MISSING: {key}]")
    if kwargs:
        try:
            return text.format(**kwargs)
        except KeyError as e:
            return f"[FORMAT ERROR: {key} - missing param {e}]"
    return text
