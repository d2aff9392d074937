from pathlib import Path
from dataclass_binder import Binder
from loguru import logger
from models import AppConfig

BUNDLED_CONFIG = Path(__file__).with_name('default_config.toml')

def resolve_config_path(path: str | Path | None) -> Path:
    """The requested file if it exists, otherwise the bundled defaults."""
    if path is not None and Path(path).exists():
        return Path(path)
    return BUNDLED_CONFIG

def load_app_config(path: str | Path | None = "config.toml", /) -> AppConfig:
    """
    Bind numerics, render and logging sections of a TOML file onto AppConfig.

    Keys are kebab-case (jacobi-sample, mp-dps, point-radius); dataclass-binder maps
    them onto the snake_case fields and rejects unknown ones. A missing file falls
    back to default_config.toml next to this module. Sections left out of the file
    keep their dataclass defaults.

    Raises:
        FileNotFoundError: neither the file nor the bundled defaults exist
        RuntimeError: the TOML does not parse or a section fails validation
    """
    source = resolve_config_path(path)
    if not source.is_file():
        raise FileNotFoundError(f"Config file not found: {source.resolve()}")

    try:
        return Binder[AppConfig].parse_toml(source)
    except Exception as e:
        raise RuntimeError(f"Failed to load config {source.name}: {type(e).__name__}: {e}") from e


if __name__ == "__main__":
    try:
        cfg = load_app_config()
    except Exception as e:
        logger.exception(e)
    else:
        for section in (cfg.numerics, cfg.render, cfg.logging):
            logger.info(f"{type(section).__name__}: {section}")
