from .figures import FigureSpec, SchemaError, build_figure, load_table, render

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "load_table",
    "render",
    "__version__",
]
