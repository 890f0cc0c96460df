"""Command-line surface: argument tree, handlers and user-facing texts."""
