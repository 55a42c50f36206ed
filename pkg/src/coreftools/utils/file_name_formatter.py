"""This module provides functionality to format file names for converted documents
based on a template."""

from pathvalidate import sanitize_filename


def format_file_name(template: str, doc_id: str = "", genre: str = ""):
    """Format a file name with the given template and parameters.
    Templates may contain ``{DOC}`` and ``{GENRE}`` as placeholders.

    ``{DOC}`` should be in the template to avoid overwriting files when a
    CoNLL file holds several documents. The result is sanitized so that document
    ids like ``a/b`` still give a valid file name.

    :param template: The template to replace document metadata into.
    :param doc_id: The document id.
    :param genre: The document genre, empty if unknown.
    :returns: ``str`` containing the complete file name.
    """
    name = replace_all(template, {"{DOC}": doc_id, "{GENRE}": genre})
    return sanitize_filename(name, replacement_text="_")


def replace_all(text: str, replacements: dict):
    """Replace all occurences of the given dict keys with the given dict values.

    NOTE: Do not use this function if the order in which keys are replaced is relevant.
    For example, if you have a ``replacements`` dict like ``{"house": "home", "om": "em"}``,
    the resulting example for ``"house om"`` will not be ``"home em"`` but ``"heme em"``.

    :param text: The haystack to find and replace in.
    :param replacements: A dict of items to replace, formatted as ``{"find": "replace"}``
    :returns: ``str`` containing the text after replacing.
    """
    for search, replace in replacements.items():
        text = text.replace(search, replace)
    return text
