// Book chapters are doc-tested here; see book/src.
