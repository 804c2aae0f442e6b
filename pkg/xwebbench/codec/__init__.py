# Emission and parsing of the XWeB warehouse documents
