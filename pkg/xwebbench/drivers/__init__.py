# Backend drivers: the in-process reference engine and a generic HTTP adapter
