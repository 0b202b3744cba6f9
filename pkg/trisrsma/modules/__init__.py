# trisrsma/modules/__init__.py
