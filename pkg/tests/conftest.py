# Keeping a conftest here puts tests/ on sys.path so the shared oracle
# helpers import as a plain module.
