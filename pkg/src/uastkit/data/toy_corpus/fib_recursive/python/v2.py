def value(idx):
    if idx <= 1:
        return idx
    return value(idx - 1) + value(idx - 2)
