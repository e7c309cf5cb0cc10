def positives(values):
    hits = 0
    for v in values:
        if v > 0:
            hits = hits + 1
    return hits
