def matching(data, wanted):
    seen = 0
    for item in data:
        if item == wanted:
            seen += 1
    return seen
