def compute(left, right, size):
    out = [[0] * size for _ in range(size)]
    for r in range(size):
        for c in range(size):
            cell = 0
            for t in range(size):
                cell = cell + left[r][t] * right[t][c]
            out[r][c] = cell
    return out
