def cross(p, q, n):
    acc = [[0] * n for _ in range(n)]
    i = 0
    while i < n:
        for j in range(n):
            for k in range(n):
                acc[i][j] = acc[i][j] + p[i][k] * q[k][j]
        i = i + 1
    return acc
