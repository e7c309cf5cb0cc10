def mul(m1, m2, dim):
    res = [[0] * dim for _ in range(dim)]
    for x in range(dim):
        for y in range(dim):
            for z in range(dim):
                res[x][y] += m1[x][z] * m2[z][y]
    return res
