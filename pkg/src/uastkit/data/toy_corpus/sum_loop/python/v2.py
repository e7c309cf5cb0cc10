def accumulate(limit):
    acc = 0
    k = 0
    while k < limit:
        acc = acc + k
        k = k + 1
    return acc
