def sum_range(count):
    result = 0
    step = 1
    for i in range(0, count, step):
        result = result + i
    return result
