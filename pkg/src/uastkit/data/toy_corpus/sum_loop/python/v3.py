def up_to(bound):
    sum_val = 0
    for j in range(1, bound + 1):
        sum_val += j
    return sum_val
