def count_even(xs):
    count = 0
    for x in xs:
        if x % 2 == 0:
            count += 1
    return count
