def below(nums, cap):
    n = 0
    for value in nums:
        if value < cap:
            n += 1
    return n
