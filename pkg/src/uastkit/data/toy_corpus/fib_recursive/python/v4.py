def term(n):
    if n < 2:
        return n
    left = term(n - 1)
    right = term(n - 2)
    return left + right
