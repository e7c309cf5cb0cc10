class Golden {
    int term(int n) {
        if (n < 2) {
            return n;
        }
        int left = term(n - 1);
        int right = term(n - 2);
        return left + right;
    }
}
