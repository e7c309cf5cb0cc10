class Totals {
    int accumulate(int limit) {
        int acc = 0;
        int k = 0;
        while (k < limit) {
            acc = acc + k;
            k = k + 1;
        }
        return acc;
    }
}
