class Adder {
    long upTo(int bound) {
        long sum = 0;
        for (int j = 1; j <= bound; j++) {
            sum += j;
        }
        return sum;
    }
}
