class Evens {
    int countEven(int[] xs) {
        int count = 0;
        for (int x : xs) {
            if (x % 2 == 0) {
                count++;
            }
        }
        return count;
    }
}
