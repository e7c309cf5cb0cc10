class Survey {
    int matching(int[] data, int wanted) {
        int seen = 0;
        for (int item : data) {
            if (item == wanted) {
                seen += 1;
            }
        }
        return seen;
    }
}
