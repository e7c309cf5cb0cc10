class Filter {
    int positives(int[] values) {
        int hits = 0;
        for (int v : values) {
            if (v > 0) {
                hits = hits + 1;
            }
        }
        return hits;
    }
}
