class Series {
    int sumRange(int count) {
        int result = 0;
        int step = 1;
        for (int i = 0; i < count; i += step) {
            result = result + i;
        }
        return result;
    }
}
