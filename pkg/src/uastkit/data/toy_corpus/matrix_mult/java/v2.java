class Product {
    int[][] compute(int[][] left, int[][] right, int size) {
        int[][] out = new int[size][size];
        for (int r = 0; r < size; r++) {
            for (int c = 0; c < size; c++) {
                int cell = 0;
                for (int t = 0; t < size; t++) {
                    cell = cell + left[r][t] * right[t][c];
                }
                out[r][c] = cell;
            }
        }
        return out;
    }
}
