class Grid {
    long[][] mul(long[][] m1, long[][] m2, int dim) {
        long[][] res = new long[dim][dim];
        for (int x = 0; x < dim; x++) {
            for (int y = 0; y < dim; y++) {
                for (int z = 0; z < dim; z++) {
                    res[x][y] += m1[x][z] * m2[z][y];
                }
            }
        }
        return res;
    }
}
