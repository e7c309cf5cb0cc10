class Tensor {
    int[][] cross(int[][] p, int[][] q, int n) {
        int[][] acc = new int[n][n];
        int i = 0;
        while (i < n) {
            for (int j = 0; j < n; j++) {
                for (int k = 0; k < n; k++) {
                    acc[i][j] = acc[i][j] + p[i][k] * q[k][j];
                }
            }
            i = i + 1;
        }
        return acc;
    }
}
