class Tally {
    int below(int[] nums, int cap) {
        int n = 0;
        for (int value : nums) {
            if (value < cap) {
                n++;
            }
        }
        return n;
    }
}
