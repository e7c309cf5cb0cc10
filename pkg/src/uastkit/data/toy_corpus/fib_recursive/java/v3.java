class Numbers {
    int nth(int position) {
        if (position == 0) {
            return 0;
        }
        if (position == 1) {
            return 1;
        }
        return nth(position - 1) + nth(position - 2);
    }
}
