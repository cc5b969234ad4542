class Branch {
    int g(int x) {
        int y;
        if (x > 1) {
            y = 1;
        } else {
            y = 2;
        }
        return y;
    }
}
