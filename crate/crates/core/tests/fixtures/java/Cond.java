class Cond {
    int f(int x) {
        if (x > 0) {
            x = 0;
        }
        return x;
    }
}
