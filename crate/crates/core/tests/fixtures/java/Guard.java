class Guard {
    void g() {
        try {
            risky();
        } catch (Exception e) {
            log(e);
        }
    }
    void risky() {}
    void log(Exception e) {}
}
