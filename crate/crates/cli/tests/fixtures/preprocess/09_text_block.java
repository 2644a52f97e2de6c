class Text {
    String t = """
        // inside text block
        /* also inside */
        """; // after
    int n = 0;
}
