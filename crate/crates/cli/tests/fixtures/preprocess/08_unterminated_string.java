class Broken {
    String s = "no closing quote; // stays
    int x = 1; // also stays
}
