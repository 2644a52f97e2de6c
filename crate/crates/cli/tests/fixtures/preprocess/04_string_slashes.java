public class Urls {
    String url = "http://example.com/path"; // real comment
    String block = "/* not a comment */";
    String both = "a // b /* c */ d";
}
