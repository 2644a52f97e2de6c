import java.util.List;
/* header
   spanning lines */
public class Block {
    int x /* inline */ = 4;
    /* one */ int y = 5; /* two */
    int z = 6; /* opens
    still comment */ int w = 7;
}
