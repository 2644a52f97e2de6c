class Open {
    int a = 1;
    /* this comment never ends
    int b = 2;
}
