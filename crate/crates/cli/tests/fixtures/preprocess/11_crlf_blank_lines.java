class Crlf {

    int a = 1;  
	
    // note
    int b = 2;
}
