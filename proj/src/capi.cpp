extern "C" { int s23_placeholder_(void); int s23_placeholder_(void){return 0;} }
