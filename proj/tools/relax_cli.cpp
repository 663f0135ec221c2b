// placeholder until the library modules land
int main() { return 0; }
